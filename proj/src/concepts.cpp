#include "nclust/concepts.hpp"

#include <algorithm>
#include <array>
#include <cstring>
#include <span>

namespace nclust {

namespace {

// Fixed-width bitset over the attribute side, width decided at runtime.
struct Bits {
    std::vector<std::uint64_t> w;

    explicit Bits(std::size_t nbits = 0) : w((nbits + 63) / 64, 0) {}
    void set(std::size_t i) { w[i >> 6] |= 1ull << (i & 63); }
    bool test(std::size_t i) const { return (w[i >> 6] >> (i & 63)) & 1; }
    void fill_all(std::size_t nbits) {
        std::fill(w.begin(), w.end(), ~0ull);
        if (nbits & 63)
            w.back() = (1ull << (nbits & 63)) - 1;
    }
    void and_with(const Bits& o) {
        for (std::size_t i = 0; i < w.size(); ++i)
            w[i] &= o.w[i];
    }
    bool contains(const Bits& o) const { // o subset of this
        for (std::size_t i = 0; i < w.size(); ++i)
            if ((o.w[i] & ~w[i]) != 0)
                return false;
        return true;
    }
    // equal when restricted to bits < j
    bool equal_below(const Bits& o, std::size_t j) const {
        std::size_t full = j >> 6;
        for (std::size_t i = 0; i < full; ++i)
            if (w[i] != o.w[i])
                return false;
        if (j & 63) {
            std::uint64_t mask = (1ull << (j & 63)) - 1;
            if ((w[full] & mask) != (o.w[full] & mask))
                return false;
        }
        return true;
    }
    bool operator==(const Bits& o) const { return w == o.w; }
};

struct DyadicTable {
    std::size_t n_objs = 0;
    std::size_t n_attrs = 0;
    std::vector<Bits> rows; // per object, over attributes
    bool transposed = false;
};

DyadicTable load_table(const NContext& ctx, bool transpose) {
    DyadicTable t;
    t.transposed = transpose;
    int obj_mode = transpose ? 1 : 0;
    int attr_mode = 1 - obj_mode;
    t.n_objs = ctx.universe_size(obj_mode);
    t.n_attrs = ctx.universe_size(attr_mode);
    t.rows.assign(t.n_objs, Bits(t.n_attrs));
    for (std::size_t i = 0; i < ctx.tuple_count(); ++i) {
        auto tp = ctx.tuple(i);
        t.rows[tp[obj_mode]].set(tp[attr_mode]);
    }
    return t;
}

// closure of an attribute set: extent = objects whose row contains B, intent =
// intersection of those rows (full set when the extent is empty).
void close(const DyadicTable& t, const Bits& b, std::vector<Id>& extent, Bits& intent) {
    extent.clear();
    intent.fill_all(t.n_attrs);
    for (std::size_t g = 0; g < t.n_objs; ++g) {
        if (t.rows[g].contains(b)) {
            extent.push_back(static_cast<Id>(g));
            intent.and_with(t.rows[g]);
        }
    }
}

std::vector<Id> bits_to_ids(const Bits& b, std::size_t nbits) {
    std::vector<Id> out;
    for (std::size_t i = 0; i < nbits; ++i)
        if (b.test(i))
            out.push_back(static_cast<Id>(i));
    return out;
}

} // namespace

std::vector<NConcept> mine_dyadic_concepts(const NContext& ctx, ConceptOptions opts) {
    if (ctx.arity() != 2)
        throw ArityError("dyadic concept mining requires arity 2");
    std::size_t g = ctx.universe_size(0), m = ctx.universe_size(1);
    if (std::min(g, m) > opts.limit && !opts.override_guard)
        throw SizeGuardError("context min dimension " + std::to_string(std::min(g, m)) +
                             " exceeds concept-mining guard " + std::to_string(opts.limit) +
                             "; pass the override to proceed");
    // Enumerate over the smaller side as attributes.
    bool transpose = m > g;
    DyadicTable t = load_table(ctx, transpose);

    std::vector<NConcept> out;
    std::vector<Id> extent;
    Bits intent(t.n_attrs);
    auto emit = [&](const std::vector<Id>& ext, const Bits& itt) {
        NConcept c;
        c.components.resize(2);
        std::vector<Id> attrs = bits_to_ids(itt, t.n_attrs);
        if (!t.transposed) {
            c.components[0] = {0, ext};
            c.components[1] = {1, attrs};
        } else {
            c.components[0] = {0, attrs};
            c.components[1] = {1, ext};
        }
        out.push_back(std::move(c));
    };

    // NextClosure over intents in lectic order.
    Bits b(t.n_attrs);
    close(t, b, extent, intent);
    b = intent;
    emit(extent, b);
    Bits cand(t.n_attrs), cintent(t.n_attrs);
    std::vector<Id> cext;
    while (true) {
        bool advanced = false;
        for (std::size_t j = t.n_attrs; j-- > 0;) {
            if (b.test(j))
                continue;
            cand = b;
            // drop bits >= j, add j
            for (std::size_t k = j + 1; k < t.n_attrs; ++k)
                if (cand.test(k))
                    cand.w[k >> 6] &= ~(1ull << (k & 63));
            cand.set(j);
            close(t, cand, cext, cintent);
            if (cintent.equal_below(cand, j)) {
                b = cintent;
                emit(cext, b);
                advanced = true;
                break;
            }
        }
        if (!advanced)
            break;
    }

    std::sort(out.begin(), out.end(), [](const NConcept& a, const NConcept& b2) {
        return a.components[0].members < b2.components[0].members;
    });
    return out;
}

std::vector<NConcept> mine_nadic_concepts_bruteforce(const NContext& ctx, NadicOptions opts) {
    const int n = ctx.arity();
    for (int i = 0; i < n; ++i) {
        if (ctx.universe_size(i) > opts.per_mode_limit && !opts.override_guard)
            throw SizeGuardError("mode " + std::to_string(i) + " size " +
                                 std::to_string(ctx.universe_size(i)) +
                                 " exceeds brute-force guard " +
                                 std::to_string(opts.per_mode_limit));
    }
    if (n == 1) {
        // the single maximal "box" is the set of all elements appearing in Y
        ElementSet all{0, {}};
        for (std::size_t t = 0; t < ctx.tuple_count(); ++t)
            all.members.push_back(ctx.tuple(t)[0]);
        sort_unique(all.members);
        if (all.empty())
            return {};
        return {NConcept{{all}}};
    }

    // Pivot on the largest mode; enumerate subsets of the remaining modes.
    int pivot = 0;
    for (int i = 1; i < n; ++i)
        if (ctx.universe_size(i) > ctx.universe_size(pivot))
            pivot = i;

    std::vector<int> rest;
    for (int i = 0; i < n; ++i)
        if (i != pivot)
            rest.push_back(i);

    // Dense membership cube for O(1) cell tests (guarded sizes keep it small).
    std::vector<std::size_t> stride(n, 1);
    for (int i = n - 2; i >= 0; --i)
        stride[i] = stride[i + 1] * ctx.universe_size(i + 1);
    std::vector<std::uint8_t> cube(stride[0] * ctx.universe_size(0), 0);
    for (std::size_t t = 0; t < ctx.tuple_count(); ++t) {
        auto tp = ctx.tuple(t);
        std::size_t off = 0;
        for (int i = 0; i < n; ++i)
            off += stride[i] * tp[i];
        cube[off] = 1;
    }

    auto box_full = [&](const Box& box) {
        std::vector<std::size_t> pos(n, 0);
        while (true) {
            std::size_t off = 0;
            for (int i = 0; i < n; ++i)
                off += stride[i] * box.components[i].members[pos[i]];
            if (!cube[off])
                return false;
            int i = n - 1;
            while (i >= 0 && ++pos[i] == box.components[i].members.size()) {
                pos[i] = 0;
                --i;
            }
            if (i < 0)
                return true;
        }
    };
    // Elements of `mode` whose singleton extension keeps the box full.
    auto max_component = [&](const Box& box, int mode) {
        ElementSet out{mode, {}};
        Box probe = box;
        for (Id x = 0; x < ctx.universe_size(mode); ++x) {
            probe.components[mode] = ElementSet{mode, {x}};
            if (box_full(probe))
                out.members.push_back(x);
        }
        return out;
    };

    std::vector<NConcept> found;
    std::vector<std::size_t> counts(rest.size());
    for (std::size_t k = 0; k < rest.size(); ++k)
        counts[k] = ctx.universe_size(rest[k]);

    std::vector<std::uint64_t> masks(rest.size(), 1); // current subset mask per rest mode
    // Iterate the cartesian product of non-empty subsets of each rest mode.
    std::vector<std::uint64_t> limit(rest.size());
    for (std::size_t k = 0; k < rest.size(); ++k)
        limit[k] = 1ull << counts[k];
    while (true) {
        Box box;
        box.components.assign(n, {});
        for (int i = 0; i < n; ++i)
            box.components[i].mode = i;
        for (std::size_t k = 0; k < rest.size(); ++k) {
            for (std::size_t x = 0; x < counts[k]; ++x)
                if (masks[k] >> x & 1)
                    box.components[rest[k]].members.push_back(static_cast<Id>(x));
        }
        ElementSet piv = max_component(box, pivot);
        if (!piv.empty()) {
            box.components[pivot] = piv;
            bool maximal = true;
            for (std::size_t k = 0; k < rest.size() && maximal; ++k)
                maximal = max_component(box, rest[k]).members == box.components[rest[k]].members;
            if (maximal)
                found.push_back(NConcept{box.components});
        }
        // next subset combination
        std::size_t k = 0;
        while (k < rest.size()) {
            if (++masks[k] < limit[k])
                break;
            masks[k] = 1;
            ++k;
        }
        if (k == rest.size())
            break;
    }
    std::sort(found.begin(), found.end(), [](const NConcept& a, const NConcept& b) {
        for (std::size_t i = 0; i < a.components.size(); ++i) {
            if (a.components[i].members != b.components[i].members)
                return a.components[i].members < b.components[i].members;
        }
        return false;
    });
    found.erase(std::unique(found.begin(), found.end()), found.end());
    return found;
}

bool covered_by(const NConcept& concept_, const std::vector<ElementSet>& box) {
    if (concept_.components.size() != box.size())
        throw ArityError("concept/box arity mismatch");
    for (std::size_t i = 0; i < box.size(); ++i)
        if (!is_subset(concept_.components[i].members, box[i].members))
            return false;
    return true;
}

std::vector<ElementSet> concept_cliques(const NContext& ctx, ConceptOptions opts) {
    if (ctx.arity() != 2)
        throw ArityError("clique extraction requires arity 2");
    if (ctx.universe_size(0) != ctx.universe_size(1))
        throw SchemaError("clique extraction requires a square context");
    // Relation must be reflexive and symmetric.
    for (Id g = 0; g < ctx.universe_size(0); ++g) {
        std::array<Id, 2> diag{g, g};
        if (!ctx.has_tuple(std::span<const Id>(diag.data(), 2)))
            throw SchemaError("relation is not reflexive: missing (" +
                              ctx.universe(0).label(g) + "," + ctx.universe(0).label(g) + ")");
    }
    for (std::size_t t = 0; t < ctx.tuple_count(); ++t) {
        auto tp = ctx.tuple(t);
        std::array<Id, 2> sym{tp[1], tp[0]};
        if (!ctx.has_tuple(std::span<const Id>(sym.data(), 2)))
            throw SchemaError("relation is not symmetric");
    }
    std::vector<ElementSet> cliques;
    for (const auto& c : mine_dyadic_concepts(ctx, opts))
        if (c.components[0].members == c.components[1].members && !c.components[0].empty())
            cliques.push_back(c.components[0]);
    return cliques;
}

} // namespace nclust

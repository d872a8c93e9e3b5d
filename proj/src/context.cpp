#include "nclust/context.hpp"

#include <algorithm>
#include <cmath>

namespace nclust {

bool contains(const std::vector<Id>& sorted, Id x) {
    return std::binary_search(sorted.begin(), sorted.end(), x);
}

bool is_subset(const std::vector<Id>& a, const std::vector<Id>& b) {
    return std::includes(b.begin(), b.end(), a.begin(), a.end());
}

std::vector<Id> set_intersect(const std::vector<Id>& a, const std::vector<Id>& b) {
    std::vector<Id> out;
    out.reserve(std::min(a.size(), b.size()));
    std::set_intersection(a.begin(), a.end(), b.begin(), b.end(), std::back_inserter(out));
    return out;
}

std::vector<Id> set_union(const std::vector<Id>& a, const std::vector<Id>& b) {
    std::vector<Id> out;
    out.reserve(a.size() + b.size());
    std::set_union(a.begin(), a.end(), b.begin(), b.end(), std::back_inserter(out));
    return out;
}

bool intersects(const std::vector<Id>& a, const std::vector<Id>& b) {
    auto ia = a.begin();
    auto ib = b.begin();
    while (ia != a.end() && ib != b.end()) {
        if (*ia < *ib)
            ++ia;
        else if (*ib < *ia)
            ++ib;
        else
            return true;
    }
    return false;
}

void sort_unique(std::vector<Id>& v) {
    std::sort(v.begin(), v.end());
    v.erase(std::unique(v.begin(), v.end()), v.end());
}

std::uint64_t Box::volume() const {
    std::uint64_t v = 1;
    for (const auto& c : components) {
        v *= c.members.size();
        if (v == 0)
            return 0;
    }
    return components.empty() ? 0 : v;
}

double Density::rho() const {
    if (!has_rho())
        throw std::logic_error("rho undefined for empty box");
    return static_cast<double>(mass) / static_cast<double>(vol);
}

bool rho_at_least(std::uint64_t mass, std::uint64_t vol, std::int64_t num, std::uint64_t den) {
    if (num <= 0)
        return true;
    return static_cast<unsigned __int128>(mass) * den >=
           static_cast<unsigned __int128>(num) * vol;
}

Rational Rational::from_decimal(std::string_view text) {
    Rational r;
    std::size_t i = 0;
    bool neg = false;
    if (i < text.size() && (text[i] == '+' || text[i] == '-')) {
        neg = text[i] == '-';
        ++i;
    }
    std::int64_t whole = 0;
    bool any = false;
    while (i < text.size() && text[i] >= '0' && text[i] <= '9') {
        whole = whole * 10 + (text[i] - '0');
        ++i;
        any = true;
    }
    std::int64_t frac = 0;
    std::uint64_t den = 1;
    if (i < text.size() && (text[i] == '.' || text[i] == ',')) {
        ++i;
        while (i < text.size() && text[i] >= '0' && text[i] <= '9') {
            if (den <= 100000000000000000ull) {
                frac = frac * 10 + (text[i] - '0');
                den *= 10;
            }
            ++i;
            any = true;
        }
    }
    if (!any || i != text.size())
        throw std::invalid_argument("not a decimal number: " + std::string(text));
    r.num = whole * static_cast<std::int64_t>(den) + frac;
    if (neg)
        r.num = -r.num;
    r.den = den;
    return r;
}

Id Interner::intern(std::string_view label) {
    auto it = index_.find(std::string(label));
    if (it != index_.end())
        return it->second;
    Id id = static_cast<Id>(labels_.size());
    labels_.emplace_back(label);
    index_.emplace(labels_.back(), id);
    return id;
}

std::optional<Id> Interner::find(std::string_view label) const {
    auto it = index_.find(std::string(label));
    if (it == index_.end())
        return std::nullopt;
    return it->second;
}

int NContext::checked_mode(int mode) const {
    if (mode < 0 || mode >= arity_)
        throw InvalidElementError("mode index " + std::to_string(mode) + " out of range");
    return mode;
}

bool NContext::has_tuple(std::span<const Id> t) const {
    if (static_cast<int>(t.size()) != arity_)
        throw ArityError("tuple arity mismatch");
    const std::size_t n = tuple_count();
    std::size_t lo = 0, hi = n;
    while (lo < hi) {
        std::size_t mid = (lo + hi) / 2;
        const Id* p = tuples_.data() + mid * arity_;
        int cmp = 0;
        for (int i = 0; i < arity_; ++i) {
            if (p[i] != t[i]) {
                cmp = p[i] < t[i] ? -1 : 1;
                break;
            }
        }
        if (cmp < 0)
            lo = mid + 1;
        else if (cmp > 0)
            hi = mid;
        else
            return true;
    }
    return false;
}

const std::vector<std::uint32_t>& NContext::tuples_of(int mode, Id x) const {
    checked_mode(mode);
    if (x >= universes_[mode].size())
        throw InvalidElementError("element id " + std::to_string(x) + " out of range for mode " +
                                  std::to_string(mode));
    return index_[mode][x];
}

ElementSet NContext::galois(const ElementSet& a) const {
    if (arity_ != 2)
        throw ArityError("galois requires a dyadic context");
    const int side = checked_mode(a.mode);
    const int other = 1 - side;
    ElementSet out;
    out.mode = other;
    if (a.members.empty()) {
        out.members.resize(universes_[other].size());
        for (Id i = 0; i < out.members.size(); ++i)
            out.members[i] = i;
        return out;
    }
    bool first = true;
    for (Id x : a.members) {
        std::vector<Id> row;
        for (std::uint32_t t : tuples_of(side, x))
            row.push_back(tuples_[t * 2 + other]);
        sort_unique(row);
        if (first) {
            out.members = std::move(row);
            first = false;
        } else {
            out.members = set_intersect(out.members, row);
        }
        if (out.members.empty())
            break;
    }
    return out;
}

ElementSet NContext::closure(const ElementSet& a) const {
    return galois(galois(a));
}

std::vector<std::vector<Id>> NContext::prime_element(int mode, Id x) const {
    std::vector<std::vector<Id>> out;
    for (std::uint32_t t : tuples_of(mode, x)) {
        std::vector<Id> rest;
        rest.reserve(arity_ - 1);
        auto tup = tuple(t);
        for (int i = 0; i < arity_; ++i)
            if (i != mode)
                rest.push_back(tup[i]);
        out.push_back(std::move(rest));
    }
    std::sort(out.begin(), out.end());
    out.erase(std::unique(out.begin(), out.end()), out.end());
    return out;
}

ElementSet NContext::prime_rest(int mode, std::span<const Id> partial) const {
    checked_mode(mode);
    if (static_cast<int>(partial.size()) != arity_ - 1)
        throw ArityError("partial tuple must fix all modes but one");
    // Scan the tuple list of the partial's rarest element.
    std::size_t best_len = SIZE_MAX;
    int best_mode = -1;
    Id best_elem = 0;
    for (int i = 0, j = 0; i < arity_; ++i) {
        if (i == mode)
            continue;
        Id x = partial[j++];
        if (x >= universes_[i].size())
            throw InvalidElementError("element id out of range in partial tuple");
        std::size_t len = index_[i][x].size();
        if (len < best_len) {
            best_len = len;
            best_mode = i;
            best_elem = x;
        }
    }
    ElementSet out;
    out.mode = mode;
    if (best_mode < 0) { // arity 1: partial is empty, every tuple matches
        for (std::size_t t = 0; t < tuple_count(); ++t)
            out.members.push_back(tuples_[t]);
        sort_unique(out.members);
        return out;
    }
    for (std::uint32_t t : index_[best_mode][best_elem]) {
        const Id* p = tuples_.data() + static_cast<std::size_t>(t) * arity_;
        bool match = true;
        for (int i = 0, j = 0; i < arity_; ++i) {
            if (i == mode)
                continue;
            if (p[i] != partial[j++]) {
                match = false;
                break;
            }
        }
        if (match)
            out.members.push_back(p[mode]);
    }
    sort_unique(out.members);
    return out;
}

void NContext::check_box(const Box& box) const {
    if (static_cast<int>(box.components.size()) != arity_)
        throw ArityError("box arity does not match context");
    for (int i = 0; i < arity_; ++i) {
        if (box.components[i].mode != i)
            throw ArityError("box component modes out of order");
        for (Id x : box.components[i].members)
            if (x >= universes_[i].size())
                throw InvalidElementError("box references element out of range");
    }
}

Density NContext::box_density_by_cells(const Box& box) const {
    check_box(box);
    Density d;
    d.vol = box.volume();
    if (d.vol == 0)
        return d;
    std::vector<Id> cell(arity_);
    std::vector<std::size_t> pos(arity_, 0);
    while (true) {
        for (int i = 0; i < arity_; ++i)
            cell[i] = box.components[i].members[pos[i]];
        if (has_tuple(cell))
            ++d.mass;
        int i = arity_ - 1;
        while (i >= 0 && ++pos[i] == box.components[i].members.size()) {
            pos[i] = 0;
            --i;
        }
        if (i < 0)
            break;
    }
    return d;
}

// Anchor mode for the tuple-scan strategy: the mode whose members' tuple
// lists sum smallest (the box's rarest side in the relation).
static std::uint64_t anchor_cost(const std::vector<std::vector<std::vector<std::uint32_t>>>& index,
                                 const Box& box, int arity, int& anchor) {
    std::uint64_t best = UINT64_MAX;
    anchor = 0;
    for (int i = 0; i < arity; ++i) {
        std::uint64_t cost = 0;
        for (Id x : box.components[i].members)
            cost += index[i][x].size();
        if (cost < best) {
            best = cost;
            anchor = i;
        }
    }
    return best;
}

Density NContext::box_density_by_tuples(const Box& box) const {
    check_box(box);
    Density d;
    d.vol = box.volume();
    if (d.vol == 0)
        return d;
    int bm = 0;
    anchor_cost(index_, box, arity_, bm);
    // Each in-box tuple has exactly one value at position bm, so scanning the
    // distinct members' lists counts it once.
    for (Id x : box.components[bm].members) {
        for (std::uint32_t t : index_[bm][x]) {
            const Id* p = tuples_.data() + static_cast<std::size_t>(t) * arity_;
            bool inside = true;
            for (int i = 0; i < arity_; ++i) {
                if (i == bm)
                    continue;
                if (!contains(box.components[i].members, p[i])) {
                    inside = false;
                    break;
                }
            }
            if (inside)
                ++d.mass;
        }
    }
    return d;
}

Density NContext::box_density(const Box& box) const {
    check_box(box);
    if (box.volume() == 0)
        return {};
    int bm = 0;
    std::uint64_t scan_cost = anchor_cost(index_, box, arity_, bm);
    if (box.volume() < scan_cost)
        return box_density_by_cells(box);
    return box_density_by_tuples(box);
}

void NContext::validate() const {
    const std::size_t n = tuple_count();
    for (std::size_t t = 0; t < n; ++t) {
        auto tp = tuple(t);
        for (int i = 0; i < arity_; ++i)
            if (tp[i] >= universes_[i].size())
                throw InvalidElementError("tuple references out-of-range element");
        if (t > 0) {
            auto prev = tuple(t - 1);
            if (std::lexicographical_compare(tp.begin(), tp.end(), prev.begin(), prev.end()) ||
                std::equal(tp.begin(), tp.end(), prev.begin()))
                throw std::logic_error("tuples not sorted/unique");
        }
    }
    for (int i = 0; i < arity_; ++i) {
        std::size_t total = 0;
        for (Id x = 0; x < universes_[i].size(); ++x) {
            const auto& lst = index_[i][x];
            total += lst.size();
            for (std::size_t k = 0; k < lst.size(); ++k) {
                if (k > 0 && lst[k - 1] >= lst[k])
                    throw std::logic_error("inverted index not sorted");
                if (tuple(lst[k])[i] != x)
                    throw std::logic_error("inverted index inconsistent with tuples");
            }
        }
        if (total != n)
            throw std::logic_error("inverted index does not reconstruct the tuple set");
    }
}

ContextBuilder::ContextBuilder(int arity, std::vector<std::string> mode_names)
    : arity_(arity), mode_names_(std::move(mode_names)) {
    if (arity_ < 1)
        throw ArityError("context arity must be at least 1");
    if (mode_names_.empty()) {
        for (int i = 0; i < arity_; ++i)
            mode_names_.push_back("mode" + std::to_string(i));
    }
    if (static_cast<int>(mode_names_.size()) != arity_)
        throw ArityError("mode name count does not match arity");
    universes_.resize(arity_);
}

static std::uint64_t hash_ids(std::span<const Id> ids) {
    std::uint64_t h = 1469598103934665603ull;
    for (Id x : ids) {
        h ^= x;
        h *= 1099511628211ull;
    }
    return h;
}

bool ContextBuilder::add(std::span<const std::string> labels) {
    if (static_cast<int>(labels.size()) != arity_)
        throw ArityError("tuple arity mismatch");
    std::vector<Id> ids(arity_);
    for (int i = 0; i < arity_; ++i)
        ids[i] = universes_[i].intern(labels[i]);
    return add_ids(ids);
}

bool ContextBuilder::add_ids(std::span<const Id> ids) {
    if (static_cast<int>(ids.size()) != arity_)
        throw ArityError("tuple arity mismatch");
    std::uint64_t h = hash_ids(ids);
    auto& bucket = seen_[h];
    for (std::uint32_t idx : bucket) {
        const Id* p = flat_.data() + static_cast<std::size_t>(idx) * arity_;
        if (std::equal(p, p + arity_, ids.begin()))
            return false; // duplicate collapses silently: Y is a set
    }
    bucket.push_back(static_cast<std::uint32_t>(count_));
    flat_.insert(flat_.end(), ids.begin(), ids.end());
    ++count_;
    return true;
}

NContext ContextBuilder::build() const {
    NContext ctx;
    ctx.arity_ = arity_;
    ctx.mode_names_ = mode_names_;
    ctx.universes_ = universes_;

    std::vector<std::uint32_t> order(count_);
    for (std::uint32_t i = 0; i < count_; ++i)
        order[i] = i;
    std::sort(order.begin(), order.end(), [&](std::uint32_t a, std::uint32_t b) {
        const Id* pa = flat_.data() + static_cast<std::size_t>(a) * arity_;
        const Id* pb = flat_.data() + static_cast<std::size_t>(b) * arity_;
        return std::lexicographical_compare(pa, pa + arity_, pb, pb + arity_);
    });
    ctx.tuples_.reserve(flat_.size());
    for (std::uint32_t i : order) {
        const Id* p = flat_.data() + static_cast<std::size_t>(i) * arity_;
        ctx.tuples_.insert(ctx.tuples_.end(), p, p + arity_);
    }
    ctx.index_.resize(arity_);
    for (int m = 0; m < arity_; ++m)
        ctx.index_[m].resize(universes_[m].size());
    for (std::size_t t = 0; t < count_; ++t) {
        const Id* p = ctx.tuples_.data() + t * arity_;
        for (int m = 0; m < arity_; ++m)
            ctx.index_[m][p[m]].push_back(static_cast<std::uint32_t>(t));
    }
    return ctx;
}

} // namespace nclust

#include "nclust/nclustering.hpp"

#include <algorithm>
#include <cmath>

#ifdef _OPENMP
#include <omp.h>
#endif

#include "nclust/quality.hpp"

namespace nclust {

double NCluster::rho_float64() const {
    double r = static_cast<double>(mass);
    for (const auto& c : components)
        r /= static_cast<double>(c.members.size());
    return r;
}

std::size_t OnlineMiner::VecHash::operator()(const std::vector<Id>& v) const {
    std::size_t h = 1469598103934665603ull;
    for (Id x : v) {
        h ^= x;
        h *= 1099511628211ull;
    }
    return h;
}

OnlineMiner::OnlineMiner(int arity, std::vector<std::string> mode_names)
    : arity_(arity), builder_(arity, std::move(mode_names)) {
    sets_.resize(arity_);
    if (arity_ == 2)
        dense_key_to_set_.resize(2);
    else
        key_to_set_.resize(arity_);
}

bool OnlineMiner::add(std::span<const std::string> labels) {
    if (static_cast<int>(labels.size()) != arity_)
        throw ArityError("tuple arity mismatch");
    std::vector<Id> ids(arity_);
    for (int i = 0; i < arity_; ++i)
        ids[i] = builder_.intern(i, labels[i]);
    return add_ids(ids);
}

bool OnlineMiner::add_ids(std::span<const Id> ids) {
    if (!builder_.add_ids(ids)) {
        ++stats_.duplicates_skipped;
        return false;
    }
    ++stats_.tuples_consumed;

    RawCluster rc;
    rc.generator.assign(ids.begin(), ids.end());
    rc.set_ids.resize(arity_);
    if (arity_ == 2) {
        // PrimesOA / PrimesAO as dense tables: the prime set for mode i is
        // keyed by the single element of the opposite mode.
        for (int mode = 0; mode < 2; ++mode) {
            Id key = ids[1 - mode];
            auto& table = dense_key_to_set_[mode];
            if (key >= table.size())
                table.resize(key + 1, -1);
            if (table[key] < 0) {
                table[key] = static_cast<std::int64_t>(sets_[mode].size());
                sets_[mode].emplace_back();
            }
            auto set_id = static_cast<std::uint32_t>(table[key]);
            sets_[mode][set_id].push_back(ids[mode]);
            stats_.index_bytes += sizeof(Id);
            rc.set_ids[mode] = set_id;
            ++stats_.index_updates;
        }
    } else {
        std::vector<Id> key(arity_ - 1);
        for (int mode = 0; mode < arity_; ++mode) {
            for (int i = 0, j = 0; i < arity_; ++i)
                if (i != mode)
                    key[j++] = ids[i];
            auto [it, inserted] =
                key_to_set_[mode].try_emplace(key, static_cast<std::uint32_t>(sets_[mode].size()));
            if (inserted) {
                sets_[mode].emplace_back();
                stats_.index_bytes += sizeof(Id) * key.size();
            }
            sets_[mode][it->second].push_back(ids[mode]);
            stats_.index_bytes += sizeof(Id);
            rc.set_ids[mode] = it->second;
            ++stats_.index_updates;
        }
    }
    raw_.push_back(std::move(rc));
    return true;
}

void seed(OnlineMiner& miner, const std::vector<std::vector<std::string>>& generator_labels) {
    for (const auto& g : generator_labels)
        miner.add(g);
}

namespace {

ClusterCollection finalize_impl(const OnlineMiner& miner, const NContext& ctx, bool parallel) {
    const int n = miner.arity();
    if (ctx.arity() != n)
        throw ArityError("context arity does not match miner");
    const auto& raw = miner.raw_clusters();

    std::vector<std::uint32_t> order(raw.size());
    for (std::uint32_t i = 0; i < order.size(); ++i)
        order[i] = i;
    std::sort(order.begin(), order.end(), [&](std::uint32_t a, std::uint32_t b) {
        return raw[a].generator < raw[b].generator;
    });

    ClusterCollection cc;
    cc.arity = n;
    cc.generated = raw.size();
    cc.clusters.resize(raw.size());

    auto materialize = [&](std::size_t k) {
        const auto& rc = raw[order[k]];
        NCluster& out = cc.clusters[k];
        out.generator = rc.generator;
        out.components.resize(n);
        Box box;
        box.components.resize(n);
        for (int i = 0; i < n; ++i) {
            ElementSet comp{i, miner.prime_set(i, rc.set_ids[i])};
            sort_unique(comp.members);
            box.components[i] = comp;
            out.components[i] = std::move(comp);
        }
        Density d = ctx.box_density(box);
        out.mass = d.mass;
        out.vol = d.vol;
        out.is_concept = (n == 2 && d.vol > 0 && d.mass == d.vol);
    };

    if (parallel) {
#ifdef _OPENMP
#pragma omp parallel for schedule(dynamic, 64)
#endif
        for (std::ptrdiff_t k = 0; k < static_cast<std::ptrdiff_t>(raw.size()); ++k)
            materialize(static_cast<std::size_t>(k));
    } else {
        for (std::size_t k = 0; k < raw.size(); ++k)
            materialize(k);
    }
    return cc;
}

std::uint64_t components_hash(const NCluster& c) {
    std::uint64_t h = 1469598103934665603ull;
    for (const auto& comp : c.components) {
        h ^= comp.members.size() + 0x9e3779b9;
        h *= 1099511628211ull;
        for (Id x : comp.members) {
            h ^= x;
            h *= 1099511628211ull;
        }
    }
    return h;
}

} // namespace

ClusterCollection finalize(const OnlineMiner& miner, const NContext& ctx) {
    return finalize_impl(miner, ctx, true);
}

ClusterCollection finalize_serial(const OnlineMiner& miner, const NContext& ctx) {
    return finalize_impl(miner, ctx, false);
}

ClusterCollection deduplicate(const ClusterCollection& cc) {
    ClusterCollection out;
    out.arity = cc.arity;
    out.generated = cc.generated;
    std::unordered_map<std::uint64_t, std::vector<std::uint32_t>> buckets;
    buckets.reserve(cc.clusters.size());
    for (std::size_t k = 0; k < cc.clusters.size(); ++k) {
        const NCluster& c = cc.clusters[k];
        auto& bucket = buckets[components_hash(c)];
        bool dup = false;
        for (std::uint32_t j : bucket) {
            if (out.clusters[j].components == c.components) {
                dup = true;
                break;
            }
        }
        if (!dup) {
            bucket.push_back(static_cast<std::uint32_t>(out.clusters.size()));
            out.clusters.push_back(c);
        }
    }
    return out;
}

ClusterCollection filter_density(const ClusterCollection& cc, Rational rho_min) {
    if (rho_min.num < 0 || static_cast<std::uint64_t>(rho_min.num) > rho_min.den)
        throw std::invalid_argument("rho_min must lie in [0, 1]");
    ClusterCollection out;
    out.arity = cc.arity;
    out.generated = cc.generated;
    for (const auto& c : cc.clusters)
        if (rho_at_least(c.mass, c.vol, rho_min.num, rho_min.den))
            out.clusters.push_back(c);
    return out;
}

ClusterCollection filter_density_float64(const ClusterCollection& cc, double threshold) {
    if (threshold < 0.0 || threshold > 1.0 + 1e-9)
        throw std::invalid_argument("threshold must lie in [0, 1]");
    ClusterCollection out;
    out.arity = cc.arity;
    out.generated = cc.generated;
    for (const auto& c : cc.clusters)
        if (c.rho_float64() >= threshold)
            out.clusters.push_back(c);
    return out;
}

std::uint64_t cluster_cut(const NCluster& c, const NContext& ctx) {
    if (ctx.arity() != 2 || c.components.size() != 2)
        throw ArityError("weak-community cut requires a dyadic context");
    // cut = sum over members of (degree - in-box incidences), both modes;
    // equivalently total member degree minus 2 * mass.
    std::uint64_t degsum = 0;
    for (int mode = 0; mode < 2; ++mode)
        for (Id x : c.components[mode].members)
            degsum += ctx.tuples_of(mode, x).size();
    return degsum - 2 * c.mass;
}

bool weak_community_test(const NCluster& c, const NContext& ctx) {
    // rho >= cut / (2 vol)  <=>  2 mass >= cut
    return 2 * c.mass >= cluster_cut(c, ctx);
}

ClusterCollection filter_weak(const ClusterCollection& cc, const NContext& ctx) {
    ClusterCollection out;
    out.arity = cc.arity;
    out.generated = cc.generated;
    for (const auto& c : cc.clusters) {
        if (weak_community_test(c, ctx)) {
            out.clusters.push_back(c);
            out.clusters.back().passes_weak = true;
        }
    }
    return out;
}

std::vector<GridPoint> default_grid() {
    std::vector<GridPoint> grid;
    for (int k = 0; k <= 20; ++k) {
        GridPoint p;
        p.exact = Rational{k, 20};
        p.f64 = static_cast<double>(k) * 0.05;
        grid.push_back(p);
    }
    return grid;
}

GridPoint grid_point_from_decimal(std::string_view text) {
    GridPoint p;
    p.exact = Rational::from_decimal(text);
    p.f64 = p.exact.value();
    return p;
}

bool concept_covered(const NConcept& concept_, const NCluster& cluster) {
    return covered_by(concept_, cluster.components);
}

SweepReport sweep(const NContext&, const ClusterCollection& finalized,
                  std::span<const GridPoint> grid, RhoSemantics semantics,
                  const std::vector<NConcept>& concepts) {
    for (std::size_t i = 1; i < grid.size(); ++i)
        if (grid[i].f64 < grid[i - 1].f64)
            throw std::invalid_argument("rho grid must ascend");

    std::vector<const NConcept*> nontrivial;
    for (const auto& c : concepts)
        if (c.nontrivial())
            nontrivial.push_back(&c);

    ClusterCollection unique = deduplicate(finalized);

    SweepReport report;
    report.nontrivial_concepts = nontrivial.size();
    for (const auto& point : grid) {
        auto passes = [&](const NCluster& c) {
            return semantics == RhoSemantics::exact
                       ? rho_at_least(c.mass, c.vol, point.exact.num, point.exact.den)
                       : c.rho_float64() >= point.f64;
        };
        SweepRow row;
        row.rho = point.exact.value();
        for (const auto& c : finalized.clusters)
            if (passes(c))
                ++row.generated_clusters;
        std::vector<const NCluster*> kept;
        for (const auto& c : unique.clusters)
            if (passes(c))
                kept.push_back(&c);
        row.unique_clusters = kept.size();
        std::uint64_t covered = 0;
#ifdef _OPENMP
#pragma omp parallel for schedule(dynamic, 16) reduction(+ : covered)
#endif
        for (std::ptrdiff_t i = 0; i < static_cast<std::ptrdiff_t>(nontrivial.size()); ++i) {
            for (const NCluster* c : kept) {
                if (concept_covered(*nontrivial[i], *c)) {
                    ++covered;
                    break;
                }
            }
        }
        row.covered_concepts = covered;
        row.concepts_total = nontrivial.size();
        row.fraction = nontrivial.empty()
                           ? 0.0
                           : static_cast<double>(covered) / static_cast<double>(nontrivial.size());
        report.rows.push_back(row);
    }
    return report;
}

SweepReport sweep(const NContext& ctx, std::span<const GridPoint> grid, RhoSemantics semantics,
                  ConceptOptions guard) {
    if (ctx.arity() != 2)
        throw ArityError("sweep requires a dyadic context (concept coverage)");
    OnlineMiner miner(2, {ctx.mode_name(0), ctx.mode_name(1)});
    // Pre-intern both universes in id order so the miner's ids coincide with
    // the context's and isolated elements survive.
    for (int mode = 0; mode < 2; ++mode)
        for (Id x = 0; x < ctx.universe_size(mode); ++x)
            miner.intern(mode, ctx.universe(mode).label(x));
    for (std::size_t t = 0; t < ctx.tuple_count(); ++t)
        miner.add_ids(ctx.tuple(t));
    ClusterCollection finalized = finalize(miner, ctx);
    auto concepts = mine_dyadic_concepts(ctx, guard);
    return sweep(ctx, finalized, grid, semantics, concepts);
}

} // namespace nclust

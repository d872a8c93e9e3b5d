#include "nclust/quality.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <memory>

#ifdef _OPENMP
#include <omp.h>
#endif

namespace nclust {

double g_score(const NCluster& c) {
    return c.rho() * static_cast<double>(c.mass);
}

double local_modularity(const NCluster& c, const NContext& ctx) {
    if (ctx.arity() != 2 || c.components.size() != 2)
        throw ArityError("local modularity requires a dyadic context");
    const auto& extent = c.components[0].members;
    const auto& intent = c.components[1].members;
    if (extent.empty() || intent.empty())
        throw std::invalid_argument("empty cluster component");
    double deg_ext = 0, deg_int = 0;
    for (Id g : extent)
        deg_ext += static_cast<double>(ctx.tuples_of(0, g).size());
    for (Id m : intent)
        deg_int += static_cast<double>(ctx.tuples_of(1, m).size());
    deg_ext /= static_cast<double>(extent.size());
    deg_int /= static_cast<double>(intent.size());
    return c.rho() - deg_ext * deg_int / static_cast<double>(ctx.tuple_count());
}

namespace {

// Attribute rows of the extent side as bitsets for the subset enumeration.
struct RowBits {
    std::size_t words;
    std::vector<std::uint64_t> bits; // objects x words

    RowBits(const NContext& ctx) {
        std::size_t m = ctx.universe_size(1);
        words = (m + 63) / 64;
        bits.assign(ctx.universe_size(0) * words, 0);
        for (std::size_t t = 0; t < ctx.tuple_count(); ++t) {
            auto tp = ctx.tuple(t);
            bits[tp[0] * words + (tp[1] >> 6)] |= 1ull << (tp[1] & 63);
        }
    }
};

} // namespace

StabilityResult stability(const NCluster& c, const NContext& ctx, std::size_t exact_limit) {
    if (ctx.arity() != 2 || c.components.size() != 2)
        throw ArityError("stability requires a dyadic context");
    const Id g = c.generator[0];
    const auto& extent = c.components[0].members; // m'
    const auto& intent = c.components[1].members; // g'
    // g'' = objects whose row contains g' (a subset of the extent).
    ElementSet gprime{1, intent};
    ElementSet gsecond = ctx.galois(gprime);

    StabilityResult res;
    const int ext_bits = static_cast<int>(extent.size());
    if (gsecond.size() <= exact_limit) {
        // Only subsets of g'' can derive to exactly g'; enumerate them all
        // (including the empty set, which derives to M).
        RowBits rows(ctx);
        std::size_t words = rows.words;
        std::vector<std::uint64_t> target(words, 0);
        for (Id m : intent)
            target[m >> 6] |= 1ull << (m & 63);
        std::vector<std::uint64_t> full(words, 0);
        std::size_t mcount = ctx.universe_size(1);
        for (std::size_t i = 0; i < mcount; ++i)
            full[i >> 6] |= 1ull << (i & 63);

        const auto& base = gsecond.members;
        const std::size_t k = base.size();
        std::uint64_t hits = 0;
        std::vector<std::uint64_t> acc(words);
        for (std::uint64_t mask = 0; mask < (1ull << k); ++mask) {
            acc = full;
            for (std::size_t i = 0; i < k; ++i)
                if (mask >> i & 1)
                    for (std::size_t w = 0; w < words; ++w)
                        acc[w] &= rows.bits[base[i] * words + w];
            if (acc == target)
                ++hits;
        }
        res.value = std::ldexp(static_cast<double>(hits), -ext_bits);
        res.exact = true;
        return res;
    }
    // Tight lower bound 2^(|g''\g| - |m'|); g always belongs to g''.
    (void)g;
    res.value = std::ldexp(1.0, static_cast<int>(gsecond.size()) - 1 - ext_bits);
    res.exact = false;
    return res;
}

namespace {

bool clusters_intersect(const NCluster& a, const NCluster& b) {
    for (std::size_t i = 0; i < a.components.size(); ++i)
        if (!intersects(a.components[i].members, b.components[i].members))
            return false;
    return true;
}

double diversity_impl(const ClusterCollection& cc, int mode, bool parallel) {
    const auto& cs = cc.clusters;
    const std::size_t k = cs.size();
    if (k <= 1)
        return 1.0;
    std::uint64_t overlapping = 0;
    auto pair_overlaps = [&](std::size_t i, std::size_t j) {
        if (mode < 0)
            return clusters_intersect(cs[i], cs[j]);
        return intersects(cs[i].components[mode].members, cs[j].components[mode].members);
    };
    if (parallel) {
        std::int64_t acc = 0;
#ifdef _OPENMP
#pragma omp parallel for schedule(dynamic, 8) reduction(+ : acc)
#endif
        for (std::ptrdiff_t i = 0; i < static_cast<std::ptrdiff_t>(k); ++i)
            for (std::size_t j = i + 1; j < k; ++j)
                if (pair_overlaps(i, j))
                    ++acc;
        overlapping = static_cast<std::uint64_t>(acc);
    } else {
        for (std::size_t i = 0; i < k; ++i)
            for (std::size_t j = i + 1; j < k; ++j)
                if (pair_overlaps(i, j))
                    ++overlapping;
    }
    double pairs = static_cast<double>(k) * static_cast<double>(k - 1) / 2.0;
    return 1.0 - static_cast<double>(overlapping) / pairs;
}

double coverage_tuples_impl(const ClusterCollection& cc, const NContext& ctx, bool parallel) {
    const std::size_t n = ctx.tuple_count();
    if (n == 0)
        return 0.0;
    std::unique_ptr<std::atomic<std::uint8_t>[]> covered(new std::atomic<std::uint8_t>[n]);
    for (std::size_t i = 0; i < n; ++i)
        covered[i].store(0, std::memory_order_relaxed);

    auto mark_cluster = [&](const NCluster& c) {
        // Scan tuple lists of the cheapest mode and mark in-box tuples.
        int best_mode = 0;
        std::uint64_t best_cost = UINT64_MAX;
        for (int i = 0; i < static_cast<int>(c.components.size()); ++i) {
            std::uint64_t cost = 0;
            for (Id x : c.components[i].members)
                cost += ctx.tuples_of(i, x).size();
            if (cost < best_cost) {
                best_cost = cost;
                best_mode = i;
            }
        }
        for (Id x : c.components[best_mode].members) {
            for (std::uint32_t t : ctx.tuples_of(best_mode, x)) {
                auto tp = ctx.tuple(t);
                bool inside = true;
                for (int i = 0; i < static_cast<int>(c.components.size()); ++i) {
                    if (i == best_mode)
                        continue;
                    if (!contains(c.components[i].members, tp[i])) {
                        inside = false;
                        break;
                    }
                }
                if (inside)
                    covered[t].store(1, std::memory_order_relaxed);
            }
        }
    };

    if (parallel) {
#ifdef _OPENMP
#pragma omp parallel for schedule(dynamic, 16)
#endif
        for (std::ptrdiff_t i = 0; i < static_cast<std::ptrdiff_t>(cc.clusters.size()); ++i)
            mark_cluster(cc.clusters[i]);
    } else {
        for (const auto& c : cc.clusters)
            mark_cluster(c);
    }
    std::uint64_t hit = 0;
    for (std::size_t i = 0; i < n; ++i)
        hit += covered[i].load(std::memory_order_relaxed);
    return static_cast<double>(hit) / static_cast<double>(n);
}

ConceptCoverage coverage_concepts_impl(const ClusterCollection& cc,
                                       const std::vector<NConcept>& concepts, bool parallel) {
    ConceptCoverage out;
    std::vector<const NConcept*> nontrivial;
    for (const auto& c : concepts)
        if (c.nontrivial())
            nontrivial.push_back(&c);
    out.total = nontrivial.size();
    if (out.total == 0)
        return out;
    std::int64_t covered = 0;
    auto check = [&](std::size_t i) {
        for (const auto& cl : cc.clusters)
            if (concept_covered(*nontrivial[i], cl))
                return true;
        return false;
    };
    if (parallel) {
#ifdef _OPENMP
#pragma omp parallel for schedule(dynamic, 16) reduction(+ : covered)
#endif
        for (std::ptrdiff_t i = 0; i < static_cast<std::ptrdiff_t>(nontrivial.size()); ++i)
            covered += check(static_cast<std::size_t>(i)) ? 1 : 0;
    } else {
        for (std::size_t i = 0; i < nontrivial.size(); ++i)
            covered += check(i) ? 1 : 0;
    }
    out.covered = static_cast<std::uint64_t>(covered);
    out.fraction = static_cast<double>(out.covered) / static_cast<double>(out.total);
    return out;
}

} // namespace

double diversity(const ClusterCollection& cc) { return diversity_impl(cc, -1, true); }
double diversity_serial(const ClusterCollection& cc) { return diversity_impl(cc, -1, false); }
double diversity_mode(const ClusterCollection& cc, int mode) {
    return diversity_impl(cc, mode, true);
}
double diversity_mode_serial(const ClusterCollection& cc, int mode) {
    return diversity_impl(cc, mode, false);
}

double coverage_tuples(const ClusterCollection& cc, const NContext& ctx) {
    return coverage_tuples_impl(cc, ctx, true);
}
double coverage_tuples_serial(const ClusterCollection& cc, const NContext& ctx) {
    return coverage_tuples_impl(cc, ctx, false);
}

double coverage_mode(const ClusterCollection& cc, const NContext& ctx, int mode) {
    const std::size_t n = ctx.universe_size(mode);
    if (n == 0)
        return 0.0;
    std::vector<char> seen(n, 0);
    for (const auto& c : cc.clusters)
        for (Id x : c.components[mode].members)
            seen[x] = 1;
    std::uint64_t hit = 0;
    for (char s : seen)
        hit += s;
    return static_cast<double>(hit) / static_cast<double>(n);
}

ConceptCoverage coverage_concepts(const ClusterCollection& cc,
                                  const std::vector<NConcept>& concepts) {
    return coverage_concepts_impl(cc, concepts, true);
}
ConceptCoverage coverage_concepts_serial(const ClusterCollection& cc,
                                         const std::vector<NConcept>& concepts) {
    return coverage_concepts_impl(cc, concepts, false);
}

CollectionSummary collection_summary(const ClusterCollection& cc, std::uint64_t tuple_count) {
    CollectionSummary s;
    s.count = cc.clusters.size();
    if (s.count == 0)
        return s; // averages undefined, reported explicitly by callers
    s.defined = true;
    double rho = 0, vol = 0, mass = 0, rho_mass = 0;
    for (const auto& c : cc.clusters) {
        rho += c.rho();
        vol += static_cast<double>(c.vol);
        mass += static_cast<double>(c.mass);
        rho_mass += g_score(c);
    }
    double k = static_cast<double>(s.count);
    s.avg_rho = rho / k;
    s.avg_vol = vol / k;
    s.avg_mass = mass / k;
    s.avg_rho_mass = rho_mass / k;
    s.avg_coverage = tuple_count ? (mass / k) / static_cast<double>(tuple_count) : 0.0;
    return s;
}

std::vector<HistogramBin> density_histogram(const ClusterCollection& cc,
                                            std::span<const Rational> edges) {
    if (edges.size() < 2)
        throw std::invalid_argument("histogram needs at least two edges");
    auto key = [](const Rational& r) {
        return static_cast<double>(r.num) / static_cast<double>(r.den);
    };
    if (key(edges.front()) != 0.0 || key(edges.back()) != 1.0)
        throw std::invalid_argument("histogram edges must cover [0, 1]");
    for (std::size_t i = 1; i < edges.size(); ++i)
        if (key(edges[i]) <= key(edges[i - 1]))
            throw std::invalid_argument("histogram edges must ascend");

    std::vector<HistogramBin> bins(edges.size() - 1);
    for (std::size_t i = 0; i + 1 < edges.size(); ++i) {
        bins[i].lo = edges[i];
        bins[i].hi = edges[i + 1];
    }
    for (const auto& c : cc.clusters) {
        for (std::size_t i = 0; i < bins.size(); ++i) {
            bool ge_lo = rho_at_least(c.mass, c.vol, bins[i].lo.num, bins[i].lo.den);
            bool ge_hi = rho_at_least(c.mass, c.vol, bins[i].hi.num, bins[i].hi.den);
            bool last = i + 1 == bins.size();
            if (ge_lo && (last || !ge_hi)) { // [lo, hi), last bin closed at 1
                ++bins[i].count;
                break;
            }
        }
    }
    return bins;
}

std::vector<Rational> uniform_bin_edges(int bins) {
    std::vector<Rational> out;
    for (int i = 0; i <= bins; ++i)
        out.push_back(Rational{i, static_cast<std::uint64_t>(bins)});
    return out;
}

std::vector<Rational> legacy_bin_edges() {
    std::vector<Rational> out{{0, 1}, {1, 20}, {1, 10}};
    for (int i = 2; i <= 10; ++i)
        out.push_back(Rational{i, 10});
    return out;
}

QualityReport measure(const ClusterCollection& cc, const NContext& ctx,
                      const QualityOptions& opts) {
    QualityReport r;
    const bool dyadic = ctx.arity() == 2;
    r.per_cluster.reserve(cc.clusters.size());
    for (const auto& c : cc.clusters) {
        ClusterMeasures m;
        m.rho = c.rho();
        m.mass = c.mass;
        m.vol = c.vol;
        m.g = g_score(c);
        if (dyadic && opts.with_modularity)
            m.mod_l = local_modularity(c, ctx);
        if (dyadic && opts.with_stability)
            m.sigma = stability(c, ctx, opts.stability_exact_limit);
        if (dyadic && opts.with_weak)
            m.weak = weak_community_test(c, ctx);
        r.per_cluster.push_back(std::move(m));
    }
    r.diversity_overall = diversity(cc);
    for (int i = 0; i < ctx.arity(); ++i) {
        r.diversity_per_mode.push_back(diversity_mode(cc, i));
        r.coverage_per_mode.push_back(coverage_mode(cc, ctx, i));
    }
    r.coverage_tuples = coverage_tuples(cc, ctx);
    if (opts.concepts)
        r.concept_coverage = coverage_concepts(cc, *opts.concepts);
    r.summary = collection_summary(cc, ctx.tuple_count());
    auto edges = opts.histogram_edges.empty() ? uniform_bin_edges() : opts.histogram_edges;
    r.histogram = density_histogram(cc, edges);
    return r;
}

} // namespace nclust

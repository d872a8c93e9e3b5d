#include <doctest.h>

#include <cmath>

#include "nclust/io.hpp"
#include "nclust/quality.hpp"
#include "oracles.hpp"

using namespace nclust;

namespace {

const char* data_dir = NCLUST_DATA_DIR;

ClusterCollection mine_all(const NContext& ctx) {
    OnlineMiner miner(ctx.arity(), ctx.mode_names());
    for (int mode = 0; mode < ctx.arity(); ++mode)
        for (Id x = 0; x < ctx.universe_size(mode); ++x)
            miner.intern(mode, ctx.universe(mode).label(x));
    for (std::size_t t = 0; t < ctx.tuple_count(); ++t)
        miner.add_ids(ctx.tuple(t));
    return finalize(miner, ctx);
}

} // namespace

TEST_CASE("g_score: both formulas agree to machine precision") {
    auto rng = oracle::seeded(71);
    for (int iter = 0; iter < 50; ++iter) {
        auto mx = oracle::random_matrix(9, 9, 0.5, rng);
        auto cc = mine_all(oracle::to_context(mx));
        for (const auto& c : cc.clusters) {
            double via_mass = c.rho() * static_cast<double>(c.mass);
            double via_vol = c.rho() * c.rho() * static_cast<double>(c.vol);
            CHECK(std::abs(via_mass - via_vol) < 1e-12 * std::max(1.0, via_mass));
            CHECK(g_score(c) == via_mass);
        }
    }
}

TEST_CASE("g_score of a full box equals its volume") {
    NCluster c;
    c.components = {{0, {0, 1}}, {1, {0, 1, 2}}};
    c.mass = 6;
    c.vol = 6;
    CHECK(g_score(c) == 6.0);
}

TEST_CASE("g_score example: dense 4-mode community") {
    // rho = 25/27, mass 25: contribution 23.1 after rounding
    NCluster c;
    c.mass = 25;
    c.vol = 27;
    CHECK(std::abs(g_score(c) - 23.1) < 0.05);
}

TEST_CASE("local modularity of the full context is zero") {
    auto rng = oracle::seeded(73);
    auto mx = oracle::random_matrix(5, 7, 1.0, rng);
    auto ctx = oracle::to_context(mx);
    auto cc = mine_all(ctx);
    for (const auto& c : cc.clusters)
        CHECK(std::abs(local_modularity(c, ctx)) < 1e-12);
}

TEST_CASE("local modularity equals the modularity-matrix block sum") {
    auto rng = oracle::seeded(79);
    for (int iter = 0; iter < 40; ++iter) {
        auto mx = oracle::random_matrix(8, 8, 0.5, rng);
        auto ctx = oracle::to_context(mx);
        if (ctx.tuple_count() == 0)
            continue;
        auto cc = mine_all(ctx);
        double I = static_cast<double>(ctx.tuple_count());
        for (const auto& c : cc.clusters) {
            double block = 0;
            for (Id g : c.components[0].members)
                for (Id m : c.components[1].members) {
                    double deg_g = static_cast<double>(ctx.tuples_of(0, g).size());
                    double deg_m = static_cast<double>(ctx.tuples_of(1, m).size());
                    block += (mx.at(g, m) ? 1.0 : 0.0) - deg_g * deg_m / I;
                }
            double expected = block / static_cast<double>(c.vol);
            CHECK(std::abs(local_modularity(c, ctx) - expected) < 1e-10);
        }
    }
}

TEST_CASE("modularity null term stays within 1 for low-degree members") {
    auto rng = oracle::seeded(83);
    auto mx = oracle::random_matrix(10, 10, 0.3, rng);
    auto ctx = oracle::to_context(mx);
    if (ctx.tuple_count() == 0)
        return;
    double sqrt_i = std::sqrt(static_cast<double>(ctx.tuple_count()));
    auto cc = mine_all(ctx);
    for (const auto& c : cc.clusters) {
        bool all_small = true;
        for (Id g : c.components[0].members)
            if (static_cast<double>(ctx.tuples_of(0, g).size()) > sqrt_i)
                all_small = false;
        for (Id m : c.components[1].members)
            if (static_cast<double>(ctx.tuples_of(1, m).size()) > sqrt_i)
                all_small = false;
        if (all_small) {
            double null_term = c.rho() - local_modularity(c, ctx);
            CHECK(null_term <= 1.0 + 1e-12);
        }
    }
}

TEST_CASE("stability of the 1x1 context is 1") {
    ContextBuilder b(2);
    std::vector<std::string> t{"g", "m"};
    b.add(t);
    auto ctx = b.build();
    auto cc = mine_all(ctx);
    REQUIRE(cc.size() == 1);
    auto s = stability(cc.clusters[0], ctx);
    CHECK(s.exact);
    CHECK(s.value == 1.0);
}

TEST_CASE("stability: exact equals the full-powerset definition") {
    auto rng = oracle::seeded(89);
    for (int iter = 0; iter < 25; ++iter) {
        auto mx = oracle::random_matrix(8, 8, 0.5, rng);
        auto ctx = oracle::to_context(mx);
        auto cc = mine_all(ctx);
        for (const auto& c : cc.clusters) {
            const auto& ext = c.components[0].members; // m'
            if (ext.size() > 12)
                continue;
            auto s = stability(c, ctx, 24);
            REQUIRE(s.exact);
            // full powerset of the extent
            std::uint64_t hits = 0;
            for (std::uint64_t mask = 0; mask < (1ull << ext.size()); ++mask) {
                std::vector<Id> subset;
                for (std::size_t i = 0; i < ext.size(); ++i)
                    if (mask >> i & 1)
                        subset.push_back(ext[i]);
                ElementSet a{0, subset};
                if (ctx.galois(a).members == c.components[1].members)
                    ++hits;
            }
            double full = std::ldexp(static_cast<double>(hits), -static_cast<int>(ext.size()));
            CHECK(s.value == doctest::Approx(full).epsilon(1e-12));
        }
    }
}

TEST_CASE("stability lower bound holds everywhere") {
    auto rng = oracle::seeded(97);
    for (int iter = 0; iter < 25; ++iter) {
        auto mx = oracle::random_matrix(9, 9, 0.45, rng);
        auto ctx = oracle::to_context(mx);
        auto cc = mine_all(ctx);
        for (const auto& c : cc.clusters) {
            auto exact = stability(c, ctx, 24);
            ElementSet gp{1, c.components[1].members};
            auto gsecond = ctx.galois(gp);
            double bound = std::ldexp(1.0, static_cast<int>(gsecond.size()) - 1 -
                                               static_cast<int>(c.components[0].size()));
            CHECK(exact.value >= bound - 1e-15);
            // forcing the bound path returns exactly the bound, flagged
            auto bounded = stability(c, ctx, 0);
            CHECK(!bounded.exact);
            CHECK(bounded.value == doctest::Approx(bound));
        }
    }
}

TEST_CASE("diversity: identical, disjoint and degenerate collections") {
    ClusterCollection cc;
    cc.arity = 2;
    NCluster a;
    a.components = {{0, {0, 1}}, {1, {2}}};
    ClusterCollection one = cc;
    one.clusters = {a};
    CHECK(diversity(one) == 1.0); // single cluster: no pairs
    ClusterCollection two = cc;
    two.clusters = {a, a};
    CHECK(diversity(two) == 0.0); // identical pair overlaps
    NCluster b;
    b.components = {{0, {5}}, {1, {7}}};
    ClusterCollection disj = cc;
    disj.clusters = {a, b};
    CHECK(diversity(disj) == 1.0);
    CHECK(diversity(ClusterCollection{}) == 1.0);
}

TEST_CASE("diversity equals the quadratic pair oracle; parallel equals serial") {
    auto rng = oracle::seeded(101);
    for (int iter = 0; iter < 20; ++iter) {
        auto mx = oracle::random_matrix(7, 7, 0.5, rng);
        auto cc = deduplicate(mine_all(oracle::to_context(mx)));
        if (cc.size() > 20)
            continue;
        double direct_all = 0, direct_mode0 = 0;
        std::size_t k = cc.size();
        if (k > 1) {
            std::uint64_t ov = 0, ov0 = 0;
            for (std::size_t i = 0; i < k; ++i)
                for (std::size_t j = i + 1; j < k; ++j) {
                    bool m0 = !set_intersect(cc.clusters[i].components[0].members,
                                             cc.clusters[j].components[0].members)
                                   .empty();
                    bool m1 = !set_intersect(cc.clusters[i].components[1].members,
                                             cc.clusters[j].components[1].members)
                                   .empty();
                    if (m0 && m1)
                        ++ov;
                    if (m0)
                        ++ov0;
                }
            direct_all = 1.0 - ov / (k * (k - 1) / 2.0);
            direct_mode0 = 1.0 - ov0 / (k * (k - 1) / 2.0);
        } else {
            direct_all = direct_mode0 = 1.0;
        }
        CHECK(diversity(cc) == doctest::Approx(direct_all));
        CHECK(diversity_serial(cc) == diversity(cc));
        CHECK(diversity_mode(cc, 0) == doctest::Approx(direct_mode0));
        CHECK(diversity_mode_serial(cc, 0) == diversity_mode(cc, 0));
    }
}

TEST_CASE("coverage of tuples and modes") {
    auto rng = oracle::seeded(103);
    for (int iter = 0; iter < 20; ++iter) {
        auto mx = oracle::random_matrix(7, 6, 0.4, rng);
        auto ctx = oracle::to_context(mx);
        if (ctx.tuple_count() == 0)
            continue;
        auto cc = deduplicate(mine_all(ctx));
        // direct per-tuple scan
        std::size_t hit = 0;
        for (std::size_t t = 0; t < ctx.tuple_count(); ++t) {
            auto tp = ctx.tuple(t);
            bool in = false;
            for (const auto& c : cc.clusters)
                if (contains(c.components[0].members, tp[0]) &&
                    contains(c.components[1].members, tp[1])) {
                    in = true;
                    break;
                }
            hit += in;
        }
        double expect = static_cast<double>(hit) / static_cast<double>(ctx.tuple_count());
        CHECK(coverage_tuples(cc, ctx) == doctest::Approx(expect));
        CHECK(coverage_tuples_serial(cc, ctx) == coverage_tuples(cc, ctx));
        // full collection of prime clusters covers every tuple
        CHECK(coverage_tuples(cc, ctx) == 1.0);

        ClusterCollection empty;
        empty.arity = 2;
        CHECK(coverage_tuples(empty, ctx) == 0.0);
        CHECK(coverage_mode(cc, ctx, 0) <= 1.0);
    }
}

TEST_CASE("coverage_mode counts elements in any component") {
    ContextBuilder b(2);
    for (int i = 0; i < 4; ++i)
        b.intern(0, "g" + std::to_string(i));
    b.intern(1, "m0");
    std::vector<Id> t{0, 0};
    b.add_ids(t);
    auto ctx = b.build(); // g1..g3 never appear in tuples
    auto cc = mine_all(ctx);
    CHECK(coverage_mode(cc, ctx, 0) == doctest::Approx(0.25));
    CHECK(coverage_mode(cc, ctx, 1) == doctest::Approx(1.0));
}

TEST_CASE("concept coverage against the direct check") {
    auto ctx = io::read_cxt(std::string(data_dir) + "/southern_women.cxt");
    auto cc = deduplicate(mine_all(ctx));
    auto concepts = mine_dyadic_concepts(ctx);
    auto cov = coverage_concepts(cc, concepts);
    CHECK(cov.total == 65);
    CHECK(cov.covered == 65);
    CHECK(cov.fraction == 1.0);
    auto ser = coverage_concepts_serial(cc, concepts);
    CHECK(ser.covered == cov.covered);

    auto kept = filter_density(cc, Rational::from_decimal("0.65"));
    auto cov65 = coverage_concepts(kept, concepts);
    CHECK(cov65.covered == 64);
    CHECK(io::fraction_2dp(cov65.covered, cov65.total) == "0.98");
}

TEST_CASE("collection summary") {
    ClusterCollection cc;
    cc.arity = 2;
    NCluster a;
    a.components = {{0, {0}}, {1, {0, 1}}};
    a.mass = 1;
    a.vol = 2;
    cc.clusters = {a};
    auto s = collection_summary(cc, 10);
    CHECK(s.defined);
    CHECK(s.avg_rho == doctest::Approx(0.5));
    CHECK(s.avg_vol == doctest::Approx(2.0));
    CHECK(s.avg_mass == doctest::Approx(1.0));
    CHECK(s.avg_rho_mass == doctest::Approx(0.5));
    CHECK(s.avg_coverage == doctest::Approx(0.1));

    auto empty = collection_summary(ClusterCollection{}, 10);
    CHECK(!empty.defined);
}

TEST_CASE("collection summary equals a second accumulation pass") {
    auto rng = oracle::seeded(107);
    auto mx = oracle::random_matrix(9, 8, 0.5, rng);
    auto ctx = oracle::to_context(mx);
    auto cc = deduplicate(mine_all(ctx));
    if (cc.size() == 0)
        return;
    auto s = collection_summary(cc, ctx.tuple_count());
    double rho = 0, vol = 0, mass = 0, gm = 0;
    for (const auto& c : cc.clusters) {
        rho += c.rho();
        vol += static_cast<double>(c.vol);
        mass += static_cast<double>(c.mass);
        gm += c.rho() * static_cast<double>(c.mass);
    }
    double k = static_cast<double>(cc.size());
    CHECK(s.avg_rho == doctest::Approx(rho / k).epsilon(1e-12));
    CHECK(s.avg_vol == doctest::Approx(vol / k).epsilon(1e-12));
    CHECK(s.avg_mass == doctest::Approx(mass / k).epsilon(1e-12));
    CHECK(s.avg_rho_mass == doctest::Approx(gm / k).epsilon(1e-12));
}

TEST_CASE("density histogram partitions the collection") {
    auto rng = oracle::seeded(109);
    auto mx = oracle::random_matrix(9, 9, 0.5, rng);
    auto cc = deduplicate(mine_all(oracle::to_context(mx)));
    auto bins = density_histogram(cc, uniform_bin_edges());
    std::uint64_t total = 0;
    for (const auto& b : bins)
        total += b.count;
    CHECK(total == cc.size());

    auto legacy = density_histogram(cc, legacy_bin_edges());
    REQUIRE(legacy.size() == 11);
    CHECK(legacy[0].hi.value() == doctest::Approx(0.05));
    CHECK(legacy[1].hi.value() == doctest::Approx(0.1));
    total = 0;
    for (const auto& b : legacy)
        total += b.count;
    CHECK(total == cc.size());
}

TEST_CASE("histogram puts full-density clusters in the closed top bin") {
    ClusterCollection cc;
    cc.arity = 2;
    NCluster a;
    a.components = {{0, {0}}, {1, {0}}};
    a.mass = 1;
    a.vol = 1;
    cc.clusters = {a, a};
    auto bins = density_histogram(cc, uniform_bin_edges());
    CHECK(bins.back().count == 2);
}

TEST_CASE("histogram rejects malformed edges") {
    ClusterCollection cc;
    std::vector<Rational> bad{{0, 1}, {1, 2}};
    CHECK_THROWS(density_histogram(cc, bad)); // does not reach 1
    std::vector<Rational> unsorted{{0, 1}, {3, 4}, {1, 2}, {1, 1}};
    CHECK_THROWS(density_histogram(cc, unsorted));
}

TEST_CASE("measure produces a coherent report") {
    auto ctx = io::read_cxt(std::string(data_dir) + "/readers.cxt");
    auto cc = deduplicate(mine_all(ctx));
    auto concepts = mine_dyadic_concepts(ctx);
    QualityOptions opts;
    opts.concepts = &concepts;
    auto report = measure(cc, ctx, opts);
    CHECK(report.per_cluster.size() == cc.size());
    CHECK(report.concept_coverage);
    CHECK(report.concept_coverage->fraction == 1.0);
    CHECK(report.coverage_tuples == 1.0);
    CHECK(report.summary.defined);
    for (const auto& m : report.per_cluster) {
        CHECK(m.mod_l.has_value());
        CHECK(m.sigma.has_value());
        CHECK(m.weak.has_value());
    }
}

#include <doctest.h>

#include "nclust/concepts.hpp"
#include "nclust/io.hpp"
#include "oracles.hpp"

using namespace nclust;

namespace {

const char* data_dir = NCLUST_DATA_DIR;

std::set<std::pair<std::vector<Id>, std::vector<Id>>> as_pairs(const std::vector<NConcept>& cs) {
    std::set<std::pair<std::vector<Id>, std::vector<Id>>> out;
    for (const auto& c : cs)
        out.insert({c.components[0].members, c.components[1].members});
    return out;
}

std::vector<std::string> names(const NContext& ctx, int mode, const std::vector<Id>& ids) {
    std::vector<std::string> out;
    for (Id x : ids)
        out.push_back(ctx.universe(mode).label(x));
    std::sort(out.begin(), out.end());
    return out;
}

} // namespace

TEST_CASE("readers context has exactly nine concepts") {
    auto ctx = io::read_cxt(std::string(data_dir) + "/readers.cxt");
    auto concepts = mine_dyadic_concepts(ctx);
    CHECK(concepts.size() == 9);

    auto has = [&](std::vector<std::string> ext, std::vector<std::string> itt) {
        for (const auto& c : concepts)
            if (names(ctx, 0, c.components[0].members) == ext &&
                names(ctx, 1, c.components[1].members) == itt)
                return true;
        return false;
    };
    CHECK(has({"Kate", "Mike"}, {"RomeoAndJuliet"}));
    CHECK(has({"Alex", "David"}, {"ThePuppetMasters", "Ubik"}));
    CHECK(has({"David", "Kate"}, {"Ivanhoe"}));
    CHECK(has({"Alex", "David", "Mike"}, {"Ubik"}));
}

TEST_CASE("every mined concept satisfies A' = B and B' = A") {
    auto rng = oracle::seeded(23);
    for (int iter = 0; iter < 30; ++iter) {
        auto mx = oracle::random_matrix(7, 6, 0.45, rng);
        auto ctx = oracle::to_context(mx);
        auto concepts = mine_dyadic_concepts(ctx);
        for (const auto& c : concepts) {
            CHECK(ctx.galois(c.components[0]).members == c.components[1].members);
            CHECK(ctx.galois(c.components[1]).members == c.components[0].members);
        }
        // uniqueness
        CHECK(as_pairs(concepts).size() == concepts.size());
    }
}

TEST_CASE("lectic enumeration equals exhaustive subset closure") {
    auto rng = oracle::seeded(29);
    for (int iter = 0; iter < 30; ++iter) {
        auto mx = oracle::random_matrix(8, 8, 0.4, rng);
        auto ctx = oracle::to_context(mx);
        auto mined = as_pairs(mine_dyadic_concepts(ctx));
        auto expect = oracle::all_concepts(mx);
        CHECK(mined == expect);
    }
}

TEST_CASE("empty relation yields exactly the two boundary concepts") {
    ContextBuilder b(2);
    for (int g = 0; g < 3; ++g)
        b.intern(0, "g" + std::to_string(g));
    for (int m = 0; m < 3; ++m)
        b.intern(1, "m" + std::to_string(m));
    auto ctx = b.build();
    auto concepts = mine_dyadic_concepts(ctx);
    REQUIRE(concepts.size() == 2);
    CHECK(concepts[0].components[0].members.empty());   // (emptyset, M)
    CHECK(concepts[0].components[1].size() == 3);
    CHECK(concepts[1].components[0].size() == 3);       // (G, emptyset)
    CHECK(concepts[1].components[1].members.empty());
}

TEST_CASE("size guard refuses oversized contexts unless overridden") {
    auto rng = oracle::seeded(3);
    auto mx = oracle::random_matrix(70, 70, 0.1, rng);
    auto ctx = oracle::to_context(mx);
    CHECK_THROWS_AS(mine_dyadic_concepts(ctx), SizeGuardError);
    ConceptOptions force;
    force.override_guard = true;
    CHECK_NOTHROW(mine_dyadic_concepts(ctx, force));
}

TEST_CASE("toy 3-adic context: brute force finds all five triconcepts") {
    io::TupleReadOptions opts;
    opts.arity = 3;
    auto ctx = io::read_tuples(std::string(data_dir) + "/toy_bibsonomy.tsv", opts);
    auto concepts = mine_nadic_concepts_bruteforce(ctx);
    // The three communities readable off the layers...
    auto has = [&](std::vector<std::string> u, std::vector<std::string> t,
                   std::vector<std::string> p) {
        for (const auto& c : concepts)
            if (names(ctx, 0, c.components[0].members) == u &&
                names(ctx, 1, c.components[1].members) == t &&
                names(ctx, 2, c.components[2].members) == p)
                return true;
        return false;
    };
    CHECK(has({"u2", "u4"}, {"t1", "t2"}, {"p1"}));
    CHECK(has({"u1", "u3"}, {"t2", "t3"}, {"p3"}));
    CHECK(has({"u1", "u2", "u3", "u4"}, {"t2"}, {"p2"}));
    // ...plus the two cross-layer boxes that are also maximal.
    CHECK(has({"u2", "u4"}, {"t2"}, {"p1", "p2"}));
    CHECK(has({"u1", "u3"}, {"t2"}, {"p2", "p3"}));
    CHECK(concepts.size() == 5);
}

TEST_CASE("full relation yields the single all-components concept") {
    auto rng = oracle::seeded(1);
    auto ctx = oracle::random_nadic({3, 3, 3}, 1.0, rng);
    auto concepts = mine_nadic_concepts_bruteforce(ctx);
    REQUIRE(concepts.size() == 1);
    for (int i = 0; i < 3; ++i)
        CHECK(concepts[0].components[i].size() == 3);
}

TEST_CASE("n-adic brute force agrees with the independent box oracle") {
    auto rng = oracle::seeded(47);
    for (int iter = 0; iter < 25; ++iter) {
        auto ctx = oracle::random_nadic({4, 4, 4}, 0.35, rng);
        auto mined = mine_nadic_concepts_bruteforce(ctx);
        auto expect = oracle::all_nadic_concepts(ctx);
        REQUIRE(mined.size() == expect.size());
        for (std::size_t i = 0; i < mined.size(); ++i) {
            std::vector<std::vector<Id>> box;
            for (const auto& c : mined[i].components)
                box.push_back(c.members);
            CHECK(box == expect[i]);
        }
    }
}

TEST_CASE("n-adic brute force guard") {
    auto rng = oracle::seeded(2);
    auto ctx = oracle::random_nadic({13, 3, 3}, 0.2, rng);
    CHECK_THROWS_AS(mine_nadic_concepts_bruteforce(ctx), SizeGuardError);
    CHECK_NOTHROW(mine_nadic_concepts_bruteforce(ctx, NadicOptions{13, true}));
}

TEST_CASE("n-adic miner restricted to n = 2 matches the dyadic miner") {
    auto rng = oracle::seeded(61);
    for (int iter = 0; iter < 20; ++iter) {
        auto mx = oracle::random_matrix(6, 6, 0.4, rng);
        auto ctx = oracle::to_context(mx);
        auto dy = mine_dyadic_concepts(ctx);
        auto nd = mine_nadic_concepts_bruteforce(ctx, NadicOptions{8, false});
        // the n-adic miner excludes boxes with empty components by contract
        std::set<std::pair<std::vector<Id>, std::vector<Id>>> dy_nontrivial;
        for (const auto& c : dy)
            if (c.nontrivial())
                dy_nontrivial.insert({c.components[0].members, c.components[1].members});
        CHECK(as_pairs(nd) == dy_nontrivial);
    }
}

TEST_CASE("covered_by is reflexive and matches the direct subset check") {
    auto rng = oracle::seeded(83);
    auto mx = oracle::random_matrix(6, 6, 0.5, rng);
    auto ctx = oracle::to_context(mx);
    auto concepts = mine_dyadic_concepts(ctx);
    for (const auto& c : concepts)
        CHECK(covered_by(c, c.components));
    for (const auto& a : concepts)
        for (const auto& b : concepts) {
            bool direct = is_subset(a.components[0].members, b.components[0].members) &&
                          is_subset(a.components[1].members, b.components[1].members);
            CHECK(covered_by(a, b.components) == direct);
        }
}

TEST_CASE("clique concepts: triangle graph") {
    SimpleGraph g;
    g.add_edge("a", "b");
    g.add_edge("b", "c");
    g.add_edge("a", "c");
    auto ctx = graph_to_context(g, Encoding::reflexive);
    auto cliques = concept_cliques(ctx);
    REQUIRE(cliques.size() == 1);
    CHECK(cliques[0].size() == 3);
}

TEST_CASE("clique concepts equal maximal cliques on random graphs") {
    auto rng = oracle::seeded(97);
    std::bernoulli_distribution coin(0.4);
    for (int iter = 0; iter < 20; ++iter) {
        SimpleGraph g;
        for (int v = 0; v < 10; ++v)
            g.add_vertex("v" + std::to_string(v));
        for (Id u = 0; u < 10; ++u)
            for (Id v = u + 1; v < 10; ++v)
                if (coin(rng))
                    g.add_edge_ids(u, v);
        auto ctx = graph_to_context(g, Encoding::reflexive);
        auto got = concept_cliques(ctx);
        std::vector<std::vector<Id>> got_sets;
        for (const auto& s : got)
            got_sets.push_back(s.members);
        std::sort(got_sets.begin(), got_sets.end());
        auto expect = oracle::maximal_cliques(g);
        // isolated vertices form cliques {v} in the reflexive encoding but the
        // clique oracle lists them too (single-vertex maximal cliques)
        CHECK(got_sets == expect);
    }
}

TEST_CASE("clique extraction rejects non-symmetric encodings") {
    ContextBuilder b(2);
    for (int i = 0; i < 2; ++i) {
        b.intern(0, "v" + std::to_string(i));
        b.intern(1, "v" + std::to_string(i));
    }
    std::vector<Id> t{0, 0};
    b.add_ids(t);
    t = {1, 1};
    b.add_ids(t);
    t = {0, 1};
    b.add_ids(t); // (1,0) missing: not symmetric
    CHECK_THROWS_AS(concept_cliques(b.build()), SchemaError);
}

// Compares the serial reference implementations against the OpenMP kernels on
// synthetic relations and prints a small table.
#include <chrono>
#include <functional>
#include <cstdio>
#include <random>
#include <string>
#include <vector>

#ifdef _OPENMP
#include <omp.h>
#endif

#include "nclust/nclustering.hpp"
#include "nclust/quality.hpp"

using namespace nclust;

namespace {

using clock_type = std::chrono::steady_clock;

double time_ms(const std::function<void()>& fn) {
    auto t0 = clock_type::now();
    fn();
    return std::chrono::duration<double, std::milli>(clock_type::now() - t0).count();
}

OnlineMiner synthetic_miner(std::size_t n_objs, std::size_t n_attrs, std::size_t pairs,
                            unsigned seed) {
    OnlineMiner miner(2);
    std::mt19937 rng(seed);
    std::uniform_int_distribution<Id> og(0, static_cast<Id>(n_objs - 1));
    std::uniform_int_distribution<Id> ag(0, static_cast<Id>(n_attrs - 1));
    for (int m = 0; m < 2; ++m)
        for (std::size_t x = 0; x < (m ? n_attrs : n_objs); ++x)
            miner.intern(m, (m ? "a" : "g") + std::to_string(x));
    std::vector<Id> t(2);
    while (miner.stats().tuples_consumed < pairs) {
        t[0] = og(rng);
        t[1] = ag(rng);
        miner.add_ids(t);
    }
    return miner;
}

void row(const char* name, double serial_ms, double parallel_ms) {
    std::printf("%-22s %10.1f ms %10.1f ms %8.2fx\n", name, serial_ms, parallel_ms,
                serial_ms / parallel_ms);
}

} // namespace

int main(int argc, char** argv) {
    std::size_t n_objs = 40000, n_attrs = 30000, pairs = 400000;
    if (argc > 1)
        pairs = std::stoull(argv[1]);
    if (argc > 2)
        n_objs = std::stoull(argv[2]);
    if (argc > 3)
        n_attrs = std::stoull(argv[3]);

#ifdef _OPENMP
    std::printf("OpenMP threads: %d\n", omp_get_max_threads());
#else
    std::printf("built without OpenMP; both columns run serial code\n");
#endif
    std::printf("synthetic 2-mode relation: %zu x %zu, %zu pairs\n\n", n_objs, n_attrs, pairs);
    std::printf("%-22s %13s %13s %9s\n", "kernel", "serial", "openmp", "speedup");

    auto gen_t0 = clock_type::now();
    OnlineMiner miner = synthetic_miner(n_objs, n_attrs, pairs, 42);
    double gen_ms = std::chrono::duration<double, std::milli>(clock_type::now() - gen_t0).count();
    std::printf("%-22s %10.1f ms   (single-writer online pass)\n", "generation", gen_ms);

    NContext ctx = miner.context();
    ClusterCollection serial_cc, parallel_cc;
    double fs = time_ms([&] { serial_cc = finalize_serial(miner, ctx); });
    double fp = time_ms([&] { parallel_cc = finalize(miner, ctx); });
    row("finalize", fs, fp);
    if (serial_cc.clusters.size() != parallel_cc.clusters.size())
        std::printf("MISMATCH in finalize results!\n");

    ClusterCollection unique = deduplicate(parallel_cc);
    // diversity is O(k^2); trim to keep the benchmark short
    ClusterCollection head;
    head.arity = unique.arity;
    std::size_t keep = std::min<std::size_t>(unique.size(), 4000);
    head.clusters.assign(unique.clusters.begin(), unique.clusters.begin() + keep);
    double dvs = 0, dvp = 0, r1 = 0, r2 = 0;
    dvs = time_ms([&] { r1 = diversity_serial(head); });
    dvp = time_ms([&] { r2 = diversity(head); });
    row("diversity (4k head)", dvs, dvp);
    if (r1 != r2)
        std::printf("MISMATCH in diversity results!\n");

    double cs = 0, cp = 0, c1 = 0, c2 = 0;
    cs = time_ms([&] { c1 = coverage_tuples_serial(unique, ctx); });
    cp = time_ms([&] { c2 = coverage_tuples(unique, ctx); });
    row("coverage_tuples", cs, cp);
    if (c1 != c2)
        std::printf("MISMATCH in coverage results!\n");

    std::printf("\nclusters: generated=%llu unique=%zu, |Y|=%zu\n",
                static_cast<unsigned long long>(parallel_cc.generated), unique.size(),
                ctx.tuple_count());
    return 0;
}

#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <unordered_map>
#include <vector>

#include "nclust/concepts.hpp"
#include "nclust/context.hpp"

namespace nclust {

// Prime-operator pattern generated from one relation tuple: component i is the
// set of mode-i elements completing the generator with mode i removed.
struct NCluster {
    std::vector<Id> generator;          // one element id per mode, a tuple of Y
    std::vector<ElementSet> components; // snapshots of the prime sets
    std::uint64_t mass = 0;
    std::uint64_t vol = 0;
    bool is_concept = false;  // dyadic: rho == 1
    bool passes_weak = false; // set by filter_weak

    double rho() const { return vol ? static_cast<double>(mass) / static_cast<double>(vol) : 0.0; }
    // Chained binary64 density (mass / |Z1|) / |Z2| / ...; this is how the
    // published result tables were thresholded.
    double rho_float64() const;
};

struct ClusterCollection {
    int arity = 2;
    std::uint64_t generated = 0; // total produced by the online pass (pre-dedup)
    std::vector<NCluster> clusters;

    std::size_t size() const { return clusters.size(); }
};

struct MinerStats {
    std::uint64_t tuples_consumed = 0;
    std::uint64_t duplicates_skipped = 0;
    std::uint64_t index_updates = 0; // prime-set lookups+appends, O(arity) per tuple
    std::uint64_t index_bytes = 0;   // approximate live index payload
};

// Single-pass Add procedure: consumes tuples in any order, maintains the
// per-mode prime index, and records one cluster per consumed tuple whose
// components reference the live prime sets. Universes need not be known in
// advance; a miner can keep consuming after finalize (resume).
class OnlineMiner {
public:
    explicit OnlineMiner(int arity, std::vector<std::string> mode_names = {});

    Id intern(int mode, std::string_view label) { return builder_.intern(mode, label); }
    bool add(std::span<const std::string> labels); // false on duplicate tuple
    bool add_ids(std::span<const Id> ids);

    int arity() const { return arity_; }
    std::size_t cluster_count() const { return raw_.size(); }
    const MinerStats& stats() const { return stats_; }

    // Canonical immutable context over everything consumed so far.
    NContext context() const { return builder_.build(); }

    // Live prime set contents (unsorted, insertion order).
    const std::vector<Id>& prime_set(int mode, std::uint32_t set_id) const {
        return sets_[mode][set_id];
    }

    struct RawCluster {
        std::vector<Id> generator;
        std::vector<std::uint32_t> set_ids; // per mode, into prime_set
    };
    const std::vector<RawCluster>& raw_clusters() const { return raw_; }

private:
    int arity_;
    ContextBuilder builder_;
    MinerStats stats_;
    // Prime index per mode, keyed by the generator tuple with that mode
    // removed. Dyadic contexts use dense per-element tables instead of hashes.
    struct VecHash {
        std::size_t operator()(const std::vector<Id>& v) const;
    };
    std::vector<std::unordered_map<std::vector<Id>, std::uint32_t, VecHash>> key_to_set_;
    std::vector<std::vector<std::int64_t>> dense_key_to_set_; // arity 2 fast path
    std::vector<std::vector<std::vector<Id>>> sets_;
    std::vector<RawCluster> raw_;
};

// Seed a fresh miner with the generator tuples of a previously finalized
// (pre-dedup) collection; the prime index is rebuilt exactly.
void seed(OnlineMiner& miner, const std::vector<std::vector<std::string>>& generator_labels);

// Materializes components, computes mass/vol/rho and flags, orders clusters by
// generator tuple. Parallel over clusters; the serial variant is the reference
// implementation used for testing and benchmarking.
ClusterCollection finalize(const OnlineMiner& miner, const NContext& ctx);
ClusterCollection finalize_serial(const OnlineMiner& miner, const NContext& ctx);

// Exactly one representative per distinct component list (first in generator
// order); exact comparison after hash match.
ClusterCollection deduplicate(const ClusterCollection& cc);

// keep rho >= rho_min, exact rational comparison.
ClusterCollection filter_density(const ClusterCollection& cc, Rational rho_min);
// keep rho_float64() >= threshold (binary64 semantics of the published tables).
ClusterCollection filter_density_float64(const ClusterCollection& cc, double threshold);

// Weak-community cut test (dyadic): rho >= cut/(2|g'||m'|), i.e. 2*mass >= cut.
std::uint64_t cluster_cut(const NCluster& c, const NContext& ctx);
bool weak_community_test(const NCluster& c, const NContext& ctx);
ClusterCollection filter_weak(const ClusterCollection& cc, const NContext& ctx);

enum class RhoSemantics {
    exact,   // rational mass/vol >= decimal threshold
    float64, // chained-division binary64, float grid (published tables)
};

struct GridPoint {
    Rational exact;
    double f64 = 0.0;
};
std::vector<GridPoint> default_grid(); // 0.00 .. 1.00 step 0.05
GridPoint grid_point_from_decimal(std::string_view text);

struct SweepRow {
    double rho = 0.0;
    std::uint64_t covered_concepts = 0;
    std::uint64_t unique_clusters = 0;
    std::uint64_t generated_clusters = 0;
    std::uint64_t concepts_total = 0; // non-trivial concepts
    double fraction = 0.0;            // covered / concepts_total, full precision
};

struct SweepReport {
    std::vector<SweepRow> rows;
    std::size_t nontrivial_concepts = 0;
};

// Per grid value: generated count, unique count, covered concepts and coverage
// fraction over the non-trivial concept set. `finalized` is the pre-dedup
// collection for the same context.
SweepReport sweep(const NContext& ctx, const ClusterCollection& finalized,
                  std::span<const GridPoint> grid, RhoSemantics semantics,
                  const std::vector<NConcept>& concepts);
// Convenience: mines, finalizes and enumerates concepts internally.
SweepReport sweep(const NContext& ctx, std::span<const GridPoint> grid,
                  RhoSemantics semantics = RhoSemantics::exact, ConceptOptions guard = {});

bool concept_covered(const NConcept& concept_, const NCluster& cluster);

} // namespace nclust

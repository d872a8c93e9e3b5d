#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "nclust/nclustering.hpp"

namespace nclust {

// Least-squares contribution of a cluster to the data scatter: rho * mass
// (equivalently rho^2 * vol).
double g_score(const NCluster& c);

// rho minus the degree null-model term: mean extent degree times mean intent
// degree over |I|. Dyadic contexts only.
double local_modularity(const NCluster& c, const NContext& ctx);

struct StabilityResult {
    double value = 0.0;
    bool exact = false; // false: value is the tight lower bound 2^(|g''\g|-|m'|)
};

// Intensional stability of an OA-bicluster: |{A subset of g'' : A' = g'}| /
// 2^|m'|. Exact when |g''| <= exact_limit, otherwise the closed-form lower
// bound, flagged.
StabilityResult stability(const NCluster& c, const NContext& ctx, std::size_t exact_limit = 24);

// 1 - overlapping-pair fraction; a pair overlaps when component intersections
// are non-empty in all modes (or in the given mode). <= 1 cluster -> 1.
double diversity(const ClusterCollection& cc);
double diversity_serial(const ClusterCollection& cc);
double diversity_mode(const ClusterCollection& cc, int mode);
double diversity_mode_serial(const ClusterCollection& cc, int mode);

// Fraction of relation tuples inside at least one cluster box.
double coverage_tuples(const ClusterCollection& cc, const NContext& ctx);
double coverage_tuples_serial(const ClusterCollection& cc, const NContext& ctx);
// Fraction of mode elements appearing in at least one cluster component.
double coverage_mode(const ClusterCollection& cc, const NContext& ctx, int mode);

struct ConceptCoverage {
    std::uint64_t covered = 0;
    std::size_t total = 0; // non-trivial concepts considered
    double fraction = 0.0;
};
// Concepts restricted to non-empty components; covered under component-wise
// inclusion by at least one cluster.
ConceptCoverage coverage_concepts(const ClusterCollection& cc, const std::vector<NConcept>& concepts);
ConceptCoverage coverage_concepts_serial(const ClusterCollection& cc,
                                         const std::vector<NConcept>& concepts);

struct CollectionSummary {
    std::size_t count = 0;
    bool defined = false; // false for empty collections: averages undefined
    double avg_rho = 0.0;
    double avg_vol = 0.0;
    double avg_mass = 0.0;
    double avg_rho_mass = 0.0;
    double avg_coverage = 0.0; // avg over clusters of mass/|Y|
};
CollectionSummary collection_summary(const ClusterCollection& cc, std::uint64_t tuple_count);

struct HistogramBin {
    Rational lo;
    Rational hi;
    std::uint64_t count = 0;
};
// Bins [lo, hi), last bin closed at 1. Edges must ascend from 0 to 1.
std::vector<HistogramBin> density_histogram(const ClusterCollection& cc,
                                            std::span<const Rational> edges);
std::vector<Rational> uniform_bin_edges(int bins = 10);
// The irregular layout used by the published density-distribution table:
// 0, 0.05, 0.1, then 0.1-wide bins up to 1.
std::vector<Rational> legacy_bin_edges();

struct ClusterMeasures {
    double rho = 0.0;
    std::uint64_t mass = 0;
    std::uint64_t vol = 0;
    double g = 0.0;
    std::optional<double> mod_l;              // dyadic
    std::optional<StabilityResult> sigma;     // dyadic
    std::optional<bool> weak;                 // dyadic
};

struct QualityReport {
    std::vector<ClusterMeasures> per_cluster;
    double diversity_overall = 1.0;
    std::vector<double> diversity_per_mode;
    double coverage_tuples = 0.0;
    std::vector<double> coverage_per_mode;
    std::optional<ConceptCoverage> concept_coverage;
    CollectionSummary summary;
    std::vector<HistogramBin> histogram;
};

struct QualityOptions {
    std::size_t stability_exact_limit = 24;
    bool with_stability = true;     // dyadic only
    bool with_modularity = true;    // dyadic only
    bool with_weak = true;          // dyadic only
    std::vector<Rational> histogram_edges; // empty: uniform 0.1
    const std::vector<NConcept>* concepts = nullptr; // enables concept coverage
};

QualityReport measure(const ClusterCollection& cc, const NContext& ctx, const QualityOptions& opts);

} // namespace nclust

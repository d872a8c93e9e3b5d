#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "nclust/concepts.hpp"
#include "nclust/context.hpp"
#include "nclust/nclustering.hpp"
#include "nclust/onemode.hpp"
#include "nclust/quality.hpp"

namespace nclust::io {

// Burmeister cross-table: header "B", |G|, |M|, object names, attribute
// names, then rows of '.'/'X'.
NContext read_cxt(const std::filesystem::path& path);
void write_cxt(const NContext& ctx, const std::filesystem::path& path);

struct TupleReadOptions {
    int arity = 3;
    char delimiter = '\t';
    bool header = false;
    std::size_t first_k = 0; // 0 = all records
    bool strict = false;     // abort on malformed lines instead of skipping
    std::vector<std::string> mode_names;
};

struct ReadStats {
    std::size_t lines = 0;
    std::size_t records = 0;
    std::size_t skipped = 0;     // malformed lines in lenient mode
    std::size_t duplicates = 0;  // collapsed duplicate tuples
};

NContext read_tuples(const std::filesystem::path& path, const TupleReadOptions& opts,
                     ReadStats* stats = nullptr);
// Streaming variant feeding the online miner directly.
ReadStats read_tuples_into(const std::filesystem::path& path, const TupleReadOptions& opts,
                           OnlineMiner& miner);
void write_tuples(const NContext& ctx, const std::filesystem::path& path, char delimiter = '\t');

// Edge lists: two whitespace/comma-delimited labels per line; a line with a
// single label declares an isolated vertex. In one-mode reading self-loops
// are dropped with a warning count (strict mode raises).
SimpleGraph read_edge_graph(const std::filesystem::path& path, bool strict = false,
                            ReadStats* stats = nullptr);
NContext read_bipartite_edges(const std::filesystem::path& path, bool strict = false,
                              ReadStats* stats = nullptr);
void write_edge_graph(const SimpleGraph& g, const std::filesystem::path& path);

// Line-delimited JSON records with a header line; read is the exact inverse
// on canonicalized collections.
void write_clusters(const ClusterCollection& cc, const NContext& ctx,
                    const std::filesystem::path& path);

struct ClusterFile {
    int arity = 2;
    std::vector<std::string> mode_names;
    std::vector<std::vector<std::string>> labels; // per mode, id -> label
    ClusterCollection collection;
};
ClusterFile read_clusters(const std::filesystem::path& path);

void write_concepts(const std::vector<NConcept>& concepts, const NContext& ctx,
                    const std::filesystem::path& path);

// Sweep CSV in the published table layout; fractions printed half-up to two
// decimals with the full-precision value in a sidecar column.
void write_sweep(const SweepReport& report, const std::filesystem::path& path);

void write_quality_csv(const QualityReport& report, const std::filesystem::path& path);

// Two-decimal half-up rounding of the exact fraction num/den, rendered as text.
std::string fraction_2dp(std::uint64_t num, std::uint64_t den);
std::string format_double(double v, int precision);

} // namespace nclust::io

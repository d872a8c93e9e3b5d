#include <algorithm>
#include <chrono>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>
#include <json.hpp>

#ifdef _OPENMP
#include <omp.h>
#endif

#include "nclust/io.hpp"
#include "nclust/nclustering.hpp"
#include "nclust/onemode.hpp"
#include "nclust/quality.hpp"

using namespace nclust;
using nlohmann::json;

namespace {

constexpr const char* kVersion = "nclust 1.0.0";

// exit codes: 0 ok, 2 usage, 3 parse, 4 size guard, 5 I/O
enum ExitCode { kOk = 0, kUsage = 2, kParse = 3, kGuard = 4, kIo = 5 };

double ms_since(std::chrono::steady_clock::time_point t0) {
    return std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0)
        .count();
}

struct InputOptions {
    std::string path;
    std::string format = "auto"; // cxt | tsv | csv | edges | bipartite
    int arity = 2;
    std::string delimiter = "\t";
    bool header = false;
    std::size_t first_k = 0;
    std::string encoding = "reflexive";
    bool strict = false;
};

void add_input_options(CLI::App* cmd, InputOptions& in) {
    cmd->add_option("input", in.path, "input file")->required();
    cmd->add_option("--format", in.format, "cxt | tsv | csv | edges | bipartite (default: by extension)")
        ->check(CLI::IsMember({"auto", "cxt", "tsv", "csv", "edges", "bipartite"}));
    cmd->add_option("--arity", in.arity, "tuple arity for delimited files (default 2)");
    cmd->add_option("--delimiter", in.delimiter, "field delimiter for tuple files");
    cmd->add_flag("--header", in.header, "skip the first data line");
    cmd->add_option("--first-k", in.first_k, "consume only the first K records");
    cmd->add_option("--encoding", in.encoding, "1-mode encoding: reflexive | irreflexive")
        ->check(CLI::IsMember({"reflexive", "irreflexive"}));
    cmd->add_flag("--strict", in.strict, "abort on malformed records instead of skipping");
}

std::string resolve_format(const InputOptions& in) {
    if (in.format != "auto")
        return in.format;
    auto ext = std::filesystem::path(in.path).extension().string();
    if (ext == ".cxt")
        return "cxt";
    if (ext == ".tsv" || ext == ".txt")
        return "tsv";
    if (ext == ".csv")
        return "csv";
    if (ext == ".edges" || ext == ".edgelist")
        return "edges";
    throw CLI::ValidationError("--format", "cannot infer format from '" + ext +
                                               "', pass --format explicitly");
}

io::TupleReadOptions tuple_opts(const InputOptions& in, const std::string& fmt) {
    io::TupleReadOptions o;
    o.arity = in.arity;
    o.delimiter = fmt == "csv" ? ',' : (in.delimiter.empty() ? '\t' : in.delimiter[0]);
    o.header = in.header;
    o.first_k = in.first_k;
    o.strict = in.strict;
    return o;
}

NContext load_context(const InputOptions& in, io::ReadStats* stats = nullptr) {
    auto fmt = resolve_format(in);
    if (fmt == "cxt")
        return io::read_cxt(in.path);
    if (fmt == "tsv" || fmt == "csv")
        return io::read_tuples(in.path, tuple_opts(in, fmt), stats);
    if (fmt == "bipartite")
        return io::read_bipartite_edges(in.path, in.strict, stats);
    auto g = io::read_edge_graph(in.path, in.strict, stats);
    return graph_to_context(g, in.encoding == "reflexive" ? Encoding::reflexive
                                                          : Encoding::irreflexive);
}

json input_manifest(const InputOptions& in) {
    return json{{"path", in.path},       {"format", resolve_format(in)},
                {"arity", in.arity},     {"delimiter", in.delimiter},
                {"header", in.header},   {"first_k", in.first_k},
                {"encoding", in.encoding}, {"strict", in.strict}};
}

void write_summary(const std::string& path, const json& j) {
    if (path.empty()) {
        std::cout << j.dump(2) << "\n";
        return;
    }
    std::ofstream out(path);
    if (!out)
        throw IoError("cannot open " + path + " for writing");
    out << j.dump(2) << "\n";
}

void setup_threads(int threads) {
#ifdef _OPENMP
    if (threads <= 0) {
        if (const char* env = std::getenv("NCLUST_THREADS"))
            threads = std::atoi(env);
    }
    if (threads > 0)
        omp_set_num_threads(threads);
#else
    (void)threads;
#endif
}

// Feed every tuple of a prebuilt context into a miner with aligned ids.
void feed_context(OnlineMiner& miner, const NContext& ctx) {
    for (int mode = 0; mode < ctx.arity(); ++mode)
        for (Id x = 0; x < ctx.universe_size(mode); ++x)
            miner.intern(mode, ctx.universe(mode).label(x));
    for (std::size_t t = 0; t < ctx.tuple_count(); ++t)
        miner.add_ids(ctx.tuple(t));
}

int cmd_mine(const InputOptions& in, const std::string& rho_min, bool weak, bool no_dedup,
             const std::string& out_path, const std::string& summary_path, int threads) {
    setup_threads(threads);
    auto fmt = resolve_format(in);
    auto t0 = std::chrono::steady_clock::now();

    std::optional<OnlineMiner> miner;
    std::optional<NContext> prebuilt;
    io::ReadStats rstats;
    if (fmt == "tsv" || fmt == "csv") {
        auto opts = tuple_opts(in, fmt);
        miner.emplace(opts.arity, opts.mode_names);
        rstats = io::read_tuples_into(in.path, opts, *miner);
    } else {
        prebuilt = load_context(in, &rstats);
        miner.emplace(prebuilt->arity(), prebuilt->mode_names());
        feed_context(*miner, *prebuilt);
    }
    double t_generate = ms_since(t0);

    t0 = std::chrono::steady_clock::now();
    NContext ctx = prebuilt ? std::move(*prebuilt) : miner->context();
    ClusterCollection cc = finalize(*miner, ctx);
    double t_finalize = ms_since(t0);

    t0 = std::chrono::steady_clock::now();
    ClusterCollection unique = no_dedup ? cc : deduplicate(cc);
    double t_dedup = ms_since(t0);

    Rational rho = Rational::from_decimal(rho_min);
    ClusterCollection kept = filter_density(unique, rho);
    if (weak)
        kept = filter_weak(kept, ctx);

    if (!out_path.empty())
        io::write_clusters(kept, ctx, out_path);

    auto avg = collection_summary(kept, ctx.tuple_count());
    json universes = json::array();
    for (int i = 0; i < ctx.arity(); ++i)
        universes.push_back(ctx.universe_size(i));
    json summary{
        {"tool", kVersion},
        {"command", "mine"},
        {"input", input_manifest(in)},
        {"parameters", {{"rho_min", rho_min}, {"weak", weak}, {"dedup", !no_dedup},
                        {"threads", threads}}},
        {"read", {{"lines", rstats.lines}, {"records", rstats.records},
                  {"skipped", rstats.skipped}, {"duplicates", rstats.duplicates}}},
        {"context", {{"arity", ctx.arity()}, {"tuples", ctx.tuple_count()},
                     {"universes", universes}}},
        {"clusters", {{"generated", cc.generated}, {"unique", unique.size()},
                      {"kept", kept.size()}}},
        {"averages", avg.defined
                         ? json{{"rho", avg.avg_rho}, {"vol", avg.avg_vol},
                                {"mass", avg.avg_mass}, {"rho_mass", avg.avg_rho_mass},
                                {"coverage", avg.avg_coverage}}
                         : json{{"undefined", true}}},
        {"timing_ms", {{"generation", t_generate}, {"density_dedup", t_finalize + t_dedup},
                       {"finalize", t_finalize}, {"dedup", t_dedup}}},
        {"output", out_path}};
    write_summary(summary_path, summary);
    if (rstats.skipped > 0)
        std::cerr << "warning: skipped " << rstats.skipped << " malformed line(s)\n";
    if (ctx.tuple_count() == 0)
        std::cerr << "warning: empty input relation\n";
    return kOk;
}

int cmd_concepts(const InputOptions& in, std::size_t limit, bool force, bool cliques,
                 std::size_t per_mode_limit, const std::string& out_path,
                 const std::string& summary_path) {
    NContext ctx = load_context(in);
    ConceptOptions guard{limit, force};
    std::vector<NConcept> concepts;
    if (ctx.arity() == 2) {
        concepts = mine_dyadic_concepts(ctx, guard);
    } else {
        concepts = mine_nadic_concepts_bruteforce(ctx, NadicOptions{per_mode_limit, force});
    }
    if (!out_path.empty())
        io::write_concepts(concepts, ctx, out_path);
    json summary{{"tool", kVersion},
                 {"command", "concepts"},
                 {"input", input_manifest(in)},
                 {"parameters", {{"limit", limit}, {"force", force}, {"cliques", cliques},
                                 {"per_mode_limit", per_mode_limit}}},
                 {"concepts", concepts.size()},
                 {"nonempty_extent",
                  std::count_if(concepts.begin(), concepts.end(),
                                [](const NConcept& c) { return !c.components[0].empty(); })},
                 {"nontrivial",
                  std::count_if(concepts.begin(), concepts.end(),
                                [](const NConcept& c) { return c.nontrivial(); })},
                 {"output", out_path}};
    if (cliques) {
        auto qs = concept_cliques(ctx, guard);
        json arr = json::array();
        for (const auto& q : qs) {
            json names = json::array();
            for (Id v : q.members)
                names.push_back(ctx.universe(0).label(v));
            arr.push_back(std::move(names));
        }
        summary["cliques"] = std::move(arr);
    }
    write_summary(summary_path, summary);
    return kOk;
}

std::vector<GridPoint> parse_grid(const std::string& spec) {
    if (spec.empty())
        return default_grid();
    std::vector<GridPoint> grid;
    std::string cur;
    for (char c : spec + ",") {
        if (c == ',') {
            if (!cur.empty())
                grid.push_back(grid_point_from_decimal(cur));
            cur.clear();
        } else {
            cur.push_back(c);
        }
    }
    return grid;
}

int cmd_sweep(const InputOptions& in, const std::string& grid_spec, const std::string& semantics,
              std::size_t limit, bool force, const std::string& out_path,
              const std::string& summary_path, int threads) {
    setup_threads(threads);
    NContext ctx = load_context(in);
    auto grid = parse_grid(grid_spec);
    auto sem = semantics == "float64" ? RhoSemantics::float64 : RhoSemantics::exact;
    auto t0 = std::chrono::steady_clock::now();
    SweepReport report = sweep(ctx, grid, sem, ConceptOptions{limit, force});
    double elapsed = ms_since(t0);
    if (!out_path.empty())
        io::write_sweep(report, out_path);
    json rows = json::array();
    for (const auto& r : report.rows)
        rows.push_back({{"rho", r.rho},
                        {"covered", r.covered_concepts},
                        {"unique", r.unique_clusters},
                        {"generated", r.generated_clusters},
                        {"fraction", r.fraction}});
    json summary{{"tool", kVersion},
                 {"command", "sweep"},
                 {"input", input_manifest(in)},
                 {"parameters", {{"grid", grid_spec.empty() ? "default(0:1:0.05)" : grid_spec},
                                 {"rho_semantics", semantics}, {"limit", limit},
                                 {"threads", threads}}},
                 {"nontrivial_concepts", report.nontrivial_concepts},
                 {"rows", rows},
                 {"timing_ms", {{"sweep", elapsed}}},
                 {"output", out_path}};
    write_summary(summary_path, summary);
    return kOk;
}

int cmd_measure(const InputOptions& in, const std::string& clusters_path,
                const std::string& histogram, std::size_t stability_limit, bool with_concepts,
                std::size_t limit, bool force, const std::string& out_path,
                const std::string& summary_path, int threads) {
    setup_threads(threads);
    NContext ctx = load_context(in);
    io::ClusterFile file = io::read_clusters(clusters_path);
    if (file.arity != ctx.arity())
        throw SchemaError("cluster file arity " + std::to_string(file.arity) +
                          " does not match context arity " + std::to_string(ctx.arity()));
    // Re-map cluster ids onto the context universes via labels.
    ClusterCollection cc;
    cc.arity = file.arity;
    cc.generated = file.collection.generated;
    for (const auto& c : file.collection.clusters) {
        NCluster out = c;
        for (int i = 0; i < file.arity; ++i) {
            auto remap = [&](Id id) {
                auto found = ctx.universe(i).find(file.labels[i][id]);
                if (!found)
                    throw SchemaError("cluster label '" + file.labels[i][id] +
                                      "' not present in context mode " + std::to_string(i));
                return *found;
            };
            out.generator[i] = remap(c.generator[i]);
            out.components[i].members.clear();
            for (Id id : c.components[i].members)
                out.components[i].members.push_back(remap(id));
            sort_unique(out.components[i].members);
        }
        cc.clusters.push_back(std::move(out));
    }

    QualityOptions qopts;
    qopts.stability_exact_limit = stability_limit;
    if (histogram == "legacy")
        qopts.histogram_edges = legacy_bin_edges();
    std::vector<NConcept> concepts;
    if (with_concepts && ctx.arity() == 2) {
        concepts = mine_dyadic_concepts(ctx, ConceptOptions{limit, force});
        qopts.concepts = &concepts;
    }
    QualityReport report = measure(cc, ctx, qopts);
    if (!out_path.empty())
        io::write_quality_csv(report, out_path);

    json hist = json::array();
    for (const auto& b : report.histogram)
        hist.push_back({{"lo", b.lo.value()}, {"hi", b.hi.value()}, {"count", b.count}});
    json summary{{"tool", kVersion},
                 {"command", "measure"},
                 {"input", input_manifest(in)},
                 {"clusters", clusters_path},
                 {"parameters", {{"histogram", histogram}, {"stability_limit", stability_limit},
                                 {"concept_coverage", with_concepts}, {"threads", threads}}},
                 {"count", cc.size()},
                 {"diversity", report.diversity_overall},
                 {"diversity_per_mode", report.diversity_per_mode},
                 {"coverage_tuples", report.coverage_tuples},
                 {"coverage_per_mode", report.coverage_per_mode},
                 {"histogram", hist},
                 {"averages", report.summary.defined
                                  ? json{{"rho", report.summary.avg_rho},
                                         {"vol", report.summary.avg_vol},
                                         {"mass", report.summary.avg_mass},
                                         {"rho_mass", report.summary.avg_rho_mass},
                                         {"coverage", report.summary.avg_coverage}}
                                  : json{{"undefined", true}}},
                 {"output", out_path}};
    if (report.concept_coverage)
        summary["concept_coverage"] = {{"covered", report.concept_coverage->covered},
                                       {"total", report.concept_coverage->total},
                                       {"fraction", report.concept_coverage->fraction}};
    write_summary(summary_path, summary);
    return kOk;
}

int cmd_convert(const InputOptions& in, const std::string& to, const std::string& out_path,
                bool force) {
    auto fmt = resolve_format(in);
    if (to == "cxt") {
        NContext ctx = load_context(in);
        if (ctx.arity() != 2)
            throw SchemaError("CXT output requires a dyadic context");
        io::write_cxt(ctx, out_path);
        return kOk;
    }
    if (to == "tsv") {
        NContext ctx = load_context(in);
        // Tuple files carry no universe declarations, so elements outside
        // every tuple would vanish.
        if (!force) {
            for (int i = 0; i < ctx.arity(); ++i)
                for (Id x = 0; x < ctx.universe_size(i); ++x)
                    if (ctx.tuples_of(i, x).empty())
                        throw SchemaError("element '" + ctx.universe(i).label(x) +
                                          "' appears in no tuple; conversion to a tuple file "
                                          "drops it. Pass --force to proceed");
        }
        io::write_tuples(ctx, out_path);
        return kOk;
    }
    if (to == "edges") {
        if (fmt == "edges") {
            auto g = io::read_edge_graph(in.path, in.strict);
            io::write_edge_graph(g, out_path);
            return kOk;
        }
        // Context -> 1-mode edge list loses the diagonal and direction; refuse
        // unless forced.
        if (!force)
            throw SchemaError("converting a context to a 1-mode edge list is lossy; "
                              "pass --force to proceed");
        NContext ctx = load_context(in);
        if (ctx.arity() != 2 || ctx.universe_size(0) != ctx.universe_size(1))
            throw SchemaError("edge-list output requires a square dyadic context");
        SimpleGraph g;
        for (Id v = 0; v < ctx.universe_size(0); ++v)
            g.add_vertex(ctx.universe(0).label(v));
        for (std::size_t t = 0; t < ctx.tuple_count(); ++t) {
            auto tp = ctx.tuple(t);
            if (tp[0] != tp[1])
                g.add_edge_ids(tp[0], tp[1]);
        }
        io::write_edge_graph(g, out_path);
        return kOk;
    }
    throw CLI::ValidationError("--to", "unknown target format " + to);
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"nclust: OA-bicluster / prime n-cluster mining and quality measures"};
    app.set_version_flag("--version", kVersion);
    app.require_subcommand(1);

    int threads = 0;
    app.add_option("--threads", threads, "worker threads (0 = library default / NCLUST_THREADS)");

    // mine
    InputOptions mine_in;
    std::string mine_rho = "0";
    bool mine_weak = false, mine_no_dedup = false;
    std::string mine_out, mine_summary;
    auto* mine = app.add_subcommand("mine", "generate clusters in one online pass");
    add_input_options(mine, mine_in);
    mine->add_option("--rho-min", mine_rho, "minimal density (decimal, default 0)");
    mine->add_flag("--weak", mine_weak, "apply the weak-community cut filter (dyadic)");
    mine->add_flag("--no-dedup", mine_no_dedup, "keep duplicate clusters");
    mine->add_option("-o,--out", mine_out, "cluster records output (JSONL)");
    mine->add_option("--summary", mine_summary, "summary JSON path (default: stdout)");

    // concepts
    InputOptions con_in;
    std::size_t con_limit = 64, con_pml = 12;
    bool con_force = false, con_cliques = false;
    std::string con_out, con_summary;
    auto* con = app.add_subcommand("concepts", "exact formal concepts (dyadic or brute-force n-adic)");
    add_input_options(con, con_in);
    con->add_option("--limit", con_limit, "dyadic size guard: min(|G|,|M|) (default 64)");
    con->add_option("--per-mode-limit", con_pml, "n-adic brute-force per-mode guard (default 12)");
    con->add_flag("--force", con_force, "override size guards");
    con->add_flag("--cliques", con_cliques, "also list clique concepts (square reflexive contexts)");
    con->add_option("-o,--out", con_out, "concept records output (JSONL)");
    con->add_option("--summary", con_summary, "summary JSON path (default: stdout)");

    // sweep
    InputOptions sw_in;
    std::string sw_grid, sw_sem = "exact", sw_out, sw_summary;
    std::size_t sw_limit = 64;
    bool sw_force = false;
    auto* sw = app.add_subcommand("sweep", "density-grid report with concept coverage");
    add_input_options(sw, sw_in);
    sw->add_option("--grid", sw_grid, "comma-separated rho values (default 0,0.05,...,1)");
    sw->add_option("--rho-semantics", sw_sem,
                   "exact (rational) or float64 (chained-division binary64 thresholds)")
        ->check(CLI::IsMember({"exact", "float64"}));
    sw->add_option("--limit", sw_limit, "concept-mining size guard");
    sw->add_flag("--force", sw_force, "override size guard");
    sw->add_option("-o,--out", sw_out, "sweep CSV path");
    sw->add_option("--summary", sw_summary, "summary JSON path (default: stdout)");

    // measure
    InputOptions me_in;
    std::string me_clusters, me_hist = "uniform", me_out, me_summary;
    std::size_t me_stab = 24, me_limit = 64;
    bool me_concepts = false, me_force = false;
    auto* me = app.add_subcommand("measure", "quality measures for a cluster file");
    add_input_options(me, me_in);
    me->add_option("--clusters", me_clusters, "cluster records file (JSONL)")->required();
    me->add_option("--histogram", me_hist, "uniform | legacy bin edges")
        ->check(CLI::IsMember({"uniform", "legacy"}));
    me->add_option("--stability-limit", me_stab, "exact stability enumeration limit (default 24)");
    me->add_flag("--concept-coverage", me_concepts, "compute concept coverage (dyadic)");
    me->add_option("--limit", me_limit, "concept-mining size guard");
    me->add_flag("--force", me_force, "override size guard");
    me->add_option("-o,--out", me_out, "per-cluster CSV path");
    me->add_option("--summary", me_summary, "summary JSON path (default: stdout)");

    // convert
    InputOptions cv_in;
    std::string cv_to = "cxt", cv_out;
    bool cv_force = false;
    auto* cv = app.add_subcommand("convert", "convert among edge list / CXT / tuple formats");
    add_input_options(cv, cv_in);
    cv->add_option("--to", cv_to, "target format: cxt | tsv | edges")->required();
    cv->add_option("-o,--out", cv_out, "output path")->required();
    cv->add_flag("--force", cv_force, "allow lossy conversions");

    try {
        app.parse(argc, argv);
        if (*mine)
            return cmd_mine(mine_in, mine_rho, mine_weak, mine_no_dedup, mine_out, mine_summary,
                            threads);
        if (*con)
            return cmd_concepts(con_in, con_limit, con_force, con_cliques, con_pml, con_out,
                                con_summary);
        if (*sw)
            return cmd_sweep(sw_in, sw_grid, sw_sem, sw_limit, sw_force, sw_out, sw_summary,
                             threads);
        if (*me)
            return cmd_measure(me_in, me_clusters, me_hist, me_stab, me_concepts, me_limit,
                               me_force, me_out, me_summary, threads);
        if (*cv)
            return cmd_convert(cv_in, cv_to, cv_out, cv_force);
        return kUsage;
    } catch (const CLI::ParseError& e) {
        int rc = app.exit(e);
        return rc == 0 ? kOk : kUsage;
    } catch (const ParseError& e) {
        std::cerr << "parse error: " << e.what() << "\n";
        return kParse;
    } catch (const SizeGuardError& e) {
        std::cerr << "size guard: " << e.what() << "\n";
        return kGuard;
    } catch (const IoError& e) {
        std::cerr << "I/O error: " << e.what() << "\n";
        return kIo;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kUsage;
    }
}

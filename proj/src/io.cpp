#include "nclust/io.hpp"

#include <charconv>
#include <fstream>
#include <sstream>

#include <json.hpp>

namespace nclust::io {

using nlohmann::json;

namespace {

std::ifstream open_in(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in)
        throw IoError("cannot open " + path.string());
    return in;
}

std::ofstream open_out(const std::filesystem::path& path) {
    std::ofstream out(path);
    if (!out)
        throw IoError("cannot open " + path.string() + " for writing");
    return out;
}

std::string trim(std::string s) {
    auto issp = [](unsigned char c) { return c == ' ' || c == '\t' || c == '\r' || c == '\n'; };
    std::size_t b = 0, e = s.size();
    while (b < e && issp(s[b]))
        ++b;
    while (e > b && issp(s[e - 1]))
        --e;
    return s.substr(b, e - b);
}

// next non-empty line; returns false on EOF
bool next_line(std::istream& in, std::string& line, std::size_t& line_no, bool skip_empty) {
    while (std::getline(in, line)) {
        ++line_no;
        if (!skip_empty || !trim(line).empty())
            return true;
    }
    return false;
}

std::vector<std::string> split(const std::string& line, char delim) {
    std::vector<std::string> out;
    std::string field;
    std::istringstream ss(line);
    while (std::getline(ss, field, delim))
        out.push_back(trim(field));
    if (!line.empty() && line.back() == delim)
        out.push_back("");
    return out;
}

std::vector<std::string> split_ws(const std::string& line) {
    std::vector<std::string> out;
    std::string cur;
    for (char ch : line) {
        if (ch == ' ' || ch == '\t' || ch == ',' || ch == '\r') {
            if (!cur.empty()) {
                out.push_back(cur);
                cur.clear();
            }
        } else {
            cur.push_back(ch);
        }
    }
    if (!cur.empty())
        out.push_back(cur);
    return out;
}

} // namespace

NContext read_cxt(const std::filesystem::path& path) {
    auto in = open_in(path);
    std::string line;
    std::size_t ln = 0;
    if (!next_line(in, line, ln, true) || trim(line) != "B")
        throw ParseError("CXT header 'B' expected", ln);
    auto read_int = [&](const char* what) {
        if (!next_line(in, line, ln, true))
            throw ParseError(std::string("unexpected end of file, expected ") + what, ln);
        std::size_t v = 0;
        auto t = trim(line);
        auto [p, ec] = std::from_chars(t.data(), t.data() + t.size(), v);
        if (ec != std::errc() || p != t.data() + t.size())
            throw ParseError(std::string("malformed ") + what + ": '" + t + "'", ln);
        return v;
    };
    std::size_t n_objs = read_int("object count");
    std::size_t n_attrs = read_int("attribute count");
    std::vector<std::string> objs, attrs;
    for (std::size_t i = 0; i < n_objs; ++i) {
        if (!next_line(in, line, ln, true))
            throw ParseError("missing object name", ln);
        objs.push_back(trim(line));
    }
    for (std::size_t i = 0; i < n_attrs; ++i) {
        if (!next_line(in, line, ln, true))
            throw ParseError("missing attribute name", ln);
        attrs.push_back(trim(line));
    }
    ContextBuilder b(2, {"object", "attribute"});
    for (const auto& o : objs)
        b.intern(0, o);
    for (const auto& a : attrs)
        b.intern(1, a);
    std::vector<Id> t(2);
    for (std::size_t g = 0; g < n_objs; ++g) {
        if (!next_line(in, line, ln, true))
            throw ParseError("missing incidence row", ln);
        auto row = trim(line);
        if (row.size() != n_attrs)
            throw ParseError("incidence row has " + std::to_string(row.size()) +
                                 " cells, expected " + std::to_string(n_attrs),
                             ln);
        for (std::size_t m = 0; m < n_attrs; ++m) {
            char c = row[m];
            if (c == 'X' || c == 'x') {
                t[0] = static_cast<Id>(g);
                t[1] = static_cast<Id>(m);
                b.add_ids(t);
            } else if (c != '.') {
                throw ParseError(std::string("unexpected cell character '") + c + "'", ln);
            }
        }
    }
    return b.build();
}

void write_cxt(const NContext& ctx, const std::filesystem::path& path) {
    if (ctx.arity() != 2)
        throw ArityError("CXT files are dyadic");
    auto out = open_out(path);
    const std::size_t n_objs = ctx.universe_size(0), n_attrs = ctx.universe_size(1);
    out << "B\n\n" << n_objs << "\n" << n_attrs << "\n\n";
    for (Id g = 0; g < n_objs; ++g)
        out << ctx.universe(0).label(g) << "\n";
    for (Id m = 0; m < n_attrs; ++m)
        out << ctx.universe(1).label(m) << "\n";
    for (Id g = 0; g < n_objs; ++g) {
        std::string row(n_attrs, '.');
        for (std::uint32_t t : ctx.tuples_of(0, g))
            row[ctx.tuple(t)[1]] = 'X';
        out << row << "\n";
    }
}

NContext read_tuples(const std::filesystem::path& path, const TupleReadOptions& opts,
                     ReadStats* stats) {
    OnlineMiner miner(opts.arity, opts.mode_names);
    ReadStats st = read_tuples_into(path, opts, miner);
    if (stats)
        *stats = st;
    return miner.context();
}

ReadStats read_tuples_into(const std::filesystem::path& path, const TupleReadOptions& opts,
                           OnlineMiner& miner) {
    auto in = open_in(path);
    ReadStats st;
    std::string line;
    std::size_t ln = 0;
    bool header_pending = opts.header;
    while (std::getline(in, line)) {
        ++ln;
        ++st.lines;
        if (trim(line).empty())
            continue;
        if (header_pending) {
            header_pending = false;
            continue;
        }
        auto fields = split(line, opts.delimiter);
        bool ok = fields.size() == static_cast<std::size_t>(opts.arity);
        if (ok)
            for (const auto& f : fields)
                if (f.empty())
                    ok = false;
        if (!ok) {
            if (opts.strict)
                throw ParseError("expected " + std::to_string(opts.arity) +
                                     " non-empty fields, got " + std::to_string(fields.size()),
                                 ln);
            ++st.skipped;
            continue;
        }
        if (!miner.add(fields))
            ++st.duplicates;
        ++st.records;
        if (opts.first_k && st.records >= opts.first_k)
            break;
    }
    return st;
}

void write_tuples(const NContext& ctx, const std::filesystem::path& path, char delimiter) {
    auto out = open_out(path);
    for (std::size_t t = 0; t < ctx.tuple_count(); ++t) {
        auto tp = ctx.tuple(t);
        for (int i = 0; i < ctx.arity(); ++i) {
            if (i)
                out << delimiter;
            out << ctx.universe(i).label(tp[i]);
        }
        out << "\n";
    }
}

SimpleGraph read_edge_graph(const std::filesystem::path& path, bool strict, ReadStats* stats) {
    auto in = open_in(path);
    SimpleGraph g;
    ReadStats st;
    std::string line;
    std::size_t ln = 0;
    while (std::getline(in, line)) {
        ++ln;
        ++st.lines;
        auto t = trim(line);
        if (t.empty() || t[0] == '#')
            continue;
        auto fields = split_ws(t);
        if (fields.size() == 1) {
            g.add_vertex(fields[0]); // isolated vertex declaration
            ++st.records;
            continue;
        }
        if (fields.size() != 2) {
            if (strict)
                throw ParseError("expected one or two labels", ln);
            ++st.skipped;
            continue;
        }
        if (fields[0] == fields[1]) { // self-loop
            if (strict)
                throw ParseError("self-loop '" + fields[0] + "'", ln);
            g.add_vertex(fields[0]);
            ++st.skipped;
            continue;
        }
        if (!g.add_edge(fields[0], fields[1]))
            ++st.duplicates;
        ++st.records;
    }
    if (stats)
        *stats = st;
    return g;
}

NContext read_bipartite_edges(const std::filesystem::path& path, bool strict, ReadStats* stats) {
    auto in = open_in(path);
    ContextBuilder b(2, {"left", "right"});
    ReadStats st;
    std::string line;
    std::size_t ln = 0;
    while (std::getline(in, line)) {
        ++ln;
        ++st.lines;
        auto t = trim(line);
        if (t.empty() || t[0] == '#')
            continue;
        auto fields = split_ws(t);
        if (fields.size() != 2) {
            if (strict)
                throw ParseError("expected two labels", ln);
            ++st.skipped;
            continue;
        }
        std::vector<std::string> rec{fields[0], fields[1]};
        if (!b.add(rec))
            ++st.duplicates;
        ++st.records;
    }
    if (stats)
        *stats = st;
    return b.build();
}

void write_edge_graph(const SimpleGraph& g, const std::filesystem::path& path) {
    auto out = open_out(path);
    std::vector<bool> used(g.vertex_count(), false);
    for (Id v = 0; v < g.vertex_count(); ++v)
        for (Id u : g.neighbors(v))
            if (v < u) {
                out << g.labels().label(v) << " " << g.labels().label(u) << "\n";
                used[v] = used[u] = true;
            }
    for (Id v = 0; v < g.vertex_count(); ++v)
        if (!used[v] && g.degree(v) == 0)
            out << g.labels().label(v) << "\n";
}

namespace {

json cluster_to_json(const NCluster& c, const NContext& ctx) {
    json j;
    json gen = json::array();
    for (int i = 0; i < static_cast<int>(c.generator.size()); ++i)
        gen.push_back(ctx.universe(i).label(c.generator[i]));
    j["generator"] = std::move(gen);
    json comps = json::array();
    for (int i = 0; i < static_cast<int>(c.components.size()); ++i) {
        json comp = json::array();
        for (Id x : c.components[i].members)
            comp.push_back(ctx.universe(i).label(x));
        comps.push_back(std::move(comp));
    }
    j["components"] = std::move(comps);
    j["rho"] = c.rho();
    j["mass"] = c.mass;
    j["vol"] = c.vol;
    j["flags"] = {{"is_concept", c.is_concept}, {"passes_weak", c.passes_weak}};
    return j;
}

constexpr int kClusterFormatVersion = 1;

} // namespace

void write_clusters(const ClusterCollection& cc, const NContext& ctx,
                    const std::filesystem::path& path) {
    auto out = open_out(path);
    json header{{"format", "nclust.clusters"},
                {"version", kClusterFormatVersion},
                {"arity", cc.arity},
                {"modes", ctx.mode_names()},
                {"generated", cc.generated}};
    out << header.dump() << "\n";
    for (const auto& c : cc.clusters)
        out << cluster_to_json(c, ctx).dump() << "\n";
}

ClusterFile read_clusters(const std::filesystem::path& path) {
    auto in = open_in(path);
    std::string line;
    std::size_t ln = 0;
    if (!std::getline(in, line))
        throw ParseError("empty cluster file", 1);
    ++ln;
    json header = json::parse(line, nullptr, false);
    if (header.is_discarded() || header.value("format", "") != "nclust.clusters")
        throw SchemaError("not a cluster file: " + path.string());
    if (header.value("version", -1) != kClusterFormatVersion)
        throw SchemaError("unsupported cluster file version");
    ClusterFile file;
    file.arity = header.value("arity", 2);
    file.mode_names = header.value("modes", std::vector<std::string>{});
    file.collection.arity = file.arity;
    file.collection.generated = header.value("generated", 0ull);
    file.labels.resize(file.arity);
    std::vector<std::unordered_map<std::string, Id>> index(file.arity);
    auto intern = [&](int mode, const std::string& label) {
        auto [it, inserted] = index[mode].try_emplace(label, static_cast<Id>(file.labels[mode].size()));
        if (inserted)
            file.labels[mode].push_back(label);
        return it->second;
    };
    while (std::getline(in, line)) {
        ++ln;
        if (trim(line).empty())
            continue;
        json j = json::parse(line, nullptr, false);
        if (j.is_discarded())
            throw ParseError("malformed JSON record", ln);
        if (!j.contains("generator") || !j.contains("components") || !j.contains("mass") ||
            !j.contains("vol"))
            throw SchemaError("cluster record missing required fields (line " +
                              std::to_string(ln) + ")");
        NCluster c;
        const auto& gen = j["generator"];
        const auto& comps = j["components"];
        if (static_cast<int>(gen.size()) != file.arity ||
            static_cast<int>(comps.size()) != file.arity)
            throw SchemaError("cluster record arity mismatch (line " + std::to_string(ln) + ")");
        for (int i = 0; i < file.arity; ++i)
            c.generator.push_back(intern(i, gen[i].get<std::string>()));
        for (int i = 0; i < file.arity; ++i) {
            ElementSet es{i, {}};
            for (const auto& lbl : comps[i])
                es.members.push_back(intern(i, lbl.get<std::string>()));
            sort_unique(es.members);
            c.components.push_back(std::move(es));
        }
        c.mass = j["mass"].get<std::uint64_t>();
        c.vol = j["vol"].get<std::uint64_t>();
        if (j.contains("flags")) {
            c.is_concept = j["flags"].value("is_concept", false);
            c.passes_weak = j["flags"].value("passes_weak", false);
        }
        file.collection.clusters.push_back(std::move(c));
    }
    return file;
}

void write_concepts(const std::vector<NConcept>& concepts, const NContext& ctx,
                    const std::filesystem::path& path) {
    auto out = open_out(path);
    json header{{"format", "nclust.concepts"},
                {"version", 1},
                {"arity", ctx.arity()},
                {"modes", ctx.mode_names()},
                {"count", concepts.size()}};
    out << header.dump() << "\n";
    for (const auto& c : concepts) {
        json comps = json::array();
        for (int i = 0; i < static_cast<int>(c.components.size()); ++i) {
            json comp = json::array();
            for (Id x : c.components[i].members)
                comp.push_back(ctx.universe(i).label(x));
            comps.push_back(std::move(comp));
        }
        out << json{{"components", std::move(comps)}}.dump() << "\n";
    }
}

std::string format_double(double v, int precision) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.*f", precision, v);
    return buf;
}

std::string fraction_2dp(std::uint64_t num, std::uint64_t den) {
    if (den == 0)
        return "nan";
    // half-up rounding of 100*num/den, done in integers
    std::uint64_t scaled = (200 * num + den) / (2 * den);
    return std::to_string(scaled / 100) + "." + (scaled % 100 < 10 ? "0" : "") +
           std::to_string(scaled % 100);
}

void write_sweep(const SweepReport& report, const std::filesystem::path& path) {
    auto out = open_out(path);
    out << "rho,covered_concepts,unique_biclusters,biclusters,fraction,fraction_full\n";
    for (const auto& row : report.rows) {
        out << format_double(row.rho, 2) << "," << row.covered_concepts << ","
            << row.unique_clusters << "," << row.generated_clusters << ","
            << fraction_2dp(row.covered_concepts, row.concepts_total) << ","
            << format_double(row.fraction, 17) << "\n";
    }
}

void write_quality_csv(const QualityReport& report, const std::filesystem::path& path) {
    auto out = open_out(path);
    out << "rho,mass,vol,g_score,local_modularity,stability,stability_exact,weak\n";
    for (const auto& m : report.per_cluster) {
        out << format_double(m.rho, 6) << "," << m.mass << "," << m.vol << ","
            << format_double(m.g, 6) << ",";
        if (m.mod_l)
            out << format_double(*m.mod_l, 6);
        out << ",";
        if (m.sigma)
            out << format_double(m.sigma->value, 9) << "," << (m.sigma->exact ? "exact" : "bound");
        else
            out << ",";
        out << ",";
        if (m.weak)
            out << (*m.weak ? "1" : "0");
        out << "\n";
    }
}

} // namespace nclust::io

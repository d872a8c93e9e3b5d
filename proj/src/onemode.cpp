#include "nclust/onemode.hpp"

#include <algorithm>

namespace nclust {

bool SimpleGraph::add_edge(std::string_view a, std::string_view b) {
    Id ia = labels_.intern(a); // sequenced: first label in the file interns first
    Id ib = labels_.intern(b);
    return add_edge_ids(ia, ib);
}

bool SimpleGraph::add_edge_ids(Id a, Id b) {
    if (a == b)
        throw InvalidElementError("self-loop rejected: " + labels_.label(a));
    std::size_t need = std::max(a, b) + 1;
    if (adj_.size() < need) {
        adj_.resize(need);
        dirty_.resize(need, false);
    }
    if (has_edge(a, b))
        return false;
    adj_[a].push_back(b);
    adj_[b].push_back(a);
    dirty_[a] = dirty_[b] = true;
    ++edges_;
    return true;
}

const std::vector<Id>& SimpleGraph::neighbors(Id v) const {
    if (v >= labels_.size())
        throw InvalidElementError("unknown vertex id " + std::to_string(v));
    if (adj_.size() < labels_.size()) {
        adj_.resize(labels_.size());
        dirty_.resize(labels_.size(), false);
    }
    if (dirty_[v]) {
        std::sort(adj_[v].begin(), adj_[v].end());
        dirty_[v] = false;
    }
    return adj_[v];
}

bool SimpleGraph::has_edge(Id a, Id b) const {
    if (a >= labels_.size() || b >= labels_.size())
        return false;
    const auto& na = neighbors(a);
    return std::binary_search(na.begin(), na.end(), b);
}

NContext graph_to_context(const SimpleGraph& g, Encoding enc) {
    ContextBuilder b(2, {"vertex", "vertex"});
    // Intern all vertices in id order on both sides so isolated vertices keep
    // their place in the universes.
    const std::size_t n = g.vertex_count();
    for (std::size_t mode = 0; mode < 2; ++mode)
        for (Id v = 0; v < n; ++v)
            b.intern(static_cast<int>(mode), g.labels().label(v));
    std::vector<Id> t(2);
    for (Id v = 0; v < n; ++v) {
        for (Id u : g.neighbors(v)) {
            t[0] = v;
            t[1] = u;
            b.add_ids(t);
        }
        if (enc == Encoding::reflexive) {
            t[0] = t[1] = v;
            b.add_ids(t);
        }
    }
    return b.build();
}

double local_cc(const SimpleGraph& g, Id v) {
    const auto& nv = g.neighbors(v);
    const std::size_t d = nv.size();
    if (d < 2)
        return 0.0;
    std::uint64_t links = 0;
    for (std::size_t i = 0; i < d; ++i)
        for (std::size_t j = i + 1; j < d; ++j)
            if (g.has_edge(nv[i], nv[j]))
                ++links;
    return static_cast<double>(links) /
           (static_cast<double>(d) * static_cast<double>(d - 1) / 2.0);
}

CcDensityPair cc_density_pair(const SimpleGraph& g, Id v) {
    const auto& nv = g.neighbors(v);
    if (nv.empty())
        throw InvalidElementError("cc_density_pair requires deg(v) >= 1");
    CcDensityPair out;
    out.neighborhood = nv.size();
    out.vol = static_cast<std::uint64_t>(nv.size()) * nv.size();
    std::uint64_t links = 0;
    for (std::size_t i = 0; i < nv.size(); ++i)
        for (std::size_t j = i + 1; j < nv.size(); ++j)
            if (g.has_edge(nv[i], nv[j]))
                ++links;
    out.mass = 2 * links; // ordered pairs
    out.rho = static_cast<double>(out.mass) / static_cast<double>(out.vol);
    out.cc = local_cc(g, v);
    return out;
}

} // namespace nclust

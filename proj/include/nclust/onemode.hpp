#pragma once

#include <cstddef>
#include <string_view>
#include <vector>

#include "nclust/context.hpp"

namespace nclust {

// Undirected simple graph with interned vertex labels. No loops, no duplicate
// edges.
class SimpleGraph {
public:
    Id add_vertex(std::string_view label) { return labels_.intern(label); }
    // Adds both endpoints as needed; returns false for duplicates. Self-loops
    // are rejected with InvalidElementError.
    bool add_edge(std::string_view a, std::string_view b);
    bool add_edge_ids(Id a, Id b);

    std::size_t vertex_count() const { return labels_.size(); }
    std::size_t edge_count() const { return edges_; }
    const Interner& labels() const { return labels_; }
    const std::vector<Id>& neighbors(Id v) const; // sorted
    std::size_t degree(Id v) const { return neighbors(v).size(); }
    bool has_edge(Id a, Id b) const;

private:
    Interner labels_;
    mutable std::vector<std::vector<Id>> adj_;
    mutable std::vector<bool> dirty_;
    std::size_t edges_ = 0;
};

enum class Encoding { reflexive, irreflexive };

// Square dyadic context with gIh iff {g,h} is an edge, plus the diagonal when
// reflexive. |I| = 2|E| (+|V| if reflexive).
NContext graph_to_context(const SimpleGraph& g, Encoding enc);

// Fraction of realized edges among the neighbours of v; 0 when deg(v) < 2.
double local_cc(const SimpleGraph& g, Id v);

struct CcDensityPair {
    double rho = 0.0;       // density of N(v) x N(v) under the irreflexive encoding
    double cc = 0.0;        // local clustering coefficient
    std::size_t neighborhood = 0;
    std::uint64_t mass = 0; // ordered neighbour pairs joined by an edge
    std::uint64_t vol = 0;  // |N(v)|^2
};

// Diagnostic region, not a mined OA-bicluster: relates rho(v',v') to cc(v) via
// rho = cc * (1 - 1/|N(v)|). Requires deg(v) >= 1.
CcDensityPair cc_density_pair(const SimpleGraph& g, Id v);

} // namespace nclust

#pragma once

#include <cstddef>
#include <vector>

#include "nclust/context.hpp"

namespace nclust {

// A maximal box fully inside the relation. Dyadic case: components[0] is the
// extent, components[1] the intent, and extent' = intent, intent' = extent.
struct NConcept {
    std::vector<ElementSet> components;

    bool operator==(const NConcept&) const = default;
    bool nontrivial() const {
        for (const auto& c : components)
            if (c.empty())
                return false;
        return !components.empty();
    }
};

struct ConceptOptions {
    std::size_t limit = 64;     // refuse when min(|G|,|M|) exceeds this
    bool override_guard = false;
};

// Complete set of formal concepts of a dyadic context via lectic (NextClosure)
// enumeration, boundary concepts included. Canonically ordered by extent.
std::vector<NConcept> mine_dyadic_concepts(const NContext& ctx, ConceptOptions opts = {});

struct NadicOptions {
    std::size_t per_mode_limit = 12;
    bool override_guard = false;
};

// Brute-force n-adic concepts (all component-wise maximal full boxes with
// every component non-empty). Oracle-grade: correctness over speed.
std::vector<NConcept> mine_nadic_concepts_bruteforce(const NContext& ctx, NadicOptions opts = {});

// true iff every concept component is contained in the corresponding box
// component.
bool covered_by(const NConcept& concept_, const std::vector<ElementSet>& box);

// For a square context encoding a symmetric reflexive relation: extents of all
// concepts (A,B) with A = B. Each returned set is a maximal clique of the
// underlying graph.
std::vector<ElementSet> concept_cliques(const NContext& ctx, ConceptOptions opts = {});

} // namespace nclust

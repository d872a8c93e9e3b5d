#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "nclust/errors.hpp"

namespace nclust {

using Id = std::uint32_t;

// Sorted, duplicate-free id vectors are the working representation of all
// element sets. Helpers below assume (and preserve) that invariant.
bool contains(const std::vector<Id>& sorted, Id x);
bool is_subset(const std::vector<Id>& a, const std::vector<Id>& b);
std::vector<Id> set_intersect(const std::vector<Id>& a, const std::vector<Id>& b);
std::vector<Id> set_union(const std::vector<Id>& a, const std::vector<Id>& b);
bool intersects(const std::vector<Id>& a, const std::vector<Id>& b);
void sort_unique(std::vector<Id>& v);

// A set of elements of one mode of an n-adic context.
struct ElementSet {
    int mode = 0;
    std::vector<Id> members; // sorted, unique

    bool empty() const { return members.empty(); }
    std::size_t size() const { return members.size(); }
    bool operator==(const ElementSet&) const = default;
};

// An n-dimensional box: one ElementSet per mode. vol = product of component
// sizes, 0 as soon as any component is empty.
struct Box {
    std::vector<ElementSet> components;

    std::uint64_t volume() const;
};

// mass / vol with rho left undefined (never 0/0) for empty boxes.
struct Density {
    std::uint64_t mass = 0;
    std::uint64_t vol = 0;

    bool has_rho() const { return vol > 0; }
    double rho() const; // requires has_rho()
};

// Exact comparison mass/vol >= num/den without going through floating point.
bool rho_at_least(std::uint64_t mass, std::uint64_t vol, std::int64_t num, std::uint64_t den);

// Decimal thresholds ("0.8") kept exact.
struct Rational {
    std::int64_t num = 0;
    std::uint64_t den = 1;

    static Rational from_decimal(std::string_view text); // throws std::invalid_argument
    double value() const { return static_cast<double>(num) / static_cast<double>(den); }
};

// Per-mode label interning: labels map to dense ids in first-seen order.
class Interner {
public:
    Id intern(std::string_view label);
    std::optional<Id> find(std::string_view label) const;
    const std::string& label(Id id) const { return labels_.at(id); }
    std::size_t size() const { return labels_.size(); }

private:
    std::vector<std::string> labels_;
    std::unordered_map<std::string, Id> index_;
};

// An n-adic formal context (X1, ..., Xn, Y): n interned universes plus a
// canonically sorted tuple set with a per-mode inverted index. Immutable
// after construction; all member functions are const and thread-safe.
class NContext {
public:
    NContext() = default;

    int arity() const { return arity_; }
    std::size_t tuple_count() const { return arity_ ? tuples_.size() / arity_ : 0; }
    std::size_t universe_size(int mode) const { return universes_[checked_mode(mode)].size(); }
    const Interner& universe(int mode) const { return universes_[checked_mode(mode)]; }
    const std::string& mode_name(int mode) const { return mode_names_[checked_mode(mode)]; }
    const std::vector<std::string>& mode_names() const { return mode_names_; }

    std::span<const Id> tuple(std::size_t t) const {
        return {tuples_.data() + t * arity_, static_cast<std::size_t>(arity_)};
    }
    bool has_tuple(std::span<const Id> t) const;
    // Sorted indices of the tuples containing element x at position mode.
    const std::vector<std::uint32_t>& tuples_of(int mode, Id x) const;

    // Dyadic derivation. side is the mode of A; the result lives in the
    // opposite mode. galois of the empty set is the full opposite universe.
    ElementSet galois(const ElementSet& a) const;
    ElementSet closure(const ElementSet& a) const;

    // {rest_i(t) | t in Y, t[i] = x}, each rest-tuple in mode order with
    // position i removed; lexicographically sorted.
    std::vector<std::vector<Id>> prime_element(int mode, Id x) const;

    // {z | (partial with z inserted at position mode) in Y}.
    ElementSet prime_rest(int mode, std::span<const Id> partial) const;

    Density box_density(const Box& box) const;
    // The two counting strategies, exposed separately so tests can cross-check.
    Density box_density_by_cells(const Box& box) const;
    Density box_density_by_tuples(const Box& box) const;

    // Checks the structural invariants (index consistency, sortedness, ranges).
    void validate() const;

private:
    friend class ContextBuilder;

    int checked_mode(int mode) const;
    void check_box(const Box& box) const;

    int arity_ = 0;
    std::vector<std::string> mode_names_;
    std::vector<Interner> universes_;
    std::vector<Id> tuples_; // flat, arity_ ids per tuple, lexicographically sorted
    std::vector<std::vector<std::vector<std::uint32_t>>> index_; // [mode][element] -> tuple indices
};

// Accumulates labelled or pre-interned tuples (duplicates collapse) and
// produces the canonical immutable context.
class ContextBuilder {
public:
    explicit ContextBuilder(int arity, std::vector<std::string> mode_names = {});

    Id intern(int mode, std::string_view label) { return universes_[mode].intern(label); }
    // Returns false when the tuple was already present.
    bool add(std::span<const std::string> labels);
    bool add_ids(std::span<const Id> ids);

    int arity() const { return arity_; }
    std::size_t tuple_count() const { return count_; }
    const Interner& universe(int mode) const { return universes_[mode]; }

    NContext build() const;

private:
    int arity_;
    std::vector<std::string> mode_names_;
    std::vector<Interner> universes_;
    std::vector<Id> flat_;
    std::size_t count_ = 0;
    std::unordered_map<std::uint64_t, std::vector<std::uint32_t>> seen_; // hash -> tuple indices
};

} // namespace nclust

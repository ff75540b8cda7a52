#pragma once

#include "bspace/rational.hpp"

#include <cstdint>
#include <initializer_list>
#include <map>
#include <optional>
#include <span>
#include <vector>

namespace bspace {

using Node = std::uint64_t;

// Strictly increasing finite set of positive integers.
class FinSet {
 public:
  FinSet() = default;
  FinSet(std::initializer_list<Node> elements);
  // Throws std::invalid_argument unless strictly increasing and >= 1.
  explicit FinSet(std::vector<Node> elements);
  static FinSet from_unsorted(std::vector<Node> elements);

  const std::vector<Node>& elements() const { return elements_; }
  std::span<const Node> span() const { return elements_; }
  std::size_t size() const { return elements_.size(); }
  bool empty() const { return elements_.empty(); }
  Node min() const { return elements_.front(); }
  Node max() const { return elements_.back(); }
  bool contains(Node n) const;
  Node operator[](std::size_t i) const { return elements_[i]; }
  auto begin() const { return elements_.begin(); }
  auto end() const { return elements_.end(); }

  FinSet with(Node n) const;
  bool is_subset_of(const FinSet& other) const;

  friend bool operator==(const FinSet&, const FinSet&) = default;
  friend auto operator<=>(const FinSet&, const FinSet&) = default;

 private:
  std::vector<Node> elements_;
};

// s < t in the block order: one of them empty or max s < min t.
bool successive(const FinSet& s, const FinSet& t);

struct SchreierRank {
  unsigned value = 0;
  constexpr explicit SchreierRank(unsigned v = 0) : value(v) {}
  friend constexpr auto operator<=>(SchreierRank, SchreierRank) = default;
};

// Membership in S_n. `elements` must be strictly increasing.
bool schreier_member(std::span<const Node> elements, SchreierRank rank);
inline bool schreier_member(const FinSet& set, SchreierRank rank) {
  return schreier_member(set.span(), rank);
}

// No set F u G with G > max F nonempty stays in S_n. Throws
// std::invalid_argument when F itself is not in S_n.
bool schreier_maximal(const FinSet& set, SchreierRank rank);

// Smallest n with F in S_n, or nullopt when F lies in no finite-rank family
// (e.g. {1, 2}). Searches ranks up to `max_rank`.
std::optional<unsigned> schreier_rank_of(const FinSet& set, unsigned max_rank = 16);

using Weights = std::map<Node, Rational>;

struct MassSelection {
  Rational mass;
  FinSet set;
};

// Largest total weight of a subset of the support belonging to S_m.
// Weights must be nonnegative.
MassSelection max_mass_selection(const Weights& weights, SchreierRank rank);
inline Rational max_mass(const Weights& weights, SchreierRank rank) {
  return max_mass_selection(weights, rank).mass;
}

}  // namespace bspace

#pragma once

#include "bspace/schreier.hpp"

#include <json.hpp>

#include <optional>
#include <span>
#include <string>
#include <vector>

namespace bspace {

// Class index j of n in the partition N = U_j N_j with N_j = {2^k (2j+1)}.
// N_0 is the set of powers of two.
std::uint64_t partition_class(Node n);

// Smallest member of N_j strictly greater than `above`.
Node next_in_class(std::uint64_t j, Node above);

inline constexpr const char* kPartitionOddPart = "odd-part";
inline constexpr const char* kPhiChainCounter = "chain-counter";

struct TreeSpec {
  SchreierRank xi{1};
  Node n_max = 0;
  std::string partition_id = kPartitionOddPart;
  std::string phi_id = kPhiChainCounter;

  friend bool operator==(const TreeSpec&, const TreeSpec&) = default;
};

// A segment: nonempty set of nodes forming a consecutive piece of one branch,
// listed from the top (smallest) node down.
struct Segment {
  std::vector<Node> nodes;

  Node top() const { return nodes.front(); }
  Node bottom() const { return nodes.back(); }
  bool contains(Node n) const;
  friend bool operator==(const Segment&, const Segment&) = default;
  friend auto operator<=>(const Segment&, const Segment&) = default;
};

// Restriction of the coded tree (N, <=_xi) to {1, ..., n_max}.
//
// n <=_xi m iff there is a chain {n_0 < ... < n_k} in S_xi with n_0 in N_0,
// n_i in N_{phi(n_0, ..., n_{i-1})}, n = n_i and m = n_j for some i <= j.
// phi hands out class indices 1, 2, 3, ... to chains that can still grow, in
// increasing order of their last node. Numbers that are neither roots nor
// have an admissible parent are kept as detached one-node components.
class TreeXi {
 public:
  // Throws std::invalid_argument for n_max == 0 or unknown partition/phi ids.
  static TreeXi build(const TreeSpec& spec);

  const TreeSpec& spec() const { return spec_; }
  Node n_max() const { return spec_.n_max; }
  SchreierRank xi() const { return spec_.xi; }

  bool has_node(Node n) const { return n >= 1 && n <= spec_.n_max; }
  bool is_root(Node n) const;
  bool is_detached(Node n) const;
  std::optional<Node> parent(Node n) const;
  std::span<const Node> children(Node n) const;
  std::span<const Node> roots() const { return roots_; }
  std::span<const Node> detached() const { return detached_; }
  // Root-to-node chain; {n} for detached nodes.
  std::vector<Node> chain(Node n) const;
  std::size_t depth(Node n) const;

  // Class index phi assigns to chain(n), when chain(n) can be extended.
  std::optional<std::uint64_t> phi_class(Node n) const;
  // phi on an arbitrary finite set: the class index for registered chains;
  // every other set goes to one of the reserved classes 2^k - 1 (k >= 12),
  // reported as nullopt.
  std::optional<std::uint64_t> phi(const FinSet& prefix) const;

  // a <=_xi b. Throws std::out_of_range for nodes outside the truncation.
  bool precedes(Node a, Node b) const;
  bool comparable(Node a, Node b) const;

  // Path from `top` down to `bottom`; requires top <=_xi bottom.
  Segment segment(Node top, Node bottom) const;
  bool is_segment(const Segment& s) const;

  std::vector<std::pair<Node, Node>> edges() const;

  // Longest chain extension guaranteed below a root r: the largest L with
  // {r, r+1, ..., r+L-1} in S_xi (spreading makes every branch at least
  // this long in the untruncated tree).
  std::size_t guaranteed_branch_length(Node root) const;

 private:
  void check(Node n) const;

  TreeSpec spec_;
  // Flat per-node arrays; deep branches need truncations of a few million nodes.
  std::vector<Node> parent_;        // 0 = none
  std::vector<std::uint8_t> kind_;  // 0 detached, 1 root, 2 child
  std::vector<std::uint32_t> depth_;
  std::vector<std::uint64_t> phi_;  // 0 = chain cannot grow
  std::vector<Node> child_start_;   // children of n: child_list_[child_start_[n] .. child_start_[n+1])
  std::vector<Node> child_list_;
  std::vector<Node> roots_;
  std::vector<Node> detached_;
};

bool comparable(const TreeXi& tree, Node a, Node b);

// All segments with both endpoints in `within`, ordered by (top, bottom).
std::vector<Segment> enumerate_segments(const TreeXi& tree, const FinSet& within);

// Every node of s1 incomparable to every node of s2.
bool segments_incomparable(const TreeXi& tree, const Segment& s1, const Segment& s2);

nlohmann::json tree_to_json(const TreeXi& tree);
// Rebuilds from the embedded spec and checks the listed edges and roots.
// Throws std::invalid_argument on mismatch.
TreeXi tree_from_json(const nlohmann::json& j);

}  // namespace bspace

#pragma once
// Shared plumbing for the norm engines: the support of x as positions and
// the best ground leaf inside a range of positions.

#include "bspace/functional.hpp"
#include "bspace/norms.hpp"
#include "tsirelson_dp.hpp"

#include <cmath>
#include <optional>
#include <set>
#include <vector>

namespace bspace::detail {

struct Support {
  std::vector<Node> nodes;
  std::vector<Rational> x;    // signed coordinates
  std::vector<Rational> ax;   // |x|
  std::vector<std::vector<char>> prec;  // prec[a][b]: nodes[a] precedes nodes[b] in the tree

  Support(const FinVec& v, const TreeXi* tree);
  std::size_t size() const { return nodes.size(); }
  bool comparable(std::size_t a, std::size_t b) const { return prec[a][b] || prec[b][a]; }
  bool is_chain() const;
};

// A ground leaf expressed through positions of the support.
struct CandLeaf {
  GroundTag tag = GroundTag::G0;
  std::vector<std::size_t> pos;  // increasing
  std::size_t weight = 0;        // G1Weighted
  Rational score;                // exact value, or sum of squares for G2
  bool negative = false;         // Gsum: the signed sum is negative
  std::optional<Interval> enclosure;  // Gp: (sum |x|^p)^{1/p}
};

// Score -> value in the DP's value type.
template <class V>
V leaf_value(const CandLeaf& c, const Rational& p_dual);

template <>
inline Surd leaf_value<Surd>(const CandLeaf& c, const Rational&) {
  return c.tag == GroundTag::G2 ? Surd::sqrt(c.score) : Surd(c.score);
}
template <>
inline double leaf_value<double>(const CandLeaf& c, const Rational&) {
  return c.tag == GroundTag::G2 ? std::sqrt(c.score.get_d()) : c.score.get_d();
}
template <>
Interval leaf_value<Interval>(const CandLeaf& c, const Rational& p_dual);

// Restrictions used while branching.
struct LeafConstraints {
  std::vector<char> excluded;  // positions that may not be used
  std::vector<char> anchored;  // a leaf meeting comp(u) \ {u} must contain u
  std::set<std::size_t> banned_weights;
  std::map<std::size_t, Node> weight_floor;  // weighted leaves of weight j need min > floor
};

class LeafFinder {
 public:
  LeafFinder(const Support& s, const GroundKind& kind, const TreeXi* tree);
  void set_constraints(const LeafConstraints* c) { constraints_ = c; }
  void set_weighted_params(const EssParams* params, bool with_g0) {
    params_ = params;
    with_g0_ = with_g0;
  }
  std::optional<CandLeaf> best(std::size_t i, std::size_t j) const;
  const Rational& p_dual() const { return p_dual_; }

 private:
  std::optional<CandLeaf> best_g0(std::size_t i, std::size_t j) const;
  std::optional<CandLeaf> best_chain(std::size_t i, std::size_t j, GroundTag tag) const;
  std::optional<CandLeaf> best_sum(std::size_t i, std::size_t j) const;
  std::optional<CandLeaf> best_weighted(std::size_t i, std::size_t j) const;
  bool better(const CandLeaf& a, const CandLeaf& b) const;

  const Support& s_;
  GroundKind kind_;
  const TreeXi* tree_;
  const LeafConstraints* constraints_ = nullptr;
  const EssParams* params_ = nullptr;
  bool with_g0_ = false;
  Rational p_dual_;  // Gp: exponent p conjugate to q
};

Leaf make_leaf(const CandLeaf& c, const Support& s, const TreeXi* tree, const EssParams* params,
               const Rational& q);

// Runs the DP in value type V with a finder; returns value, certificate and
// the candidate table it refers to.
template <class V>
struct DPRun {
  std::optional<V> value;
  AnalysisNode shape;
  std::vector<CandLeaf> table;
};

template <class V>
DPRun<V> run_dp(const Support& s, const LeafFinder& finder) {
  DPRun<V> out;
  const std::size_t n = s.size();
  std::vector<std::optional<std::size_t>> slot(n * n);
  auto leaf = [&](std::size_t i, std::size_t j) -> std::optional<typename TsirelsonDP<V>::LeafPick> {
    auto c = finder.best(i, j);
    if (!c) return std::nullopt;
    V v = leaf_value<V>(*c, finder.p_dual());
    out.table.push_back(std::move(*c));
    return typename TsirelsonDP<V>::LeafPick{std::move(v), out.table.size() - 1};
  };
  TsirelsonDP<V> dp(s.nodes, leaf);
  out.value = dp.solve();
  if (out.value) out.shape = dp.witness();
  return out;
}

// Turns a DP certificate into a Functional with leaves numbered in order.
Functional to_functional(const AnalysisNode& shape, const std::vector<CandLeaf>& table, const Support& s,
                         const TreeXi* tree, const EssParams* params, const Rational& q);

// Leaves of the certificate in order of appearance (candidate ids).
void shape_leaves(const AnalysisNode& shape, std::vector<std::size_t>& out);

Rational dyadic(std::size_t k);

}  // namespace bspace::detail

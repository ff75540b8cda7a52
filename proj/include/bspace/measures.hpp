#pragma once

#include "bspace/ess_tree.hpp"
#include "bspace/tree.hpp"

#include <json.hpp>

#include <map>
#include <stdexcept>
#include <vector>

namespace bspace {

// No selection satisfies the requested count and loss budget.
class Infeasible : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Finitely supported positive measure on tree nodes.
struct NodeMeasure {
  std::map<Node, Rational> mass;

  Rational total() const;
  Rational of(const FinSet& set) const;
};

nlohmann::json measure_to_json(const NodeMeasure& m, const std::string& tree_ref = "");
NodeMeasure measure_from_json(const nlohmann::json& j);

// Combined support size up to which selections are searched exhaustively.
inline constexpr std::size_t kExhaustiveCutoff = 12;

struct Extraction {
  std::vector<std::size_t> indices;   // kept measures, increasing
  std::vector<FinSet> kept;           // G_j for each kept index
  std::vector<Rational> loss;         // mu_j(supp mu_j \ G_j)
  bool exhaustive = false;            // optimum proven by exhaustive search
};

// Keeps at least target_count measures, each losing mass <= eps, with the
// retained nodes of different measures pairwise incomparable. Exhaustive
// search (minimal total loss) when the combined support is small, greedy
// otherwise.
Extraction extract_incomparable(const std::vector<NodeMeasure>& measures, const TreeXi& tree, const Rational& eps,
                                std::size_t target_count);
bool verify_extraction(const Extraction& e, const std::vector<NodeMeasure>& measures, const TreeXi& tree,
                       const Rational& eps);

// Node 0 stands for the root above the forest; its successors are the roots.
inline constexpr Node kVirtualRoot = 0;
FinSet successors(const TreeXi& tree, Node t);

struct SuccSplit {
  FinSet a, b;
};
// A_i = supp mu_i meets succ(s_1) u ... u succ(s_i); B_i the rest.
std::vector<SuccSplit> succ_split(const std::vector<NodeMeasure>& measures, const TreeXi& tree,
                                  const std::vector<Node>& enumeration);

Rational succ_mass(const NodeMeasure& m, const TreeXi& tree, Node t);

// Pieces of mu({t} u cones of the successors t_j, t_{j+1}, ...), successors in
// increasing order, j counted from 1.
struct SuccTail {
  Rational clopen;      // mu({t} u V_{t_j} u V_{t_{j+1}} u ...)
  Rational atom;        // mu({t})
  Rational successors;  // mu({t_k : k >= j})
  Rational deeper;      // mu(union of V_{t_k} \ {t_k}, k >= j)
};
SuccTail succ_tail(const NodeMeasure& m, const TreeXi& tree, Node t, std::size_t j);

// Final-stage values of a finite family: mu({t}) and nu({t}) read off the
// last measure, the double limit from its tail starting at the first
// successor whose cone it charges.
struct SuccLimits {
  Rational weak;          // mu({t})
  Rational successor;     // nu({t})
  Rational double_limit;
};
SuccLimits succ_limits(const std::vector<NodeMeasure>& family, const TreeXi& tree, Node t);

// Measure on nodes of the weighted tree.
struct EssMeasure {
  std::vector<std::pair<EssNode, Rational>> mass;
  Rational total() const;
};

struct EssSplit {
  std::vector<std::size_t> indices;
  std::vector<std::vector<std::size_t>> g1, g2;  // positions into mass
  std::vector<Rational> loss;
  bool exhaustive = false;
};

// Weight nodes are comparable when one weight sequence extends the other.
bool weight_nodes_comparable(const EssNode& a, const EssNode& b);

// Splits each kept measure into G1 (jointly essentially incomparable) and G2
// (weight nodes incomparable across measures), losing mass <= eps per kept
// measure. target_count defaults to all measures.
EssSplit ess_split(const std::vector<EssMeasure>& measures, const Rational& eps,
                   std::optional<std::size_t> target_count = std::nullopt);
bool verify_ess_split(const EssSplit& s, const std::vector<EssMeasure>& measures, const Rational& eps);

}  // namespace bspace

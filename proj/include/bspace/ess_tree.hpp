#pragma once

#include "bspace/rational.hpp"
#include "bspace/schreier.hpp"

#include <json.hpp>

#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace bspace {

// Weight sequence m_0 < m_1 < ... and Schreier orders n_0 <= n_1 <= ...
// Without `toy`, the growth conditions m_0 = 2, m_1 = 4, m_j >= m_{j-1}^2,
// n_0 = 1, n_1 = 6, n_j > log2(m_j^2) + n_{j-1} are enforced.
struct EssParams {
  std::vector<Integer> m;
  std::vector<unsigned> n;
  bool toy = false;
  std::string sigma_id = "smallest-unused";

  std::size_t size() const { return m.size(); }
  Rational inv_m(std::size_t j) const;  // 1/m_j
  // Throws std::invalid_argument describing the first violated condition.
  void validate() const;

  // Paper-conforming prefix of length k (k >= 2).
  static EssParams paper(std::size_t k = 5);
  // Desk-scale parameters: m = (2, 4, 16, 256), n = (1, 1, 2, 3).
  static EssParams toy_default();
};

nlohmann::json params_to_json(const EssParams& p);
EssParams params_from_json(const nlohmann::json& j);

class PrefixExhausted : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// g : N -> {-1, 0, 1} with finite support; zero entries are never stored.
class SignFn {
 public:
  SignFn() = default;
  SignFn(std::initializer_list<std::pair<const Node, int>> values);
  explicit SignFn(const std::map<Node, int>& values);
  static SignFn indicator(const FinSet& set);

  int operator()(Node n) const;
  const std::map<Node, int>& values() const { return values_; }
  FinSet support() const;
  bool empty() const { return values_.empty(); }
  Node min_support() const { return values_.begin()->first; }
  Node max_support() const { return values_.rbegin()->first; }

  friend bool operator==(const SignFn&, const SignFn&) = default;
  friend auto operator<=>(const SignFn&, const SignFn&) = default;

 private:
  std::map<Node, int> values_;
};

// (g, m_j), with the weight recorded by its index j.
struct EssPair {
  SignFn g;
  std::size_t j = 1;
  friend bool operator==(const EssPair&, const EssPair&) = default;
  friend auto operator<=>(const EssPair&, const EssPair&) = default;
};

using History = std::vector<EssPair>;

// A node of the weighted tree, identified with its full history
// ((g_1, m_{j_1}), ..., (g_k, m_{j_k})). The node itself is the last pair.
struct EssNode {
  History history;

  const EssPair& last() const { return history.back(); }
  std::vector<std::size_t> weights() const;
  friend bool operator==(const EssNode&, const EssNode&) = default;
};

nlohmann::json ess_node_to_json(const EssNode& node, const EssParams& params);
EssNode ess_node_from_json(const nlohmann::json& j, const EssParams& params);

// The injection sigma from histories to weights, materialized lazily.
// A new history receives the smallest weight index not yet handed out that
// exceeds the index of its last weight. Results depend only on the order of
// first registration.
class SigmaRegistry {
 public:
  explicit SigmaRegistry(EssParams params);

  const EssParams& params() const { return params_; }
  // Throws PrefixExhausted when no index is left; std::invalid_argument if
  // the history is empty or its weights are not strictly increasing.
  std::size_t sigma(const History& history);
  std::optional<std::size_t> lookup(const History& history) const;
  // History registered to weight index j (j >= 2), if any.
  const History* history_of(std::size_t j) const;
  // Weight sequence of the W-node with last weight j: (1) for j = 1, the
  // registered history's weights followed by j otherwise.
  std::optional<std::vector<std::size_t>> weight_sequence(std::size_t j) const;
  // a <_W b.
  bool weight_precedes(std::size_t a, std::size_t b) const;
  // The unique g with (g, m_a) below the node of weight b.
  const SignFn* ancestor_sign(std::size_t a, std::size_t b) const;
  std::size_t registered() const { return by_history_.size(); }

 private:
  EssParams params_;
  std::map<History, std::size_t> by_history_;
  std::map<std::size_t, History> by_weight_;
};

// Items (i)-(iv) of the definition of the weighted tree. Registers histories
// with sigma as needed.
bool ess_node_valid(const EssNode& node, SigmaRegistry& sigma, SchreierRank xi);

// Whether weight sequence of a is a proper initial segment of that of b.
bool weights_precede(const EssNode& a, const EssNode& b);

// For t1, t2 in X with m_{t1} <_W m_{t2}, the g paired with m_{t1} in t2's
// history must satisfy supp g < supp g_{t1}.
bool essentially_incomparable(const std::vector<EssNode>& nodes);

}  // namespace bspace

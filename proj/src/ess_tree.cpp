#include "bspace/ess_tree.hpp"

#include <cmath>

namespace bspace {

Rational EssParams::inv_m(std::size_t j) const {
  if (j >= m.size()) throw PrefixExhausted("parameter prefix exhausted: no m_" + std::to_string(j));
  Rational r(Integer(1), m[j]);
  r.canonicalize();
  return r;
}

void EssParams::validate() const {
  auto fail = [](const std::string& what) { throw std::invalid_argument("EssParams: " + what); };
  if (m.size() < 2) fail("need at least m_0 and m_1");
  if (m.size() != n.size()) fail("m and n prefixes differ in length");
  for (std::size_t j = 1; j < m.size(); ++j) {
    if (m[j] <= m[j - 1]) fail("m must be strictly increasing");
    if (n[j] < n[j - 1]) fail("n must be nondecreasing");
  }
  if (m[0] < 2) fail("m_0 must be at least 2");
  if (toy) return;
  if (m[0] != 2 || m[1] != 4) fail("m_0 = 2 and m_1 = 4 required (set toy to relax)");
  if (n[0] != 1 || n[1] != 6) fail("n_0 = 1 and n_1 = 6 required (set toy to relax)");
  for (std::size_t j = 2; j < m.size(); ++j) {
    if (m[j] < m[j - 1] * m[j - 1]) fail("m_j >= m_{j-1}^2 violated at j=" + std::to_string(j));
    // n_j > log2(m_j^2) + n_{j-1}  <=>  2^(n_j - n_{j-1}) > m_j^2
    if (n[j] <= n[j - 1]) fail("n_j > log2(m_j^2) + n_{j-1} violated at j=" + std::to_string(j));
    Integer lhs;
    mpz_ui_pow_ui(lhs.get_mpz_t(), 2, n[j] - n[j - 1]);
    if (lhs <= m[j] * m[j]) fail("n_j > log2(m_j^2) + n_{j-1} violated at j=" + std::to_string(j));
  }
}

EssParams EssParams::paper(std::size_t k) {
  if (k < 2) throw std::invalid_argument("EssParams::paper: prefix length must be >= 2");
  EssParams p;
  p.m = {2, 4};
  p.n = {1, 6};
  while (p.m.size() < k) {
    Integer next = p.m.back() * p.m.back();
    // smallest n_j with 2^(n_j - n_{j-1}) > m_j^2
    const auto bits = static_cast<unsigned>(mpz_sizeinbase(Integer(next * next).get_mpz_t(), 2));
    p.m.push_back(next);
    p.n.push_back(p.n.back() + bits);
  }
  return p;
}

EssParams EssParams::toy_default() {
  EssParams p;
  p.m = {2, 4, 16, 256};
  p.n = {1, 1, 2, 3};
  p.toy = true;
  return p;
}

nlohmann::json params_to_json(const EssParams& p) {
  std::vector<std::string> m;
  for (const auto& v : p.m) m.push_back(v.get_str());
  return {{"m", m}, {"n", p.n}, {"toy", p.toy}, {"sigma_id", p.sigma_id}};
}

EssParams params_from_json(const nlohmann::json& j) {
  EssParams p;
  try {
    for (const auto& v : j.at("m")) p.m.emplace_back(v.is_string() ? v.get<std::string>() : v.dump());
    p.n = j.at("n").get<std::vector<unsigned>>();
    p.toy = j.value("toy", false);
    p.sigma_id = j.value("sigma_id", std::string("smallest-unused"));
  } catch (const nlohmann::json::exception& e) {
    throw std::invalid_argument(std::string("params JSON: ") + e.what());
  }
  if (p.sigma_id != "smallest-unused") throw std::invalid_argument("unknown sigma_id '" + p.sigma_id + "'");
  p.validate();
  return p;
}

SignFn::SignFn(std::initializer_list<std::pair<const Node, int>> values)
    : SignFn(std::map<Node, int>(values)) {}

SignFn::SignFn(const std::map<Node, int>& values) {
  for (auto [n, s] : values) {
    if (n == 0) throw std::invalid_argument("SignFn: index 0");
    if (s < -1 || s > 1) throw std::invalid_argument("SignFn: values must lie in {-1, 0, 1}");
    if (s != 0) values_.emplace(n, s);
  }
}

SignFn SignFn::indicator(const FinSet& set) {
  std::map<Node, int> v;
  for (Node n : set) v.emplace(n, 1);
  return SignFn(v);
}

int SignFn::operator()(Node n) const {
  auto it = values_.find(n);
  return it == values_.end() ? 0 : it->second;
}

FinSet SignFn::support() const {
  std::vector<Node> s;
  for (const auto& kv : values_) s.push_back(kv.first);
  return FinSet(std::move(s));
}

std::vector<std::size_t> EssNode::weights() const {
  std::vector<std::size_t> w;
  for (const auto& p : history) w.push_back(p.j);
  return w;
}

namespace {

nlohmann::json sign_to_json(const SignFn& g) {
  nlohmann::json a = nlohmann::json::array();
  for (auto [n, s] : g.values()) a.push_back({n, s});
  return a;
}

SignFn sign_from_json(const nlohmann::json& j) {
  std::map<Node, int> v;
  for (const auto& e : j) v[e.at(0).get<Node>()] = e.at(1).get<int>();
  return SignFn(v);
}

std::size_t index_of_weight(const EssParams& p, const Integer& w) {
  for (std::size_t j = 0; j < p.m.size(); ++j)
    if (p.m[j] == w) return j;
  throw std::invalid_argument("weight " + w.get_str() + " is not one of the m_j");
}

}  // namespace

nlohmann::json ess_node_to_json(const EssNode& node, const EssParams& params) {
  nlohmann::json weights = nlohmann::json::array();
  nlohmann::json history = nlohmann::json::array();
  for (const auto& p : node.history) {
    if (p.j >= params.size()) throw PrefixExhausted("parameter prefix exhausted: no m_" + std::to_string(p.j));
    weights.push_back(params.m[p.j].get_str());
    history.push_back(sign_to_json(p.g));
  }
  return {{"g", node.history.empty() ? nlohmann::json::array() : sign_to_json(node.last().g)},
          {"weights", weights},
          {"history", history}};
}

EssNode ess_node_from_json(const nlohmann::json& j, const EssParams& params) {
  EssNode node;
  try {
    const auto& weights = j.at("weights");
    const auto& history = j.contains("history") ? j.at("history") : nlohmann::json::array();
    if (!history.empty() && history.size() != weights.size())
      throw std::invalid_argument("EssNode JSON: history and weights differ in length");
    for (std::size_t i = 0; i < weights.size(); ++i) {
      const auto& w = weights[i];
      Integer value(w.is_string() ? w.get<std::string>() : w.dump());
      EssPair pair;
      pair.j = index_of_weight(params, value);
      if (!history.empty())
        pair.g = sign_from_json(history[i]);
      else if (i + 1 == weights.size())
        pair.g = sign_from_json(j.at("g"));
      node.history.push_back(std::move(pair));
    }
  } catch (const nlohmann::json::exception& e) {
    throw std::invalid_argument(std::string("EssNode JSON: ") + e.what());
  }
  return node;
}

SigmaRegistry::SigmaRegistry(EssParams params) : params_(std::move(params)) { params_.validate(); }

std::size_t SigmaRegistry::sigma(const History& history) {
  if (history.empty()) throw std::invalid_argument("sigma: empty history");
  for (std::size_t i = 1; i < history.size(); ++i)
    if (history[i].j <= history[i - 1].j)
      throw std::invalid_argument("sigma: weights of a history must be strictly increasing");
  if (auto it = by_history_.find(history); it != by_history_.end()) return it->second;
  std::size_t j = history.back().j + 1;
  while (by_weight_.count(j) != 0) ++j;
  if (j >= params_.size())
    throw PrefixExhausted("parameter prefix exhausted: sigma needs m_" + std::to_string(j) +
                          " but only " + std::to_string(params_.size()) + " weights are given");
  by_history_.emplace(history, j);
  by_weight_.emplace(j, history);
  return j;
}

std::optional<std::size_t> SigmaRegistry::lookup(const History& history) const {
  auto it = by_history_.find(history);
  if (it == by_history_.end()) return std::nullopt;
  return it->second;
}

const History* SigmaRegistry::history_of(std::size_t j) const {
  auto it = by_weight_.find(j);
  return it == by_weight_.end() ? nullptr : &it->second;
}

std::optional<std::vector<std::size_t>> SigmaRegistry::weight_sequence(std::size_t j) const {
  if (j == 1) return std::vector<std::size_t>{1};
  const History* h = history_of(j);
  if (h == nullptr) return std::nullopt;
  std::vector<std::size_t> w;
  for (const auto& p : *h) w.push_back(p.j);
  w.push_back(j);
  return w;
}

bool SigmaRegistry::weight_precedes(std::size_t a, std::size_t b) const {
  auto wb = weight_sequence(b);
  if (!wb || a == b) return false;
  for (std::size_t i = 0; i + 1 < wb->size(); ++i)
    if ((*wb)[i] == a) return true;
  return false;
}

const SignFn* SigmaRegistry::ancestor_sign(std::size_t a, std::size_t b) const {
  const History* h = history_of(b);
  if (h == nullptr) return nullptr;
  for (const auto& p : *h)
    if (p.j == a) return &p.g;
  return nullptr;
}

bool ess_node_valid(const EssNode& node, SigmaRegistry& sigma, SchreierRank xi) {
  const auto& h = node.history;
  const auto& params = sigma.params();
  if (h.empty()) return false;
  std::vector<Node> mins;
  for (std::size_t i = 0; i < h.size(); ++i) {
    const auto& p = h[i];
    if (p.g.empty() || p.j >= params.size()) return false;
    // (i) successive supports
    if (i > 0 && !(h[i - 1].g.max_support() < p.g.min_support())) return false;
    // (ii) supp g_i in S_{n_{j_i}}, orders strictly increasing along the history
    if (!schreier_member(p.g.support(), SchreierRank{params.n[p.j]})) return false;
    if (i > 0 && params.n[h[i - 1].j] >= params.n[p.j]) return false;
    // (iii) first weight m_1, later weights given by sigma
    if (i == 0 && p.j != 1) return false;
    if (i > 0) {
      History prefix(h.begin(), h.begin() + static_cast<long>(i));
      std::size_t expected;
      try {
        expected = sigma.sigma(prefix);
      } catch (const PrefixExhausted&) {
        return false;
      }
      if (expected != p.j) return false;
    }
    mins.push_back(p.g.min_support());
  }
  // (iv)
  return schreier_member(mins, xi);
}

bool weights_precede(const EssNode& a, const EssNode& b) {
  if (a.history.size() >= b.history.size()) return false;
  for (std::size_t i = 0; i < a.history.size(); ++i)
    if (a.history[i].j != b.history[i].j) return false;
  return true;
}

bool essentially_incomparable(const std::vector<EssNode>& nodes) {
  for (const auto& t1 : nodes)
    for (const auto& t2 : nodes) {
      if (!weights_precede(t1, t2)) continue;
      const SignFn& g = t2.history[t1.history.size() - 1].g;
      const SignFn& g1 = t1.last().g;
      if (g.empty() || g1.empty()) continue;
      if (!(g.max_support() < g1.min_support())) return false;
    }
  return true;
}

}  // namespace bspace

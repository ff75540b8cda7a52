#include "bspace/norms.hpp"

#include "norm_support.hpp"

#include <queue>

namespace bspace {

using detail::CandLeaf;
using detail::LeafConstraints;
using detail::LeafFinder;
using detail::Support;

NormValue NormValue::of(const Surd& v) { return NormValue{v, v.enclose()}; }
NormValue NormValue::of(const Interval& v) { return NormValue{std::nullopt, v}; }

nlohmann::json NormValue::to_json() const {
  nlohmann::json j;
  j["exact"] = exact ? nlohmann::json(exact->to_string()) : nlohmann::json(nullptr);
  j["approx"] = approx();
  j["interval"] = {enclosure.lower(), enclosure.upper()};
  return j;
}

nlohmann::json norm_result_to_json(const NormResult& r) {
  return {{"value", r.value.to_json()},
          {"witness", functional_to_json(r.witness)},
          {"stats", {{"nodes_explored", r.stats.nodes_explored}, {"relaxations", r.stats.relaxations},
                     {"method", r.stats.method}}}};
}

namespace {

const EssParams* params_of(const GroundKind& kind) { return kind.params ? &*kind.params : nullptr; }

NormResult zero_result(const std::string& method) {
  NormResult r;
  r.value = NormValue::of(Surd());
  r.stats.method = method;
  return r;
}

}  // namespace

NormResult ground_norm(const FinVec& x, const GroundKind& kind, const TreeXi* tree) {
  Support s(x, tree);
  if (s.size() == 0) return zero_result("ground");
  LeafFinder finder(s, kind, tree);
  auto best = finder.best(0, s.size() - 1);
  NormResult r;
  r.stats.method = "ground";
  Functional f;
  f.leaves.push_back(detail::make_leaf(*best, s, tree, params_of(kind), kind.q));
  f.analysis = AnalysisNode{0, {}};
  r.witness = std::move(f);
  if (kind.tag == GroundTag::Gp)
    r.value = NormValue::of(detail::leaf_value<Interval>(*best, finder.p_dual()));
  else
    r.value = NormValue::of(detail::leaf_value<Surd>(*best, finder.p_dual()));
  return r;
}

NormResult wg_norm(const FinVec& x, const GroundKind& kind, const TreeXi* tree) {
  Support s(x, tree);
  if (s.size() == 0) return zero_result("tsirelson-dp");
  LeafFinder finder(s, kind, tree);
  NormResult r;
  r.stats.method = "tsirelson-dp";
  r.stats.relaxations = 1;
  if (kind.tag == GroundTag::Gp) {
    auto run = detail::run_dp<Interval>(s, finder);
    r.value = NormValue::of(*run.value);
    r.witness = detail::to_functional(run.shape, run.table, s, tree, params_of(kind), kind.q);
  } else {
    auto run = detail::run_dp<Surd>(s, finder);
    r.value = NormValue::of(*run.value);
    r.witness = detail::to_functional(run.shape, run.table, s, tree, params_of(kind), kind.q);
  }
  return r;
}

namespace {

// Relative slack covering rounding in the double-precision relaxation.
constexpr double kSlack = 1e-9;

template <class State>
struct Queued {
  double bound;
  std::uint64_t order;
  State state;
  bool operator<(const Queued& o) const {
    if (bound != o.bound) return bound < o.bound;
    return order > o.order;
  }
};

// Pair of positions in different leaves of `shape` that violate the
// incomparability of leaf segments.
std::optional<std::pair<std::size_t, std::size_t>> tinc_violation(const AnalysisNode& shape,
                                                                   const std::vector<CandLeaf>& table,
                                                                   const Support& s) {
  std::vector<std::size_t> ids;
  detail::shape_leaves(shape, ids);
  for (std::size_t a = 0; a < ids.size(); ++a)
    for (std::size_t b = a + 1; b < ids.size(); ++b)
      for (std::size_t u : table[ids[a]].pos)
        for (std::size_t v : table[ids[b]].pos)
          if (s.comparable(u, v)) return std::make_pair(u, v);
  return std::nullopt;
}

}  // namespace

NormResult tinc_norm(const FinVec& x, const TreeXi& tree, const TincOptions& options) {
  Support s(x, &tree);
  if (s.size() == 0) return zero_result("tinc");
  const GroundKind g2 = GroundKind::g2();
  const std::size_t n = s.size();

  // A single leaf is always admissible: the ground norm is the first incumbent.
  NormResult best = ground_norm(x, g2, &tree);
  best.stats = {};
  if (options.chain_shortcut && s.is_chain()) {
    best.stats.method = "chain";
    return best;
  }
  best.stats.method = "branch-and-bound";
  Surd incumbent = *best.value.exact;
  double incumbent_d = incumbent.to_double();

  LeafConstraints root;
  root.excluded.assign(n, 0);
  root.anchored.assign(n, 0);
  std::priority_queue<Queued<LeafConstraints>> queue;
  std::uint64_t order = 0;
  queue.push({std::numeric_limits<double>::infinity(), order++, root});

  auto branch = [&](const LeafConstraints& c, std::size_t u, std::size_t v, double bound) {
    // u and v sit in different leaves, so neither is anchored or excluded yet
    std::size_t pick = s.ax[u] > s.ax[v] || (s.ax[u] == s.ax[v] && u < v) ? u : v;
    LeafConstraints drop = c;
    drop.excluded[pick] = 1;
    LeafConstraints anchor = c;
    anchor.anchored[pick] = 1;
    queue.push({bound, order++, std::move(drop)});
    queue.push({bound, order++, std::move(anchor)});
  };

  while (!queue.empty()) {
    auto node = queue.top();
    queue.pop();
    if (node.bound * (1 + kSlack) < incumbent_d) continue;
    ++best.stats.nodes_explored;
    LeafFinder finder(s, g2, &tree);
    finder.set_constraints(&node.state);
    auto fast = detail::run_dp<double>(s, finder);
    ++best.stats.relaxations;
    if (!fast.value) continue;
    const double ub = *fast.value;
    if (ub * (1 + kSlack) < incumbent_d) continue;
    if (auto viol = tinc_violation(fast.shape, fast.table, s)) {
      branch(node.state, viol->first, viol->second, ub);
      continue;
    }
    // Near the incumbent or feasible: settle this node exactly.
    auto exact = detail::run_dp<Surd>(s, finder);
    ++best.stats.relaxations;
    if (!(*exact.value > incumbent)) continue;
    if (auto viol = tinc_violation(exact.shape, exact.table, s)) {
      branch(node.state, viol->first, viol->second, ub);
      continue;
    }
    incumbent = *exact.value;
    incumbent_d = incumbent.to_double();
    best.value = NormValue::of(incumbent);
    best.witness = detail::to_functional(exact.shape, exact.table, s, &tree, nullptr, Rational(0));
  }
  return best;
}

namespace {

struct EssViolation {
  std::size_t a, b;  // weight a precedes weight b
  Node floor;        // max supp of the g paired with m_a below m_b
};

std::optional<EssViolation> essinc_violation(const AnalysisNode& shape, const std::vector<CandLeaf>& table,
                                             const Support& s, const SigmaRegistry& sigma) {
  std::vector<std::size_t> ids;
  detail::shape_leaves(shape, ids);
  for (std::size_t la : ids)
    for (std::size_t lb : ids) {
      const auto& A = table[la];
      const auto& B = table[lb];
      if (A.tag != GroundTag::G1Weighted || B.tag != GroundTag::G1Weighted) continue;
      if (!sigma.weight_precedes(A.weight, B.weight)) continue;
      const SignFn* g = sigma.ancestor_sign(A.weight, B.weight);
      if (g == nullptr || g->empty()) continue;
      if (s.nodes[A.pos.front()] <= g->max_support()) return EssViolation{A.weight, B.weight, g->max_support()};
    }
  return std::nullopt;
}

}  // namespace

NormResult essinc_norm(const FinVec& x, const SigmaRegistry& sigma, const EssincOptions& options) {
  Support s(x, nullptr);
  if (s.size() == 0) return zero_result("essinc");
  const EssParams& params = sigma.params();
  const GroundKind g0 = GroundKind::g0();

  LeafConstraints root;
  root.banned_weights = options.excluded_weights;

  // Incumbent: the best single G0 leaf.
  NormResult best = ground_norm(x, g0, nullptr);
  best.stats = {};
  best.stats.method = "branch-and-bound";
  Surd incumbent = *best.value.exact;
  double incumbent_d = incumbent.to_double();

  std::priority_queue<Queued<LeafConstraints>> queue;
  std::uint64_t order = 0;
  queue.push({std::numeric_limits<double>::infinity(), order++, root});

  auto branch = [&](const LeafConstraints& c, const EssViolation& v, double bound) {
    LeafConstraints ban = c;
    ban.banned_weights.insert(v.b);
    LeafConstraints lift = c;
    Node& f = lift.weight_floor[v.a];
    f = std::max(f, v.floor);
    queue.push({bound, order++, std::move(ban)});
    queue.push({bound, order++, std::move(lift)});
  };

  while (!queue.empty()) {
    auto node = queue.top();
    queue.pop();
    if (node.bound * (1 + kSlack) < incumbent_d) continue;
    ++best.stats.nodes_explored;
    LeafFinder finder(s, g0, nullptr);
    finder.set_weighted_params(&params, true);
    finder.set_constraints(&node.state);
    auto fast = detail::run_dp<double>(s, finder);
    ++best.stats.relaxations;
    if (!fast.value) continue;
    const double ub = *fast.value;
    if (ub * (1 + kSlack) < incumbent_d) continue;
    if (auto viol = essinc_violation(fast.shape, fast.table, s, sigma)) {
      branch(node.state, *viol, ub);
      continue;
    }
    auto exact = detail::run_dp<Surd>(s, finder);
    ++best.stats.relaxations;
    if (!(*exact.value > incumbent)) continue;
    if (auto viol = essinc_violation(exact.shape, exact.table, s, sigma)) {
      branch(node.state, *viol, ub);
      continue;
    }
    incumbent = *exact.value;
    incumbent_d = incumbent.to_double();
    best.value = NormValue::of(incumbent);
    best.witness = detail::to_functional(exact.shape, exact.table, s, nullptr, &params, Rational(0));
  }
  return best;
}

}  // namespace bspace

#include "bspace/measures.hpp"

#include <algorithm>
#include <functional>
#include <numeric>
#include <set>

namespace bspace {

Rational NodeMeasure::total() const {
  Rational s = 0;
  for (const auto& kv : mass) s += kv.second;
  return s;
}

Rational NodeMeasure::of(const FinSet& set) const {
  Rational s = 0;
  for (Node n : set)
    if (auto it = mass.find(n); it != mass.end()) s += it->second;
  return s;
}

nlohmann::json measure_to_json(const NodeMeasure& m, const std::string& tree_ref) {
  nlohmann::json mass = nlohmann::json::array();
  for (const auto& [n, v] : m.mass) mass.push_back({n, to_string(v)});
  return {{"tree_ref", tree_ref}, {"mass", mass}};
}

NodeMeasure measure_from_json(const nlohmann::json& j) {
  NodeMeasure m;
  for (const auto& e : j.at("mass")) {
    Rational v = parse_rational(e.at(1).get<std::string>());
    if (v <= 0) throw std::invalid_argument("measure masses must be positive");
    m.mass[e.at(0).get<Node>()] = v;
  }
  return m;
}

namespace {

void check_measures(const std::vector<NodeMeasure>& measures, const TreeXi& tree) {
  std::set<Node> seen;
  for (const auto& m : measures)
    for (const auto& [n, v] : m.mass) {
      if (!tree.has_node(n)) throw std::out_of_range("measure node " + std::to_string(n) + " outside the tree");
      if (v <= 0) throw std::invalid_argument("measure masses must be positive");
      if (!seen.insert(n).second) throw std::invalid_argument("measure supports must be pairwise disjoint");
    }
}

struct Score {
  Rational loss;
  std::size_t kept = 0;
  std::vector<std::size_t> indices;
  // smaller is better
  bool operator<(const Score& o) const {
    if (loss != o.loss) return loss < o.loss;
    if (kept != o.kept) return kept > o.kept;
    return indices < o.indices;
  }
};

Extraction exhaustive_extract(const std::vector<NodeMeasure>& measures, const TreeXi& tree, const Rational& eps,
                              std::size_t target) {
  std::vector<std::pair<Node, std::size_t>> items;  // node, owner
  for (std::size_t i = 0; i < measures.size(); ++i)
    for (const auto& kv : measures[i].mass) items.emplace_back(kv.first, i);
  const std::size_t n = items.size();
  std::vector<std::vector<char>> clash(n, std::vector<char>(n, 0));
  for (std::size_t a = 0; a < n; ++a)
    for (std::size_t b = 0; b < n; ++b)
      clash[a][b] = items[a].second != items[b].second && tree.comparable(items[a].first, items[b].first);
  std::vector<Rational> totals;
  for (const auto& m : measures) totals.push_back(m.total());
  // untouched measures by increasing total, for topping up the count
  std::vector<std::size_t> by_total(measures.size());
  std::iota(by_total.begin(), by_total.end(), 0);
  std::stable_sort(by_total.begin(), by_total.end(), [&](std::size_t a, std::size_t b) { return totals[a] < totals[b]; });

  std::optional<Score> best;
  std::size_t best_mask = 0;
  for (std::size_t mask = 0; mask < (std::size_t{1} << n); ++mask) {
    bool ok = true;
    for (std::size_t a = 0; a < n && ok; ++a)
      if (mask >> a & 1U)
        for (std::size_t b = a + 1; b < n && ok; ++b)
          if ((mask >> b & 1U) && clash[a][b]) ok = false;
    if (!ok) continue;
    std::vector<Rational> kept_mass(measures.size(), Rational(0));
    std::vector<char> touched(measures.size(), 0);
    for (std::size_t a = 0; a < n; ++a)
      if (mask >> a & 1U) {
        kept_mass[items[a].second] += measures[items[a].second].mass.at(items[a].first);
        touched[items[a].second] = 1;
      }
    Score s;
    std::vector<char> in(measures.size(), 0);
    for (std::size_t i = 0; i < measures.size() && ok; ++i)
      if (touched[i] || totals[i] == 0) {
        Rational loss = totals[i] - kept_mass[i];
        if (loss > eps) ok = false;
        in[i] = 1;
        s.loss += loss;
      }
    if (!ok) continue;
    std::size_t count = static_cast<std::size_t>(std::count(in.begin(), in.end(), 1));
    for (std::size_t i : by_total) {
      if (count >= target) break;
      if (in[i] || totals[i] > eps) continue;
      in[i] = 1;
      s.loss += totals[i];
      ++count;
    }
    if (count < target) continue;
    for (std::size_t i = 0; i < measures.size(); ++i)
      if (in[i]) s.indices.push_back(i);
    s.kept = count;
    if (!best || s < *best) {
      best = std::move(s);
      best_mask = mask;
    }
  }
  if (!best)
    throw Infeasible("infeasible at requested count/eps: exhaustive search found no selection of " +
                     std::to_string(target) + " measures");
  Extraction e;
  e.exhaustive = true;
  for (std::size_t i : best->indices) {
    std::vector<Node> g;
    for (std::size_t a = 0; a < n; ++a)
      if ((best_mask >> a & 1U) && items[a].second == i) g.push_back(items[a].first);
    e.indices.push_back(i);
    e.kept.push_back(FinSet::from_unsorted(std::move(g)));
    e.loss.push_back(totals[i] - measures[i].of(e.kept.back()));
  }
  return e;
}

Extraction greedy_extract(const std::vector<NodeMeasure>& measures, const TreeXi& tree, const Rational& eps,
                          std::size_t target) {
  std::vector<Node> retained;
  std::map<std::size_t, FinSet> chosen;
  while (true) {
    std::optional<std::size_t> pick;
    Rational pick_loss;
    FinSet pick_set;
    for (std::size_t i = 0; i < measures.size(); ++i) {
      if (chosen.count(i)) continue;
      std::vector<Node> g;
      Rational loss = 0;
      for (const auto& [n, v] : measures[i].mass) {
        bool free = std::none_of(retained.begin(), retained.end(), [&](Node r) { return tree.comparable(r, n); });
        if (free)
          g.push_back(n);
        else
          loss += v;
      }
      if (loss > eps) continue;
      if (!pick || loss < pick_loss) {
        pick = i;
        pick_loss = loss;
        pick_set = FinSet(std::move(g));
      }
    }
    if (!pick) break;
    retained.insert(retained.end(), pick_set.begin(), pick_set.end());
    chosen[*pick] = std::move(pick_set);
  }
  if (chosen.size() < target)
    throw Infeasible("greedy search kept only " + std::to_string(chosen.size()) + " of the requested " +
                     std::to_string(target) + " measures");
  Extraction e;
  for (auto& [i, g] : chosen) {
    e.indices.push_back(i);
    e.loss.push_back(measures[i].total() - measures[i].of(g));
    e.kept.push_back(std::move(g));
  }
  return e;
}

}  // namespace

Extraction extract_incomparable(const std::vector<NodeMeasure>& measures, const TreeXi& tree, const Rational& eps,
                                std::size_t target_count) {
  if (eps <= 0) throw std::invalid_argument("eps must be positive");
  check_measures(measures, tree);
  std::size_t combined = 0;
  for (const auto& m : measures) combined += m.mass.size();
  if (combined <= kExhaustiveCutoff) return exhaustive_extract(measures, tree, eps, target_count);
  return greedy_extract(measures, tree, eps, target_count);
}

bool verify_extraction(const Extraction& e, const std::vector<NodeMeasure>& measures, const TreeXi& tree,
                       const Rational& eps) {
  if (e.indices.size() != e.kept.size() || e.indices.size() != e.loss.size()) return false;
  if (!std::is_sorted(e.indices.begin(), e.indices.end()) ||
      std::adjacent_find(e.indices.begin(), e.indices.end()) != e.indices.end())
    return false;
  for (std::size_t k = 0; k < e.indices.size(); ++k) {
    if (e.indices[k] >= measures.size()) return false;
    const auto& m = measures[e.indices[k]];
    for (Node n : e.kept[k])
      if (!m.mass.count(n)) return false;
    Rational loss = m.total() - m.of(e.kept[k]);
    if (loss != e.loss[k] || loss > eps) return false;
  }
  for (std::size_t a = 0; a < e.kept.size(); ++a)
    for (std::size_t b = a + 1; b < e.kept.size(); ++b)
      for (Node u : e.kept[a])
        for (Node v : e.kept[b])
          if (tree.comparable(u, v)) return false;
  return true;
}

FinSet successors(const TreeXi& tree, Node t) {
  auto span = t == kVirtualRoot ? tree.roots() : tree.children(t);
  return FinSet::from_unsorted(std::vector<Node>(span.begin(), span.end()));
}

std::vector<SuccSplit> succ_split(const std::vector<NodeMeasure>& measures, const TreeXi& tree,
                                  const std::vector<Node>& enumeration) {
  std::map<Node, std::size_t> index;  // predecessor -> position in the enumeration (1-based)
  for (std::size_t k = 0; k < enumeration.size(); ++k) index.emplace(enumeration[k], k + 1);
  std::vector<SuccSplit> out;
  for (std::size_t i = 0; i < measures.size(); ++i) {
    std::vector<Node> a, b;
    for (const auto& [n, v] : measures[i].mass) {
      if (n == kVirtualRoot) throw std::invalid_argument("support contains the root");
      if (!tree.has_node(n)) throw std::out_of_range("measure node " + std::to_string(n) + " outside the tree");
      auto chain = tree.chain(n);
      Node pred = chain.size() >= 2 ? chain[chain.size() - 2] : kVirtualRoot;
      auto it = index.find(pred);
      if (it == index.end())
        throw std::invalid_argument("enumeration misses the predecessor of node " + std::to_string(n));
      (it->second <= i + 1 ? a : b).push_back(n);
    }
    out.push_back({FinSet(std::move(a)), FinSet(std::move(b))});
  }
  return out;
}

Rational succ_mass(const NodeMeasure& m, const TreeXi& tree, Node t) { return m.of(successors(tree, t)); }

SuccTail succ_tail(const NodeMeasure& m, const TreeXi& tree, Node t, std::size_t j) {
  if (j == 0) throw std::invalid_argument("successor index counts from 1");
  SuccTail out;
  if (t != kVirtualRoot) out.atom = m.of(FinSet{t});
  auto succ = successors(tree, t);
  for (std::size_t k = j - 1; k < succ.size(); ++k) {
    const Node s = succ[k];
    for (const auto& [n, v] : m.mass) {
      if (n == s)
        out.successors += v;
      else if (tree.precedes(s, n))
        out.deeper += v;
    }
  }
  out.clopen = out.atom + out.successors + out.deeper;
  return out;
}

SuccLimits succ_limits(const std::vector<NodeMeasure>& family, const TreeXi& tree, Node t) {
  SuccLimits out;
  if (family.empty()) return out;
  const auto& last = family.back();
  auto succ = successors(tree, t);
  std::size_t j = succ.size() + 1;
  for (std::size_t k = 0; k < succ.size() && j > succ.size(); ++k) {
    const Node s = succ[k];
    for (const auto& kv : last.mass)
      if (kv.first == s || tree.precedes(s, kv.first)) {
        j = k + 1;
        break;
      }
  }
  if (j > succ.size()) return out;
  auto tail = succ_tail(last, tree, t, j);
  out.weak = tail.successors + tail.deeper;
  out.successor = succ_mass(last, tree, t);
  out.double_limit = tail.deeper;
  return out;
}

Rational EssMeasure::total() const {
  Rational s = 0;
  for (const auto& kv : mass) s += kv.second;
  return s;
}

bool weight_nodes_comparable(const EssNode& a, const EssNode& b) {
  auto wa = a.weights();
  auto wb = b.weights();
  const auto& shorter = wa.size() <= wb.size() ? wa : wb;
  const auto& longer = wa.size() <= wb.size() ? wb : wa;
  return std::equal(shorter.begin(), shorter.end(), longer.begin());
}

namespace {

// 0: G2, 1: G1, 2: dropped
using Assignment = std::vector<unsigned char>;

struct EssItems {
  std::vector<std::pair<std::size_t, std::size_t>> at;  // (measure, position)
  std::vector<const EssNode*> node;
  std::vector<Rational> mass;
};

EssItems ess_items(const std::vector<EssMeasure>& measures) {
  EssItems it;
  for (std::size_t i = 0; i < measures.size(); ++i)
    for (std::size_t p = 0; p < measures[i].mass.size(); ++p) {
      it.at.emplace_back(i, p);
      it.node.push_back(&measures[i].mass[p].first);
      it.mass.push_back(measures[i].mass[p].second);
    }
  return it;
}

bool g1_compatible(const EssNode& a, const EssNode& b) { return essentially_incomparable({a, b}); }

EssSplit assemble(const std::vector<EssMeasure>& measures, const EssItems& items, const Assignment& asg,
                  const std::vector<char>& keep) {
  EssSplit s;
  std::vector<std::vector<std::size_t>> g1(measures.size()), g2(measures.size());
  std::vector<Rational> loss(measures.size(), Rational(0));
  for (std::size_t k = 0; k < asg.size(); ++k) {
    auto [i, p] = items.at[k];
    if (asg[k] == 0) g2[i].push_back(p);
    if (asg[k] == 1) g1[i].push_back(p);
    if (asg[k] == 2) loss[i] += items.mass[k];
  }
  for (std::size_t i = 0; i < measures.size(); ++i)
    if (keep[i]) {
      s.indices.push_back(i);
      s.g1.push_back(g1[i]);
      s.g2.push_back(g2[i]);
      s.loss.push_back(loss[i]);
    }
  return s;
}

}  // namespace

EssSplit ess_split(const std::vector<EssMeasure>& measures, const Rational& eps,
                   std::optional<std::size_t> target_count) {
  if (eps < 0) throw std::invalid_argument("eps must be nonnegative");
  const std::size_t target = target_count.value_or(measures.size());
  // the sign supports of different measures must be disjoint
  std::map<Node, std::size_t> owner;
  for (std::size_t i = 0; i < measures.size(); ++i)
    for (const auto& [t, v] : measures[i].mass) {
      if (v <= 0) throw std::invalid_argument("measure masses must be positive");
      for (Node n : t.last().g.support()) {
        auto [it, fresh] = owner.emplace(n, i);
        if (!fresh && it->second != i) throw std::invalid_argument("sign supports of different measures overlap");
      }
    }
  auto items = ess_items(measures);
  const std::size_t n = items.node.size();
  std::vector<std::vector<char>> g1_ok(n, std::vector<char>(n, 1)), g2_ok(n, std::vector<char>(n, 1));
  for (std::size_t a = 0; a < n; ++a)
    for (std::size_t b = 0; b < n; ++b) {
      if (a == b) continue;
      g1_ok[a][b] = g1_compatible(*items.node[a], *items.node[b]);
      g2_ok[a][b] = items.at[a].first == items.at[b].first || !weight_nodes_comparable(*items.node[a], *items.node[b]);
    }
  std::vector<Rational> totals;
  for (const auto& m : measures) totals.push_back(m.total());

  auto kept_for = [&](const Assignment& asg, Rational& total_loss) -> std::optional<std::vector<char>> {
    std::vector<Rational> loss(measures.size(), Rational(0));
    for (std::size_t k = 0; k < n; ++k)
      if (asg[k] == 2) loss[items.at[k].first] += items.mass[k];
    std::vector<char> keep(measures.size(), 0);
    std::size_t count = 0;
    total_loss = 0;
    for (std::size_t i = 0; i < measures.size(); ++i)
      if (loss[i] <= eps) {
        keep[i] = 1;
        ++count;
        total_loss += loss[i];
      } else {
        // a measure that is not kept must not constrain the others
        for (std::size_t k = 0; k < n; ++k)
          if (items.at[k].first == i && asg[k] != 2) return std::nullopt;
      }
    if (count < target) return std::nullopt;
    return keep;
  };

  if (n <= kExhaustiveCutoff) {
    std::optional<Rational> best_loss;
    Assignment best;
    std::vector<char> best_keep;
    Assignment asg(n, 0);
    // depth-first in lexicographic order, G2 before G1 before dropping
    std::function<void(std::size_t)> go = [&](std::size_t k) {
      if (k == n) {
        Rational loss;
        auto keep = kept_for(asg, loss);
        if (keep && (!best_loss || loss < *best_loss)) {
          best_loss = loss;
          best = asg;
          best_keep = *keep;
        }
        return;
      }
      for (unsigned char c = 0; c < 3; ++c) {
        asg[k] = c;
        bool ok = true;
        for (std::size_t a = 0; a < k && ok; ++a) {
          if (c == 1 && asg[a] == 1 && !g1_ok[a][k]) ok = false;
          if (c == 0 && asg[a] == 0 && !g2_ok[a][k]) ok = false;
        }
        if (ok) go(k + 1);
      }
    };
    go(0);
    if (!best_loss)
      throw Infeasible("infeasible at requested count/eps: exhaustive search found no split keeping " +
                       std::to_string(target) + " measures");
    auto s = assemble(measures, items, best, best_keep);
    s.exhaustive = true;
    return s;
  }

  // Greedy: heavier nodes first, G2 if possible, then G1.
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return items.mass[a] > items.mass[b]; });
  Assignment asg(n, 2);
  for (std::size_t k : order) {
    for (unsigned char c = 0; c < 2; ++c) {
      bool ok = true;
      for (std::size_t a = 0; a < n && ok; ++a) {
        if (a == k || asg[a] != c) continue;
        ok = c == 1 ? g1_ok[a][k] : g2_ok[a][k];
      }
      if (ok) {
        asg[k] = c;
        break;
      }
    }
  }
  // drop measures that lose too much, releasing their nodes
  std::vector<Rational> loss(measures.size(), Rational(0));
  for (std::size_t k = 0; k < n; ++k)
    if (asg[k] == 2) loss[items.at[k].first] += items.mass[k];
  for (std::size_t k = 0; k < n; ++k)
    if (loss[items.at[k].first] > eps) asg[k] = 2;
  Rational total;
  auto keep = kept_for(asg, total);
  if (!keep) throw Infeasible("greedy split could not keep " + std::to_string(target) + " measures within eps");
  return assemble(measures, items, asg, *keep);
}

bool verify_ess_split(const EssSplit& s, const std::vector<EssMeasure>& measures, const Rational& eps) {
  const std::size_t k = s.indices.size();
  if (s.g1.size() != k || s.g2.size() != k || s.loss.size() != k) return false;
  std::vector<EssNode> g1_all;
  std::vector<std::pair<std::size_t, const EssNode*>> g2_all;
  for (std::size_t a = 0; a < k; ++a) {
    const std::size_t i = s.indices[a];
    if (i >= measures.size()) return false;
    const auto& m = measures[i];
    std::set<std::size_t> used;
    Rational kept = 0;
    for (std::size_t p : s.g1[a]) {
      if (p >= m.mass.size() || !used.insert(p).second) return false;
      kept += m.mass[p].second;
      g1_all.push_back(m.mass[p].first);
    }
    for (std::size_t p : s.g2[a]) {
      if (p >= m.mass.size() || !used.insert(p).second) return false;
      kept += m.mass[p].second;
      g2_all.emplace_back(i, &m.mass[p].first);
    }
    Rational loss = m.total() - kept;
    if (loss != s.loss[a] || loss > eps) return false;
  }
  if (!essentially_incomparable(g1_all)) return false;
  for (const auto& [i, t] : g2_all)
    for (const auto& [j, u] : g2_all)
      if (i != j && weight_nodes_comparable(*t, *u)) return false;
  return true;
}

}  // namespace bspace

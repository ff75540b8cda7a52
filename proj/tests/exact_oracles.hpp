#pragma once
// Exact exhaustive reference values. Leaf families are enumerated in full; a
// double pass picks out every family within 1e-9 of the best and only those
// are re-evaluated exactly, so the answer is exact as long as the float error
// of a family value stays below that margin (it is ~1e-14 here).

#include "bspace/ess_tree.hpp"
#include "bspace/finvec.hpp"
#include "bspace/schreier.hpp"
#include "bspace/surd.hpp"
#include "bspace/tree.hpp"
#include "oracles.hpp"

#include <cmath>
#include <functional>
#include <map>
#include <optional>
#include <set>
#include <type_traits>
#include <tuple>
#include <vector>

namespace exact_oracle {

using bspace::Node;
using bspace::Rational;
using bspace::Surd;

struct Leaf {
  std::vector<std::size_t> pos;  // increasing positions in the support
  double approx = 0;
  std::size_t weight = 0;
  bool weighted = false;
};

// Best value of an ordered leaf list: one leaf, or half the sum over g >= 2
// successive groups with g at most the first node of the list. Interval DP.
template <typename V>
V tree_value(const std::vector<V>& v, const std::vector<Node>& first) {
  const std::size_t k = v.size();
  std::vector<std::vector<V>> tv(k, std::vector<V>(k));
  for (std::size_t len = 1; len <= k; ++len)
    for (std::size_t a = 0; a + len <= k; ++a) {
      const std::size_t b = a + len - 1;
      if (a == b) {
        tv[a][b] = v[a];
        continue;
      }
      // best[g][from]: max sum over exactly g groups covering [from, b]
      const std::size_t max_groups = std::min<std::size_t>(len, first[a]);
      std::vector<std::vector<std::optional<V>>> best(max_groups + 1, std::vector<std::optional<V>>(k + 1));
      best[0][b + 1] = V(0);
      V out = V(0);
      for (std::size_t g = 1; g <= max_groups; ++g) {
        for (std::size_t from = b + 1; from-- > a;) {
          std::optional<V> acc;
          for (std::size_t end = from; end <= b; ++end) {
            if (from == a && end == b) continue;
            if (!best[g - 1][end + 1]) continue;
            V s = tv[from][end] + *best[g - 1][end + 1];
            if (!acc || *acc < s) acc = s;
          }
          best[g][from] = acc;
        }
        if (g >= 2 && best[g][a]) {
          V half;
          if constexpr (std::is_same_v<V, double>)
            half = *best[g][a] / 2;
          else
            half = *best[g][a] * (Rational(1) / 2);
          if (out < half) out = half;
        }
      }
      tv[a][b] = out;
    }
  return tv[0][k - 1];
}

// sup over ordered leaf lists with successive supports and pairwise
// compatible leaves; `exact_leaf` gives a leaf's exact value.
template <typename V>
V constrained_family(const std::vector<Node>& nodes, const std::vector<Leaf>& leaves,
                     const std::function<bool(const Leaf&, const Leaf&)>& compatible,
                     const std::function<V(const Leaf&)>& exact_leaf) {
  double best = 0;
  std::vector<std::pair<double, std::vector<std::size_t>>> kept;
  std::vector<std::size_t> chosen;
  auto approx_of = [&](const std::vector<std::size_t>& fam) {
    std::vector<double> v;
    std::vector<Node> first;
    for (std::size_t i : fam) {
      v.push_back(leaves[i].approx);
      first.push_back(nodes[leaves[i].pos.front()]);
    }
    return tree_value(v, first);
  };
  std::function<void(long)> grow = [&](long last) {
    if (!chosen.empty()) {
      const double val = approx_of(chosen);
      if (val >= best - 1e-9) kept.emplace_back(val, chosen);
      best = std::max(best, val);
    }
    for (std::size_t i = 0; i < leaves.size(); ++i) {
      const Leaf& c = leaves[i];
      if (static_cast<long>(c.pos.front()) <= last) continue;
      bool ok = true;
      for (std::size_t d : chosen) ok = ok && compatible(leaves[d], c) && compatible(c, leaves[d]);
      if (!ok) continue;
      chosen.push_back(i);
      grow(static_cast<long>(c.pos.back()));
      chosen.pop_back();
    }
  };
  grow(-1);

  std::vector<V> exact_values(leaves.size());
  std::vector<char> done(leaves.size(), 0);
  V out = V(0);
  for (const auto& [val, fam] : kept) {
    if (val < best - 1e-9) continue;
    std::vector<V> v;
    std::vector<Node> first;
    for (std::size_t i : fam) {
      if (!done[i]) {
        exact_values[i] = exact_leaf(leaves[i]);
        done[i] = 1;
      }
      v.push_back(exact_values[i]);
      first.push_back(nodes[leaves[i].pos.front()]);
    }
    V t = tree_value(v, first);
    if (out < t) out = t;
  }
  return out;
}

// T_inc: leaves are l2 functionals on chains, pairwise incomparable.
inline Surd tinc(const bspace::FinVec& x, const bspace::TreeXi& t) {
  std::vector<Node> nodes;
  std::vector<Rational> vals;
  for (const auto& [n, v] : x.coords()) {
    nodes.push_back(n);
    vals.push_back(v);
  }
  const std::size_t n = nodes.size();
  std::vector<Leaf> leaves;
  for (std::size_t mask = 1; mask < (std::size_t{1} << n); ++mask) {
    Leaf c;
    double s = 0;
    for (std::size_t i = 0; i < n; ++i)
      if (mask >> i & 1U) {
        c.pos.push_back(i);
        s += vals[i].get_d() * vals[i].get_d();
      }
    bool chain = true;
    for (std::size_t a : c.pos)
      for (std::size_t b : c.pos) chain = chain && (a == b || t.comparable(nodes[a], nodes[b]));
    if (!chain) continue;
    c.approx = std::sqrt(s);
    leaves.push_back(c);
  }
  return constrained_family<Surd>(
      nodes, leaves,
      [&](const Leaf& a, const Leaf& b) {
        for (std::size_t p : a.pos)
          for (std::size_t q : b.pos)
            if (t.comparable(nodes[p], nodes[q])) return false;
        return true;
      },
      [&](const Leaf& c) {
        Rational s = 0;
        for (std::size_t i : c.pos) s += vals[i] * vals[i];
        return Surd::sqrt(s);
      });
}

// Essential T_inc. Weighted leaves are (1/m_j) * sum |x_i| over S_{n_j} sets.
// The constraint between leaves reads only their weights and first nodes, and
// successiveness only their first and last positions, so per (first, last,
// weight) the heaviest admissible subset dominates the rest.
inline Rational essinc(const bspace::FinVec& x, const bspace::SigmaRegistry& sigma,
                       const std::set<std::size_t>& banned = {}) {
  const auto& params = sigma.params();
  std::vector<Node> nodes;
  std::vector<Rational> vals;
  for (const auto& [n, v] : x.coords()) {
    nodes.push_back(n);
    vals.push_back(bspace::abs(v));
  }
  const std::size_t n = nodes.size();
  std::vector<Leaf> leaves;
  std::vector<Rational> exact;
  for (std::size_t i = 0; i < n; ++i) {
    leaves.push_back({{i}, vals[i].get_d(), 0, false});
    exact.push_back(vals[i]);
  }
  std::map<std::tuple<std::size_t, std::size_t, std::size_t>, std::pair<Rational, std::vector<std::size_t>>> best;
  for (std::size_t w = 0; w < params.size(); ++w)
    for (std::size_t mask = 1; !banned.count(w) && mask < (std::size_t{1} << n); ++mask) {
      std::vector<std::size_t> pos;
      std::vector<Node> f;
      Rational s = 0;
      for (std::size_t i = 0; i < n; ++i)
        if (mask >> i & 1U) {
          pos.push_back(i);
          f.push_back(nodes[i]);
          s += vals[i];
        }
      if (!oracle::schreier(f, params.n[w])) continue;
      s /= params.m[w];
      const auto key = std::make_tuple(pos.front(), pos.back(), w);
      auto it = best.find(key);
      if (it == best.end() || it->second.first < s) best[key] = {s, pos};
    }
  // A G0 leaf on the same node beats a weighted singleton and is never
  // constrained. Among weighted leaves with equal weight and first position,
  // one that ends earlier with at least the value dominates.
  for (const auto& [key, entry] : best) {
    const auto [front, back, w] = key;
    if (front == back) continue;
    bool dominated = false;
    for (std::size_t b2 = front + 1; b2 < back && !dominated; ++b2) {
      auto it = best.find(std::make_tuple(front, b2, w));
      dominated = it != best.end() && it->second.first >= entry.first;
    }
    if (dominated) continue;
    leaves.push_back({entry.second, entry.first.get_d(), w, true});
    exact.push_back(entry.first);
  }
  std::map<const Leaf*, std::size_t> index;
  for (std::size_t i = 0; i < leaves.size(); ++i) index[&leaves[i]] = i;
  return constrained_family<Rational>(
      nodes, leaves,
      [&](const Leaf& a, const Leaf& b) {
        if (!a.weighted || !b.weighted || !sigma.weight_precedes(a.weight, b.weight)) return true;
        const auto* g = sigma.ancestor_sign(a.weight, b.weight);
        return g == nullptr || g->empty() || g->max_support() < nodes[a.pos.front()];
      },
      [&](const Leaf& c) { return exact[index.at(&c)]; });
}

// sum_i ||S_i x||_r^p over pairwise disjoint segments, maximized; r in {1, 2}
// with r dividing p. p = 0 stands for infinity and returns max ||S x||_r^r.
inline Rational jt_power(const bspace::FinVec& x, const bspace::TreeXi& t, unsigned r, unsigned p) {
  std::vector<Node> nodes;
  std::vector<Rational> vals;
  for (const auto& [n, v] : x.coords()) {
    nodes.push_back(n);
    vals.push_back(r == 1 ? bspace::abs(v) : Rational(v * v));
  }
  const std::size_t n = nodes.size();
  std::vector<std::pair<std::vector<std::size_t>, Rational>> paths;
  for (std::size_t a = 0; a < n; ++a)
    for (std::size_t b = 0; b < n; ++b) {
      if (!(a == b || t.precedes(nodes[a], nodes[b]))) continue;
      std::vector<std::size_t> on;
      Rational acc = 0;
      for (std::size_t c = 0; c < n; ++c) {
        const bool between = (c == a || t.precedes(nodes[a], nodes[c])) && (c == b || t.precedes(nodes[c], nodes[b]));
        if (!between) continue;
        on.push_back(c);
        acc += vals[c];
      }
      paths.emplace_back(on, p == 0 ? acc : bspace::pow(acc, p / r));
    }
  Rational best = 0;
  if (p == 0) {
    for (const auto& [on, v] : paths) best = std::max(best, v);
    return best;
  }
  std::vector<char> used(n, 0);
  std::function<void(std::size_t, const Rational&)> pick = [&](std::size_t from, const Rational& total) {
    if (best < total) best = total;
    for (std::size_t i = from; i < paths.size(); ++i) {
      bool free = true;
      for (std::size_t c : paths[i].first) free = free && !used[c];
      if (!free) continue;
      for (std::size_t c : paths[i].first) used[c] = 1;
      pick(i + 1, total + paths[i].second);
      for (std::size_t c : paths[i].first) used[c] = 0;
    }
  };
  pick(0, Rational(0));
  return best;
}

}  // namespace exact_oracle

#pragma once
// Interval dynamic program for norms of Tsirelson extensions.
//
// Positions 0..N-1 index supp x in increasing node order. V(i,j) is the best
// value of a functional supported in positions [i, j]: either a ground leaf or
// (1/2)(f_1 + ... + f_n) with f_1 < ... < f_n and n <= min supp f_1.

#include "bspace/functional.hpp"
#include "bspace/interval.hpp"
#include "bspace/surd.hpp"

#include <functional>
#include <optional>
#include <vector>

namespace bspace::detail {

template <class V>
struct ValueOps;

template <>
struct ValueOps<Surd> {
  static Surd zero() { return Surd(); }
  static Surd half(const Surd& v) { return v * Rational(1, 2); }
  static bool greater(const Surd& a, const Surd& b) { return a > b; }
  static Surd join(const Surd& a, const Surd& b) { return a > b ? a : b; }
};

template <>
struct ValueOps<double> {
  static double zero() { return 0.0; }
  static double half(double v) { return v / 2; }
  static bool greater(double a, double b) { return a > b; }
  static double join(double a, double b) { return a > b ? a : b; }
};

template <>
struct ValueOps<Interval> {
  static Interval zero() { return Interval(Rational(0)); }
  static Interval half(const Interval& v) { return v * Interval(Rational(1, 2)); }
  static bool greater(const Interval& a, const Interval& b) { return a.midpoint() > b.midpoint(); }
  static Interval join(const Interval& a, const Interval& b) { return Interval::max(a, b); }
};

template <class V>
class TsirelsonDP {
 public:
  using Ops = ValueOps<V>;
  struct LeafPick {
    V value;
    std::size_t id;
  };
  using LeafFn = std::function<std::optional<LeafPick>(std::size_t, std::size_t)>;

  TsirelsonDP(std::vector<Node> nodes, LeafFn leaf) : nodes_(std::move(nodes)), leaf_(std::move(leaf)) {
    n_ = nodes_.size();
    v_.assign(n_ * n_, std::nullopt);
    vchoice_.assign(n_ * n_, {});
    p_.assign(n_ * n_ * (n_ + 1), std::nullopt);
    pchoice_.assign(n_ * n_ * (n_ + 1), {});
  }

  std::optional<V> solve() {
    if (n_ == 0) return std::nullopt;
    for (std::size_t len = 1; len <= n_; ++len)
      for (std::size_t i = 0; i + len <= n_; ++i) compute_v(i, i + len - 1);
    return v_[idx(0, n_ - 1)];
  }

  // Certificate tree whose maximal nodes carry leaf ids.
  AnalysisNode witness() const { return build_v(0, n_ - 1); }

 private:
  struct VChoice {
    bool leaf = true;
    std::size_t leaf_id = 0;
    std::size_t a = 0, b = 0, c = 0;
  };
  struct PChoice {
    bool skip = true;
    std::size_t b = 0;
  };

  std::size_t idx(std::size_t i, std::size_t j) const { return i * n_ + j; }
  std::size_t pidx(std::size_t s, std::size_t j, std::size_t c) const { return (s * n_ + j) * (n_ + 1) + c; }

  void compute_v(std::size_t i, std::size_t j) {
    std::optional<V> best;
    VChoice choice;
    if (auto l = leaf_(i, j)) {
      best = l->value;
      choice.leaf = true;
      choice.leaf_id = l->id;
    }
    for (std::size_t a = i; a <= j; ++a) {
      const Node na = nodes_[a];
      const std::size_t count = na >= n_ + 1 ? n_ : static_cast<std::size_t>(na);
      if (count < 2) continue;  // a single half is never better than the piece itself
      for (std::size_t b = a; b <= j; ++b) {
        if (a == i && b == j) continue;
        const auto& first = v_[idx(a, b)];
        if (!first) continue;
        V rest = b + 1 <= j ? p_value(b + 1, j, count - 1) : Ops::zero();
        V cand = Ops::half(*first + rest);
        if (!best) {
          best = cand;
          choice = VChoice{false, 0, a, b, count - 1};
        } else {
          const bool wins = Ops::greater(cand, *best);
          best = Ops::join(*best, cand);
          if (wins) choice = VChoice{false, 0, a, b, count - 1};
        }
      }
    }
    v_[idx(i, j)] = best;
    vchoice_[idx(i, j)] = choice;
  }

  // Best sum of at most c successive pieces inside [s, j].
  V p_value(std::size_t s, std::size_t j, std::size_t c) {
    if (s > j || c == 0) return Ops::zero();
    c = std::min(c, j - s + 1);
    auto& slot = p_[pidx(s, j, c)];
    if (slot) return *slot;
    V best = p_value(s + 1, j, c);
    PChoice choice{true, 0};
    for (std::size_t b = s; b <= j; ++b) {
      const auto& piece = v_[idx(s, b)];
      if (!piece) continue;
      V cand = *piece + (b + 1 <= j ? p_value(b + 1, j, c - 1) : Ops::zero());
      const bool wins = Ops::greater(cand, best);
      best = Ops::join(best, cand);
      if (wins) choice = PChoice{false, b};
    }
    slot = best;
    pchoice_[pidx(s, j, c)] = choice;
    return best;
  }

  AnalysisNode build_v(std::size_t i, std::size_t j) const {
    const auto& ch = vchoice_[idx(i, j)];
    if (ch.leaf) return AnalysisNode{ch.leaf_id, {}};
    AnalysisNode node;
    node.children.push_back(build_v(ch.a, ch.b));
    build_p(ch.b + 1, j, ch.c, node.children);
    return node;
  }

  void build_p(std::size_t s, std::size_t j, std::size_t c, std::vector<AnalysisNode>& out) const {
    while (s <= j && c > 0) {
      c = std::min(c, j - s + 1);
      const auto& ch = pchoice_[pidx(s, j, c)];
      if (ch.skip) {
        ++s;
        continue;
      }
      out.push_back(build_v(s, ch.b));
      s = ch.b + 1;
      --c;
    }
  }

  std::vector<Node> nodes_;
  LeafFn leaf_;
  std::size_t n_ = 0;
  std::vector<std::optional<V>> v_;
  std::vector<VChoice> vchoice_;
  std::vector<std::optional<V>> p_;
  std::vector<PChoice> pchoice_;
};

}  // namespace bspace::detail

#include "bspace/norms.hpp"

#include "norm_support.hpp"

#include <algorithm>
#include <memory>

namespace bspace {

using detail::CandLeaf;
using detail::Support;

namespace {

// Family of chosen paths, shared between DP states.
struct Picks {
  std::vector<std::shared_ptr<const Picks>> parts;
  std::optional<std::pair<std::size_t, std::size_t>> path;  // (top, bottom) positions
};
using PicksPtr = std::shared_ptr<const Picks>;

PicksPtr join(std::vector<PicksPtr> parts, std::optional<std::pair<std::size_t, std::size_t>> path = std::nullopt) {
  auto p = std::make_shared<Picks>();
  for (auto& q : parts)
    if (q) p->parts.push_back(std::move(q));
  p->path = path;
  return p;
}

void flatten(const PicksPtr& p, std::vector<std::pair<std::size_t, std::size_t>>& out) {
  if (!p) return;
  if (p->path) out.push_back(*p->path);
  for (const auto& q : p->parts) flatten(q, out);
}

Rational rational_power(const Rational& base, unsigned long e) {
  Rational out;
  mpz_pow_ui(out.get_num_mpz_t(), base.get_num_mpz_t(), e);
  mpz_pow_ui(out.get_den_mpz_t(), base.get_den_mpz_t(), e);
  return out;
}

bool is_integer(const Rational& r) { return r.get_den() == 1; }

// Arithmetic of the DP: O accumulates the open path, C the closed total.
struct ExactOps {
  using O = Rational;
  using C = Rational;
  unsigned long r, ratio;  // |x|^r and phi(s) = s^ratio
  bool sum;
  O contrib(const Rational& x) const { return sum ? x : rational_power(abs(x), r); }
  C phi(const O& s) const { return rational_power(abs(s), ratio); }
  static C zero() { return Rational(0); }
  // a is at least as good as b, given the state comparison rule
  bool dominates(const O& oa, const C& ca, const O& ob, const C& cb) const {
    return (sum ? oa == ob : oa >= ob) && ca >= cb;
  }
  static C max(const C& a, const C& b) { return a >= b ? a : b; }
  static double mid(const C& c) { return c.get_d(); }
  static bool wins(const C& a, double, const C& b, double) { return b > a; }
};

struct IntervalOps {
  using O = Interval;
  using C = Interval;
  Rational r, ratio;
  bool sum;
  O contrib(const Rational& x) const { return sum ? Interval(x) : Interval(abs(x)).pow(r); }
  C phi(const O& s) const {
    Interval a = s.abs();
    if (a.upper() <= 0) return Interval(Rational(0));
    return a.pow(ratio);
  }
  static C zero() { return Interval(Rational(0)); }
  bool dominates(const O& oa, const C& ca, const O& ob, const C& cb) const {
    if (sum) return false;
    return ob.certainly_leq(oa) && cb.certainly_leq(ca);
  }
  static C max(const C& a, const C& b) { return Interval::max(a, b); }
  static double mid(const C& c) { return c.midpoint(); }
  static bool wins(const C&, double ka, const C&, double kb) { return kb > ka; }
};

template <class Ops>
struct ForestDP {
  using O = typename Ops::O;
  using C = typename Ops::C;
  struct State {
    O open;
    C closed;
    PicksPtr picks;
    std::size_t bottom;
  };
  struct Done {
    C value;      // enclosure (or exact value) of the subtree optimum
    PicksPtr picks;
    double key;   // ranks alternatives when choosing the witness
  };

  const Ops& ops;
  const Support& s;
  std::vector<std::vector<std::size_t>> children;
  std::vector<std::vector<State>> open;
  std::vector<Done> done;
  std::uint64_t states = 0;

  ForestDP(const Ops& o, const Support& sup, std::vector<std::vector<std::size_t>> ch)
      : ops(o), s(sup), children(std::move(ch)), open(sup.size()), done(sup.size(), Done{Ops::zero(), nullptr, 0}) {}

  static Done better(Done a, const Done& b) {
    C v = Ops::max(a.value, b.value);
    if (Ops::wins(a.value, a.key, b.value, b.key)) a = b;
    a.value = v;
    return a;
  }

  void prune(std::vector<State>& v) {
    std::vector<State> kept;
    for (std::size_t i = 0; i < v.size(); ++i) {
      bool dominated = false;
      for (std::size_t k = 0; k < v.size() && !dominated; ++k) {
        if (k == i || !ops.dominates(v[k].open, v[k].closed, v[i].open, v[i].closed)) continue;
        // among mutually dominating states keep the first
        dominated = !ops.dominates(v[i].open, v[i].closed, v[k].open, v[k].closed) || k < i;
      }
      if (!dominated) kept.push_back(std::move(v[i]));
    }
    v = std::move(kept);
  }

  void visit(std::size_t v) {
    const auto& ch = children[v];
    C fin_all = Ops::zero();
    std::vector<PicksPtr> fin_picks;
    double fin_key = 0;
    for (std::size_t c : ch) {
      fin_all = fin_all + done[c].value;
      fin_picks.push_back(done[c].picks);
      fin_key += done[c].key;
    }
    const O a = ops.contrib(s.x[v]);
    std::vector<State> mine;
    mine.push_back({a, fin_all, join(fin_picks), v});
    for (std::size_t idx = 0; idx < ch.size(); ++idx) {
      const std::size_t c = ch[idx];
      C rest = Ops::zero();
      std::vector<PicksPtr> rest_picks;
      for (std::size_t k = 0; k < ch.size(); ++k)
        if (k != idx) {
          rest = rest + done[ch[k]].value;
          rest_picks.push_back(done[ch[k]].picks);
        }
      for (const auto& st : open[c]) {
        auto parts = rest_picks;
        parts.push_back(st.picks);
        mine.push_back({a + st.open, rest + st.closed, join(parts), st.bottom});
      }
    }
    for (std::size_t c : ch) open[c].clear();
    prune(mine);
    states += mine.size();
    Done best{fin_all, join(fin_picks), fin_key};
    for (const auto& st : mine) {
      C total = st.closed + ops.phi(st.open);
      best = better(best, Done{total, join({st.picks}, std::make_pair(v, st.bottom)), Ops::mid(total)});
    }
    done[v] = std::move(best);
    open[v] = std::move(mine);
  }
};

std::vector<std::vector<std::size_t>> forest_children(const Support& s, std::vector<std::size_t>& roots) {
  const std::size_t n = s.size();
  std::vector<std::vector<std::size_t>> ch(n);
  for (std::size_t b = 0; b < n; ++b) {
    std::optional<std::size_t> parent;
    for (std::size_t a = b; a-- > 0;)
      if (s.prec[a][b]) {
        parent = a;
        break;
      }
    if (parent)
      ch[*parent].push_back(b);
    else
      roots.push_back(b);
  }
  return ch;
}

CandLeaf path_leaf(const Support& s, std::size_t top, std::size_t bottom, JtVariant variant) {
  CandLeaf c;
  c.tag = variant == JtVariant::Sum ? GroundTag::Gsum : GroundTag::G1Signs;
  Rational sum = 0;
  for (std::size_t p = top; p <= bottom; ++p)
    if (s.prec[top][p] && s.prec[p][bottom]) {
      c.pos.push_back(p);
      sum += variant == JtVariant::Sum ? s.x[p] : s.ax[p];
    }
  c.negative = sum < 0;
  c.score = abs(sum);
  return c;
}

template <class Ops>
std::pair<typename Ops::C, std::vector<std::pair<std::size_t, std::size_t>>> run_forest(const Ops& ops,
                                                                                       const Support& s,
                                                                                       NormStats& stats) {
  std::vector<std::size_t> roots;
  ForestDP<Ops> dp(ops, s, forest_children(s, roots));
  for (std::size_t v = s.size(); v-- > 0;) dp.visit(v);
  typename Ops::C total = Ops::zero();
  std::vector<PicksPtr> parts;
  for (std::size_t r : roots) {
    total = total + dp.done[r].value;
    parts.push_back(dp.done[r].picks);
  }
  std::vector<std::pair<std::size_t, std::size_t>> paths;
  flatten(join(parts), paths);
  std::sort(paths.begin(), paths.end());
  stats.nodes_explored = dp.states;
  return {total, paths};
}

}  // namespace

JtResult jt_norm(const FinVec& x, const TreeXi& tree, const Rational& r, const std::optional<Rational>& p,
                 JtVariant variant) {
  if (r < 1) throw std::invalid_argument("jt_norm: r must be at least 1");
  if (p && *p < r) throw std::invalid_argument("jt_norm: need r <= p");
  if (variant == JtVariant::Sum && r != 1) throw std::invalid_argument("jt_norm: the sum variant has r = 1");
  Support s(x, &tree);
  JtResult out;
  out.stats.method = "forest-dp";
  if (s.size() == 0) {
    out.value = NormValue::of(Surd());
    out.pth_power = Rational(0);
    return out;
  }
  const bool sum = variant == JtVariant::Sum;
  std::vector<std::pair<std::size_t, std::size_t>> paths;

  if (!p) {
    // p = infinity: the best single segment
    out.stats.method = "best-segment";
    std::optional<Interval> best;
    std::pair<std::size_t, std::size_t> arg{0, 0};
    for (std::size_t t = 0; t < s.size(); ++t)
      for (std::size_t b = t; b < s.size(); ++b) {
        if (!s.prec[t][b]) continue;
        Interval acc(Rational(0));
        Rational exact = 0;
        for (std::size_t q = t; q <= b; ++q)
          if (s.prec[t][q] && s.prec[q][b]) {
            if (sum)
              exact += s.x[q];
            else
              acc = acc + Interval(s.ax[q]).pow(r);
          }
        Interval v = sum ? Interval(abs(exact)) : acc.pow(1 / r);
        if (!best || v.midpoint() > best->midpoint()) {
          best = v;
          arg = {t, b};
        }
      }
    paths.push_back(arg);
    auto c = path_leaf(s, arg.first, arg.second, variant);
    if (r == 1) {
      out.value = NormValue::of(Surd(c.score));
    } else if (r == 2) {
      Rational sq = 0;
      for (std::size_t q : c.pos) sq += s.x[q] * s.x[q];
      out.value = NormValue::of(Surd::sqrt(sq));
    } else {
      out.value = NormValue::of(*best);
    }
  } else {
    const Rational ratio = *p / r;
    const bool exact = is_integer(ratio) && (sum || is_integer(r)) && r.get_num().fits_ulong_p() &&
                       ratio.get_num().fits_ulong_p();
    if (exact) {
      ExactOps ops{r.get_num().get_ui(), ratio.get_num().get_ui(), sum};
      auto [total, ps] = run_forest(ops, s, out.stats);
      paths = ps;
      out.pth_power = total;
      if (*p == 2)
        out.value = NormValue::of(Surd::sqrt(total));
      else
        out.value = NormValue::of(Interval(total).pow(1 / *p));
    } else {
      IntervalOps ops{r, ratio, sum};
      auto [total, ps] = run_forest(ops, s, out.stats);
      paths = ps;
      out.value = NormValue::of(total.pow(1 / *p));
    }
  }

  for (auto [t, b] : paths) out.segments.push_back(tree.segment(s.nodes[t], s.nodes[b]));

  // Witness sum_i b_i f_i with b proportional to the segment values (r = 1, p = 2).
  if (r == 1 && p && *p == 2 && out.pth_power && *out.pth_power > 0) {
    const Rational total = *out.pth_power;
    const Surd root = Surd::sqrt(total);
    for (auto [t, b] : paths) {
      auto c = path_leaf(s, t, b, variant);
      if (c.score == 0) continue;
      out.witness.leaves.push_back(detail::make_leaf(c, s, &tree, nullptr, Rational(0)));
      Rational f = c.score / total;
      f.canonicalize();
      out.witness.scalars.push_back(root * f);
    }
  }
  return out;
}

nlohmann::json jt_result_to_json(const JtResult& r) {
  nlohmann::json segs = nlohmann::json::array();
  for (const auto& s : r.segments) segs.push_back(s.nodes);
  nlohmann::json j{{"value", r.value.to_json()},
                   {"segments", segs},
                   {"witness", functional_to_json(r.witness)},
                   {"stats", {{"nodes_explored", r.stats.nodes_explored}, {"method", r.stats.method}}}};
  j["pth_power"] = r.pth_power ? nlohmann::json(r.pth_power->get_str()) : nlohmann::json(nullptr);
  return j;
}

}  // namespace bspace

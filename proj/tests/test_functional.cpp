#include "bspace/norms.hpp"
#include "norm_oracles.hpp"

#include <doctest.h>

#include <random>

using namespace bspace;

namespace {

const TreeXi& tree80() {
  static const TreeXi t = TreeXi::build(TreeSpec{SchreierRank{1}, 80});
  return t;
}

FinVec random_vec(std::mt19937& rng, const TreeXi& t, std::size_t size) {
  FinVec x;
  const auto chain = t.chain(1 + rng() % t.n_max());
  while (x.size() < size) {
    const Node n = rng() % 2 ? chain[rng() % chain.size()] : 1 + rng() % t.n_max();
    const int v = static_cast<int>(rng() % 13) - 6;
    if (v != 0) x.set(n, Rational(v) / (1 + static_cast<int>(rng() % 3)));
  }
  return x;
}

FinVec random_antichain_vec(std::mt19937& rng, const TreeXi& t, std::size_t size) {
  FinVec x;
  for (int tries = 0; x.size() < size && tries < 1000; ++tries) {
    const Node n = 1 + rng() % t.n_max();
    bool free = true;
    for (const auto& [m, v] : x.coords()) free = free && !t.comparable(n, m);
    if (free) x.set(n, Rational(1 + static_cast<int>(rng() % 6)) / 2);
  }
  return x;
}

NormingSpec wxi_spec() { return NormingSpec{NormingSetKind::Tinc, GroundKind::g2(), &tree80(), nullptr, Rational(0)}; }

}  // namespace

TEST_CASE("ground norm examples") {
  const auto& t = tree80();
  Node deep = 0;
  for (Node n = 1; n <= t.n_max() && deep == 0; ++n)
    if (t.depth(n) >= 3) deep = n;
  const auto chain = t.chain(deep);
  FinVec ones;
  for (Node n : chain) ones.set(n, Rational(1));
  CHECK(*ground_norm(ones, GroundKind::g2(), &t).value.exact == Surd(2));
  CHECK(*ground_norm(ones, GroundKind::g1_signs(), &t).value.exact == Surd(4));

  FinVec anti;
  for (Node r : {2, 4, 8, 16}) anti.set(r, Rational(1));
  CHECK(*ground_norm(anti, GroundKind::g2(), &t).value.exact == Surd(1));
  CHECK(*ground_norm(anti, GroundKind::g1_signs(), &t).value.exact == Surd(1));
}

TEST_CASE("W_G with G0 on a flat block of ones") {
  for (Node n = 2; n <= 6; ++n) {
    FinVec x;
    for (Node i = n; i <= 2 * n - 1; ++i) x.set(i, Rational(1));
    const auto r = wg_norm(x, GroundKind::g0());
    CHECK(*r.value.exact == Surd(Rational(static_cast<long>(n)) / 2));
    CHECK(r.value.approx() == doctest::Approx(oracle::tsirelson(oracle::coords_of(x), oracle::g0())));
  }
}

TEST_CASE("sandwich: ground <= tinc <= W_G and W_G dominates its ground set") {
  const auto& t = tree80();
  std::mt19937 rng(21);
  for (int it = 0; it < 200; ++it) {
    const auto x = random_vec(rng, t, 1 + it % 6);
    const auto g = *ground_norm(x, GroundKind::g2(), &t).value.exact;
    const auto w = *wg_norm(x, GroundKind::g2(), &t).value.exact;
    CHECK(g <= w);
    if (it % 4 == 0) {
      const auto m = *tinc_norm(x, t).value.exact;
      CHECK(g <= m);
      CHECK(m <= w);
    }
  }
}

TEST_CASE("tinc on an antichain is the G0 Tsirelson norm") {
  const auto& t = tree80();
  std::mt19937 rng(8);
  for (int it = 0; it < 50; ++it) {
    const auto x = random_antichain_vec(rng, t, 2 + it % 5);
    CHECK(*tinc_norm(x, t).value.exact == *wg_norm(x, GroundKind::g0()).value.exact);
  }
}

TEST_CASE("essinc dominates the Tsirelson norm") {
  SigmaRegistry sigma(EssParams::toy_default());
  std::mt19937 rng(13);
  for (int it = 0; it < 100; ++it) {
    const auto x = random_vec(rng, tree80(), 1 + it % 6);
    CHECK(*wg_norm(x, GroundKind::g0()).value.exact <= *essinc_norm(x, sigma).value.exact);
  }
}

TEST_CASE("all engines are invariant under sign flips") {
  const auto& t = tree80();
  SigmaRegistry sigma(EssParams::toy_default());
  std::mt19937 rng(17);
  for (int it = 0; it < 50; ++it) {
    const auto x = random_vec(rng, t, 1 + it % 6);
    FinVec y;
    for (const auto& [n, v] : x.coords()) y.set(n, rng() % 2 ? Rational(-v) : v);
    CHECK(*tinc_norm(x, t).value.exact == *tinc_norm(y, t).value.exact);
    CHECK(*essinc_norm(x, sigma).value.exact == *essinc_norm(y, sigma).value.exact);
    CHECK(*jt_norm(x, t, Rational(1), Rational(2)).pth_power == *jt_norm(y, t, Rational(1), Rational(2)).pth_power);
    CHECK(*wg_norm(x, GroundKind::g2(), &t).value.exact == *wg_norm(y, GroundKind::g2(), &t).value.exact);
    CHECK(*ground_norm(x, GroundKind::g1_signs(), &t).value.exact ==
          *ground_norm(y, GroundKind::g1_signs(), &t).value.exact);
  }
}

TEST_CASE("verify_functional examples") {
  const auto& t = tree80();
  SigmaRegistry sigma(EssParams::toy_default());
  for (Node n : {1, 5, 37}) {
    CHECK(verify_functional(unit_functional(n), wxi_spec()).ok);
    CHECK(verify_functional(unit_functional(n), NormingSpec{NormingSetKind::WG, GroundKind::g0(), nullptr, nullptr, Rational(0)}).ok);
    CHECK(verify_functional(unit_functional(n), NormingSpec{NormingSetKind::Essinc, GroundKind::g0(), nullptr, &sigma, Rational(0)}).ok);
  }
  // 3 is a child of 2: fine in W_G, not in W_xi
  REQUIRE(t.precedes(2, 3));
  const auto comparable = half_sum({unit_functional(2), unit_functional(3)});
  CHECK(verify_functional(comparable, NormingSpec{NormingSetKind::WG, GroundKind::g2(), &t, nullptr, Rational(0)}).ok);
  CHECK_FALSE(verify_functional(comparable, wxi_spec()).ok);
  CHECK(verify_functional(half_sum({unit_functional(2), unit_functional(4)}), wxi_spec()).ok);
  // two parts cannot start at node 1
  CHECK_FALSE(verify_functional(half_sum({unit_functional(1), unit_functional(4)}), wxi_spec()).ok);

  // dropping leaves of a valid functional keeps it valid
  std::mt19937 rng(2);
  int checked = 0;
  for (int it = 0; it < 40; ++it) {
    const auto x = random_vec(rng, t, 3 + it % 4);
    const auto f = tinc_norm(x, t).witness;
    if (f.leaves.size() < 2) continue;
    std::vector<std::size_t> keep;
    for (std::size_t i = 0; i < f.leaves.size(); ++i)
      if (i % 2 == 0) keep.push_back(i);
    const auto g = restrict_leaves(f, keep);
    CHECK(verify_functional(g, wxi_spec()).ok);
    const auto df = f.depths();
    const auto dg = g.depths();
    for (std::size_t i = 0; i < keep.size(); ++i) CHECK(dg[i] == df[keep[i]]);
    ++checked;
  }
  CHECK(checked > 5);
}

TEST_CASE("height of tree analyses") {
  CHECK(functional_height_weight(unit_functional(3)).height == 0);
  const auto one = half_sum({unit_functional(3), unit_functional(4)});
  CHECK(functional_height_weight(one).height == 1);
  const auto two = half_sum({one, unit_functional(9)});
  const auto hw = functional_height_weight(two);
  CHECK(hw.height == 2);
  CHECK(hw.weights.size() == 3);
  for (const auto& w : hw.weights) CHECK_FALSE(w.has_value());
  CHECK(two.depths() == std::vector<std::size_t>{2, 2, 1});
  CHECK(evaluate(two, FinVec{{3, Rational(4)}, {4, Rational(4)}, {9, Rational(2)}}) == Surd(3));
}

TEST_CASE("half sums of witnesses on pairwise incomparable node sets stay in W_xi") {
  const auto& t = tree80();
  std::mt19937 rng(31);
  int built = 0;
  for (int it = 0; it < 4000 && built < 40; ++it) {
    const std::size_t parts = 2 + rng() % 2;
    std::vector<FinVec> xs;
    for (std::size_t i = 0; i < parts; ++i) xs.push_back(random_vec(rng, t, 1 + rng() % 3));
    std::sort(xs.begin(), xs.end(), [](const FinVec& a, const FinVec& b) { return a.support().min() < b.support().min(); });
    bool ok = parts <= xs.front().support().min();
    for (std::size_t i = 0; ok && i + 1 < parts; ++i) ok = xs[i].support().max() < xs[i + 1].support().min();
    for (std::size_t i = 0; ok && i < parts; ++i)
      for (std::size_t j = i + 1; ok && j < parts; ++j)
        for (Node a : xs[i].support())
          for (Node b : xs[j].support()) ok = ok && !t.comparable(a, b);
    if (!ok) continue;
    std::vector<Functional> gs;
    for (const auto& x : xs) gs.push_back(tinc_norm(x, t).witness);
    const auto f = half_sum(gs);
    const auto rep = verify_functional(f, wxi_spec());
    CHECK_MESSAGE(rep.ok, (rep.violations.empty() ? "" : rep.violations.front()));
    ++built;
  }
  CHECK(built >= 20);
}

namespace {

// Disjoint families of support segments and their l1 masses.
void for_each_family(const FinVec& x, const TreeXi& t, const std::function<void(const std::vector<Rational>&)>& visit) {
  std::vector<std::pair<std::vector<Node>, Rational>> segs;
  for (const auto& [a, va] : x.coords())
    for (const auto& [b, vb] : x.coords()) {
      if (!(a == b || t.precedes(a, b))) continue;
      const auto nodes = t.segment(a, b).nodes;
      Rational mass = 0;
      for (Node n : nodes) mass += abs(x[n]);
      segs.emplace_back(nodes, mass);
    }
  std::vector<Rational> chosen;
  std::set<Node> used;
  std::function<void(std::size_t)> grow = [&](std::size_t from) {
    if (!chosen.empty()) visit(chosen);
    for (std::size_t i = from; i < segs.size(); ++i) {
      bool free = true;
      for (Node n : segs[i].first) free = free && !used.count(n);
      if (!free) continue;
      for (Node n : segs[i].first) used.insert(n);
      chosen.push_back(segs[i].second);
      grow(i + 1);
      chosen.pop_back();
      for (Node n : segs[i].first) used.erase(n);
    }
  };
  grow(0);
}

}  // namespace

TEST_CASE("JT remarks: counting large functionals and the dual estimate") {
  const auto& t = tree80();
  std::mt19937 rng(41);
  for (int it = 0; it < 60; ++it) {
    const auto x = random_vec(rng, t, 1 + it % 6);
    const Rational power = *jt_norm(x, t, Rational(1), Rational(2)).pth_power;  // ||x||^2
    for_each_family(x, t, [&](const std::vector<Rational>& masses) {
      // at most ||x||^p / eps^p functionals reach eps, with eps the smallest value
      const Rational eps = *std::min_element(masses.begin(), masses.end());
      CHECK(Rational(static_cast<long>(masses.size())) * eps * eps <= power);
      // |sum b_i f_i(x)|^2 <= (sum b_i^2) ||x||^2 for b_i = f_i(x) and for random b_i
      Rational s = 0, bq = 0, r = 0, rq = 0;
      for (const auto& m : masses) {
        s += m * m;
        bq += m * m;
        const Rational b = Rational(static_cast<int>(rng() % 7) - 3);
        r += b * m;
        rq += b * b;
      }
      CHECK(s * s <= bq * power);
      CHECK(r * r <= rq * power);
    });
  }
}

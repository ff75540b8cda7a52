#include "bspace/norms.hpp"
#include "norm_oracles.hpp"

#include <doctest.h>

#include <random>

using namespace bspace;

namespace {

TreeXi tree1(Node n_max = 80) { return TreeXi::build(TreeSpec{SchreierRank{1}, n_max}); }

// Random vector on a few nodes, biased toward one chain so that
// comparabilities show up.
FinVec random_vec(std::mt19937& rng, const TreeXi& t, std::size_t size, int range = 6) {
  std::uniform_int_distribution<Node> node(1, t.n_max());
  std::uniform_int_distribution<int> val(-range, range);
  FinVec x;
  Node anchor = node(rng);
  auto chain = t.chain(anchor);
  while (x.support().size() < size) {
    Node n = rng() % 2 && !chain.empty() ? chain[rng() % chain.size()] : node(rng);
    int v = val(rng);
    if (v != 0) x.set(n, Rational(v) / (1 + static_cast<int>(rng() % 3)));
  }
  return x;
}

void check_close(double a, double b) { CHECK(a == doctest::Approx(b).epsilon(1e-9)); }

void check_witness(const NormResult& r, const FinVec& x, const NormingSpec& spec) {
  auto rep = verify_functional(r.witness, spec);
  CHECK_MESSAGE(rep.ok, (rep.violations.empty() ? "" : rep.violations.front()));
  if (r.value.exact && spec.ground.tag != GroundTag::Gp) CHECK(evaluate(r.witness, x) == *r.value.exact);
}

}  // namespace

TEST_CASE("ground norms against segment enumeration") {
  auto t = tree1();
  std::mt19937 rng(11);
  for (int it = 0; it < 60; ++it) {
    auto x = random_vec(rng, t, 1 + it % 6);
    auto c = oracle::coords_of(x);
    check_close(ground_norm(x, GroundKind::g0()).value.approx(), oracle::g0()(c));
    check_close(ground_norm(x, GroundKind::g2(), &t).value.approx(), oracle::gp(t, 2)(c));
    check_close(ground_norm(x, GroundKind::g1_signs(), &t).value.approx(), oracle::gp(t, 1)(c));
    check_close(ground_norm(x, GroundKind::gsum(), &t).value.approx(), oracle::gsum(t)(c));
    check_close(ground_norm(x, GroundKind::gp(Rational(3)), &t).value.approx(), oracle::gp(t, 1.5)(c));
  }
}

TEST_CASE("ground norm of an l2 chain is exact") {
  auto t = tree1();
  auto chain = t.chain(t.n_max());
  REQUIRE(chain.size() >= 2);
  FinVec x;
  x.set(chain[0], Rational(1));
  x.set(chain[1], Rational(1));
  auto r = ground_norm(x, GroundKind::g2(), &t);
  CHECK(*r.value.exact == Surd::sqrt(Rational(2)));
}

TEST_CASE("W_G norms against exhaustive splitting") {
  auto t = tree1();
  auto params = EssParams::toy_default();
  std::mt19937 rng(5);
  for (int it = 0; it < 40; ++it) {
    auto x = random_vec(rng, t, 1 + it % 6);
    auto c = oracle::coords_of(x);
    struct Case {
      GroundKind kind;
      oracle::GroundFn fn;
    };
    std::vector<Case> cases = {{GroundKind::g0(), oracle::g0()},
                               {GroundKind::g2(), oracle::gp(t, 2)},
                               {GroundKind::g1_signs(), oracle::gp(t, 1)},
                               {GroundKind::gsum(), oracle::gsum(t)},
                               {GroundKind::gp(Rational(3)), oracle::gp(t, 1.5)},
                               {GroundKind::g1_weighted(params), oracle::g1_weighted(params)}};
    for (const auto& cs : cases) {
      auto r = wg_norm(x, cs.kind, &t);
      check_close(r.value.approx(), oracle::tsirelson(c, cs.fn));
      NormingSpec spec{NormingSetKind::WG, cs.kind, &t, nullptr, Rational(0)};
      check_witness(r, x, spec);
    }
  }
}

TEST_CASE("W_G unit vector basis") {
  FinVec x;
  for (Node n = 5; n <= 9; ++n) x.set(n, Rational(1, 5));
  auto r = wg_norm(x, GroundKind::g0());
  // 5 blocks allowed from node 5: half the sum
  CHECK(*r.value.exact == Surd(Rational(1, 2)));
}

TEST_CASE("tinc norm against exhaustive leaf families") {
  auto t = tree1(60);
  std::mt19937 rng(17);
  for (int it = 0; it < 50; ++it) {
    auto x = random_vec(rng, t, 2 + it % 5);
    auto c = oracle::coords_of(x);
    const double expect = oracle::tinc(c, t);
    for (bool shortcut : {true, false}) {
      auto r = tinc_norm(x, t, TincOptions{shortcut});
      check_close(r.value.approx(), expect);
      check_witness(r, x, NormingSpec{NormingSetKind::Tinc, GroundKind::g2(), &t, nullptr, Rational(0)});
    }
    CHECK(tinc_norm(x, t).value.approx() <= wg_norm(x, GroundKind::g2(), &t).value.approx() + 1e-12);
  }
}

TEST_CASE("tinc of a chain is its l2 norm") {
  auto t = tree1(200);
  auto chain = t.chain(200);
  FinVec x;
  for (Node n : chain) x.set(n, Rational(1));
  auto r = tinc_norm(x, t, TincOptions{false});
  CHECK(*r.value.exact == Surd::sqrt(Rational(static_cast<long>(chain.size()))));
}

namespace {
SigmaRegistry toy_registry() {
  SigmaRegistry sigma(EssParams::toy_default());
  EssPair p1{SignFn::indicator(FinSet{3, 4}), 1};
  std::size_t j2 = sigma.sigma({p1});
  EssPair p2{SignFn{{6, 1}, {7, -1}}, j2};
  sigma.sigma({p1, p2});
  return sigma;
}
}  // namespace

TEST_CASE("essinc norm against exhaustive leaf families") {
  auto sigma = toy_registry();
  REQUIRE(sigma.weight_precedes(1, 2));
  std::mt19937 rng(23);
  std::uniform_int_distribution<Node> node(1, 14);
  std::uniform_int_distribution<int> val(1, 8);
  for (int it = 0; it < 60; ++it) {
    FinVec x;
    while (x.support().size() < static_cast<std::size_t>(2 + it % 5)) x.set(node(rng), Rational(val(rng) * (rng() % 2 ? 1 : -1)));
    auto c = oracle::coords_of(x);
    auto r = essinc_norm(x, sigma);
    check_close(r.value.approx(), oracle::essinc(c, sigma));
    check_witness(r, x, NormingSpec{NormingSetKind::Essinc, GroundKind::g0(), nullptr, &sigma, Rational(0)});
    auto banned = essinc_norm(x, sigma, EssincOptions{{1}});
    check_close(banned.value.approx(), oracle::essinc(c, sigma, {1}));
  }
}

TEST_CASE("essinc with a registry that reaches far") {
  EssParams params{{2, 3, 4, 5}, {1, 2, 3, 4}, true};
  SigmaRegistry sigma(params);
  std::size_t j2 = sigma.sigma({EssPair{SignFn::indicator(FinSet{12, 13}), 1}});
  sigma.sigma({EssPair{SignFn::indicator(FinSet{12, 13}), 1}, EssPair{SignFn{{15, 1}}, j2}});
  std::mt19937 rng(29);
  std::uniform_int_distribution<Node> node(2, 16);
  std::uniform_int_distribution<int> val(1, 4);
  for (int it = 0; it < 80; ++it) {
    FinVec x;
    while (x.support().size() < static_cast<std::size_t>(4 + it % 3)) x.set(node(rng), Rational(val(rng)));
    auto r = essinc_norm(x, sigma);
    check_close(r.value.approx(), oracle::essinc(oracle::coords_of(x), sigma));
    check_witness(r, x, NormingSpec{NormingSetKind::Essinc, GroundKind::g0(), nullptr, &sigma, Rational(0)});
    CHECK(r.value.approx() <= wg_norm(x, GroundKind::g1_weighted(params)).value.approx() + 1e-12 +
                                   ground_norm(x, GroundKind::g0()).value.approx());
  }
}

TEST_CASE("jt norm against exhaustive segment families") {
  auto t = tree1(60);
  std::mt19937 rng(31);
  struct Variant {
    Rational r;
    std::optional<Rational> p;
    JtVariant v;
  };
  std::vector<Variant> variants = {{Rational(1), Rational(2), JtVariant::Signs},
                                   {Rational(1), Rational(3), JtVariant::Signs},
                                   {Rational(2), Rational(4), JtVariant::Signs},
                                   {Rational(1), Rational(5, 2), JtVariant::Signs},
                                   {Rational(3, 2), Rational(2), JtVariant::Signs},
                                   {Rational(1), std::nullopt, JtVariant::Signs},
                                   {Rational(2), std::nullopt, JtVariant::Signs},
                                   {Rational(1), Rational(2), JtVariant::Sum},
                                   {Rational(1), Rational(3, 2), JtVariant::Sum},
                                   {Rational(1), std::nullopt, JtVariant::Sum}};
  for (int it = 0; it < 40; ++it) {
    auto x = random_vec(rng, t, 1 + it % 7);
    auto c = oracle::coords_of(x);
    for (const auto& var : variants) {
      auto res = jt_norm(x, t, var.r, var.p, var.v);
      const double expect =
          oracle::jt(c, t, var.r.get_d(), var.p ? var.p->get_d() : 0, var.v == JtVariant::Sum);
      check_close(res.value.approx(), expect);
      CHECK(res.value.enclosure.lower() <= expect + 1e-12);
      CHECK(res.value.enclosure.upper() >= expect - 1e-12);
      for (std::size_t i = 0; i < res.segments.size(); ++i)
        for (std::size_t k = i + 1; k < res.segments.size(); ++k)
          for (Node n : res.segments[i].nodes) CHECK_FALSE(res.segments[k].contains(n));
      if (var.r == 1 && var.p && *var.p == 2 && !res.witness.leaves.empty()) {
        CHECK(evaluate(res.witness, x) == *res.value.exact);
        auto rep = verify_functional(res.witness, NormingSpec{NormingSetKind::JT, GroundKind::g1_signs(), &t, nullptr, Rational(2)});
        CHECK_MESSAGE(rep.ok, (rep.violations.empty() ? "" : rep.violations.front()));
      }
    }
  }
}

TEST_CASE("jt examples") {
  auto t = tree1(200);
  auto chain = t.chain(200);
  FinVec e;
  e.set(chain.back(), Rational(1));
  CHECK(*jt_norm(e, t, Rational(1), Rational(2)).value.exact == Surd(1));
  // n^{-1/2} on a chain of n nodes gives n^{1/2}
  const long n = static_cast<long>(chain.size());
  // the coordinates n^{-1/2} are irrational; use ones and scale by n^{-1/2}
  FinVec x;
  for (Node m : chain) x.set(m, Rational(1));
  auto r = jt_norm(x, t, Rational(1), Rational(2));
  CHECK(*r.value.exact == Surd(n));
  // two incomparable 2-chains of ones, r = p = 2
  FinVec y;
  std::vector<Node> roots(t.roots().begin(), t.roots().end());
  int found = 0;
  for (Node root : roots) {
    if (t.children(root).empty() || found == 2) continue;
    y.set(root, Rational(1));
    y.set(*t.children(root).begin(), Rational(1));
    ++found;
  }
  REQUIRE(found == 2);
  CHECK(*jt_norm(y, t, Rational(2), Rational(2)).value.exact == Surd(2));
  CHECK(*jt_norm(y, t, Rational(2), Rational(4)).pth_power == 8);
  CHECK_THROWS_AS(jt_norm(y, t, Rational(3), Rational(2)), std::invalid_argument);
}

#include "bspace/ess_tree.hpp"

#include <doctest.h>

#include <random>

using namespace bspace;

namespace {

EssPair pair(std::initializer_list<Node> support, std::size_t j) {
  std::map<Node, int> v;
  for (Node n : support) v[n] = 1;
  return EssPair{SignFn(v), j};
}

EssNode node(std::initializer_list<EssPair> h) { return EssNode{History(h)}; }

}  // namespace

TEST_CASE("ess params: validation and JSON") {
  CHECK_NOTHROW(EssParams::toy_default().validate());
  const auto paper = EssParams::paper(5);
  CHECK_NOTHROW(paper.validate());
  REQUIRE(paper.size() == 5);
  CHECK(paper.m[4] == Integer(65536));
  for (std::size_t j = 2; j < paper.size(); ++j) CHECK(paper.m[j] == paper.m[j - 1] * paper.m[j - 1]);
  CHECK(paper.inv_m(1) == Rational(1) / 4);
  CHECK_THROWS_AS(paper.inv_m(5), PrefixExhausted);

  const auto toy = EssParams::toy_default();
  const auto back = params_from_json(params_to_json(toy));
  CHECK(back.m == toy.m);
  CHECK(back.n == toy.n);
  CHECK(back.toy);

  using nlohmann::json;
  CHECK_THROWS_AS(params_from_json(json{{"m", {2, 4, 8}}, {"n", {1, 6, 6}}}), std::invalid_argument);
  CHECK_NOTHROW(params_from_json(json{{"m", {2, 4, 8}}, {"n", {1, 6, 6}}, {"toy", true}}));
  CHECK_THROWS_AS(params_from_json(json{{"m", {2, 2}}, {"n", {1, 1}}, {"toy", true}}), std::invalid_argument);
  CHECK_THROWS_AS(params_from_json(json{{"m", {2, 4}}, {"n", {2, 1}}, {"toy", true}}), std::invalid_argument);
  CHECK_THROWS_AS(params_from_json(json{{"m", {2, 4}}, {"n", {1}}, {"toy", true}}), std::invalid_argument);
  CHECK_THROWS_AS(params_from_json(json{{"m", {2, 4}}, {"n", {1, 6}}, {"sigma_id", "hash"}}), std::invalid_argument);
}

TEST_CASE("sign functions") {
  SignFn g{{3, 1}, {5, -1}, {7, 0}};
  CHECK(g(5) == -1);
  CHECK(g(7) == 0);
  CHECK(g.support() == FinSet({3, 5}));
  CHECK(g.min_support() == 3);
  CHECK(g.max_support() == 5);
  CHECK_THROWS_AS((SignFn{{0, 1}}), std::invalid_argument);
  CHECK_THROWS_AS((SignFn{{2, 2}}), std::invalid_argument);
}

TEST_CASE("sigma: smallest unused index above the last weight") {
  SigmaRegistry s(EssParams::toy_default());
  const History h1{pair({1}, 1)};
  const History h2{pair({2}, 1)};
  CHECK(s.sigma(h1) == 2);
  CHECK(s.sigma(h2) == 3);
  CHECK(s.sigma(h1) == 2);
  CHECK(s.registered() == 2);
  CHECK(s.lookup(h2) == 3);
  CHECK_FALSE(s.lookup(History{pair({9}, 1)}));

  // the prefix has only m_0 .. m_3; both indices above 2 are taken
  CHECK_THROWS_AS(s.sigma(History{pair({1}, 1), pair({2, 3}, 2)}), PrefixExhausted);
  CHECK_THROWS_AS(s.sigma(History{}), std::invalid_argument);
  CHECK_THROWS_AS(s.sigma(History{pair({1}, 2), pair({2}, 1)}), std::invalid_argument);

  CHECK(s.weight_sequence(1) == std::vector<std::size_t>{1});
  CHECK(s.weight_sequence(2) == std::vector<std::size_t>{1, 2});
  CHECK_FALSE(s.weight_sequence(0));
  CHECK(s.weight_precedes(1, 2));
  CHECK_FALSE(s.weight_precedes(2, 1));
  CHECK_FALSE(s.weight_precedes(2, 3));
  REQUIRE(s.ancestor_sign(1, 3) != nullptr);
  CHECK(*s.ancestor_sign(1, 3) == h2[0].g);
  CHECK(s.ancestor_sign(2, 3) == nullptr);
}

TEST_CASE("sigma: injective, increasing and order-stable on a long prefix") {
  EssParams p = EssParams::toy_default();
  for (int k = 0; k < 20; ++k) {
    p.m.push_back(p.m.back() + 1);
    p.n.push_back(p.n.back());
  }
  std::mt19937_64 gen(4);
  std::vector<History> hs;
  for (int k = 0; k < 12; ++k) {
    History h{pair({static_cast<Node>(1 + gen() % 5)}, 1)};
    if (gen() % 2) h.push_back(pair({static_cast<Node>(6 + gen() % 5)}, 2 + gen() % 3));
    hs.push_back(h);
  }
  SigmaRegistry a(p), b(p);
  std::map<std::size_t, History> seen;
  for (const auto& h : hs) {
    const std::size_t j = a.sigma(h);
    CHECK(j > h.back().j);
    auto [it, fresh] = seen.emplace(j, h);
    CHECK(it->second == h);
    (void)fresh;
  }
  // same registration order, same answers
  for (const auto& h : hs) CHECK(b.sigma(h) == a.sigma(h));
}

TEST_CASE("ess_node_valid examples") {
  auto valid = [](const EssNode& t, unsigned xi = 1) {
    SigmaRegistry s(EssParams::toy_default());
    return ess_node_valid(t, s, SchreierRank{xi});
  };
  CHECK(valid(node({pair({3}, 1)})));
  CHECK(valid(node({pair({3}, 1), pair({4, 5}, 2)})));
  CHECK_FALSE(valid(node({pair({3}, 2)})));                  // must start at m_1
  CHECK_FALSE(valid(node({pair({1, 2}, 1)})));               // {1, 2} is not in S_1
  CHECK_FALSE(valid(node({pair({3, 5}, 1), pair({4}, 2)})));  // not successive
  CHECK_FALSE(valid(node({pair({3}, 1), pair({4}, 3)})));     // sigma gives m_2
  CHECK_FALSE(valid(EssNode{}));
  CHECK_FALSE(valid(node({EssPair{SignFn{}, 1}})));

  // minima {2, 3, 4} lie in S_2 but not in S_1
  const auto deep = node({pair({2}, 1), pair({3}, 2), pair({4, 5, 6}, 3)});
  CHECK_FALSE(valid(deep, 1));
  CHECK(valid(deep, 2));
}

TEST_CASE("essentially incomparable sets") {
  const auto a = node({pair({2}, 1)});
  const auto b = node({pair({3}, 1)});
  CHECK(essentially_incomparable({a}));
  CHECK(essentially_incomparable({a, b}));  // equal weight sequences

  const auto below_late = node({pair({3}, 1), pair({5}, 2)});
  const auto below_early = node({pair({1}, 1), pair({5}, 2)});
  CHECK(weights_precede(a, below_late));
  CHECK_FALSE(weights_precede(below_late, a));
  CHECK_FALSE(essentially_incomparable({a, below_late}));
  CHECK(essentially_incomparable({a, below_early}));
  CHECK(essentially_incomparable({below_early, a}));

  // weight sequences that split after the first entry never interact
  const auto other = node({pair({3}, 1), pair({5}, 3)});
  CHECK(essentially_incomparable({below_late, other}));
}

TEST_CASE("essential incomparability survives thinning the signs") {
  std::mt19937_64 gen(12);
  int positive = 0;
  for (int trial = 0; trial < 300; ++trial) {
    std::vector<EssNode> xs;
    const int count = 2 + static_cast<int>(gen() % 3);
    for (int i = 0; i < count; ++i) {
      EssNode t;
      const std::size_t len = 1 + gen() % 2;
      Node lo = 1 + gen() % 4;
      for (std::size_t k = 0; k < len; ++k) {
        std::map<Node, int> v;
        const Node width = 1 + gen() % 3;
        for (Node n = lo; n < lo + width; ++n) v[n] = gen() % 2 ? 1 : -1;
        t.history.push_back(EssPair{SignFn(v), k + 1});
        lo += width + gen() % 3;
      }
      xs.push_back(t);
    }
    if (!essentially_incomparable(xs)) continue;
    ++positive;
    auto thin = xs;
    for (auto& t : thin)
      for (auto& p : t.history) {
        std::map<Node, int> v = p.g.values();
        if (v.size() > 1) v.erase(gen() % 2 ? v.begin()->first : v.rbegin()->first);
        p.g = SignFn(v);
      }
    CHECK(essentially_incomparable(thin));
  }
  CHECK(positive > 20);
}

TEST_CASE("ess node JSON") {
  const auto params = EssParams::toy_default();
  EssNode t{History{EssPair{SignFn{{2, 1}}, 1}, EssPair{SignFn{{4, -1}, {5, 1}}, 2}}};
  const auto j = ess_node_to_json(t, params);
  CHECK(j["weights"] == nlohmann::json({"4", "16"}));
  CHECK(ess_node_from_json(j, params) == t);
  CHECK_THROWS_AS(ess_node_from_json(nlohmann::json{{"weights", {"5"}}, {"g", nlohmann::json::array()}}, params),
                  std::invalid_argument);
  EssNode far{History{EssPair{SignFn{{2, 1}}, 7}}};
  CHECK_THROWS_AS(ess_node_to_json(far, params), PrefixExhausted);
}

TEST_CASE("weight order mirrors node order on an exhaustive small universe") {
  EssParams p = EssParams::toy_default();
  p.m = {2, 4};
  p.n = {1, 1};
  for (unsigned k = 2; k < 60; ++k) {
    p.m.push_back(p.m.back() + 1);
    p.n.push_back(k);
  }
  SigmaRegistry s(p);
  const Node top = 6;
  std::vector<EssNode> nodes;
  std::function<void(EssNode&)> extend = [&](EssNode& t) {
    const Node from = t.history.empty() ? 1 : t.history.back().g.max_support() + 1;
    for (unsigned mask = 1; mask < (1U << top); ++mask) {
      std::map<Node, int> v;
      for (Node n = 1; n <= top; ++n)
        if (mask >> (n - 1) & 1U) v[n] = 1;
      if (v.begin()->first < from) continue;
      EssPair pr{SignFn(v), 1};
      if (!t.history.empty()) pr.j = s.sigma(t.history);
      t.history.push_back(pr);
      if (ess_node_valid(t, s, SchreierRank{1})) {
        nodes.push_back(t);
        extend(t);
      }
      t.history.pop_back();
    }
  };
  EssNode root;
  extend(root);
  REQUIRE(nodes.size() > 30);

  std::size_t comparable = 0;
  for (const auto& a : nodes)
    for (const auto& b : nodes) {
      const bool node_prefix = a.history.size() < b.history.size() &&
                               std::equal(a.history.begin(), a.history.end(), b.history.begin());
      if (node_prefix) {
        ++comparable;
        CHECK(weights_precede(a, b));
      }
      if (weights_precede(a, b)) {
        // sigma is injective, so the weights pin down every pair but the last
        CHECK(std::equal(a.history.begin(), a.history.end() - 1, b.history.begin()));
      }
    }
  CHECK(comparable > 0);
}

#include "bspace/tree.hpp"
#include "oracles.hpp"

#include <doctest.h>

#include <set>

using namespace bspace;

namespace {
TreeXi make(unsigned xi, Node n_max) { return TreeXi::build(TreeSpec{SchreierRank{xi}, n_max}); }
}  // namespace

TEST_CASE("partition classes") {
  CHECK(partition_class(1) == 0);
  CHECK(partition_class(8) == 0);
  CHECK(partition_class(3) == 1);
  CHECK(partition_class(12) == 1);
  CHECK(partition_class(7) == 3);
  CHECK(next_in_class(1, 10) == 12);
  CHECK(next_in_class(0, 8) == 16);
}

TEST_CASE("xi = 0 tree is trivial") {
  auto t = make(0, 10);
  CHECK(t.edges().empty());
  for (Node a = 1; a <= 10; ++a)
    for (Node b = 1; b <= 10; ++b) CHECK(t.comparable(a, b) == (a == b));
  CHECK(std::vector<Node>(t.roots().begin(), t.roots().end()) == std::vector<Node>{1, 2, 4, 8});
}

TEST_CASE("xi = 1 basic structure") {
  auto t = make(1, 50);
  bool long_chain = false;
  for (Node n = 1; n <= 50; ++n) long_chain |= t.chain(n).size() >= 2;
  CHECK(long_chain);
  CHECK_FALSE(t.comparable(1, 2));
  for (auto [p, c] : t.edges()) {
    CHECK(t.comparable(p, c));
    CHECK(t.precedes(p, c));
    CHECK_FALSE(t.precedes(c, p));
  }
  CHECK_THROWS_AS(t.comparable(0, 1), std::out_of_range);
  CHECK_THROWS_AS(t.comparable(1, 51), std::out_of_range);
  CHECK_THROWS_AS(make(1, 0), std::invalid_argument);
}

TEST_CASE("chains lie in S_xi and respect the coding") {
  for (unsigned xi = 0; xi <= 2; ++xi) {
    auto t = make(xi, 200);
    std::set<std::uint64_t> used;
    for (Node n = 1; n <= 200; ++n) {
      auto c = t.chain(n);
      std::vector<Node> cv(c.begin(), c.end());
      CHECK(oracle::schreier(cv, xi));
      CHECK(cv.back() == n);
      if (!t.is_detached(n)) CHECK(partition_class(cv.front()) == 0);
      for (std::size_t i = 1; i < cv.size(); ++i) {
        CHECK(cv[i - 1] < cv[i]);
        auto phi = t.phi(FinSet(std::vector<Node>(cv.begin(), cv.begin() + static_cast<long>(i))));
        REQUIRE(phi.has_value());
        CHECK(partition_class(cv[i]) == *phi);
      }
      if (auto p = t.phi_class(n)) CHECK(used.insert(*p).second);
      // down-set of n is exactly its chain and is totally ordered
      for (Node m = 1; m <= n; ++m) CHECK(t.precedes(m, n) == (std::find(cv.begin(), cv.end(), m) != cv.end()));
    }
  }
}

TEST_CASE("long chains exist at desk scale") {
  auto t = make(1, 2000);
  std::size_t longest = 0;
  for (Node n = 1; n <= 2000; ++n) longest = std::max(longest, t.chain(n).size());
  CHECK(longest >= 12);
}

TEST_CASE("branching grows with truncation") {
  auto small = make(1, 300);
  auto large = make(1, 1200);
  for (Node n = 1; n <= 300; ++n) CHECK(small.children(n).size() <= large.children(n).size());
  CHECK(small.edges().size() < large.edges().size());
}

TEST_CASE("segment enumeration") {
  auto t = make(1, 200);
  CHECK(enumerate_segments(t, FinSet{}).empty());
  CHECK(enumerate_segments(t, FinSet{1, 2, 4}).size() == 3);
  Node bottom = 0;
  for (Node n = 1; n <= 200 && bottom == 0; ++n)
    if (t.chain(n).size() >= 3) bottom = n;
  REQUIRE(bottom != 0);
  auto c = t.chain(bottom);
  FinSet three{c[0], c[1], c[2]};
  auto segs = enumerate_segments(t, three);
  CHECK(segs.size() == 6);
  for (const auto& s : segs) CHECK(t.is_segment(s));

  Segment a{{c[0]}};
  Segment b{{c[1], c[2]}};
  Segment whole{{c[0], c[1], c[2]}};
  CHECK_FALSE(segments_incomparable(t, a, b));
  CHECK_FALSE(segments_incomparable(t, a, whole));
  CHECK(segments_incomparable(t, Segment{{1}}, Segment{{2}}));
}

TEST_CASE("tree JSON round-trip") {
  auto t = make(2, 300);
  auto j = tree_to_json(t);
  auto back = tree_from_json(nlohmann::json::parse(j.dump()));
  CHECK(tree_to_json(back).dump() == j.dump());
  auto bad = j;
  bad["edges"].push_back({1, 3});
  CHECK_THROWS_AS(tree_from_json(bad), std::invalid_argument);
}

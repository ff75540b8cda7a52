#include "bspace/scc.hpp"
#include "oracles.hpp"

#include <doctest.h>

#include <set>

using namespace bspace;

namespace {

Rational sum(const Weights& w) {
  Rational s = 0;
  for (const auto& kv : w) s += kv.second;
  return s;
}

// The definition read literally, over all index pairs.
bool plegma_direct(const PlegmaFamily& f, bool strict) {
  const std::size_t l = f.size(), k = f[0].size();
  for (std::size_t i1 = 0; i1 < l; ++i1)
    for (std::size_t i2 = 0; i2 < l; ++i2)
      for (std::size_t j1 = 0; j1 < k; ++j1)
        for (std::size_t j2 = j1 + 1; j2 < k; ++j2)
          if (!(f[i1][j1] < f[i2][j2])) return false;
  for (std::size_t i1 = 0; i1 < l; ++i1)
    for (std::size_t i2 = i1 + 1; i2 < l; ++i2)
      for (std::size_t j = 0; j < k; ++j)
        if (strict ? !(f[i1][j] < f[i2][j]) : !(f[i1][j] <= f[i2][j])) return false;
  return true;
}

// All l-tuples of k-subsets of M passing the direct check.
std::set<PlegmaFamily> plegma_oracle(std::size_t l, std::size_t k, const std::vector<Node>& M, bool strict) {
  std::vector<std::vector<Node>> subsets;
  for (std::size_t mask = 0; mask < (std::size_t{1} << M.size()); ++mask) {
    if (static_cast<std::size_t>(__builtin_popcountll(mask)) != k) continue;
    std::vector<Node> s;
    for (std::size_t i = 0; i < M.size(); ++i)
      if (mask >> i & 1U) s.push_back(M[i]);
    subsets.push_back(s);
  }
  std::set<PlegmaFamily> out;
  PlegmaFamily cur(l);
  std::function<void(std::size_t)> rec = [&](std::size_t i) {
    if (i == l) {
      if (plegma_direct(cur, strict)) out.insert(cur);
      return;
    }
    for (const auto& s : subsets) {
      cur[i] = s;
      rec(i + 1);
    }
  };
  rec(0);
  return out;
}

}  // namespace

TEST_CASE("repeated averages") {
  auto e7 = repeated_average(SchreierRank{0}, FinSet{7, 8, 9});
  CHECK(e7.coeffs == Weights{{7, Rational(1)}});

  auto a1 = repeated_average_from(SchreierRank{1}, 3);
  CHECK(a1.coeffs == Weights{{3, Rational(1, 3)}, {4, Rational(1, 3)}, {5, Rational(1, 3)}});

  // order 2 from 3: averages on {3,4,5}, {6..11}, {12..23}
  auto a2 = repeated_average_from(SchreierRank{2}, 3);
  CHECK(a2.support.size() == 21);
  CHECK(a2.coeffs.at(3) == Rational(1, 9));
  CHECK(a2.coeffs.at(6) == Rational(1, 18));
  CHECK(a2.coeffs.at(23) == Rational(1, 36));

  for (unsigned n = 0; n <= 2; ++n)
    for (Node s = 1; s <= 6; ++s) {
      auto x = repeated_average_from(SchreierRank{n}, s);
      CHECK(sum(x.coeffs) == 1);
      for (const auto& kv : x.coeffs) CHECK(kv.second > 0);
      CHECK(schreier_maximal(x.support, SchreierRank{n}));
    }

  // sparse L
  auto sparse = repeated_average(SchreierRank{1}, FinSet{2, 10, 30});
  CHECK(sparse.coeffs == Weights{{2, Rational(1, 2)}, {10, Rational(1, 2)}});

  try {
    repeated_average(SchreierRank{1}, FinSet{4, 5});
    FAIL("expected exhaustion");
  } catch (const LExhausted& e) {
    CHECK(e.deficit() == 2);
    CHECK(std::string(e.what()).find("L exhausted") != std::string::npos);
  }
}

TEST_CASE("verify_scc") {
  for (Node n = 2; n <= 12; ++n) {
    auto x = repeated_average_from(SchreierRank{1}, n);
    CHECK(verify_scc(x.coeffs, SchreierRank{1}, Rational(1, n) + Rational(1, 1000)));
    CHECK_FALSE(verify_scc(x.coeffs, SchreierRank{1}, Rational(1, n)));
  }
  CHECK_FALSE(verify_scc(Weights{{5, Rational(1)}}, SchreierRank{1}, Rational(1, 2)));
  Weights u;
  for (Node i = 5; i <= 9; ++i) u[i] = Rational(1, 5);
  CHECK(verify_scc(u, SchreierRank{1}, Rational(1, 4)));
  CHECK(scc_lower_mass(u, SchreierRank{1}) == Rational(1, 5));

  // order 2 against the brute-force mass oracle
  auto x = repeated_average_from(SchreierRank{2}, 2);
  REQUIRE(x.support.size() <= 12);
  Rational lower = std::max(oracle::max_mass(x.coeffs, 0), oracle::max_mass(x.coeffs, 1));
  CHECK(scc_lower_mass(x.coeffs, SchreierRank{2}) == lower);
  CHECK(verify_scc(x.coeffs, SchreierRank{2}, lower + Rational(1, 1000)));
  CHECK_FALSE(verify_scc(x.coeffs, SchreierRank{2}, lower));
}

TEST_CASE("plegma examples") {
  CHECK(plegma_check({{1, 3}, {2, 4}}, false));
  CHECK(plegma_check({{1, 3}, {2, 4}}, true));
  CHECK(plegma_check({{1, 3}, {1, 4}}, false));
  CHECK_FALSE(plegma_check({{1, 3}, {1, 4}}, true));
  CHECK_FALSE(plegma_check({{1, 5}, {6, 7}}, false));
  CHECK_THROWS_AS(plegma_check({{1, 3}, {2}}, false), std::invalid_argument);
  CHECK(plegma_generate(2, 1, FinSet{1, 2, 3}, true).size() == 3);
  CHECK(plegma_generate(1, 2, FinSet{1, 2, 3, 4}, true).size() == 6);
  CHECK_THROWS_AS(plegma_generate(3, 2, FinSet{1, 2, 3}, true), std::invalid_argument);
}

TEST_CASE("plegma generation equals the filtered brute force") {
  const std::vector<Node> M{1, 2, 4, 5, 7, 9};
  for (std::size_t l = 1; l <= 3; ++l)
    for (std::size_t k = 1; k * l <= M.size() && k <= 3; ++k)
      for (bool strict : {false, true}) {
        auto gen = plegma_generate(l, k, FinSet(M), strict);
        std::set<PlegmaFamily> got(gen.begin(), gen.end());
        CHECK(got.size() == gen.size());
        CHECK(got == plegma_oracle(l, k, M, strict));
        for (const auto& f : gen) CHECK(plegma_check(f, strict));
      }
}

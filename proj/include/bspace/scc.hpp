#pragma once

#include "bspace/schreier.hpp"

#include <json.hpp>

#include <functional>
#include <optional>
#include <stdexcept>
#include <vector>

namespace bspace {

// Convex combination sum lambda_i e_i; `eps` is the tolerance it is meant to meet.
struct SCC {
  FinSet support;
  Weights coeffs;
  SchreierRank order{0};
  std::optional<Rational> eps;
};

nlohmann::json scc_to_json(const SCC& x);
SCC scc_from_json(const nlohmann::json& j);

class LExhausted : public std::runtime_error {
 public:
  LExhausted(const std::string& what, Integer deficit) : std::runtime_error(what), deficit_(std::move(deficit)) {}
  // Further elements needed if L continued by consecutive integers (capped).
  const Integer& deficit() const { return deficit_; }

 private:
  Integer deficit_;
};

// Order 0: e_{min L}. Order n: the average of the first min L successive
// order n-1 averages built along L.
SCC repeated_average(SchreierRank order, const FinSet& L);
// Same with L = {start, start + 1, ...}.
SCC repeated_average_from(SchreierRank order, Node start);

// Largest mass the coefficients put on a set of S_m, m < order; zero for order 0.
Rational scc_lower_mass(const Weights& coeffs, SchreierRank order);

// Support in S_order and max_mass(coeffs, m) < eps for every m < order.
bool verify_scc(const Weights& coeffs, SchreierRank order, const Rational& eps);

using PlegmaFamily = std::vector<std::vector<Node>>;

// Throws std::invalid_argument for empty or ragged input.
bool plegma_check(const PlegmaFamily& fam, bool strict);

// Enumerates Plm_l([M]^k) (or the strict families) column by column in
// lexicographic order; stops early when `visit` returns false.
void plegma_for_each(std::size_t l, std::size_t k, const FinSet& M, bool strict,
                     const std::function<bool(const PlegmaFamily&)>& visit);
std::vector<PlegmaFamily> plegma_generate(std::size_t l, std::size_t k, const FinSet& M, bool strict,
                                          std::size_t limit = 100000);

}  // namespace bspace

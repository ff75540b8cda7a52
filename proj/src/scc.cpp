#include "bspace/scc.hpp"

#include <algorithm>

namespace bspace {

nlohmann::json scc_to_json(const SCC& x) {
  nlohmann::json coeffs = nlohmann::json::array();
  for (Node n : x.support) coeffs.push_back(to_string(x.coeffs.at(n)));
  return {{"support", x.support.elements()},
          {"coeffs", coeffs},
          {"order", x.order.value},
          {"eps", x.eps ? nlohmann::json(to_string(*x.eps)) : nlohmann::json(nullptr)}};
}

SCC scc_from_json(const nlohmann::json& j) {
  SCC x;
  x.support = FinSet::from_unsorted(j.at("support").get<std::vector<Node>>());
  const auto& c = j.at("coeffs");
  if (c.size() != x.support.size()) throw std::invalid_argument("scc: one coefficient per support node expected");
  // coefficients follow the support as listed
  auto listed = j.at("support").get<std::vector<Node>>();
  for (std::size_t i = 0; i < listed.size(); ++i) x.coeffs[listed[i]] = parse_rational(c[i].get<std::string>());
  x.order = SchreierRank{j.at("order").get<unsigned>()};
  if (j.contains("eps") && !j["eps"].is_null()) x.eps = parse_rational(j["eps"].get<std::string>());
  return x;
}

namespace {

// L followed by consecutive integers past its maximum.
struct Source {
  const std::vector<Node>& L;
  Node element(const Integer& pos) const {
    if (pos < L.size()) return L[pos.get_ui()];
    Integer v = Integer(L.back()) + (pos - L.size() + 1);
    return v.fits_ulong_p() ? static_cast<Node>(v.get_ui()) : std::numeric_limits<Node>::max();
  }
};

const Integer kCountCap = Integer(1) << 40;

// Position after an order-n average starting at pos; stops past the cap.
Integer advance(const Source& src, unsigned order, Integer pos) {
  if (order == 0) return pos + 1;
  const Node m = src.element(pos);
  for (Node k = 0; k < m && pos <= kCountCap; ++k) pos = advance(src, order - 1, pos);
  return pos;
}

bool build(const std::vector<Node>& L, unsigned order, std::size_t& pos, const Rational& scale, Weights& out) {
  if (pos >= L.size()) return false;
  if (order == 0) {
    out[L[pos++]] = scale;
    return true;
  }
  const Node m = L[pos];
  Rational share = scale / m;
  share.canonicalize();
  for (Node k = 0; k < m; ++k)
    if (!build(L, order - 1, pos, share, out)) return false;
  return true;
}

}  // namespace

SCC repeated_average(SchreierRank order, const FinSet& L) {
  if (L.empty()) throw LExhausted("L exhausted: empty", 1);
  std::vector<Node> elems(L.begin(), L.end());
  if (elems.front() == 0) throw std::invalid_argument("L must consist of positive integers");
  std::size_t pos = 0;
  SCC x;
  x.order = order;
  if (!build(elems, order.value, pos, Rational(1), x.coeffs)) {
    Integer end = advance(Source{elems}, order.value, Integer(0));
    Integer deficit = end - elems.size();
    std::string amount = end > kCountCap ? "more than " + kCountCap.get_str() : deficit.get_str();
    throw LExhausted("L exhausted: " + amount + " more elements needed for order " + std::to_string(order.value),
                     deficit);
  }
  std::vector<Node> supp;
  for (const auto& kv : x.coeffs) supp.push_back(kv.first);
  x.support = FinSet(std::move(supp));
  return x;
}

SCC repeated_average_from(SchreierRank order, Node start) {
  if (start == 0) throw std::invalid_argument("L must consist of positive integers");
  std::vector<Node> one{start};
  Integer end = advance(Source{one}, order.value, Integer(0));
  if (end > 2000000) throw LExhausted("L too long to materialize: " + end.get_str() + " elements", end);
  std::vector<Node> L;
  for (Node i = 0; i < end; ++i) L.push_back(start + i);
  return repeated_average(order, FinSet(std::move(L)));
}

Rational scc_lower_mass(const Weights& coeffs, SchreierRank order) {
  Rational best = 0;
  for (unsigned m = 0; m < order.value; ++m) best = std::max(best, max_mass(coeffs, SchreierRank{m}));
  return best;
}

bool verify_scc(const Weights& coeffs, SchreierRank order, const Rational& eps) {
  std::vector<Node> supp;
  for (const auto& [n, c] : coeffs) {
    if (c < 0) return false;
    if (c > 0) supp.push_back(n);
  }
  if (!schreier_member(FinSet(supp), order)) return false;
  for (unsigned m = 0; m < order.value; ++m)
    if (!(max_mass(coeffs, SchreierRank{m}) < eps)) return false;
  return true;
}

bool plegma_check(const PlegmaFamily& fam, bool strict) {
  if (fam.empty()) throw std::invalid_argument("plegma family has no rows");
  const std::size_t k = fam.front().size();
  for (const auto& row : fam)
    if (row.size() != k) throw std::invalid_argument("plegma rows have different lengths");
  // (i): every entry of column j lies below every entry of column j + 1
  for (std::size_t j = 0; j + 1 < k; ++j) {
    Node hi = 0, lo = std::numeric_limits<Node>::max();
    for (const auto& row : fam) {
      hi = std::max(hi, row[j]);
      lo = std::min(lo, row[j + 1]);
    }
    if (!(hi < lo)) return false;
  }
  // (ii): columns monotone down the rows
  for (std::size_t i = 0; i + 1 < fam.size(); ++i)
    for (std::size_t j = 0; j < k; ++j) {
      if (strict ? !(fam[i][j] < fam[i + 1][j]) : !(fam[i][j] <= fam[i + 1][j])) return false;
    }
  return true;
}

void plegma_for_each(std::size_t l, std::size_t k, const FinSet& M, bool strict,
                     const std::function<bool(const PlegmaFamily&)>& visit) {
  if (l == 0 || k == 0) throw std::invalid_argument("plegma families need l, k >= 1");
  if (M.size() < l * k) throw std::invalid_argument("insufficient M: need at least l*k elements");
  PlegmaFamily fam(l, std::vector<Node>(k));
  const auto& m = M.elements();
  bool go = true;
  // fill column j, row i, choosing element index >= `from`
  std::function<void(std::size_t, std::size_t, std::size_t)> fill = [&](std::size_t j, std::size_t i, std::size_t from) {
    if (!go) return;
    if (j == k) {
      go = visit(fam);
      return;
    }
    for (std::size_t e = from; e < m.size() && go; ++e) {
      fam[i][j] = m[e];
      if (i + 1 < l)
        fill(j, i + 1, strict ? e + 1 : e);
      else
        fill(j + 1, 0, e + 1);
    }
  };
  fill(0, 0, 0);
}

std::vector<PlegmaFamily> plegma_generate(std::size_t l, std::size_t k, const FinSet& M, bool strict,
                                          std::size_t limit) {
  std::vector<PlegmaFamily> out;
  plegma_for_each(l, k, M, strict, [&](const PlegmaFamily& f) {
    out.push_back(f);
    return out.size() < limit;
  });
  return out;
}

}  // namespace bspace

#include "bspace/finvec.hpp"

namespace bspace {

FinVec::FinVec(std::initializer_list<std::pair<const Node, Rational>> coords)
    : FinVec(std::map<Node, Rational>(coords)) {}

FinVec::FinVec(const std::map<Node, Rational>& coords) {
  for (const auto& [n, v] : coords) set(n, v);
}

Rational FinVec::operator[](Node n) const {
  auto it = coords_.find(n);
  return it == coords_.end() ? Rational(0) : it->second;
}

void FinVec::set(Node n, const Rational& value) {
  if (n == 0) throw std::invalid_argument("FinVec: index 0");
  Rational v(value);
  v.canonicalize();
  if (v == 0)
    coords_.erase(n);
  else
    coords_[n] = v;
}

void FinVec::add(Node n, const Rational& value) { set(n, (*this)[n] + value); }

FinSet FinVec::support() const {
  std::vector<Node> s;
  for (const auto& kv : coords_) s.push_back(kv.first);
  return FinSet(std::move(s));
}

FinVec FinVec::operator+(const FinVec& other) const {
  FinVec out(*this);
  for (const auto& [n, v] : other.coords_) out.add(n, v);
  return out;
}

FinVec FinVec::operator*(const Rational& factor) const {
  FinVec out;
  for (const auto& [n, v] : coords_) out.set(n, v * factor);
  return out;
}

FinVec FinVec::abs() const {
  FinVec out;
  for (const auto& [n, v] : coords_) out.coords_[n] = bspace::abs(v);
  return out;
}

FinVec FinVec::restrict_to(const FinSet& keep) const {
  FinVec out;
  for (const auto& [n, v] : coords_)
    if (keep.contains(n)) out.coords_[n] = v;
  return out;
}

nlohmann::json finvec_to_json(const FinVec& x) {
  nlohmann::json c = nlohmann::json::array();
  for (const auto& [n, v] : x.coords()) c.push_back({n, to_string(v)});
  return {{"coords", c}};
}

FinVec finvec_from_json(const nlohmann::json& j) {
  FinVec x;
  try {
    for (const auto& e : j.at("coords")) {
      const auto& v = e.at(1);
      x.add(e.at(0).get<Node>(), parse_rational(v.is_string() ? v.get<std::string>() : v.dump()));
    }
  } catch (const nlohmann::json::exception& e) {
    throw std::invalid_argument(std::string("vector JSON: ") + e.what());
  }
  return x;
}

}  // namespace bspace

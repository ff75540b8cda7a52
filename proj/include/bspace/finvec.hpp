#pragma once

#include "bspace/rational.hpp"
#include "bspace/schreier.hpp"

#include <json.hpp>

#include <map>

namespace bspace {

// Finitely supported vector with exact coordinates; zeros are not stored.
class FinVec {
 public:
  FinVec() = default;
  FinVec(std::initializer_list<std::pair<const Node, Rational>> coords);
  explicit FinVec(const std::map<Node, Rational>& coords);

  Rational operator[](Node n) const;
  void set(Node n, const Rational& value);
  void add(Node n, const Rational& value);

  const std::map<Node, Rational>& coords() const { return coords_; }
  FinSet support() const;
  bool empty() const { return coords_.empty(); }
  std::size_t size() const { return coords_.size(); }

  FinVec operator+(const FinVec& other) const;
  FinVec operator*(const Rational& factor) const;
  FinVec abs() const;
  // Coordinates outside `keep` set to zero.
  FinVec restrict_to(const FinSet& keep) const;

  friend bool operator==(const FinVec&, const FinVec&) = default;

 private:
  std::map<Node, Rational> coords_;
};

nlohmann::json finvec_to_json(const FinVec& x);
// Accepts {coords: [[node, "p/q"], ...]}; numbers are accepted for values.
FinVec finvec_from_json(const nlohmann::json& j);

}  // namespace bspace

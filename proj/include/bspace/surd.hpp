#pragma once

#include "bspace/interval.hpp"
#include "bspace/rational.hpp"

#include <compare>
#include <map>
#include <string>

namespace bspace {

// Exact element of Q(sqrt 2, sqrt 3, ...): a finite sum of c_k * sqrt(f_k)
// with rational c_k and distinct square-free integers f_k >= 1. Square roots
// of distinct square-free integers are linearly independent over Q, so the
// canonical term map is zero iff the value is zero; ordering is decided by
// interval refinement and always terminates.
class Surd {
 public:
  Surd() = default;
  Surd(const Rational& value);  // NOLINT(google-explicit-constructor)
  Surd(long value) : Surd(Rational(value)) {}  // NOLINT(google-explicit-constructor)

  // sqrt of a nonnegative rational, reduced to canonical form.
  static Surd sqrt(const Rational& value);

  bool is_zero() const { return terms_.empty(); }
  bool is_rational() const;
  // Throws std::logic_error unless is_rational().
  Rational rational() const;
  // Exact square when the value is a single term c*sqrt(f): c^2 f.
  bool is_single_term() const { return terms_.size() <= 1; }

  int sign() const;
  double to_double() const;
  Interval enclose(mpfr_prec_t precision = Interval::kDefaultPrecision) const;

  Surd operator-() const;
  Surd& operator+=(const Surd& other);
  Surd& operator-=(const Surd& other);
  Surd& operator*=(const Rational& factor);
  Surd operator+(const Surd& other) const { Surd out(*this); out += other; return out; }
  Surd operator-(const Surd& other) const { Surd out(*this); out -= other; return out; }
  Surd operator*(const Rational& factor) const { Surd out(*this); out *= factor; return out; }
  Surd operator*(const Surd& other) const;

  friend bool operator==(const Surd& a, const Surd& b) { return a.terms_ == b.terms_; }
  friend std::strong_ordering operator<=>(const Surd& a, const Surd& b);

  const std::map<Integer, Rational>& terms() const { return terms_; }

  // "1/2*sqrt(3) + 1/4" style; "0" for zero.
  std::string to_string() const;

 private:
  void add_term(const Integer& radicand, const Rational& coeff);
  std::map<Integer, Rational> terms_;
};

inline Surd operator*(const Rational& factor, const Surd& value) { return value * factor; }

// Writes n = s^2 * f with f square-free; returns {s, f}.
std::pair<Integer, Integer> squarefree_split(const Integer& n);

}  // namespace bspace

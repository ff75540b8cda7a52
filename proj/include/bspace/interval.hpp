#pragma once

#include "bspace/rational.hpp"

#include <mpfr.h>

#include <string>

namespace bspace {

// Closed interval [lo, hi] with outward-rounded MPFR endpoints. Every
// operation returns an enclosure of the exact result.
class Interval {
 public:
  static constexpr mpfr_prec_t kDefaultPrecision = 160;

  explicit Interval(mpfr_prec_t precision = kDefaultPrecision);
  explicit Interval(const Rational& value, mpfr_prec_t precision = kDefaultPrecision);
  Interval(const Interval& other);
  Interval(Interval&& other) noexcept;
  Interval& operator=(Interval other) noexcept;
  ~Interval();

  static Interval hull(const Rational& lo, const Rational& hi,
                       mpfr_prec_t precision = kDefaultPrecision);

  mpfr_prec_t precision() const { return mpfr_get_prec(lo_); }
  double lower() const { return mpfr_get_d(lo_, MPFR_RNDD); }
  double upper() const { return mpfr_get_d(hi_, MPFR_RNDU); }
  double midpoint() const;
  double width() const;

  bool certainly_less(const Interval& other) const;     // hi < other.lo
  bool certainly_leq(const Interval& other) const;      // hi <= other.lo
  bool overlaps(const Interval& other) const;
  bool contains(const Rational& value) const;
  bool nonnegative() const { return mpfr_sgn(lo_) >= 0; }

  Interval operator+(const Interval& other) const;
  Interval operator-(const Interval& other) const;
  Interval operator*(const Interval& other) const;
  Interval operator/(const Interval& other) const;  // other must exclude 0
  Interval& operator+=(const Interval& other) { return *this = *this + other; }

  Interval sqrt() const;                     // requires lo >= 0
  Interval pow(const Rational& exponent) const;  // requires lo >= 0, exponent > 0
  Interval abs() const;

  static Interval max(const Interval& a, const Interval& b);

  std::string to_string() const;

  friend void swap(Interval& a, Interval& b) noexcept {
    mpfr_swap(a.lo_, b.lo_);
    mpfr_swap(a.hi_, b.hi_);
  }

 private:
  mpfr_t lo_;
  mpfr_t hi_;
};

}  // namespace bspace

#include "bspace/interval.hpp"

#include <algorithm>
#include <cstdio>
#include <stdexcept>

namespace bspace {

namespace {

void set_rational(mpfr_t dst, const Rational& value, mpfr_rnd_t rnd) {
  mpfr_set_q(dst, value.get_mpq_t(), rnd);
}

}  // namespace

Interval::Interval(mpfr_prec_t precision) {
  mpfr_init2(lo_, precision);
  mpfr_init2(hi_, precision);
  mpfr_set_zero(lo_, 1);
  mpfr_set_zero(hi_, 1);
}

Interval::Interval(const Rational& value, mpfr_prec_t precision) {
  mpfr_init2(lo_, precision);
  mpfr_init2(hi_, precision);
  set_rational(lo_, value, MPFR_RNDD);
  set_rational(hi_, value, MPFR_RNDU);
}

Interval::Interval(const Interval& other) {
  mpfr_init2(lo_, other.precision());
  mpfr_init2(hi_, other.precision());
  mpfr_set(lo_, other.lo_, MPFR_RNDD);
  mpfr_set(hi_, other.hi_, MPFR_RNDU);
}

Interval::Interval(Interval&& other) noexcept : Interval(other.precision()) { swap(*this, other); }

Interval& Interval::operator=(Interval other) noexcept {
  swap(*this, other);
  return *this;
}

Interval::~Interval() {
  mpfr_clear(lo_);
  mpfr_clear(hi_);
}

Interval Interval::hull(const Rational& lo, const Rational& hi, mpfr_prec_t precision) {
  Interval out(precision);
  set_rational(out.lo_, std::min(lo, hi), MPFR_RNDD);
  set_rational(out.hi_, std::max(lo, hi), MPFR_RNDU);
  return out;
}

double Interval::midpoint() const { return 0.5 * (lower() + upper()); }
double Interval::width() const {
  mpfr_t w;
  mpfr_init2(w, precision());
  mpfr_sub(w, hi_, lo_, MPFR_RNDU);
  const double out = mpfr_get_d(w, MPFR_RNDU);
  mpfr_clear(w);
  return out;
}

bool Interval::certainly_less(const Interval& other) const { return mpfr_less_p(hi_, other.lo_); }
bool Interval::certainly_leq(const Interval& other) const { return mpfr_lessequal_p(hi_, other.lo_); }
bool Interval::overlaps(const Interval& other) const {
  return !certainly_less(other) && !other.certainly_less(*this);
}

bool Interval::contains(const Rational& value) const {
  return mpfr_cmp_q(lo_, value.get_mpq_t()) <= 0 && mpfr_cmp_q(hi_, value.get_mpq_t()) >= 0;
}

Interval Interval::operator+(const Interval& other) const {
  Interval out(std::max(precision(), other.precision()));
  mpfr_add(out.lo_, lo_, other.lo_, MPFR_RNDD);
  mpfr_add(out.hi_, hi_, other.hi_, MPFR_RNDU);
  return out;
}

Interval Interval::operator-(const Interval& other) const {
  Interval out(std::max(precision(), other.precision()));
  mpfr_sub(out.lo_, lo_, other.hi_, MPFR_RNDD);
  mpfr_sub(out.hi_, hi_, other.lo_, MPFR_RNDU);
  return out;
}

Interval Interval::operator*(const Interval& other) const {
  mpfr_prec_t prec = std::max(precision(), other.precision());
  Interval out(prec);
  mpfr_t cand;
  mpfr_init2(cand, prec);
  bool first = true;
  for (const auto* a : {&lo_, &hi_}) {
    for (const auto* b : {&other.lo_, &other.hi_}) {
      mpfr_mul(cand, *a, *b, MPFR_RNDD);
      if (first || mpfr_less_p(cand, out.lo_)) mpfr_set(out.lo_, cand, MPFR_RNDD);
      mpfr_mul(cand, *a, *b, MPFR_RNDU);
      if (first || mpfr_greater_p(cand, out.hi_)) mpfr_set(out.hi_, cand, MPFR_RNDU);
      first = false;
    }
  }
  mpfr_clear(cand);
  return out;
}

Interval Interval::operator/(const Interval& other) const {
  if (mpfr_sgn(other.lo_) <= 0 && mpfr_sgn(other.hi_) >= 0) {
    throw std::domain_error("interval division by an interval containing zero");
  }
  mpfr_prec_t prec = std::max(precision(), other.precision());
  Interval inv(prec);
  mpfr_ui_div(inv.lo_, 1, other.hi_, MPFR_RNDD);
  mpfr_ui_div(inv.hi_, 1, other.lo_, MPFR_RNDU);
  return *this * inv;
}

Interval Interval::sqrt() const {
  if (mpfr_sgn(lo_) < 0) throw std::domain_error("sqrt of a possibly negative interval");
  Interval out(precision());
  mpfr_sqrt(out.lo_, lo_, MPFR_RNDD);
  mpfr_sqrt(out.hi_, hi_, MPFR_RNDU);
  return out;
}

Interval Interval::pow(const Rational& exponent) const {
  if (mpfr_sgn(lo_) < 0) throw std::domain_error("pow of a possibly negative interval");
  if (exponent <= 0) throw std::domain_error("pow requires a positive exponent");
  // x^y is monotone in x for y > 0 and monotone in y for fixed x; the exponent
  // itself is only known to an enclosure, so take extremes over all corners.
  Interval y(exponent, precision());
  mpfr_t cand;
  mpfr_init2(cand, precision());
  Interval out(precision());
  bool first = true;
  for (const auto* base : {&lo_, &hi_}) {
    for (const auto* e : {&y.lo_, &y.hi_}) {
      mpfr_pow(cand, *base, *e, MPFR_RNDD);
      if (first || mpfr_less_p(cand, out.lo_)) mpfr_set(out.lo_, cand, MPFR_RNDD);
      mpfr_pow(cand, *base, *e, MPFR_RNDU);
      if (first || mpfr_greater_p(cand, out.hi_)) mpfr_set(out.hi_, cand, MPFR_RNDU);
      first = false;
    }
  }
  mpfr_clear(cand);
  return out;
}

Interval Interval::abs() const {
  if (mpfr_sgn(lo_) >= 0) return *this;
  Interval out(precision());
  if (mpfr_sgn(hi_) <= 0) {
    mpfr_neg(out.lo_, hi_, MPFR_RNDD);
    mpfr_neg(out.hi_, lo_, MPFR_RNDU);
    return out;
  }
  mpfr_set_zero(out.lo_, 1);
  mpfr_neg(out.hi_, lo_, MPFR_RNDU);
  if (mpfr_less_p(out.hi_, hi_)) mpfr_set(out.hi_, hi_, MPFR_RNDU);
  return out;
}

Interval Interval::max(const Interval& a, const Interval& b) {
  Interval out(std::max(a.precision(), b.precision()));
  mpfr_max(out.lo_, a.lo_, b.lo_, MPFR_RNDD);
  mpfr_max(out.hi_, a.hi_, b.hi_, MPFR_RNDU);
  return out;
}

std::string Interval::to_string() const {
  char buf[128];
  mpfr_snprintf(buf, sizeof buf, "[%.17Rg, %.17Rg]", lo_, hi_);
  return buf;
}

}  // namespace bspace

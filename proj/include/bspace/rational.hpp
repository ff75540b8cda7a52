#pragma once

#include <gmpxx.h>

#include <string>
#include <string_view>

namespace bspace {

using Rational = mpq_class;
using Integer = mpz_class;

// Parses "p/q", "p" or a plain decimal like "0.25". Throws std::invalid_argument.
Rational parse_rational(std::string_view text);

// Canonical "p/q" (or "p" when the denominator is 1).
std::string to_string(const Rational& value);

inline Rational abs(const Rational& value) { return value < 0 ? Rational(-value) : value; }

// Exact integer power with a nonnegative exponent.
Rational pow(const Rational& base, unsigned long exponent);

double to_double(const Rational& value);

}  // namespace bspace

#include "bspace/rational.hpp"

#include <stdexcept>

namespace bspace {

Rational parse_rational(std::string_view text) {
  std::string s(text);
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.erase(s.begin());
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t')) s.pop_back();
  if (s.empty()) throw std::invalid_argument("empty rational");

  auto dot = s.find('.');
  if (dot != std::string::npos) {
    if (s.find('/') != std::string::npos) throw std::invalid_argument("malformed rational: " + s);
    std::string digits = s.substr(0, dot) + s.substr(dot + 1);
    std::size_t scale = s.size() - dot - 1;
    Integer num;
    if (num.set_str(digits, 10) != 0) throw std::invalid_argument("malformed rational: " + s);
    Integer den;
    mpz_ui_pow_ui(den.get_mpz_t(), 10, scale);
    Rational out(num, den);
    out.canonicalize();
    return out;
  }

  Rational out;
  if (out.set_str(s, 10) != 0) throw std::invalid_argument("malformed rational: " + s);
  if (out.get_den() == 0) throw std::invalid_argument("zero denominator: " + s);
  out.canonicalize();
  return out;
}

std::string to_string(const Rational& value) {
  Rational v(value);
  v.canonicalize();
  return v.get_str();
}

Rational pow(const Rational& base, unsigned long exponent) {
  Integer num, den;
  mpz_pow_ui(num.get_mpz_t(), base.get_num_mpz_t(), exponent);
  mpz_pow_ui(den.get_mpz_t(), base.get_den_mpz_t(), exponent);
  Rational out(num, den);
  out.canonicalize();
  return out;
}

double to_double(const Rational& value) { return value.get_d(); }

}  // namespace bspace

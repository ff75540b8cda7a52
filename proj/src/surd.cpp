#include "bspace/surd.hpp"

#include <cmath>
#include <mutex>
#include <sstream>
#include <stdexcept>
#include <vector>

namespace bspace {

namespace {

constexpr unsigned long kSieveLimit = 2'000'000;

const std::vector<unsigned long>& small_primes() {
  static const std::vector<unsigned long> primes = [] {
    std::vector<bool> composite(kSieveLimit + 1, false);
    std::vector<unsigned long> out;
    for (unsigned long i = 2; i <= kSieveLimit; ++i) {
      if (composite[i]) continue;
      out.push_back(i);
      for (unsigned long j = i * i; j <= kSieveLimit; j += i) composite[j] = true;
    }
    return out;
  }();
  return primes;
}

std::mutex& split_cache_mutex() {
  static std::mutex m;
  return m;
}

std::map<Integer, std::pair<Integer, Integer>>& split_cache() {
  static std::map<Integer, std::pair<Integer, Integer>> cache;
  return cache;
}

}  // namespace

std::pair<Integer, Integer> squarefree_split(const Integer& n) {
  if (n <= 0) throw std::domain_error("squarefree_split needs a positive integer");
  {
    std::lock_guard lock(split_cache_mutex());
    auto it = split_cache().find(n);
    if (it != split_cache().end()) return it->second;
  }

  Integer rest = n;
  Integer square = 1;
  Integer free = 1;
  for (unsigned long p : small_primes()) {
    // Stop once p^3 > rest: what remains is 1, q, q^2 or q*r for primes q, r > p.
    Integer cube = Integer(p) * p * p;
    if (cube > rest) break;
    if (mpz_divisible_ui_p(rest.get_mpz_t(), p) == 0) continue;
    unsigned exponent = 0;
    while (mpz_divisible_ui_p(rest.get_mpz_t(), p) != 0) {
      mpz_divexact_ui(rest.get_mpz_t(), rest.get_mpz_t(), p);
      ++exponent;
    }
    for (unsigned i = 0; i < exponent / 2; ++i) square *= p;
    if (exponent % 2 == 1) free *= p;
  }
  if (rest > 1) {
    if (mpz_perfect_square_p(rest.get_mpz_t()) != 0) {
      Integer root;
      mpz_sqrt(root.get_mpz_t(), rest.get_mpz_t());
      square *= root;
    } else {
      // Beyond the sieve bound a p^2 q cofactor could go undetected; values
      // here stay far below 8e18 in practice.
      free *= rest;
    }
  }
  std::pair<Integer, Integer> out{square, free};
  std::lock_guard lock(split_cache_mutex());
  split_cache().emplace(n, out);
  return out;
}

Surd::Surd(const Rational& value) {
  if (value != 0) terms_.emplace(Integer(1), value);
}

Surd Surd::sqrt(const Rational& value) {
  if (value < 0) throw std::domain_error("sqrt of a negative rational");
  Surd out;
  if (value == 0) return out;
  // sqrt(a/b) = sqrt(a*b)/b
  Integer product = value.get_num() * value.get_den();
  auto [square, free] = squarefree_split(product);
  Rational coeff(square, value.get_den());
  coeff.canonicalize();
  out.terms_.emplace(free, coeff);
  return out;
}

bool Surd::is_rational() const {
  return terms_.empty() || (terms_.size() == 1 && terms_.begin()->first == 1);
}

Rational Surd::rational() const {
  if (!is_rational()) throw std::logic_error("surd is irrational: " + to_string());
  return terms_.empty() ? Rational(0) : terms_.begin()->second;
}

void Surd::add_term(const Integer& radicand, const Rational& coeff) {
  if (coeff == 0) return;
  auto [it, inserted] = terms_.emplace(radicand, coeff);
  if (!inserted) {
    it->second += coeff;
    if (it->second == 0) terms_.erase(it);
  }
}

Surd Surd::operator-() const {
  Surd out(*this);
  for (auto& [f, c] : out.terms_) c = -c;
  return out;
}

Surd& Surd::operator+=(const Surd& other) {
  for (const auto& [f, c] : other.terms_) add_term(f, c);
  return *this;
}

Surd& Surd::operator-=(const Surd& other) {
  for (const auto& [f, c] : other.terms_) add_term(f, -c);
  return *this;
}

Surd& Surd::operator*=(const Rational& factor) {
  if (factor == 0) {
    terms_.clear();
    return *this;
  }
  for (auto& [f, c] : terms_) c *= factor;
  return *this;
}

Surd Surd::operator*(const Surd& other) const {
  Surd out;
  for (const auto& [fa, ca] : terms_) {
    for (const auto& [fb, cb] : other.terms_) {
      // sqrt(a) sqrt(b) = g sqrt(a b / g^2) with g = gcd(a, b); both square-free.
      Integer g;
      mpz_gcd(g.get_mpz_t(), fa.get_mpz_t(), fb.get_mpz_t());
      Integer radicand = (fa / g) * (fb / g);
      out.add_term(radicand, ca * cb * Rational(g));
    }
  }
  return out;
}

double Surd::to_double() const {
  double sum = 0.0;
  for (const auto& [f, c] : terms_) sum += c.get_d() * std::sqrt(f.get_d());
  return sum;
}

Interval Surd::enclose(mpfr_prec_t precision) const {
  Interval sum(precision);
  for (const auto& [f, c] : terms_) {
    Interval term = Interval(Rational(f), precision).sqrt() * Interval(c, precision);
    sum += term;
  }
  return sum;
}

int Surd::sign() const {
  if (terms_.empty()) return 0;
  if (is_rational()) return sgn(terms_.begin()->second);

  double sum = 0.0;
  double magnitude = 0.0;
  for (const auto& [f, c] : terms_) {
    double t = c.get_d() * std::sqrt(f.get_d());
    sum += t;
    magnitude += std::fabs(t);
  }
  if (std::isfinite(sum) && std::isfinite(magnitude) && magnitude > 0.0) {
    double bound = magnitude * 1e-12;
    if (sum > bound) return 1;
    if (sum < -bound) return -1;
  }

  Interval zero(Rational(0));
  for (mpfr_prec_t prec = 128; prec <= (1 << 16); prec *= 2) {
    Interval v = enclose(prec);
    if (zero.certainly_less(v)) return 1;
    if (v.certainly_less(zero)) return -1;
  }
  throw std::runtime_error("surd sign undecided at 65536 bits: " + to_string());
}

std::strong_ordering operator<=>(const Surd& a, const Surd& b) {
  if (a.terms_ == b.terms_) return std::strong_ordering::equal;
  int s = (a - b).sign();
  if (s < 0) return std::strong_ordering::less;
  if (s > 0) return std::strong_ordering::greater;
  return std::strong_ordering::equal;
}

std::string Surd::to_string() const {
  if (terms_.empty()) return "0";
  std::ostringstream os;
  bool first = true;
  for (auto it = terms_.rbegin(); it != terms_.rend(); ++it) {
    const auto& [f, c] = *it;
    Rational mag = bspace::abs(c);
    if (first) {
      if (c < 0) os << '-';
    } else {
      os << (c < 0 ? " - " : " + ");
    }
    first = false;
    if (f == 1) {
      os << mag.get_str();
    } else if (mag == 1) {
      os << "sqrt(" << f.get_str() << ')';
    } else {
      os << mag.get_str() << "*sqrt(" << f.get_str() << ')';
    }
  }
  return os.str();
}

}  // namespace bspace

#pragma once

#include <boost/multiprecision/cpp_int.hpp>

#include <cstdint>
#include <optional>
#include <set>
#include <stdexcept>
#include <string>
#include <string_view>

namespace midconvex {

namespace bmp = boost::multiprecision;

// Expression templates are disabled so `auto` and ADL behave like plain values.
using BigInt = bmp::number<bmp::cpp_int_backend<>, bmp::et_off>;
using Rational = bmp::number<bmp::rational_adaptor<bmp::cpp_int_backend<>>, bmp::et_off>;

inline BigInt num(const Rational& r) { return bmp::numerator(r); }
inline BigInt den(const Rational& r) { return bmp::denominator(r); }

inline bool is_integer(const Rational& r) { return den(r) == 1; }

inline BigInt floor_div(const BigInt& a, const BigInt& b) {
  BigInt q = a / b;
  if ((a % b != 0) && ((a < 0) != (b < 0))) --q;
  return q;
}

inline BigInt floor(const Rational& r) { return floor_div(num(r), den(r)); }
inline BigInt ceil(const Rational& r) { return -floor_div(-num(r), den(r)); }

inline Rational abs(const Rational& r) { return r < 0 ? Rational(-r) : r; }

inline BigInt big_gcd(BigInt a, BigInt b) {
  if (a < 0) a = -a;
  if (b < 0) b = -b;
  while (b != 0) {
    BigInt t = a % b;
    a = b;
    b = t;
  }
  return a;
}

inline BigInt big_lcm(const BigInt& a, const BigInt& b) {
  if (a == 0 || b == 0) return 0;
  BigInt l = a / big_gcd(a, b) * b;
  return l < 0 ? BigInt(-l) : l;
}

/// Positive generator of the cyclic group a*Z + b*Z; zero when both are zero.
inline Rational rational_gcd(const Rational& a, const Rational& b) {
  if (a == 0) return abs(b);
  if (b == 0) return abs(a);
  return Rational(big_gcd(num(a), num(b)), big_lcm(den(a), den(b)));
}

/// Exponent of p in r; r must be nonzero.
inline std::int64_t valuation(const Rational& r, std::uint64_t p) {
  if (r == 0) throw std::invalid_argument("valuation of zero");
  std::int64_t v = 0;
  BigInt n = num(r);
  BigInt d = den(r);
  while (n % p == 0) {
    n /= p;
    ++v;
  }
  while (d % p == 0) {
    d /= p;
    --v;
  }
  return v;
}

/// Strips every factor of a prime in `primes` from numerator and denominator.
inline Rational strip_primes(const Rational& r, const std::set<std::uint64_t>& primes) {
  BigInt n = num(r);
  BigInt d = den(r);
  for (auto p : primes) {
    while (n != 0 && n % p == 0) n /= p;
    while (d % p == 0) d /= p;
  }
  return Rational(n, d);
}

/// True when every prime factor of |n| lies in `primes`.
inline bool is_smooth_over(BigInt n, const std::set<std::uint64_t>& primes) {
  if (n < 0) n = -n;
  if (n == 0) return false;
  for (auto p : primes) {
    while (n % p == 0) n /= p;
  }
  return n == 1;
}

inline bool is_prime(std::uint64_t n) {
  if (n < 2) return false;
  for (std::uint64_t d = 2; d * d <= n; ++d) {
    if (n % d == 0) return false;
  }
  return true;
}

inline std::string to_string(const Rational& r) { return r.str(); }

/// Parses "a", "-a", "a/b". Throws std::invalid_argument on malformed text or b = 0.
inline Rational parse_rational(std::string_view text) {
  auto digits = [](std::string_view s) {
    if (s.empty()) return false;
    std::size_t i = (s[0] == '-' || s[0] == '+') ? 1 : 0;
    if (i == s.size()) return false;
    for (; i < s.size(); ++i) {
      if (s[i] < '0' || s[i] > '9') return false;
    }
    return true;
  };
  auto slash = text.find('/');
  std::string_view n = text.substr(0, slash);
  std::string_view d = slash == std::string_view::npos ? std::string_view("1") : text.substr(slash + 1);
  if (!digits(n) || !digits(d) || d[0] == '-' || d[0] == '+') {
    throw std::invalid_argument("malformed rational '" + std::string(text) + "'");
  }
  std::string ns(n.front() == '+' ? n.substr(1) : n);
  BigInt denominator(std::string(d).c_str());
  if (denominator == 0) throw std::invalid_argument("zero denominator in '" + std::string(text) + "'");
  return Rational(BigInt(ns.c_str()), denominator);
}

/// Narrowing conversion that refuses values outside int64.
inline std::int64_t to_int64(const BigInt& v) {
  if (v > BigInt(INT64_MAX) || v < BigInt(INT64_MIN)) {
    throw std::overflow_error("integer " + v.str() + " does not fit in 64 bits");
  }
  return static_cast<std::int64_t>(v);
}

}  // namespace midconvex

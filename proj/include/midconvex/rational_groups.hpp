#pragma once

#include "midconvex/errors.hpp"
#include "midconvex/rational.hpp"

#include <algorithm>
#include <cstdint>
#include <optional>
#include <set>
#include <string>
#include <vector>

namespace midconvex {

using PrimeSet = std::set<std::uint64_t>;

/// The subgroup q * Z[P^-1] of Q: rationals q*a/b with b a product of primes from P.
///
/// The generator is stored with every factor of a prime in P removed, so two
/// descriptors denote the same group exactly when they compare equal.
class RationalGroupDescriptor {
 public:
  RationalGroupDescriptor() = default;

  RationalGroupDescriptor(Rational gen, PrimeSet primes) : primes_(std::move(primes)) {
    if (gen <= 0) throw std::invalid_argument("group generator must be positive, got " + to_string(gen));
    for (auto p : primes_) {
      if (!is_prime(p)) throw std::invalid_argument(std::to_string(p) + " is not prime");
    }
    gen_ = strip_primes(gen, primes_);
  }

  const Rational& gen() const noexcept { return gen_; }
  const PrimeSet& primes() const noexcept { return primes_; }

  friend bool operator==(const RationalGroupDescriptor&, const RationalGroupDescriptor&) = default;

 private:
  Rational gen_ = 1;
  PrimeSet primes_;
};

inline std::string to_string(const PrimeSet& primes) {
  std::string s = "[";
  bool first = true;
  for (auto p : primes) {
    if (!first) s += ',';
    first = false;
    s += std::to_string(p);
  }
  return s + "]";
}

/// "(gen,[p,...])"
inline std::string to_string(const RationalGroupDescriptor& g) {
  return "(" + to_string(g.gen()) + "," + to_string(g.primes()) + ")";
}

inline bool member(const Rational& r, const RationalGroupDescriptor& g) {
  if (r == 0) return true;
  return is_smooth_over(den(Rational(r / g.gen())), g.primes());
}

inline bool is_subgroup_of(const RationalGroupDescriptor& h, const RationalGroupDescriptor& g) {
  return member(h.gen(), g) && std::includes(g.primes().begin(), g.primes().end(), h.primes().begin(),
                                             h.primes().end());
}

/// G/H has no element of even order, equivalently none of order 2.
///
/// If G is 2-divisible (2 ∈ P_G) this needs H 2-divisible too; otherwise the
/// 2-adic valuation of gen(H)/gen(G) must vanish.
inline bool is_two_pure(const RationalGroupDescriptor& h, const RationalGroupDescriptor& g) {
  if (!is_subgroup_of(h, g)) throw PreconditionError("is_two_pure: H is not a subgroup of G");
  if (g.primes().count(2)) return h.primes().count(2) != 0;
  return valuation(Rational(h.gen() / g.gen()), 2) == 0;
}

/// Smallest 2-pure subgroup of G in descriptor form that contains H.
inline RationalGroupDescriptor two_pure_closure(const RationalGroupDescriptor& h,
                                                const RationalGroupDescriptor& g) {
  if (!is_subgroup_of(h, g)) throw PreconditionError("two_pure_closure: H is not a subgroup of G");
  if (g.primes().count(2)) {
    auto primes = h.primes();
    primes.insert(2);
    return RationalGroupDescriptor(h.gen(), std::move(primes));
  }
  const auto v = valuation(Rational(h.gen() / g.gen()), 2);
  return RationalGroupDescriptor(h.gen() / Rational(BigInt(1) << static_cast<unsigned>(v)), h.primes());
}

/// Cyclic subgroup generated by a finite point set, or nullopt when it is {0}.
inline std::optional<RationalGroupDescriptor> generated_subgroup(const std::vector<Rational>& points) {
  Rational g = 0;
  for (const auto& p : points) g = rational_gcd(g, p);
  if (g == 0) return std::nullopt;
  return RationalGroupDescriptor(g, {});
}

/// Generators g_0, g_1, ..., g_depth of an increasing chain of cyclic subgroups of G.
///
/// g_0 generates the subgroup spanned by the sample together with gen(G), so the
/// union of the chain is all of G once every prime has been used. Each later step
/// divides by the next prime of G, round-robin in increasing order; with no primes
/// the chain is constant.
inline std::vector<Rational> cyclic_chain(const RationalGroupDescriptor& g, const std::vector<Rational>& sample,
                                          std::int64_t depth) {
  if (sample.empty()) throw PreconditionError("cyclic_chain: sample must be nonempty");
  if (depth < 0) throw PreconditionError("cyclic_chain: depth must be nonnegative");
  Rational g0 = g.gen();
  for (const auto& s : sample) {
    if (!member(s, g)) throw PreconditionError("cyclic_chain: sample point " + to_string(s) + " is not in G");
    g0 = rational_gcd(g0, s);
  }
  std::vector<Rational> chain{g0};
  const std::vector<std::uint64_t> primes(g.primes().begin(), g.primes().end());
  for (std::int64_t n = 0; n < depth; ++n) {
    if (primes.empty()) {
      chain.push_back(chain.back());
    } else {
      chain.push_back(chain.back() / primes[static_cast<std::size_t>(n) % primes.size()]);
    }
  }
  return chain;
}

/// Order-convex subset of Q. Absent endpoints are unbounded; for those the
/// inclusive flag is kept true so structurally equal intervals compare equal.
struct QIntervalSpec {
  std::optional<Rational> lower;
  std::optional<Rational> upper;
  bool lower_inclusive = true;
  bool upper_inclusive = true;

  static QIntervalSpec closed(Rational lo, Rational hi) { return QIntervalSpec{std::move(lo), std::move(hi)}; }

  void validate() const {
    if (lower && upper) {
      if (*lower > *upper || (*lower == *upper && !(lower_inclusive && upper_inclusive))) {
        throw std::invalid_argument("interval endpoints are out of order");
      }
    }
  }

  bool contains(const Rational& r) const {
    if (lower && (lower_inclusive ? r < *lower : r <= *lower)) return false;
    if (upper && (upper_inclusive ? r > *upper : r >= *upper)) return false;
    return true;
  }

  bool is_subset_of(const QIntervalSpec& other) const {
    if (other.lower) {
      if (!lower || *lower < *other.lower) return false;
      if (*lower == *other.lower && lower_inclusive && !other.lower_inclusive) return false;
    }
    if (other.upper) {
      if (!upper || *upper > *other.upper) return false;
      if (*upper == *other.upper && upper_inclusive && !other.upper_inclusive) return false;
    }
    return true;
  }

  friend bool operator==(const QIntervalSpec&, const QIntervalSpec&) = default;
};

/// "conv[a,b]" with "(" / ")" for open ends and -inf / inf for missing ones.
inline std::string to_string(const QIntervalSpec& c) {
  std::string s = "conv";
  s += (c.lower && !c.lower_inclusive) ? '(' : '[';
  s += c.lower ? to_string(*c.lower) : "-inf";
  s += ',';
  s += c.upper ? to_string(*c.upper) : "inf";
  s += (c.upper && !c.upper_inclusive) ? ')' : ']';
  return s;
}

/// X = C ∩ (H + x).
struct RationalMidconvexDescription {
  QIntervalSpec interval;
  RationalGroupDescriptor subgroup;
  Rational base;

  bool contains(const Rational& r) const { return interval.contains(r) && member(r - base, subgroup); }

  friend bool operator==(const RationalMidconvexDescription&, const RationalMidconvexDescription&) = default;
};

/// Checks base ∈ C, base ∈ G and H ⊆ G before building the description.
inline RationalMidconvexDescription make_description(QIntervalSpec interval, RationalGroupDescriptor subgroup,
                                                     Rational base, const RationalGroupDescriptor& ambient) {
  interval.validate();
  if (!interval.contains(base)) throw std::invalid_argument("base point " + to_string(base) + " is not in the interval");
  if (!member(base, ambient)) throw std::invalid_argument("base point " + to_string(base) + " is not in the group");
  if (!is_subgroup_of(subgroup, ambient)) {
    throw std::invalid_argument("subgroup " + to_string(subgroup) + " is not contained in the ambient group");
  }
  return RationalMidconvexDescription{std::move(interval), std::move(subgroup), std::move(base)};
}

inline bool rational_membership_of_description(const RationalMidconvexDescription& d, const Rational& r) {
  return d.contains(r);
}

inline std::string to_string(const RationalMidconvexDescription& d) {
  return to_string(d.interval) + " ∩ (" + to_string(d.subgroup) + " + " + to_string(d.base) + ")";
}

}  // namespace midconvex

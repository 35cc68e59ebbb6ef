#pragma once

#include "midconvex/errors.hpp"
#include "midconvex/group_core.hpp"
#include "midconvex/integer_sets.hpp"
#include "midconvex/random.hpp"
#include "midconvex/rational.hpp"
#include "midconvex/rational_groups.hpp"

#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

namespace midconvex {

using GroupWitness = MidpointWitness<GroupElement>;
using RationalWitness = MidpointWitness<Rational>;

// ---------------------------------------------------------------------------
// Finite groups
// ---------------------------------------------------------------------------

/// Every z with 2z = x + y lies in X, for all x, y in X including x = y.
///
/// The diagonal pairs matter: with 2-torsion, halving 2x can produce points other
/// than x (in Z(4), halving 0 gives {0, 2}). The witness is the first violating
/// triple in enumeration order.
inline MidconvexCheck<GroupElement> is_midconvex(const GroupSubset& x) {
  const auto& g = x.group();
  const auto members = x.elements();
  for (std::size_t i = 0; i < members.size(); ++i) {
    for (std::size_t j = i; j < members.size(); ++j) {
      for (auto& z : g.halving_set(g.add(members[i], members[j]))) {
        if (!x.contains(z)) return {false, GroupWitness{members[i], members[j], std::move(z)}};
      }
    }
  }
  return {};
}

/// Least midconvex superset, by a worklist fixpoint over halving sets.
inline GroupSubset midconvex_closure(const GroupSubset& x) {
  const auto& g = x.group();
  GroupSubset out = x;
  std::vector<GroupElement> present = x.elements();
  std::vector<GroupElement> pending = present;
  while (!pending.empty()) {
    const GroupElement a = std::move(pending.back());
    pending.pop_back();
    // Pairs (a, b) are handled when the later of the two leaves the worklist.
    for (std::size_t i = 0; i < present.size(); ++i) {
      for (auto& z : g.halving_set(g.add(a, present[i]))) {
        if (!out.contains(z)) {
          out.insert(z);
          present.push_back(z);
          pending.push_back(std::move(z));
        }
      }
    }
  }
  return out;
}

/// {n : x + n*g ∈ X} as residues modulo ord(g).
struct PeriodicTrace {
  IntWindowSet residues;
  std::int64_t period = 1;

  TraceOptions options() const { return TraceOptions{period, std::nullopt}; }
};

inline PeriodicTrace trace_in_group(const GroupSubset& x, const GroupElement& base, const GroupElement& step) {
  if (!x.contains(base)) throw PreconditionError("trace_in_group: base point must belong to X");
  const auto& g = x.group();
  const auto d = g.element_order(step);
  PeriodicTrace t{IntWindowSet(0, d - 1), d};
  GroupElement p = base;
  for (std::int64_t n = 0; n < d; ++n) {
    if (x.contains(p)) t.residues.insert(n);
    p = g.add(p, step);
  }
  return t;
}

struct Theorem1Failure {
  GroupElement base;
  GroupElement step;
  std::string reason;
};

struct Theorem1Check {
  bool holds = true;
  std::optional<Theorem1Failure> failure;
  explicit operator bool() const noexcept { return holds; }
};

/// Every trace of X decomposes as C ∩ H with Z/H free of even-order elements.
inline Theorem1Check verify_theorem1(const GroupSubset& x) {
  const auto& g = x.group();
  for (const auto& base : x.elements()) {
    for (std::int64_t s = 0; s < g.order(); ++s) {
      auto step = g.element_at(s);
      const auto t = trace_in_group(x, base, step);
      auto r = try_decompose_trace(t.residues, t.options());
      if (!r) return {false, Theorem1Failure{base, std::move(step), std::move(r.reason)}};
    }
  }
  return {};
}

/// X = subgroup + base with subgroup = X - base of odd index.
struct PeriodicDecomposition {
  GroupSubset subgroup;
  GroupElement base;
  bool odd_index = true;
  std::int64_t index = 1;
};

struct PeriodicOutcome {
  std::optional<PeriodicDecomposition> value;
  std::string reason;
  explicit operator bool() const noexcept { return value.has_value(); }
};

inline PeriodicOutcome try_decompose_periodic(const GroupSubset& x, const GroupElement& base) {
  if (!x.contains(base)) throw PreconditionError("decompose_periodic: base point must belong to X");
  auto s = x.shifted_by_negative(base);
  if (!is_subgroup(s)) return {std::nullopt, "X - x is not a subgroup"};
  const auto index = x.group().order() / s.size();
  if (index % 2 == 0) return {std::nullopt, "X - x has even index " + std::to_string(index)};
  return {PeriodicDecomposition{std::move(s), base, true, index}, {}};
}

/// Throws NotMidconvexError naming the failed condition.
inline PeriodicDecomposition decompose_periodic(const GroupSubset& x, const GroupElement& base) {
  auto r = try_decompose_periodic(x, base);
  if (!r) throw NotMidconvexError(r.reason);
  return std::move(*r.value);
}

/// For every x in X: X - x is a subgroup of odd index.
inline bool theorem2_characterization(const GroupSubset& x) {
  for (const auto& base : x.elements()) {
    if (!try_decompose_periodic(x, base)) return false;
  }
  return true;
}

/// a ∈ X - x implies 2a ∈ X - x.
inline bool doubling_claim_check(const GroupSubset& x, const GroupElement& base) {
  if (!x.contains(base)) throw PreconditionError("doubling_claim_check: base point must belong to X");
  const auto& g = x.group();
  const auto s = x.shifted_by_negative(base);
  for (const auto& a : s.elements()) {
    if (!s.contains(g.add(a, a))) return false;
  }
  return true;
}

// ---------------------------------------------------------------------------
// Subgroups of Q
// ---------------------------------------------------------------------------

/// Midconvexity of a finite point set inside the rational group `ambient`.
inline MidconvexCheck<Rational> check_rational_points(const RationalGroupDescriptor& ambient,
                                                      const std::set<Rational>& points) {
  for (auto i = points.begin(); i != points.end(); ++i) {
    for (auto j = i; j != points.end(); ++j) {
      const Rational c = (*i + *j) / 2;
      if (member(c, ambient) && !points.count(c)) return {false, RationalWitness{*i, *j, c}};
    }
  }
  return {};
}

/// Midconvexity of C ∩ (H + x) in G.
///
/// With H 2-pure in G the set is midconvex. Otherwise it is midconvex only when it
/// is the single point x; any second point yields a midpoint in G outside H + x.
inline MidconvexCheck<Rational> check_rational_description(const RationalMidconvexDescription& d,
                                                           const RationalGroupDescriptor& ambient) {
  if (is_two_pure(d.subgroup, ambient)) return {};
  const auto& h = d.subgroup.gen();
  const auto& x = d.base;
  auto witness_at = [&](const Rational& step) -> std::optional<RationalWitness> {
    for (const Rational& y : {Rational(x + step), Rational(x - step)}) {
      if (d.interval.contains(y)) return RationalWitness{x, y, Rational((x + y) / 2)};
    }
    return std::nullopt;
  };
  if (auto w = witness_at(h)) return {false, w};
  if (!d.subgroup.primes().empty()) {
    // H is dense; walk down h / p^k until a neighbour of x lands inside C.
    const auto p = *d.subgroup.primes().begin();
    Rational step = h;
    for (int k = 0; k < 4096; ++k) {
      step /= p;
      if (auto w = witness_at(step)) return {false, w};
      if (d.interval.lower && d.interval.upper && *d.interval.lower == *d.interval.upper) break;
    }
  }
  return {};
}

struct SamplingBounds {
  /// Sampled offsets from the base stay within numerator_bound generator steps.
  std::int64_t numerator_bound = 50;
  /// Largest exponent of each prime in a sampled denominator.
  int exponent_bound = 4;
};

/// Random point of C ∩ (H + x): x + h*k/d with d a product of H's primes.
inline Rational sample_description_point(const RationalMidconvexDescription& desc, Rng& rng,
                                         const SamplingBounds& bounds = {}) {
  BigInt d = 1;
  for (auto p : desc.subgroup.primes()) {
    const auto e = rng.below(static_cast<std::uint64_t>(bounds.exponent_bound) + 1);
    for (std::uint64_t i = 0; i < e; ++i) d *= p;
  }
  const Rational unit = desc.subgroup.gen() / Rational(d);
  BigInt klo = -BigInt(bounds.numerator_bound) * d;
  BigInt khi = BigInt(bounds.numerator_bound) * d;
  if (desc.interval.lower) {
    const Rational t = (*desc.interval.lower - desc.base) / unit;
    BigInt c = ceil(t);
    if (!desc.interval.lower_inclusive && Rational(c) == t) ++c;
    klo = std::max(klo, c);
  }
  if (desc.interval.upper) {
    const Rational t = (*desc.interval.upper - desc.base) / unit;
    BigInt f = floor(t);
    if (!desc.interval.upper_inclusive && Rational(f) == t) --f;
    khi = std::min(khi, f);
  }
  const auto k = rng.between(to_int64(klo), to_int64(khi));
  return desc.base + unit * k;
}

struct Theorem3Check {
  bool holds = true;
  std::optional<RationalWitness> violation;
  std::int64_t pairs = 0;
  /// Pairs whose midpoint lies in the ambient group, i.e. pairs that actually tested something.
  std::int64_t admissible = 0;
  explicit operator bool() const noexcept { return holds; }
};

/// Samples pairs a, b ∈ C ∩ (H + x) and checks that every midpoint lying in G
/// stays in the set. Requires H to be 2-pure in G.
inline Theorem3Check verify_theorem3_if(const RationalMidconvexDescription& desc,
                                        const RationalGroupDescriptor& ambient, std::int64_t samples,
                                        std::uint64_t seed, const SamplingBounds& bounds = {}) {
  if (!is_two_pure(desc.subgroup, ambient)) {
    throw PreconditionError("verify_theorem3_if: subgroup " + to_string(desc.subgroup) + " is not 2-pure in " +
                            to_string(ambient));
  }
  Rng rng(seed);
  Theorem3Check out;
  for (std::int64_t i = 0; i < samples; ++i) {
    const auto a = sample_description_point(desc, rng, bounds);
    const auto b = sample_description_point(desc, rng, bounds);
    const Rational c = (a + b) / 2;
    ++out.pairs;
    if (!member(c, ambient)) continue;
    ++out.admissible;
    if (!desc.contains(c)) {
      out.holds = false;
      out.violation = RationalWitness{a, b, c};
      return out;
    }
  }
  return out;
}

/// One step of the cyclic chain: the view X ∩ g*Z and its decomposition.
struct ChainLevel {
  Rational step;                 // g_n
  std::optional<std::uint64_t> refined_by;  // prime p with g_n = g_{n-1} / p
  Rational lower;                // C_n = [lower, upper]
  Rational upper;
  std::int64_t multiplier = 1;   // m_n, odd; H_n = m_n g_n Z
  Rational subgroup_gen() const { return step * multiplier; }
};

struct RationalDecomposition {
  RationalMidconvexDescription description;
  std::vector<ChainLevel> levels;
  std::int64_t depth = 0;
};

struct RationalDecomposeOptions {
  std::int64_t depth = 4;
  /// Closed window [lower, upper] inside which X is observed; both ends required.
  QIntervalSpec window;
  /// Largest number of lattice points examined at one level.
  std::int64_t max_points = std::int64_t{1} << 22;
};

/// Recovers (C, H, x) for a midconvex X ⊆ G from membership queries.
///
/// Walks the cyclic chain g_0 Z ⊆ g_1 Z ⊆ ... seeded with {x, x2}. At every level
/// the window-exact view of X ∩ g_n Z is decomposed over the integers, giving
/// C_n and H_n = m_n g_n Z with m_n odd; successive levels must satisfy
/// C_n ⊆ C_{n+1} and H_n ⊆ H_{n+1}. The result uses the deepest level's C and
/// H generator. A prime of G is kept in H's prime set when refining by it
/// enlarged H at some level and every later refinement by it enlarged H again.
template <typename Membership>
RationalDecomposition decompose_rational(const RationalGroupDescriptor& ambient, const Membership& in_x,
                                         const Rational& x, const Rational& x2,
                                         const RationalDecomposeOptions& options) {
  if (!(x < x2)) throw PreconditionError("decompose_rational: need x < x2");
  if (!member(x, ambient) || !member(x2, ambient)) throw PreconditionError("decompose_rational: x, x2 must lie in G");
  if (!in_x(x) || !in_x(x2)) throw PreconditionError("decompose_rational: x, x2 must belong to X");
  const auto& w = options.window;
  if (!w.lower || !w.upper || !w.lower_inclusive || !w.upper_inclusive) {
    throw PreconditionError("decompose_rational: window must be a closed bounded interval");
  }
  if (!w.contains(x) || !w.contains(x2)) throw PreconditionError("decompose_rational: window must contain x and x2");

  const auto chain = cyclic_chain(ambient, {x, x2}, options.depth);
  RationalDecomposition out;
  out.depth = options.depth;
  struct RefinementState {
    bool enlarged = false;
    bool failed_after = false;
  };
  std::map<std::uint64_t, RefinementState> refinements;

  for (std::size_t n = 0; n < chain.size(); ++n) {
    const Rational& g = chain[n];
    const auto klo = to_int64(ceil(Rational(*w.lower / g)));
    const auto khi = to_int64(floor(Rational(*w.upper / g)));
    if (khi - klo + 1 > options.max_points) {
      throw ResourceCapError("decompose_rational: level " + std::to_string(n) + " needs " +
                             std::to_string(khi - klo + 1) + " points");
    }
    IntWindowSet view(klo, khi);
    for (auto k = klo; k <= khi; ++k) {
      if (in_x(g * k)) view.insert(k);
    }
    const auto kx = to_int64(num(Rational(x / g)));
    ZDecomposition z;
    try {
      z = decompose_z(view, kx);
    } catch (const NotMidconvexError& e) {
      throw NotMidconvexError("level " + std::to_string(n) + " (step " + to_string(g) + "): " + e.what());
    }
    ChainLevel level{g, std::nullopt, g * *z.interval.lower, g * *z.interval.upper, z.subgroup.modulus};
    if (n > 0) {
      const auto& prev = out.levels.back();
      if (g != prev.step) level.refined_by = static_cast<std::uint64_t>(to_int64(num(Rational(prev.step / g))));
      if (level.lower > prev.lower || level.upper < prev.upper) {
        throw NotMidconvexError("level " + std::to_string(n) + ": C does not contain the previous level's C");
      }
      const Rational ratio = prev.subgroup_gen() / level.subgroup_gen();
      if (!is_integer(ratio)) {
        throw NotMidconvexError("level " + std::to_string(n) + ": H does not contain the previous level's H");
      }
      if (level.refined_by) {
        auto& state = refinements[*level.refined_by];
        if (ratio != 1) {
          state.enlarged = true;
        } else if (state.enlarged) {
          state.failed_after = true;
        }
      }
    }
    out.levels.push_back(level);
  }

  PrimeSet primes;
  for (const auto& [p, state] : refinements) {
    if (state.enlarged && !state.failed_after) primes.insert(p);
  }
  const auto& last = out.levels.back();
  RationalGroupDescriptor h(last.subgroup_gen(), primes);
  out.description = make_description(QIntervalSpec::closed(last.lower, last.upper), h, x, ambient);
  return out;
}

}  // namespace midconvex

#pragma once

#include "midconvex/group_core.hpp"
#include "midconvex/integer_sets.hpp"
#include "midconvex/midconvex_engine.hpp"
#include "midconvex/random.hpp"
#include "midconvex/rational_groups.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cstdint>
#include <functional>
#include <optional>
#include <set>
#include <string>
#include <thread>
#include <vector>

namespace midconvex {

struct Mismatch {
  std::string group;
  std::string subset;
  std::string lhs;  // first side of the comparison, e.g. the direct predicate
  std::string rhs;  // second side, e.g. the characterization
  friend bool operator==(const Mismatch&, const Mismatch&) = default;
  friend auto operator<=>(const Mismatch&, const Mismatch&) = default;
};

/// Subsets examined and positives found, per group.
struct GroupTally {
  std::string group;
  std::int64_t subsets = 0;
  std::int64_t positives = 0;
  bool exhaustive = true;
};

struct VerificationReport {
  std::string campaign;
  std::int64_t groups = 0;
  std::int64_t subsets = 0;
  std::int64_t samples = 0;
  std::vector<Mismatch> mismatches;
  std::vector<GroupTally> tallies;
  std::vector<std::string> notes;
  std::optional<std::int64_t> elapsed_ms;
  std::uint64_t seed = 0;

  bool passed() const { return mismatches.empty(); }
};

struct CampaignConfig {
  /// Groups up to this order get every subset checked.
  std::int64_t exhaustive_limit = 12;
  /// Groups above exhaustive_limit and up to this order get sampled subsets.
  std::int64_t sampled_limit = 24;
  std::int64_t sampled_subsets = 10000;
  std::uint64_t seed = 0;
  unsigned jobs = 1;
  /// Record wall-clock time in the report. Off by default so reports are reproducible.
  bool timing = false;
};

namespace detail {

inline std::vector<std::pair<std::int64_t, int>> factorize(std::int64_t n) {
  std::vector<std::pair<std::int64_t, int>> out;
  for (std::int64_t p = 2; p * p <= n; ++p) {
    int e = 0;
    while (n % p == 0) {
      n /= p;
      ++e;
    }
    if (e) out.emplace_back(p, e);
  }
  if (n > 1) out.emplace_back(n, 1);
  return out;
}

/// Partitions of e into nonincreasing parts, in decreasing lexicographic order.
inline void partitions(int e, int max_part, std::vector<int>& current, std::vector<std::vector<int>>& out) {
  if (e == 0) {
    out.push_back(current);
    return;
  }
  for (int part = std::min(e, max_part); part >= 1; --part) {
    current.push_back(part);
    partitions(e - part, part, current, out);
    current.pop_back();
  }
}

inline std::int64_t ipow(std::int64_t b, int e) {
  std::int64_t r = 1;
  while (e-- > 0) r *= b;
  return r;
}

/// Runs `task(i)` for i in [0, count) on up to `jobs` threads.
inline void parallel_for(std::size_t count, unsigned jobs, const std::function<void(std::size_t)>& task) {
  jobs = std::max(1U, std::min<unsigned>(jobs, static_cast<unsigned>(count)));
  if (jobs == 1) {
    for (std::size_t i = 0; i < count; ++i) task(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::vector<std::thread> workers;
  for (unsigned j = 0; j < jobs; ++j) {
    workers.emplace_back([&] {
      for (std::size_t i = next++; i < count; i = next++) task(i);
    });
  }
  for (auto& w : workers) w.join();
}

class Stopwatch {
 public:
  Stopwatch() : start_(std::chrono::steady_clock::now()) {}
  std::int64_t ms() const {
    return std::chrono::duration_cast<std::chrono::milliseconds>(std::chrono::steady_clock::now() - start_).count();
  }

 private:
  std::chrono::steady_clock::time_point start_;
};

}  // namespace detail

/// One representative per isomorphism class for every order up to max_order.
///
/// Classes come from the partitions of each prime exponent; factors are listed
/// prime by prime with parts in decreasing order. Orders ascend, and within an
/// order partitions run in decreasing lexicographic order (8: [8], [4,2], [2,2,2]).
inline std::vector<FiniteAbelianGroup> enumerate_abelian_groups(std::int64_t max_order) {
  if (max_order < 1) throw PreconditionError("enumerate_abelian_groups: max_order must be >= 1");
  std::vector<FiniteAbelianGroup> out;
  for (std::int64_t n = 1; n <= max_order; ++n) {
    std::vector<std::vector<std::int64_t>> acc{{}};
    for (auto [p, e] : detail::factorize(n)) {
      std::vector<std::vector<int>> parts;
      std::vector<int> current;
      detail::partitions(e, e, current, parts);
      std::vector<std::vector<std::int64_t>> next;
      for (const auto& prefix : acc) {
        for (const auto& part : parts) {
          auto orders = prefix;
          for (int k : part) orders.push_back(detail::ipow(p, k));
          next.push_back(std::move(orders));
        }
      }
      acc = std::move(next);
    }
    for (auto& orders : acc) out.emplace_back(std::move(orders));
  }
  return out;
}

/// Verdict on one subset: whether it counts as positive, and a mismatch if any.
struct SubsetVerdict {
  bool positive = false;
  std::optional<Mismatch> mismatch;
};

/// Applies `check` to subsets of every group of order up to max_order: all subsets
/// up to config.exhaustive_limit, config.sampled_subsets seeded random ones above it.
inline VerificationReport subset_sweep(const std::string& campaign, std::int64_t max_order,
                                       const CampaignConfig& config,
                                       const std::function<SubsetVerdict(const GroupSubset&)>& check) {
  if (max_order > config.sampled_limit) {
    throw ResourceCapError(campaign + ": max order " + std::to_string(max_order) + " exceeds the sweep limit " +
                           std::to_string(config.sampled_limit));
  }
  detail::Stopwatch clock;
  const auto groups = enumerate_abelian_groups(max_order);

  struct Unit {
    std::size_t group;
    std::uint64_t first;
    std::uint64_t last;  // exclusive; for sampled groups, the sample count range
    bool exhaustive;
  };
  constexpr std::uint64_t kBlock = 512;
  std::vector<Unit> units;
  for (std::size_t gi = 0; gi < groups.size(); ++gi) {
    const auto order = groups[gi].order();
    const bool exhaustive = order <= config.exhaustive_limit;
    const std::uint64_t total =
        exhaustive ? (std::uint64_t{1} << order) : static_cast<std::uint64_t>(config.sampled_subsets);
    for (std::uint64_t b = 0; b < total; b += kBlock) units.push_back({gi, b, std::min(total, b + kBlock), exhaustive});
  }

  struct UnitResult {
    std::int64_t subsets = 0;
    std::int64_t positives = 0;
    std::vector<Mismatch> mismatches;
  };
  std::vector<UnitResult> results(units.size());
  detail::parallel_for(units.size(), config.jobs, [&](std::size_t ui) {
    const auto& u = units[ui];
    const auto& g = groups[u.group];
    // Sampled masks come from a stream keyed by (seed, group, block) so the
    // result does not depend on how units are scheduled.
    Rng rng(config.seed * 0x9E3779B97F4A7C15ULL + u.group * 1000003ULL + u.first);
    auto& r = results[ui];
    for (auto i = u.first; i < u.last; ++i) {
      const std::uint64_t mask = u.exhaustive ? i : rng.below(std::uint64_t{1} << g.order());
      auto verdict = check(GroupSubset::from_mask(g, mask));
      ++r.subsets;
      if (verdict.positive) ++r.positives;
      if (verdict.mismatch) r.mismatches.push_back(std::move(*verdict.mismatch));
    }
  });

  VerificationReport report;
  report.campaign = campaign;
  report.seed = config.seed;
  report.groups = static_cast<std::int64_t>(groups.size());
  for (const auto& g : groups) report.tallies.push_back({to_string(g), 0, 0, g.order() <= config.exhaustive_limit});
  for (std::size_t ui = 0; ui < units.size(); ++ui) {
    auto& tally = report.tallies[units[ui].group];
    tally.subsets += results[ui].subsets;
    tally.positives += results[ui].positives;
    report.subsets += results[ui].subsets;
    for (auto& m : results[ui].mismatches) report.mismatches.push_back(std::move(m));
  }
  std::sort(report.mismatches.begin(), report.mismatches.end());
  if (config.timing) report.elapsed_ms = clock.ms();
  return report;
}

/// is_midconvex against "X - x is an odd-index subgroup for every x in X".
inline SubsetVerdict theorem2_verdict(const GroupSubset& x) {
  const bool direct = is_midconvex(x).holds;
  const bool characterized = theorem2_characterization(x);
  SubsetVerdict v{direct, std::nullopt};
  if (direct != characterized) {
    v.mismatch = Mismatch{to_string(x.group()), to_string(x), "is_midconvex=" + std::string(direct ? "true" : "false"),
                          "odd_index_cosets=" + std::string(characterized ? "true" : "false")};
  }
  return v;
}

/// is_midconvex against "every trace decomposes as C ∩ H with odd-index H".
inline SubsetVerdict theorem1_verdict(const GroupSubset& x) {
  const bool direct = is_midconvex(x).holds;
  const auto traced = verify_theorem1(x);
  SubsetVerdict v{direct, std::nullopt};
  if (direct != traced.holds) {
    v.mismatch = Mismatch{to_string(x.group()), to_string(x), "is_midconvex=" + std::string(direct ? "true" : "false"),
                          "trace_decompositions=" + std::string(traced.holds ? "true" : "false")};
  }
  return v;
}

/// The integers n in [-2d, 2d] with x + n(y - x) ∈ X, where d = ord(y - x).
/// Two full periods on each side of 0 expose any gap of the periodic trace.
inline IntWindowSet lifted_line_trace(const GroupSubset& x, const GroupElement& a, const GroupElement& b) {
  const auto& g = x.group();
  const auto step = g.sub(b, a);
  const auto d = g.element_order(step);
  IntWindowSet out(-2 * d, 2 * d);
  for (auto n = -2 * d; n <= 2 * d; ++n) {
    if (x.contains(g.add(a, g.multiple(step, n)))) out.insert(n);
  }
  return out;
}

/// For midconvex X: every line trace through two distinct points is order-convex.
inline SubsetVerdict lemma1_verdict(const GroupSubset& x) {
  if (!is_midconvex(x).holds) return {};
  SubsetVerdict v{true, std::nullopt};
  const auto members = x.elements();
  for (const auto& a : members) {
    for (const auto& b : members) {
      if (a == b) continue;
      if (!lemma1_check(lifted_line_trace(x, a, b), 0, 1)) {
        v.mismatch = Mismatch{to_string(x.group()), to_string(x), "is_midconvex=true",
                              "lemma1_check(" + to_string(a) + "," + to_string(b) + ")=false"};
        return v;
      }
    }
  }
  return v;
}

inline VerificationReport exhaustive_theorem2(std::int64_t max_order, const CampaignConfig& config = {}) {
  return subset_sweep("theorem2", max_order, config, theorem2_verdict);
}

inline VerificationReport exhaustive_theorem1(std::int64_t max_order, const CampaignConfig& config = {}) {
  return subset_sweep("theorem1", max_order, config, theorem1_verdict);
}

inline VerificationReport exhaustive_lemma1(std::int64_t max_order, const CampaignConfig& config = {}) {
  return subset_sweep("lemma1", max_order, config, lemma1_verdict);
}

// ---------------------------------------------------------------------------
// Rational campaigns
// ---------------------------------------------------------------------------

namespace detail {

/// Random product of primes from `primes`, each with exponent in [0, max_exp].
inline BigInt random_smooth(Rng& rng, const PrimeSet& primes, int max_exp) {
  BigInt d = 1;
  for (auto p : primes) {
    const auto e = rng.below(static_cast<std::uint64_t>(max_exp) + 1);
    for (std::uint64_t i = 0; i < e; ++i) d *= p;
  }
  return d;
}

inline PrimeSet random_subset(Rng& rng, const PrimeSet& pool) {
  PrimeSet out;
  for (auto p : pool) {
    if (rng.coin()) out.insert(p);
  }
  return out;
}

/// Nonzero element q * u of G = q Z[P^-1], with u = k * p^e for one prime of P.
inline Rational random_group_element(Rng& rng, const RationalGroupDescriptor& g, std::int64_t max_k) {
  Rational u = rng.between(1, max_k);
  if (!g.primes().empty()) {
    const std::vector<std::uint64_t> ps(g.primes().begin(), g.primes().end());
    const auto p = ps[rng.below(ps.size())];
    switch (rng.below(3)) {
      case 0: u /= p; break;
      case 1: u *= p; break;
      default: break;
    }
  }
  return g.gen() * u;
}

}  // namespace detail

/// Sampled search for g ∈ G with 2g ∈ H and g ∉ H.
///
/// Even draws take t from H's grid and test g = t/2, which covers every
/// candidate for the implication's antecedent; odd draws take g from G's grid.
/// Only `member` is used, never the valuation formula.
inline std::optional<Rational> sample_purity_violation(const RationalGroupDescriptor& h,
                                                       const RationalGroupDescriptor& g, std::int64_t samples,
                                                       Rng& rng, const SamplingBounds& bounds = {}) {
  for (std::int64_t i = 0; i < samples; ++i) {
    Rational candidate;
    const auto a = rng.between(-bounds.numerator_bound, bounds.numerator_bound);
    if (i % 2 == 0) {
      const Rational t = h.gen() * Rational(BigInt(a), detail::random_smooth(rng, h.primes(), bounds.exponent_bound));
      candidate = t / 2;
    } else {
      candidate = g.gen() * Rational(BigInt(a), detail::random_smooth(rng, g.primes(), bounds.exponent_bound));
    }
    if (member(candidate, g) && member(Rational(candidate * 2), h) && !member(candidate, h)) return candidate;
  }
  return std::nullopt;
}

/// is_two_pure's formula against sampled violations of 2g ∈ H ⇒ g ∈ H.
inline VerificationReport sample_two_purity(std::int64_t trials, std::uint64_t seed,
                                            const PrimeSet& prime_pool = {2, 3, 5, 7},
                                            std::int64_t samples_per_pair = 200, const SamplingBounds& bounds = {},
                                            bool timing = false) {
  detail::Stopwatch clock;
  Rng rng(seed);
  VerificationReport report;
  report.campaign = "purity";
  report.seed = seed;
  std::int64_t pure = 0;
  for (std::int64_t t = 0; t < trials; ++t) {
    const RationalGroupDescriptor g(Rational(rng.between(1, 12), rng.between(1, 12)),
                                    detail::random_subset(rng, prime_pool));
    const RationalGroupDescriptor h(detail::random_group_element(rng, g, 12), detail::random_subset(rng, g.primes()));
    const bool formula = is_two_pure(h, g);
    const auto violation = sample_purity_violation(h, g, samples_per_pair, rng, bounds);
    ++report.groups;
    report.samples += samples_per_pair;
    if (formula) ++pure;
    if (formula == !violation.has_value()) continue;
    report.mismatches.push_back(Mismatch{"G=" + to_string(g), "H=" + to_string(h),
                                         "formula=" + std::string(formula ? "true" : "false"),
                                         violation ? "sampled violation g=" + to_string(*violation)
                                                   : std::string("sampled no violation")});
  }
  report.notes.push_back("pairs judged 2-pure: " + std::to_string(pure) + " of " + std::to_string(trials));
  std::sort(report.mismatches.begin(), report.mismatches.end());
  if (timing) report.elapsed_ms = clock.ms();
  return report;
}

struct ClosureApproximation {
  std::set<Rational> points;
  bool complete = false;
  std::int64_t rounds = 0;
};

/// Rounds of adding every midpoint (a+b)/2 that lies in G. Complete when a round adds nothing.
inline ClosureApproximation bounded_closure_oracle(const RationalGroupDescriptor& g, const std::vector<Rational>& start,
                                                   std::int64_t max_iters,
                                                   std::size_t max_points = std::size_t{1} << 16) {
  ClosureApproximation out;
  for (const auto& r : start) {
    if (!member(r, g)) throw PreconditionError("bounded_closure_oracle: " + to_string(r) + " is not in G");
    out.points.insert(r);
  }
  for (std::int64_t round = 0; round < max_iters; ++round) {
    std::set<Rational> added;
    const std::vector<Rational> current(out.points.begin(), out.points.end());
    for (std::size_t i = 0; i < current.size(); ++i) {
      for (std::size_t j = i + 1; j < current.size(); ++j) {
        Rational c = (current[i] + current[j]) / 2;
        if (member(c, g) && !out.points.count(c)) added.insert(std::move(c));
      }
    }
    out.rounds = round + 1;
    if (added.empty()) {
      out.complete = true;
      return out;
    }
    out.points.insert(added.begin(), added.end());
    if (out.points.size() > max_points) {
      throw ResourceCapError("bounded_closure_oracle: more than " + std::to_string(max_points) + " points");
    }
  }
  return out;
}

struct HullCheck {
  VerificationReport report;
  RationalMidconvexDescription candidate;
  ClosureApproximation oracle;
  /// Sampled candidate points the oracle had not produced yet (closure incomplete).
  std::int64_t unfalsified = 0;
};

/// Candidate hull conv(X0) ∩ (twoPureClosure(<X0 - x>) + x) against the bounded oracle.
///
/// Oracle ⊆ candidate is asserted. Candidate points missing from a complete
/// oracle are mismatches; missing from an incomplete oracle they only count as
/// unfalsified at this depth.
inline HullCheck conjecture_hull_check(const RationalGroupDescriptor& g, const std::vector<Rational>& start,
                                       std::int64_t max_iters, std::int64_t samples, std::uint64_t seed) {
  if (start.empty()) throw PreconditionError("conjecture_hull_check: start set must be nonempty");
  const auto [lo, hi] = std::minmax_element(start.begin(), start.end());
  const Rational x = *lo;
  std::vector<Rational> diffs;
  for (const auto& r : start) diffs.push_back(r - x);
  const auto span = generated_subgroup(diffs);
  const RationalGroupDescriptor h = span ? two_pure_closure(*span, g) : g;

  HullCheck out{VerificationReport{}, make_description(QIntervalSpec::closed(x, *hi), h, x, g),
                bounded_closure_oracle(g, start, max_iters), 0};
  auto& report = out.report;
  report.campaign = "hull";
  report.seed = seed;
  report.groups = 1;
  const std::string gs = to_string(g);
  for (const auto& p : out.oracle.points) {
    if (!out.candidate.contains(p)) {
      report.mismatches.push_back({gs, to_string(p), "oracle contains point", "candidate excludes point"});
    }
  }
  Rng rng(seed);
  for (std::int64_t i = 0; i < samples; ++i) {
    const auto p = sample_description_point(out.candidate, rng);
    ++report.samples;
    if (out.oracle.points.count(p)) continue;
    if (out.oracle.complete) {
      report.mismatches.push_back({gs, to_string(p), "complete oracle excludes point", "candidate contains point"});
    } else {
      ++out.unfalsified;
    }
  }
  std::sort(report.mismatches.begin(), report.mismatches.end());
  report.mismatches.erase(std::unique(report.mismatches.begin(), report.mismatches.end()), report.mismatches.end());
  report.notes.push_back("candidate " + to_string(out.candidate));
  report.notes.push_back("oracle points " + std::to_string(out.oracle.points.size()) + " after " +
                         std::to_string(out.oracle.rounds) + " rounds, " +
                         (out.oracle.complete ? "complete" : "incomplete"));
  if (out.unfalsified > 0) {
    report.notes.push_back("unfalsified at depth: " + std::to_string(out.unfalsified) +
                           " sampled candidate points not yet produced by the oracle");
  }
  return out;
}

/// A synthetic midconvex set C ∩ (H + x) in G with H 2-pure, plus a second point x2 > x.
struct SyntheticRationalCase {
  RationalGroupDescriptor ambient;
  RationalMidconvexDescription truth;
  Rational second;
};

inline SyntheticRationalCase make_synthetic_case(Rng& rng, const PrimeSet& pool = {2, 3, 5}) {
  const RationalGroupDescriptor g(Rational(rng.between(1, 6), rng.between(1, 6)), detail::random_subset(rng, pool));
  const RationalGroupDescriptor raw(detail::random_group_element(rng, g, 5), detail::random_subset(rng, g.primes()));
  const auto h = two_pure_closure(raw, g);
  const Rational x = g.gen() * rng.between(-6, 6);
  static const Rational kBelow[] = {Rational(0), Rational(1, 2), Rational(1), Rational(3, 2), Rational(7, 3)};
  static const Rational kAbove[] = {Rational(1), Rational(3, 2), Rational(2), Rational(5, 2), Rational(3)};
  QIntervalSpec c;
  if (rng.below(6) != 0) c.lower = x - h.gen() * kBelow[rng.below(5)];
  if (rng.below(6) != 0) c.upper = x + h.gen() * kAbove[rng.below(5)];
  return {g, make_description(c, h, x, g), x + h.gen()};
}

/// Builds synthetic descriptions, checks the "if" direction by sampling, then
/// recovers each description from membership queries and compares the two on
/// every lattice point of the deepest chain level inside the window.
inline VerificationReport theorem3_roundtrip(std::int64_t cases, std::int64_t samples, std::uint64_t seed,
                                             bool timing = false) {
  detail::Stopwatch clock;
  Rng rng(seed);
  VerificationReport report;
  report.campaign = "theorem3";
  report.seed = seed;
  std::int64_t grid_points = 0;
  for (std::int64_t i = 0; i < cases; ++i) {
    const auto sc = make_synthetic_case(rng);
    const auto gs = to_string(sc.ambient);
    const auto ds = to_string(sc.truth);
    ++report.groups;
    const auto sampled = verify_theorem3_if(sc.truth, sc.ambient, samples, seed + static_cast<std::uint64_t>(i));
    report.samples += sampled.pairs;
    if (!sampled) {
      const auto& w = *sampled.violation;
      report.mismatches.push_back({gs, ds, "midpoint of " + to_string(w.x) + "," + to_string(w.y) + " in G",
                                   to_string(w.z) + " outside X"});
      continue;
    }
    const Rational h = sc.truth.subgroup.gen();
    RationalDecomposeOptions opt;
    opt.depth = static_cast<std::int64_t>(sc.ambient.primes().size()) + 1;
    opt.window = QIntervalSpec::closed(sc.truth.base - 3 * h, sc.truth.base + 4 * h);
    const auto in_x = [&](const Rational& r) { return sc.truth.contains(r); };
    try {
      const auto rec = decompose_rational(sc.ambient, in_x, sc.truth.base, sc.second, opt);
      const auto& step = rec.levels.back().step;
      const auto klo = to_int64(ceil(Rational(*opt.window.lower / step)));
      const auto khi = to_int64(floor(Rational(*opt.window.upper / step)));
      for (auto k = klo; k <= khi; ++k) {
        const Rational r = step * k;
        ++grid_points;
        if (rec.description.contains(r) != sc.truth.contains(r)) {
          report.mismatches.push_back({gs, ds, "recovered " + to_string(rec.description),
                                       "disagrees at " + to_string(r)});
          break;
        }
      }
    } catch (const std::exception& e) {
      report.mismatches.push_back({gs, ds, "decompose_rational failed", e.what()});
    }
  }
  report.notes.push_back("grid points compared: " + std::to_string(grid_points));
  std::sort(report.mismatches.begin(), report.mismatches.end());
  if (timing) report.elapsed_ms = clock.ms();
  return report;
}

}  // namespace midconvex

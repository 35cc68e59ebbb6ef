#pragma once

#include "midconvex/errors.hpp"

#include <algorithm>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace midconvex {

/// A subset of Z known exactly inside the window [lo, hi].
///
/// Everything computed from an IntWindowSet is a statement about X ∩ [lo, hi];
/// nothing is inferred about integers outside the window.
class IntWindowSet {
 public:
  IntWindowSet() = default;

  IntWindowSet(std::int64_t lo, std::int64_t hi) : lo_(lo), hi_(hi) {
    if (lo > hi) throw std::invalid_argument("window lower bound exceeds upper bound");
    members_.assign(static_cast<std::size_t>(hi - lo + 1), false);
  }

  template <typename Range>
  static IntWindowSet from_elements(std::int64_t lo, std::int64_t hi, const Range& elements) {
    IntWindowSet s(lo, hi);
    for (auto v : elements) {
      if (v < lo || v > hi) {
        throw std::invalid_argument("element " + std::to_string(v) + " lies outside window [" +
                                    std::to_string(lo) + "," + std::to_string(hi) + "]");
      }
      s.insert(v);
    }
    return s;
  }

  std::int64_t lo() const noexcept { return lo_; }
  std::int64_t hi() const noexcept { return hi_; }
  bool in_window(std::int64_t n) const noexcept { return n >= lo_ && n <= hi_; }

  bool contains(std::int64_t n) const { return in_window(n) && members_[slot(n)]; }
  void insert(std::int64_t n) { members_.at(slot(n)) = true; }

  std::vector<std::int64_t> elements() const {
    std::vector<std::int64_t> out;
    for (std::int64_t n = lo_; n <= hi_; ++n) {
      if (members_[slot(n)]) out.push_back(n);
    }
    return out;
  }

  bool empty() const { return std::none_of(members_.begin(), members_.end(), [](bool b) { return b; }); }

  friend bool operator==(const IntWindowSet&, const IntWindowSet&) = default;

 private:
  std::size_t slot(std::int64_t n) const { return static_cast<std::size_t>(n - lo_); }

  std::int64_t lo_ = 0;
  std::int64_t hi_ = 0;
  std::vector<bool> members_ = std::vector<bool>(1, false);
};

inline std::string to_string(const IntWindowSet& s) {
  std::string out = "{";
  bool first = true;
  for (auto v : s.elements()) {
    if (!first) out += ',';
    first = false;
    out += std::to_string(v);
  }
  return out + "}@window[" + std::to_string(s.lo()) + "," + std::to_string(s.hi()) + "]";
}

/// Order-convex subset of Z; an absent endpoint means unbounded on that side.
struct IntIntervalSpec {
  std::optional<std::int64_t> lower;
  std::optional<std::int64_t> upper;

  bool contains(std::int64_t n) const {
    return (!lower || n >= *lower) && (!upper || n <= *upper);
  }
  IntIntervalSpec shifted(std::int64_t by) const {
    IntIntervalSpec out = *this;
    if (out.lower) *out.lower += by;
    if (out.upper) *out.upper += by;
    return out;
  }
  friend bool operator==(const IntIntervalSpec&, const IntIntervalSpec&) = default;
};

/// Subgroup m*Z of Z. Modulus 0 is reserved for the trivial trace {0}: it is
/// produced only together with the interval {0}, where it reads as "H = Z, C = {0}".
/// Its membership test accepts only 0, which gives the same intersection C ∩ H.
struct ZSubgroupSpec {
  std::int64_t modulus = 1;

  bool contains(std::int64_t n) const { return modulus == 0 ? n == 0 : n % modulus == 0; }
  friend bool operator==(const ZSubgroupSpec&, const ZSubgroupSpec&) = default;
};

/// The pair (C, H) with Z = C ∩ H.
struct TraceDecomposition {
  IntIntervalSpec interval;
  ZSubgroupSpec subgroup;
  /// Nonzero trace element of least absolute value (positive on ties); 0 for the trivial trace.
  std::int64_t minimal = 0;

  bool contains(std::int64_t n) const { return interval.contains(n) && subgroup.contains(n); }
  friend bool operator==(const TraceDecomposition&, const TraceDecomposition&) = default;
};

/// (C, H, x) with X = C ∩ (H + x) on the window.
struct ZDecomposition {
  IntIntervalSpec interval;
  ZSubgroupSpec subgroup;
  std::int64_t base = 0;
  std::int64_t minimal = 0;

  bool contains(std::int64_t n) const { return interval.contains(n) && subgroup.contains(n - base); }
  friend bool operator==(const ZDecomposition&, const ZDecomposition&) = default;
};

template <typename T>
struct MidpointWitness {
  T x;
  T y;
  T z;
  friend bool operator==(const MidpointWitness&, const MidpointWitness&) = default;
};

/// Outcome of a midconvexity test: `witness` is set exactly when `holds` is false.
template <typename T>
struct MidconvexCheck {
  bool holds = true;
  std::optional<MidpointWitness<T>> witness;
  explicit operator bool() const noexcept { return holds; }
};

namespace detail {
inline std::int64_t floor_div(std::int64_t a, std::int64_t b) {
  std::int64_t q = a / b;
  if ((a % b != 0) && ((a < 0) != (b < 0))) --q;
  return q;
}
inline std::int64_t ceil_div(std::int64_t a, std::int64_t b) { return -floor_div(-a, b); }
inline std::int64_t mod(std::int64_t a, std::int64_t n) { return ((a % n) + n) % n; }
}  // namespace detail

inline bool is_order_convex(const IntWindowSet& s) {
  const auto e = s.elements();
  return e.empty() || static_cast<std::int64_t>(e.size()) == e.back() - e.front() + 1;
}

/// Midpoint test on the window. Any z with 2z = x + y lies between x and y, so the
/// answer is exact for X ∩ [lo, hi]. The witness is the lexicographically smallest (x, y, z).
inline MidconvexCheck<std::int64_t> is_midconvex_z(const IntWindowSet& s) {
  const auto e = s.elements();
  for (auto x : e) {
    for (auto y : e) {
      if ((x + y) % 2 != 0) continue;
      const auto z = (x + y) / 2;
      if (!s.contains(z)) return {false, MidpointWitness<std::int64_t>{x, y, z}};
    }
  }
  return {};
}

/// {n : x + n*g ∈ X}, on the largest n-window whose points x + n*g all lie in X's window.
inline IntWindowSet trace_z(const IntWindowSet& s, std::int64_t x, std::int64_t g) {
  if (g == 0) throw std::invalid_argument("trace_z: step g must be nonzero");
  if (!s.in_window(x)) throw PreconditionError("trace_z: base point outside the window");
  std::int64_t nlo = 0;
  std::int64_t nhi = 0;
  if (g > 0) {
    nlo = detail::ceil_div(s.lo() - x, g);
    nhi = detail::floor_div(s.hi() - x, g);
  } else {
    nlo = detail::ceil_div(s.hi() - x, g);
    nhi = detail::floor_div(s.lo() - x, g);
  }
  IntWindowSet out(nlo, nhi);
  for (auto n = nlo; n <= nhi; ++n) {
    if (s.contains(x + n * g)) out.insert(n);
  }
  return out;
}

/// Order-convexity of the trace of X along y - x. Holds for every midconvex X.
inline bool lemma1_check(const IntWindowSet& s, std::int64_t x, std::int64_t y) {
  if (!s.contains(x) || !s.contains(y)) throw PreconditionError("lemma1_check: x and y must belong to X");
  if (x == y) throw PreconditionError("lemma1_check: x and y must differ");
  return is_order_convex(trace_z(s, x, y - x));
}

struct TraceOptions {
  /// When set to d, the trace is the d-periodic set whose residues are given on the window [0, d-1].
  std::optional<std::int64_t> period;
  /// Minimum distance from 0 to each window edge needed to accept {0} as the whole trace.
  std::optional<std::int64_t> confidence_radius;
};

enum class TraceFailure { kNone, kEvenMinimal, kNotIntersection, kWindowTooSmall };

struct TraceOutcome {
  std::optional<TraceDecomposition> value;
  TraceFailure failure = TraceFailure::kNone;
  std::string reason;

  explicit operator bool() const noexcept { return value.has_value(); }
};

/// Non-throwing form of decompose_trace.
///
/// Finds the nonzero m in Z of least |m| (positive on ties). An even m proves Z is
/// not a midconvex trace; an odd m gives H = mZ and C = the smallest order-convex
/// set with C ∩ H = Z ∩ H, after which Z = C ∩ H is checked pointwise.
inline TraceOutcome try_decompose_trace(const IntWindowSet& z, const TraceOptions& options = {}) {
  if (!z.contains(0)) throw PreconditionError("decompose_trace: the trace must contain 0");
  TraceOutcome out;

  if (options.period) {
    const auto d = *options.period;
    if (d < 1 || z.lo() != 0 || z.hi() != d - 1) {
      throw PreconditionError("decompose_trace: a periodic trace must be given on the window [0, period-1]");
    }
    std::int64_t m = 0;
    for (std::int64_t k = 1; k <= d && m == 0; ++k) {
      if (z.contains(k % d)) {
        m = k;
      } else if (z.contains(detail::mod(-k, d))) {
        m = -k;
      }
    }
    const auto am = m < 0 ? -m : m;
    if (am % 2 == 0) {
      out.failure = TraceFailure::kEvenMinimal;
      out.reason = "least nonzero trace element " + std::to_string(m) + " is even";
      return out;
    }
    bool ok = d % am == 0;
    for (std::int64_t r = 0; ok && r < d; ++r) ok = z.contains(r) == (r % am == 0);
    if (!ok) {
      out.failure = TraceFailure::kNotIntersection;
      out.reason = "periodic trace is not " + std::to_string(am) + "Z";
      return out;
    }
    out.value = TraceDecomposition{IntIntervalSpec{}, ZSubgroupSpec{am}, m};
    return out;
  }

  const auto reach = std::max(-z.lo(), z.hi());
  std::int64_t m = 0;
  for (std::int64_t k = 1; k <= reach && m == 0; ++k) {
    if (z.contains(k)) {
      m = k;
    } else if (z.contains(-k)) {
      m = -k;
    }
  }
  if (m == 0) {
    if (options.confidence_radius && std::min(-z.lo(), z.hi()) < *options.confidence_radius) {
      out.failure = TraceFailure::kWindowTooSmall;
      out.reason = "window shows only 0 but is narrower than the confidence radius " +
                   std::to_string(*options.confidence_radius);
      return out;
    }
    out.value = TraceDecomposition{IntIntervalSpec{0, 0}, ZSubgroupSpec{0}, 0};
    return out;
  }
  const auto am = m < 0 ? -m : m;
  if (am % 2 == 0) {
    out.failure = TraceFailure::kEvenMinimal;
    out.reason = "least nonzero trace element " + std::to_string(m) + " is even";
    return out;
  }
  std::optional<std::int64_t> cmin;
  std::optional<std::int64_t> cmax;
  for (auto n : z.elements()) {
    if (n % am != 0) continue;
    if (!cmin) cmin = n;
    cmax = n;
  }
  TraceDecomposition dec{IntIntervalSpec{cmin, cmax}, ZSubgroupSpec{am}, m};
  for (auto n = z.lo(); n <= z.hi(); ++n) {
    if (z.contains(n) != dec.contains(n)) {
      out.failure = TraceFailure::kNotIntersection;
      out.reason = "trace differs from C ∩ " + std::to_string(am) + "Z at " + std::to_string(n);
      return out;
    }
  }
  out.value = dec;
  return out;
}

/// Throws NotMidconvexError or WindowTooSmallError on failure.
inline TraceDecomposition decompose_trace(const IntWindowSet& z, const TraceOptions& options = {}) {
  auto r = try_decompose_trace(z, options);
  if (r.value) return *r.value;
  if (r.failure == TraceFailure::kWindowTooSmall) throw WindowTooSmallError(r.reason);
  throw NotMidconvexError(r.reason);
}

/// Decomposition of X ⊆ Z at base x, via the trace along g = 1.
inline ZDecomposition decompose_z(const IntWindowSet& s, std::int64_t x,
                                  std::optional<std::int64_t> confidence_radius = std::nullopt) {
  if (!s.contains(x)) throw PreconditionError("decompose_z: base point must belong to X");
  auto t = decompose_trace(trace_z(s, x, 1), TraceOptions{std::nullopt, confidence_radius});
  return ZDecomposition{t.interval.shifted(x), t.subgroup, x, t.minimal};
}

/// Least midconvex superset of X within its window (midpoints never leave the window).
inline IntWindowSet midconvex_closure_z(const IntWindowSet& s) {
  IntWindowSet out = s;
  bool grew = true;
  while (grew) {
    grew = false;
    const auto e = out.elements();
    for (std::size_t i = 0; i < e.size(); ++i) {
      for (std::size_t j = i + 1; j < e.size(); ++j) {
        if ((e[i] + e[j]) % 2 == 0 && !out.contains((e[i] + e[j]) / 2)) {
          out.insert((e[i] + e[j]) / 2);
          grew = true;
        }
      }
    }
  }
  return out;
}

}  // namespace midconvex

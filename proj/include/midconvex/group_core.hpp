#pragma once

#include "midconvex/errors.hpp"

#include <compare>
#include <cstdint>
#include <numeric>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace midconvex {

inline constexpr std::int64_t kDefaultOrderCap = std::int64_t{1} << 20;

/// Residue vector of a finite Abelian group Z(n_1) + ... + Z(n_k).
/// Ordering is lexicographic, which coincides with the group's enumeration order.
class GroupElement {
 public:
  GroupElement() = default;
  explicit GroupElement(std::vector<std::int64_t> residues) : residues_(std::move(residues)) {}

  const std::vector<std::int64_t>& residues() const noexcept { return residues_; }
  std::size_t rank() const noexcept { return residues_.size(); }
  std::int64_t operator[](std::size_t i) const { return residues_[i]; }

  friend bool operator==(const GroupElement&, const GroupElement&) = default;
  friend auto operator<=>(const GroupElement&, const GroupElement&) = default;

 private:
  std::vector<std::int64_t> residues_;
};

/// Direct sum of cyclic groups, factor orders kept exactly as given (never normalized).
///
/// Elements are enumerated mixed-radix with the last component varying fastest,
/// so index 0 is zero and indices run to order() - 1.
class FiniteAbelianGroup {
 public:
  FiniteAbelianGroup() = default;

  explicit FiniteAbelianGroup(std::vector<std::int64_t> orders,
                              std::int64_t order_cap = kDefaultOrderCap)
      : orders_(std::move(orders)) {
    for (auto n : orders_) {
      if (n < 1) throw std::invalid_argument("cyclic factor order must be >= 1, got " + std::to_string(n));
      if (order_ > order_cap / n) {
        throw ResourceCapError("group order exceeds cap " + std::to_string(order_cap));
      }
      order_ *= n;
    }
  }

  const std::vector<std::int64_t>& orders() const noexcept { return orders_; }
  std::int64_t order() const noexcept { return order_; }
  std::size_t rank() const noexcept { return orders_.size(); }

  GroupElement zero() const { return GroupElement(std::vector<std::int64_t>(rank(), 0)); }

  bool contains(const GroupElement& a) const {
    if (a.rank() != rank()) return false;
    for (std::size_t i = 0; i < rank(); ++i) {
      if (a[i] < 0 || a[i] >= orders_[i]) return false;
    }
    return true;
  }

  /// Reduces an arbitrary integer vector into the group.
  GroupElement reduce(std::vector<std::int64_t> v) const {
    if (v.size() != rank()) throw std::invalid_argument("element rank does not match group rank");
    for (std::size_t i = 0; i < rank(); ++i) {
      v[i] %= orders_[i];
      if (v[i] < 0) v[i] += orders_[i];
    }
    return GroupElement(std::move(v));
  }

  GroupElement add(const GroupElement& a, const GroupElement& b) const {
    require(a);
    require(b);
    std::vector<std::int64_t> r(rank());
    for (std::size_t i = 0; i < rank(); ++i) {
      r[i] = a[i] + b[i];
      if (r[i] >= orders_[i]) r[i] -= orders_[i];
    }
    return GroupElement(std::move(r));
  }

  GroupElement neg(const GroupElement& a) const {
    require(a);
    std::vector<std::int64_t> r(rank());
    for (std::size_t i = 0; i < rank(); ++i) r[i] = a[i] == 0 ? 0 : orders_[i] - a[i];
    return GroupElement(std::move(r));
  }

  GroupElement sub(const GroupElement& a, const GroupElement& b) const { return add(a, neg(b)); }

  /// k * a for any integer k.
  GroupElement multiple(const GroupElement& a, std::int64_t k) const {
    require(a);
    std::vector<std::int64_t> r(rank());
    for (std::size_t i = 0; i < rank(); ++i) {
      const auto n = orders_[i];
      const auto km = ((k % n) + n) % n;
      r[i] = static_cast<std::int64_t>((static_cast<__int128>(km) * a[i]) % n);
    }
    return GroupElement(std::move(r));
  }

  /// Smallest n >= 1 with n * a = 0: the lcm of the component orders n_i / gcd(a_i, n_i).
  std::int64_t element_order(const GroupElement& a) const {
    require(a);
    std::int64_t result = 1;
    for (std::size_t i = 0; i < rank(); ++i) {
      const auto component = orders_[i] / std::gcd(a[i], orders_[i]);
      result = std::lcm(result, component);
    }
    return result;
  }

  /// All z with 2z = s, in enumeration order.
  ///
  /// Per component, 2z = s (mod n) has the single solution s * 2^{-1} when n is odd,
  /// the two solutions s/2 and s/2 + n/2 when n is even and s is even, and none otherwise.
  std::vector<GroupElement> halving_set(const GroupElement& s) const {
    require(s);
    std::vector<std::vector<std::int64_t>> choices(rank());
    for (std::size_t i = 0; i < rank(); ++i) {
      const auto n = orders_[i];
      if (n % 2 == 1) {
        // (n + 1) / 2 is the inverse of 2 modulo odd n.
        const auto inv2 = (n + 1) / 2;
        choices[i].push_back(static_cast<std::int64_t>((static_cast<__int128>(s[i]) * inv2) % n));
      } else if (s[i] % 2 == 0) {
        choices[i].push_back(s[i] / 2);
        choices[i].push_back(s[i] / 2 + n / 2);
      } else {
        return {};
      }
    }
    std::vector<GroupElement> out;
    std::vector<std::int64_t> current(rank());
    expand(choices, 0, current, out);
    return out;
  }

  std::int64_t index_of(const GroupElement& a) const {
    require(a);
    std::int64_t idx = 0;
    for (std::size_t i = 0; i < rank(); ++i) idx = idx * orders_[i] + a[i];
    return idx;
  }

  GroupElement element_at(std::int64_t index) const {
    if (index < 0 || index >= order_) throw std::out_of_range("element index out of range");
    std::vector<std::int64_t> r(rank());
    for (std::size_t i = rank(); i-- > 0;) {
      r[i] = index % orders_[i];
      index /= orders_[i];
    }
    return GroupElement(std::move(r));
  }

  std::vector<GroupElement> elements() const {
    std::vector<GroupElement> out;
    out.reserve(static_cast<std::size_t>(order_));
    for (std::int64_t i = 0; i < order_; ++i) out.push_back(element_at(i));
    return out;
  }

  friend bool operator==(const FiniteAbelianGroup& a, const FiniteAbelianGroup& b) {
    return a.orders_ == b.orders_;
  }

 private:
  void require(const GroupElement& a) const {
    if (!contains(a)) throw std::invalid_argument("element does not belong to this group");
  }

  static void expand(const std::vector<std::vector<std::int64_t>>& choices, std::size_t i,
                     std::vector<std::int64_t>& current, std::vector<GroupElement>& out) {
    if (i == choices.size()) {
      out.emplace_back(current);
      return;
    }
    for (auto c : choices[i]) {
      current[i] = c;
      expand(choices, i + 1, current, out);
    }
  }

  std::vector<std::int64_t> orders_;
  std::int64_t order_ = 1;
};

inline FiniteAbelianGroup make_group(std::vector<std::int64_t> orders,
                                     std::int64_t order_cap = kDefaultOrderCap) {
  return FiniteAbelianGroup(std::move(orders), order_cap);
}

/// Text form "Z(n1xn2x...)"; the trivial group with no factors prints as "Z(1)".
inline std::string to_string(const FiniteAbelianGroup& g) {
  if (g.rank() == 0) return "Z(1)";
  std::string s = "Z(";
  for (std::size_t i = 0; i < g.rank(); ++i) {
    if (i) s += 'x';
    s += std::to_string(g.orders()[i]);
  }
  return s + ")";
}

/// Single-factor elements print as a bare residue, others as a tuple "(a,b)".
inline std::string to_string(const GroupElement& a) {
  if (a.rank() == 1) return std::to_string(a[0]);
  std::string s = "(";
  for (std::size_t i = 0; i < a.rank(); ++i) {
    if (i) s += ',';
    s += std::to_string(a[i]);
  }
  return s + ")";
}

/// Dense membership table over a group's enumeration.
class GroupSubset {
 public:
  GroupSubset() = default;
  explicit GroupSubset(FiniteAbelianGroup group)
      : group_(std::move(group)), members_(static_cast<std::size_t>(group_.order()), false) {}

  static GroupSubset full(FiniteAbelianGroup group) {
    GroupSubset s(std::move(group));
    s.members_.assign(s.members_.size(), true);
    return s;
  }

  /// Bit i of `mask` selects the element with enumeration index i.
  static GroupSubset from_mask(FiniteAbelianGroup group, std::uint64_t mask) {
    GroupSubset s(std::move(group));
    for (std::size_t i = 0; i < s.members_.size() && i < 64; ++i) s.members_[i] = ((mask >> i) & 1U) != 0;
    return s;
  }

  template <typename Range>
  static GroupSubset from_elements(FiniteAbelianGroup group, const Range& elements) {
    GroupSubset s(std::move(group));
    for (const auto& e : elements) s.insert(e);
    return s;
  }

  const FiniteAbelianGroup& group() const noexcept { return group_; }

  bool contains(const GroupElement& a) const { return members_[static_cast<std::size_t>(group_.index_of(a))]; }
  bool contains_index(std::int64_t i) const { return members_[static_cast<std::size_t>(i)]; }

  void insert(const GroupElement& a) { members_[static_cast<std::size_t>(group_.index_of(a))] = true; }
  void insert_index(std::int64_t i) { members_[static_cast<std::size_t>(i)] = true; }

  std::int64_t size() const {
    std::int64_t n = 0;
    for (bool b : members_) n += b ? 1 : 0;
    return n;
  }
  bool empty() const { return size() == 0; }

  std::vector<std::int64_t> indices() const {
    std::vector<std::int64_t> out;
    for (std::size_t i = 0; i < members_.size(); ++i) {
      if (members_[i]) out.push_back(static_cast<std::int64_t>(i));
    }
    return out;
  }

  std::vector<GroupElement> elements() const {
    std::vector<GroupElement> out;
    for (auto i : indices()) out.push_back(group_.element_at(i));
    return out;
  }

  bool is_subset_of(const GroupSubset& other) const {
    for (std::size_t i = 0; i < members_.size(); ++i) {
      if (members_[i] && !other.members_[i]) return false;
    }
    return true;
  }

  /// The translate {a - t : a in this set}.
  GroupSubset shifted_by_negative(const GroupElement& t) const {
    GroupSubset out(group_);
    for (auto i : indices()) out.insert(group_.sub(group_.element_at(i), t));
    return out;
  }

  friend bool operator==(const GroupSubset& a, const GroupSubset& b) {
    return a.group_ == b.group_ && a.members_ == b.members_;
  }

 private:
  FiniteAbelianGroup group_;
  std::vector<bool> members_;
};

inline std::string to_string(const GroupSubset& s) {
  std::string out = "{";
  bool first = true;
  for (const auto& e : s.elements()) {
    if (!first) out += ',';
    first = false;
    out += to_string(e);
  }
  return out + "}";
}

/// Contains zero and is closed under addition and negation.
inline bool is_subgroup(const GroupSubset& s) {
  const auto& g = s.group();
  if (!s.contains_index(0)) return false;
  const auto members = s.elements();
  for (const auto& a : members) {
    if (!s.contains(g.neg(a))) return false;
    for (const auto& b : members) {
      if (!s.contains(g.add(a, b))) return false;
    }
  }
  return true;
}

/// Smallest subgroup containing `s`; {0} for the empty set.
inline GroupSubset subgroup_generated(const GroupSubset& s) {
  const auto& g = s.group();
  GroupSubset out(g);
  out.insert_index(0);
  std::vector<GroupElement> frontier{g.zero()};
  const auto generators = s.elements();
  // In a finite group, closure under addition of generators already gives closure under negation.
  while (!frontier.empty()) {
    auto a = std::move(frontier.back());
    frontier.pop_back();
    for (const auto& gen : generators) {
      auto b = g.add(a, gen);
      if (!out.contains(b)) {
        out.insert(b);
        frontier.push_back(std::move(b));
      }
    }
  }
  return out;
}

/// |G| / |S| is odd. By Cauchy's theorem this is equivalent to G/S having no
/// element of even order. Throws PreconditionError when S is not a subgroup.
inline bool index_is_odd(const GroupSubset& s) {
  if (!is_subgroup(s)) throw PreconditionError("index_is_odd: set is not a subgroup");
  return (s.group().order() / s.size()) % 2 == 1;
}

}  // namespace midconvex

#pragma once

// Input language for the command-line tool.
//
//   program := [ group ";" set ";" ] command [ ";" ]
//   group   := "Z(" int { "x" int } ")" | "Z" | "Q(gen=" rational ", primes=[" primes "])"
//   set     := "{" elems "}" [ "@window[" int "," int "]" ]
//            | "conv" ("["|"(") bound "," bound ("]"|")") ("∩"|"&") "(" subgroup "+" elem ")"
//   subgroup:= "(" rational "," "[" primes "]" ")"
//   elem    := rational | "(" rational { "," rational } ")"
//   bound   := rational | "inf" | "-inf"
//   command := "check" | "closure" | "trace" "x=" elem "g=" elem
//            | "decompose" [ "x=" elem ] [ "depth=" int ] [ "window=[" rational "," rational "]" ]
//            | "verify" "--theorem" (1|2|3|lemma1|purity|hull)
//                       [ "--max-order" int ] [ "--samples" int ] [ "--seed" int ]
//
// Whitespace (including newlines) separates tokens freely; "#" starts a comment.

#include "midconvex/group_core.hpp"
#include "midconvex/integer_sets.hpp"
#include "midconvex/rational.hpp"
#include "midconvex/rational_groups.hpp"

#include <cctype>
#include <cstdint>
#include <optional>
#include <set>
#include <stdexcept>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

namespace midconvex::dsl {

struct SourcePos {
  int line = 1;
  int column = 1;
};

class ParseError : public std::runtime_error {
 public:
  ParseError(const std::string& message, SourcePos pos)
      : std::runtime_error("line " + std::to_string(pos.line) + ", column " + std::to_string(pos.column) + ": " +
                           message),
        pos_(pos) {}
  SourcePos pos() const noexcept { return pos_; }

 private:
  SourcePos pos_;
};

/// Well-formed input that does not fit its group (element outside the group, bad window, ...).
class TypeError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct FiniteGroupExpr {
  std::vector<std::int64_t> orders;
  friend bool operator==(const FiniteGroupExpr&, const FiniteGroupExpr&) = default;
};
struct IntegerGroupExpr {
  friend bool operator==(const IntegerGroupExpr&, const IntegerGroupExpr&) = default;
};
struct RationalGroupExpr {
  Rational gen;
  std::vector<std::uint64_t> primes;
  friend bool operator==(const RationalGroupExpr&, const RationalGroupExpr&) = default;
};
using GroupExpr = std::variant<FiniteGroupExpr, IntegerGroupExpr, RationalGroupExpr>;

struct ElementExpr {
  std::vector<Rational> components;
  bool tuple = false;
  SourcePos pos;
  friend bool operator==(const ElementExpr& a, const ElementExpr& b) {
    return a.components == b.components && a.tuple == b.tuple;
  }
};

struct ExplicitSetExpr {
  std::vector<ElementExpr> elements;
  std::optional<std::pair<std::int64_t, std::int64_t>> window;
  friend bool operator==(const ExplicitSetExpr&, const ExplicitSetExpr&) = default;
};

struct CosetSetExpr {
  QIntervalSpec interval;
  RationalGroupExpr subgroup;
  ElementExpr base;
  friend bool operator==(const CosetSetExpr&, const CosetSetExpr&) = default;
};
using SetExpr = std::variant<ExplicitSetExpr, CosetSetExpr>;

struct CheckCmd {
  friend bool operator==(const CheckCmd&, const CheckCmd&) = default;
};
struct ClosureCmd {
  friend bool operator==(const ClosureCmd&, const ClosureCmd&) = default;
};
struct TraceCmd {
  ElementExpr x;
  ElementExpr g;
  friend bool operator==(const TraceCmd&, const TraceCmd&) = default;
};
struct DecomposeCmd {
  std::optional<ElementExpr> x;
  std::optional<std::int64_t> depth;
  std::optional<std::pair<Rational, Rational>> window;
  friend bool operator==(const DecomposeCmd&, const DecomposeCmd&) = default;
};
struct VerifyCmd {
  std::string theorem;
  std::optional<std::int64_t> max_order;
  std::optional<std::int64_t> samples;
  std::optional<std::uint64_t> seed;
  friend bool operator==(const VerifyCmd&, const VerifyCmd&) = default;
};
using Command = std::variant<CheckCmd, ClosureCmd, TraceCmd, DecomposeCmd, VerifyCmd>;

struct Program {
  std::optional<GroupExpr> group;
  std::optional<SetExpr> set;
  Command command;
  friend bool operator==(const Program&, const Program&) = default;
};

namespace detail {

class Parser {
 public:
  explicit Parser(std::string_view src) : src_(src) {}

  Program program() {
    Program p;
    skip();
    if (!at_command_word()) {
      p.group = group();
      expect(";");
      p.set = set();
      expect(";");
    }
    p.command = command();
    skip();
    if (peek() == ';') advance();
    skip();
    if (!eof()) fail("unexpected trailing input");
    return p;
  }

 private:
  // -- character level ------------------------------------------------------
  bool eof() const { return i_ >= src_.size(); }
  char peek(std::size_t ahead = 0) const { return i_ + ahead < src_.size() ? src_[i_ + ahead] : '\0'; }

  void advance() {
    const char c = src_[i_++];
    if (c == '\n') {
      ++pos_.line;
      pos_.column = 1;
    } else if ((static_cast<unsigned char>(c) & 0xC0) != 0x80) {
      ++pos_.column;
    }
  }

  void skip() {
    while (!eof()) {
      if (std::isspace(static_cast<unsigned char>(peek()))) {
        advance();
      } else if (peek() == '#') {
        while (!eof() && peek() != '\n') advance();
      } else {
        break;
      }
    }
  }

  [[noreturn]] void fail(const std::string& message) const { throw ParseError(message, pos_); }

  bool lookahead(std::string_view lit) {
    skip();
    return src_.substr(i_, lit.size()) == lit;
  }

  bool accept(std::string_view lit) {
    if (!lookahead(lit)) return false;
    for (std::size_t k = 0; k < lit.size(); ++k) advance();
    return true;
  }

  void expect(std::string_view lit) {
    if (!accept(lit)) fail("expected '" + std::string(lit) + "'");
  }

  std::string word() {
    skip();
    std::string w;
    while (!eof() && (std::isalnum(static_cast<unsigned char>(peek())) || peek() == '_' || peek() == '-')) {
      w += peek();
      advance();
    }
    return w;
  }

  bool at_command_word() {
    const auto save_i = i_;
    const auto save_pos = pos_;
    const auto w = word();
    i_ = save_i;
    pos_ = save_pos;
    return w == "check" || w == "closure" || w == "trace" || w == "decompose" || w == "verify";
  }

  // -- tokens ---------------------------------------------------------------
  std::string number_text(bool allow_slash) {
    skip();
    std::string t;
    if (peek() == '-' || peek() == '+') {
      t += peek();
      advance();
    }
    if (!std::isdigit(static_cast<unsigned char>(peek()))) fail("expected a number");
    while (std::isdigit(static_cast<unsigned char>(peek()))) {
      t += peek();
      advance();
    }
    if (allow_slash && peek() == '/') {
      t += '/';
      advance();
      if (!std::isdigit(static_cast<unsigned char>(peek()))) fail("expected a denominator");
      while (std::isdigit(static_cast<unsigned char>(peek()))) {
        t += peek();
        advance();
      }
    }
    return t;
  }

  std::int64_t integer() {
    const auto start = pos_;
    const auto t = number_text(false);
    try {
      return std::stoll(t);
    } catch (const std::out_of_range&) {
      throw ParseError("integer out of range", start);
    }
  }

  Rational rational() {
    const auto start = pos_;
    const auto t = number_text(true);
    try {
      return parse_rational(t);
    } catch (const std::invalid_argument& e) {
      throw ParseError(e.what(), start);
    }
  }

  std::optional<Rational> bound() {
    if (accept("inf") || accept("+inf")) return std::nullopt;
    if (accept("-inf")) return std::nullopt;
    return rational();
  }

  std::vector<std::uint64_t> prime_list() {
    expect("[");
    std::vector<std::uint64_t> out;
    if (accept("]")) return out;
    do {
      const auto v = integer();
      if (v < 0) fail("primes must be positive");
      out.push_back(static_cast<std::uint64_t>(v));
    } while (accept(","));
    expect("]");
    return out;
  }

  // -- grammar --------------------------------------------------------------
  GroupExpr group() {
    skip();
    if (accept("Q(")) {
      RationalGroupExpr q;
      expect("gen");
      expect("=");
      q.gen = rational();
      expect(",");
      expect("primes");
      expect("=");
      q.primes = prime_list();
      expect(")");
      return q;
    }
    if (accept("Z(")) {
      FiniteGroupExpr f;
      f.orders.push_back(integer());
      while (accept("x")) f.orders.push_back(integer());
      expect(")");
      return f;
    }
    if (accept("Z")) return IntegerGroupExpr{};
    fail("expected a group: Z(n1xn2...), Z or Q(gen=..., primes=[...])");
  }

  ElementExpr element() {
    skip();
    ElementExpr e;
    e.pos = pos_;
    if (accept("(")) {
      e.tuple = true;
      do {
        e.components.push_back(rational());
      } while (accept(","));
      expect(")");
    } else {
      e.components.push_back(rational());
    }
    return e;
  }

  SetExpr set() {
    skip();
    if (accept("{")) {
      ExplicitSetExpr s;
      if (!accept("}")) {
        do {
          s.elements.push_back(element());
        } while (accept(","));
        expect("}");
      }
      if (accept("@window")) {
        expect("[");
        const auto lo = integer();
        expect(",");
        const auto hi = integer();
        expect("]");
        s.window = {lo, hi};
      }
      return s;
    }
    if (accept("conv")) {
      CosetSetExpr c;
      if (accept("(")) {
        c.interval.lower_inclusive = false;
      } else {
        expect("[");
      }
      c.interval.lower = bound();
      expect(",");
      c.interval.upper = bound();
      if (accept(")")) {
        c.interval.upper_inclusive = false;
      } else {
        expect("]");
      }
      if (!c.interval.lower) c.interval.lower_inclusive = true;
      if (!c.interval.upper) c.interval.upper_inclusive = true;
      if (!accept("∩") && !accept("&")) fail("expected '∩'");
      expect("(");
      expect("(");
      c.subgroup.gen = rational();
      expect(",");
      c.subgroup.primes = prime_list();
      expect(")");
      expect("+");
      c.base = element();
      expect(")");
      return c;
    }
    fail("expected a set: {...} or conv[...] ∩ (...)");
  }

  ElementExpr keyed_element(std::string_view key) {
    expect(key);
    expect("=");
    return element();
  }

  Command command() {
    skip();
    const auto start = pos_;
    const auto w = word();
    if (w == "check") return CheckCmd{};
    if (w == "closure") return ClosureCmd{};
    if (w == "trace") {
      TraceCmd t;
      t.x = keyed_element("x");
      t.g = keyed_element("g");
      return t;
    }
    if (w == "decompose") {
      DecomposeCmd d;
      if (lookahead("x")) d.x = keyed_element("x");
      if (accept("depth")) {
        expect("=");
        d.depth = integer();
      }
      if (accept("window")) {
        expect("=");
        expect("[");
        auto lo = rational();
        expect(",");
        auto hi = rational();
        expect("]");
        d.window = std::make_pair(std::move(lo), std::move(hi));
      }
      return d;
    }
    if (w == "verify") {
      VerifyCmd v;
      while (lookahead("--")) {
        const auto flag_pos = pos_;
        const auto flag = word();
        if (flag == "--theorem") {
          v.theorem = word();
          static const std::set<std::string> kKnown{"1", "2", "3", "lemma1", "purity", "hull"};
          if (!kKnown.count(v.theorem)) throw ParseError("unknown theorem '" + v.theorem + "'", flag_pos);
        } else if (flag == "--max-order") {
          v.max_order = integer();
        } else if (flag == "--samples") {
          v.samples = integer();
        } else if (flag == "--seed") {
          const auto s = integer();
          if (s < 0) throw ParseError("seed must be nonnegative", flag_pos);
          v.seed = static_cast<std::uint64_t>(s);
        } else {
          throw ParseError("unknown flag '" + flag + "'", flag_pos);
        }
      }
      if (v.theorem.empty()) throw ParseError("verify needs --theorem", start);
      return v;
    }
    throw ParseError(w.empty() ? "expected a command" : "unknown command '" + w + "'", start);
  }

  std::string_view src_;
  std::size_t i_ = 0;
  SourcePos pos_;
};

}  // namespace detail

/// Syntax only; see bind() for type checking.
inline Program parse_syntax(std::string_view text) { return detail::Parser(text).program(); }

// ---------------------------------------------------------------------------
// Printing
// ---------------------------------------------------------------------------

inline std::string print(const GroupExpr& g) {
  if (const auto* f = std::get_if<FiniteGroupExpr>(&g)) {
    std::string s = "Z(";
    for (std::size_t i = 0; i < f->orders.size(); ++i) s += (i ? "x" : "") + std::to_string(f->orders[i]);
    return s + ")";
  }
  if (std::holds_alternative<IntegerGroupExpr>(g)) return "Z";
  const auto& q = std::get<RationalGroupExpr>(g);
  std::string s = "Q(gen=" + to_string(q.gen) + ", primes=[";
  for (std::size_t i = 0; i < q.primes.size(); ++i) s += (i ? "," : "") + std::to_string(q.primes[i]);
  return s + "])";
}

inline std::string print(const ElementExpr& e) {
  if (!e.tuple) return to_string(e.components.front());
  std::string s = "(";
  for (std::size_t i = 0; i < e.components.size(); ++i) s += (i ? "," : "") + to_string(e.components[i]);
  return s + ")";
}

inline std::string print(const SetExpr& set) {
  if (const auto* ex = std::get_if<ExplicitSetExpr>(&set)) {
    std::string s = "{";
    for (std::size_t i = 0; i < ex->elements.size(); ++i) s += (i ? "," : "") + print(ex->elements[i]);
    s += "}";
    if (ex->window) s += "@window[" + std::to_string(ex->window->first) + "," + std::to_string(ex->window->second) + "]";
    return s;
  }
  const auto& c = std::get<CosetSetExpr>(set);
  std::string primes = "[";
  for (std::size_t i = 0; i < c.subgroup.primes.size(); ++i) primes += (i ? "," : "") + std::to_string(c.subgroup.primes[i]);
  primes += "]";
  return to_string(c.interval) + " ∩ ((" + to_string(c.subgroup.gen) + "," + primes + ") + " + print(c.base) + ")";
}

inline std::string print(const Command& cmd) {
  return std::visit(
      [](const auto& c) -> std::string {
        using T = std::decay_t<decltype(c)>;
        if constexpr (std::is_same_v<T, CheckCmd>) {
          return "check";
        } else if constexpr (std::is_same_v<T, ClosureCmd>) {
          return "closure";
        } else if constexpr (std::is_same_v<T, TraceCmd>) {
          return "trace x=" + print(c.x) + " g=" + print(c.g);
        } else if constexpr (std::is_same_v<T, DecomposeCmd>) {
          std::string s = "decompose";
          if (c.x) s += " x=" + print(*c.x);
          if (c.depth) s += " depth=" + std::to_string(*c.depth);
          if (c.window) s += " window=[" + to_string(c.window->first) + "," + to_string(c.window->second) + "]";
          return s;
        } else {
          std::string s = "verify --theorem " + c.theorem;
          if (c.max_order) s += " --max-order " + std::to_string(*c.max_order);
          if (c.samples) s += " --samples " + std::to_string(*c.samples);
          if (c.seed) s += " --seed " + std::to_string(*c.seed);
          return s;
        }
      },
      cmd);
}

inline std::string print(const Program& p) {
  std::string s;
  if (p.group) s += print(*p.group) + "; ";
  if (p.set) s += print(*p.set) + "; ";
  return s + print(p.command);
}

// ---------------------------------------------------------------------------
// Binding: expressions to domain objects
// ---------------------------------------------------------------------------

struct FiniteContext {
  FiniteAbelianGroup group;
  GroupSubset set;
};
struct IntegerContext {
  IntWindowSet set;
  /// Present when the set was written as conv[...] ∩ (...).
  std::optional<ZDecomposition> description;
};
struct RationalContext {
  RationalGroupDescriptor group;
  std::variant<std::set<Rational>, RationalMidconvexDescription> set;
};
using Context = std::variant<std::monostate, FiniteContext, IntegerContext, RationalContext>;

inline std::string where(const ElementExpr& e) {
  return " (line " + std::to_string(e.pos.line) + ", column " + std::to_string(e.pos.column) + ")";
}

inline GroupElement bind_finite_element(const FiniteAbelianGroup& g, const ElementExpr& e) {
  if (e.components.size() != g.rank() || (g.rank() > 1 && !e.tuple)) {
    throw TypeError("element " + print(e) + " does not match " + to_string(g) + where(e));
  }
  std::vector<std::int64_t> r;
  for (std::size_t i = 0; i < g.rank(); ++i) {
    const auto& c = e.components[i];
    if (!is_integer(c) || c < 0 || c >= g.orders()[i]) {
      throw TypeError("element " + print(e) + " is outside " + to_string(g) + where(e));
    }
    r.push_back(to_int64(num(c)));
  }
  return GroupElement(std::move(r));
}

inline std::int64_t bind_integer_element(const ElementExpr& e) {
  if (e.tuple || e.components.size() != 1 || !is_integer(e.components[0])) {
    throw TypeError("element " + print(e) + " is not an integer" + where(e));
  }
  return to_int64(num(e.components[0]));
}

inline Rational bind_rational_element(const RationalGroupDescriptor& g, const ElementExpr& e) {
  if (e.tuple || e.components.size() != 1) throw TypeError("element " + print(e) + " is not a rational" + where(e));
  if (!member(e.components[0], g)) {
    throw TypeError("element " + print(e) + " is outside Q" + to_string(g) + where(e));
  }
  return e.components[0];
}

inline RationalGroupDescriptor bind_descriptor(const RationalGroupExpr& q) {
  PrimeSet primes;
  for (auto p : q.primes) {
    if (!is_prime(p)) throw TypeError(std::to_string(p) + " is not prime");
    if (!primes.insert(p).second) throw TypeError("prime " + std::to_string(p) + " listed twice");
  }
  if (q.gen <= 0) throw TypeError("generator must be positive");
  return RationalGroupDescriptor(q.gen, std::move(primes));
}

/// Type-checks the group and set and builds the objects they denote.
inline Context bind(const Program& p, std::int64_t order_cap = kDefaultOrderCap) {
  if (!p.group) return std::monostate{};
  const auto& set = *p.set;
  if (const auto* f = std::get_if<FiniteGroupExpr>(&*p.group)) {
    std::optional<FiniteAbelianGroup> g;
    try {
      g.emplace(f->orders, order_cap);
    } catch (const std::invalid_argument& e) {
      throw TypeError(e.what());
    }
    const auto* ex = std::get_if<ExplicitSetExpr>(&set);
    if (!ex) throw TypeError("finite groups take explicit sets {...}");
    if (ex->window) throw TypeError("@window applies to sets in Z only");
    GroupSubset s(*g);
    for (const auto& e : ex->elements) s.insert(bind_finite_element(*g, e));
    return FiniteContext{*g, std::move(s)};
  }
  if (std::holds_alternative<IntegerGroupExpr>(*p.group)) {
    if (const auto* ex = std::get_if<ExplicitSetExpr>(&set)) {
      if (!ex->window) throw TypeError("sets in Z need an explicit @window[lo,hi]");
      if (ex->window->first > ex->window->second) throw TypeError("window lower bound exceeds upper bound");
      IntWindowSet s(ex->window->first, ex->window->second);
      for (const auto& e : ex->elements) {
        const auto v = bind_integer_element(e);
        if (!s.in_window(v)) throw TypeError("element " + print(e) + " lies outside the window" + where(e));
        s.insert(v);
      }
      return IntegerContext{std::move(s), std::nullopt};
    }
    const auto& c = std::get<CosetSetExpr>(set);
    if (!c.interval.lower || !c.interval.upper) throw TypeError("sets in Z must be bounded");
    if (!c.subgroup.primes.empty() || !is_integer(c.subgroup.gen) || c.subgroup.gen <= 0) {
      throw TypeError("subgroups of Z are written (m,[]) with m a positive integer");
    }
    const auto x = bind_integer_element(c.base);
    auto lo = to_int64(ceil(*c.interval.lower));
    auto hi = to_int64(floor(*c.interval.upper));
    if (!c.interval.lower_inclusive && Rational(lo) == *c.interval.lower) ++lo;
    if (!c.interval.upper_inclusive && Rational(hi) == *c.interval.upper) --hi;
    if (lo > x || x > hi) throw TypeError("base point lies outside the interval" + where(c.base));
    const auto m = to_int64(num(c.subgroup.gen));
    ZDecomposition d{IntIntervalSpec{lo, hi}, ZSubgroupSpec{m}, x, 0};
    IntWindowSet s(lo, hi);
    for (auto n = lo; n <= hi; ++n) {
      if (d.contains(n)) s.insert(n);
    }
    return IntegerContext{std::move(s), d};
  }
  const auto g = bind_descriptor(std::get<RationalGroupExpr>(*p.group));
  if (const auto* ex = std::get_if<ExplicitSetExpr>(&set)) {
    if (ex->window) throw TypeError("@window applies to sets in Z only");
    std::set<Rational> points;
    for (const auto& e : ex->elements) points.insert(bind_rational_element(g, e));
    return RationalContext{g, std::move(points)};
  }
  const auto& c = std::get<CosetSetExpr>(set);
  const auto h = bind_descriptor(c.subgroup);
  const auto x = bind_rational_element(g, c.base);
  try {
    return RationalContext{g, make_description(c.interval, h, x, g)};
  } catch (const std::invalid_argument& e) {
    throw TypeError(e.what());
  }
}

/// Syntax plus type checking. Throws ParseError or TypeError.
inline Program parse(std::string_view text) {
  auto p = parse_syntax(text);
  bind(p);
  return p;
}

}  // namespace midconvex::dsl

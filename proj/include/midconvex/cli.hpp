#pragma once

#include "midconvex/dsl.hpp"
#include "midconvex/errors.hpp"
#include "midconvex/integer_sets.hpp"
#include "midconvex/midconvex_engine.hpp"
#include "midconvex/oracle_harness.hpp"

#include <json.hpp>

#include <cstdint>
#include <optional>
#include <sstream>
#include <string>
#include <variant>

namespace midconvex::cli {

using Json = nlohmann::ordered_json;

enum ExitCode : int { kHolds = 0, kCounterexample = 1, kUsage = 2, kLimit = 3 };

enum class Format { kText, kJson };

struct RunOptions {
  Format format = Format::kText;
  unsigned jobs = 1;
  bool timing = false;
};

struct RunResult {
  int exit_code = kHolds;
  std::string output;
};

namespace detail {

inline Json witness_json(const std::string& x, const std::string& y, const std::string& z) {
  return Json{{"x", x}, {"y", y}, {"z", z}};
}

inline Json primes_json(const PrimeSet& primes) {
  Json a = Json::array();
  for (auto p : primes) a.push_back(p);
  return a;
}

inline Json bound_json(const std::optional<std::int64_t>& v) { return v ? Json(std::to_string(*v)) : Json("inf"); }

inline Json z_decomposition_json(const ZDecomposition& d) {
  Json lower = d.interval.lower ? Json(std::to_string(*d.interval.lower)) : Json("-inf");
  return Json{{"C", {{"lower", lower}, {"upper", bound_json(d.interval.upper)}, {"inclusive", {true, true}}}},
              {"H",
               {{"gen", std::to_string(d.subgroup.modulus)},
                {"primes", Json::array()},
                {"modulus", d.subgroup.modulus}}},
              {"x", std::to_string(d.base)}};
}

inline Json rational_description_json(const RationalMidconvexDescription& d) {
  const auto& c = d.interval;
  return Json{{"C",
               {{"lower", c.lower ? to_string(*c.lower) : "-inf"},
                {"upper", c.upper ? to_string(*c.upper) : "inf"},
                {"inclusive", {c.lower_inclusive, c.upper_inclusive}}}},
              {"H", {{"gen", to_string(d.subgroup.gen())}, {"primes", primes_json(d.subgroup.primes())}, {"modulus", nullptr}}},
              {"x", to_string(d.base)}};
}

inline Json report_json(const VerificationReport& r) {
  Json mismatches = Json::array();
  for (const auto& m : r.mismatches) {
    mismatches.push_back({{"group", m.group}, {"subset", m.subset}, {"lhs", m.lhs}, {"rhs", m.rhs}});
  }
  Json tallies = Json::array();
  for (const auto& t : r.tallies) {
    tallies.push_back({{"group", t.group}, {"subsets", t.subsets}, {"positives", t.positives},
                       {"exhaustive", t.exhaustive}});
  }
  return Json{{"name", r.campaign}, {"groups", r.groups},       {"subsets", r.subsets},
              {"samples", r.samples}, {"mismatches", mismatches}, {"tallies", tallies},
              {"notes", r.notes}};
}

/// Indented "key: value" rendering of the report object.
inline void render_text(const Json& j, int indent, std::ostringstream& out) {
  const std::string pad(static_cast<std::size_t>(indent), ' ');
  auto scalar = [](const Json& v) {
    if (v.is_string()) return v.get<std::string>();
    if (v.is_null()) return std::string("none");
    return v.dump();
  };
  auto is_flat = [](const Json& v) {
    if (!v.is_array()) return !v.is_object();
    for (const auto& e : v) {
      if (e.is_structured()) return false;
    }
    return true;
  };
  for (auto it = j.begin(); it != j.end(); ++it) {
    const auto& v = it.value();
    if (v.is_array() && is_flat(v)) {
      std::string line;
      for (const auto& e : v) line += (line.empty() ? "" : ", ") + scalar(e);
      out << pad << it.key() << ": [" << line << "]\n";
    } else if (v.is_object()) {
      out << pad << it.key() << ":\n";
      render_text(v, indent + 2, out);
    } else if (v.is_array()) {
      out << pad << it.key() << ":" << (v.empty() ? " []" : "") << "\n";
      for (const auto& e : v) {
        std::ostringstream item;
        render_text(e, indent + 4, item);
        auto s = item.str();
        s.replace(0, static_cast<std::size_t>(indent) + 4, pad + "  - ");
        out << s;
      }
    } else {
      out << pad << it.key() << ": " << scalar(v) << "\n";
    }
  }
}

class Runner {
 public:
  Runner(const dsl::Program& program, const RunOptions& options) : program_(program), options_(options) {
    report_["command"] = dsl::print(program.command);
    report_["group"] = program.group ? Json(dsl::print(*program.group)) : Json(nullptr);
    report_["set"] = program.set ? Json(dsl::print(*program.set)) : Json(nullptr);
    report_["result"] = nullptr;
    report_["witness"] = nullptr;
    report_["decomposition"] = nullptr;
  }

  RunResult run() {
    const auto ctx = dsl::bind(program_);
    stats_["count"] = nullptr;
    stats_["seed"] = nullptr;
    stats_["elapsed_ms"] = nullptr;
    const int code = std::visit([&](const auto& c) { return dispatch(ctx, c); }, program_.command);
    report_["stats"] = stats_;
    return {code, render()};
  }

 private:
  [[noreturn]] static void usage(const std::string& message) { throw dsl::TypeError(message); }

  int finish(const std::string& result, int code) {
    report_["result"] = result;
    return code;
  }

  // -- check ----------------------------------------------------------------
  int dispatch(const dsl::Context& ctx, const dsl::CheckCmd&) {
    if (const auto* f = std::get_if<dsl::FiniteContext>(&ctx)) {
      const auto r = is_midconvex(f->set);
      stats_["count"] = f->set.size();
      if (r) return finish("midconvex", kHolds);
      const auto& w = *r.witness;
      report_["witness"] = witness_json(to_string(w.x), to_string(w.y), to_string(w.z));
      return finish("not midconvex", kCounterexample);
    }
    if (const auto* z = std::get_if<dsl::IntegerContext>(&ctx)) {
      const auto r = is_midconvex_z(z->set);
      stats_["count"] = static_cast<std::int64_t>(z->set.elements().size());
      if (r) return finish("midconvex", kHolds);
      const auto& w = *r.witness;
      report_["witness"] = witness_json(std::to_string(w.x), std::to_string(w.y), std::to_string(w.z));
      return finish("not midconvex", kCounterexample);
    }
    if (const auto* q = std::get_if<dsl::RationalContext>(&ctx)) {
      const auto r = std::holds_alternative<std::set<Rational>>(q->set)
                         ? check_rational_points(q->group, std::get<std::set<Rational>>(q->set))
                         : check_rational_description(std::get<RationalMidconvexDescription>(q->set), q->group);
      if (r) return finish("midconvex", kHolds);
      const auto& w = *r.witness;
      report_["witness"] = witness_json(to_string(w.x), to_string(w.y), to_string(w.z));
      return finish("not midconvex", kCounterexample);
    }
    usage("check needs a group and a set");
  }

  // -- closure --------------------------------------------------------------
  int dispatch(const dsl::Context& ctx, const dsl::ClosureCmd&) {
    if (const auto* f = std::get_if<dsl::FiniteContext>(&ctx)) {
      const auto c = midconvex_closure(f->set);
      report_["closure"] = to_string(c);
      stats_["count"] = c.size();
      return finish("closure", kHolds);
    }
    if (const auto* z = std::get_if<dsl::IntegerContext>(&ctx)) {
      const auto c = midconvex_closure_z(z->set);
      report_["closure"] = to_string(c);
      stats_["count"] = static_cast<std::int64_t>(c.elements().size());
      return finish("closure", kHolds);
    }
    if (const auto* q = std::get_if<dsl::RationalContext>(&ctx)) {
      const auto* pts = std::get_if<std::set<Rational>>(&q->set);
      if (!pts) usage("closure over Q takes an explicit finite set");
      if (pts->empty()) usage("closure over Q needs a nonempty set");
      const auto c = bounded_closure_oracle(q->group, {pts->begin(), pts->end()}, 8);
      std::string s = "{";
      for (const auto& r : c.points) s += (s.size() > 1 ? "," : "") + to_string(r);
      report_["closure"] = s + "}";
      report_["complete"] = c.complete;
      report_["rounds"] = c.rounds;
      stats_["count"] = static_cast<std::int64_t>(c.points.size());
      return c.complete ? finish("closure", kHolds) : finish("closure incomplete at round cap", kLimit);
    }
    usage("closure needs a group and a set");
  }

  // -- trace ----------------------------------------------------------------
  int dispatch(const dsl::Context& ctx, const dsl::TraceCmd& cmd) {
    if (const auto* f = std::get_if<dsl::FiniteContext>(&ctx)) {
      const auto x = dsl::bind_finite_element(f->group, cmd.x);
      const auto g = dsl::bind_finite_element(f->group, cmd.g);
      if (!f->set.contains(x)) usage("trace base point must belong to the set");
      const auto t = trace_in_group(f->set, x, g);
      std::string residues = "{";
      for (auto n : t.residues.elements()) residues += (residues.size() > 1 ? "," : "") + std::to_string(n);
      report_["trace"] = {{"residues", residues + "}"}, {"period", t.period}};
      return trace_decomposition(try_decompose_trace(t.residues, t.options()));
    }
    if (const auto* z = std::get_if<dsl::IntegerContext>(&ctx)) {
      const auto x = dsl::bind_integer_element(cmd.x);
      const auto g = dsl::bind_integer_element(cmd.g);
      if (g == 0) usage("trace step must be nonzero");
      if (!z->set.in_window(x)) usage("trace base point lies outside the window");
      const auto t = trace_z(z->set, x, g);
      report_["trace"] = {{"set", to_string(t)}, {"period", nullptr}};
      if (!t.contains(0)) return finish("trace computed; base point not in set", kHolds);
      return trace_decomposition(try_decompose_trace(t));
    }
    usage("trace needs a finite group or Z");
  }

  int trace_decomposition(const TraceOutcome& r) {
    if (!r) {
      report_["reason"] = r.reason;
      return finish(r.failure == TraceFailure::kWindowTooSmall ? "window too small" : "not a midconvex trace",
                    r.failure == TraceFailure::kWindowTooSmall ? kLimit : kCounterexample);
    }
    const auto& d = *r.value;
    report_["decomposition"] = z_decomposition_json(ZDecomposition{d.interval, d.subgroup, 0, d.minimal});
    report_["minimal"] = d.minimal;
    return finish("decomposed", kHolds);
  }

  // -- decompose ------------------------------------------------------------
  int dispatch(const dsl::Context& ctx, const dsl::DecomposeCmd& cmd) {
    if (const auto* f = std::get_if<dsl::FiniteContext>(&ctx)) {
      if (cmd.depth || cmd.window) usage("depth= and window= apply to Q only");
      if (f->set.empty()) usage("decompose needs a nonempty set");
      const auto x = cmd.x ? dsl::bind_finite_element(f->group, *cmd.x) : f->set.elements().front();
      if (!f->set.contains(x)) usage("base point must belong to the set");
      const auto r = try_decompose_periodic(f->set, x);
      if (!r) {
        report_["reason"] = r.reason;
        return finish("not midconvex", kCounterexample);
      }
      report_["decomposition"] = {
          {"C", nullptr},
          {"H", {{"gen", nullptr}, {"primes", nullptr}, {"modulus", nullptr}, {"elements", to_string(r.value->subgroup)},
                 {"index", r.value->index}}},
          {"x", to_string(x)}};
      stats_["count"] = r.value->subgroup.size();
      return finish("decomposed", kHolds);
    }
    if (const auto* z = std::get_if<dsl::IntegerContext>(&ctx)) {
      if (cmd.depth || cmd.window) usage("depth= and window= apply to Q only");
      const auto e = z->set.elements();
      if (e.empty()) usage("decompose needs a nonempty set");
      const auto x = cmd.x ? dsl::bind_integer_element(*cmd.x) : e.front();
      if (!z->set.contains(x)) usage("base point must belong to the set");
      try {
        report_["decomposition"] = z_decomposition_json(decompose_z(z->set, x));
      } catch (const NotMidconvexError& err) {
        report_["reason"] = err.what();
        return finish("not midconvex", kCounterexample);
      }
      return finish("decomposed", kHolds);
    }
    if (const auto* q = std::get_if<dsl::RationalContext>(&ctx)) return decompose_rational_set(*q, cmd);
    usage("decompose needs a group and a set");
  }

  int decompose_rational_set(const dsl::RationalContext& q, const dsl::DecomposeCmd& cmd) {
    const auto* points = std::get_if<std::set<Rational>>(&q.set);
    const auto* desc = std::get_if<RationalMidconvexDescription>(&q.set);
    auto in_x = [&](const Rational& r) { return points ? points->count(r) != 0 : desc->contains(r); };
    if (points && points->empty()) usage("decompose needs a nonempty set");
    Rational x = cmd.x ? dsl::bind_rational_element(q.group, *cmd.x) : (points ? *points->begin() : desc->base);
    if (!in_x(x)) usage("base point must belong to the set");

    // A second point of X, as close to x as the structure allows.
    std::optional<Rational> other;
    if (points) {
      for (const auto& r : *points) {
        if (r != x) {
          other = r;
          break;
        }
      }
    } else {
      Rational step = desc->subgroup.gen();
      const auto& primes = desc->subgroup.primes();
      for (int k = 0; k < 64 && !other; ++k) {
        for (const Rational& y : {Rational(x + step), Rational(x - step)}) {
          if (!other && in_x(y)) other = y;
        }
        if (primes.empty()) break;
        step /= *primes.begin();
      }
    }
    if (!other) {
      // Singleton: C = {x}, H = G.
      report_["decomposition"] =
          rational_description_json(make_description(QIntervalSpec::closed(x, x), q.group, x, q.group));
      return finish("decomposed", kHolds);
    }
    Rational lo = std::min(x, *other);
    Rational hi = std::max(x, *other);
    RationalDecomposeOptions opt;
    opt.depth = cmd.depth.value_or(4);
    if (cmd.window) {
      opt.window = QIntervalSpec::closed(cmd.window->first, cmd.window->second);
    } else if (points) {
      opt.window = QIntervalSpec::closed(*points->begin(), *points->rbegin());
    } else {
      const Rational reach = (hi - lo) * 8;
      opt.window = QIntervalSpec::closed(lo - reach, hi + reach);
    }
    try {
      const auto r = decompose_rational(q.group, in_x, lo, hi, opt);
      report_["decomposition"] = rational_description_json(r.description);
      Json levels = Json::array();
      for (const auto& l : r.levels) {
        levels.push_back({{"step", to_string(l.step)},
                          {"refined_by", l.refined_by ? Json(*l.refined_by) : Json(nullptr)},
                          {"C", {to_string(l.lower), to_string(l.upper)}},
                          {"m", l.multiplier}});
      }
      report_["levels"] = levels;
      report_["depth"] = r.depth;
      report_["window"] = to_string(opt.window);
      return finish("decomposed", kHolds);
    } catch (const NotMidconvexError& err) {
      report_["reason"] = err.what();
      return finish("not midconvex", kCounterexample);
    }
  }

  // -- verify ---------------------------------------------------------------
  int dispatch(const dsl::Context& ctx, const dsl::VerifyCmd& cmd) {
    const auto seed = cmd.seed.value_or(0);
    stats_["seed"] = seed;
    CampaignConfig config;
    config.seed = seed;
    config.jobs = options_.jobs;
    config.timing = options_.timing;
    const auto& t = cmd.theorem;

    if (const auto* f = std::get_if<dsl::FiniteContext>(&ctx)) {
      SubsetVerdict v;
      if (t == "1") {
        v = theorem1_verdict(f->set);
      } else if (t == "2") {
        v = theorem2_verdict(f->set);
      } else if (t == "lemma1") {
        v = lemma1_verdict(f->set);
      } else {
        usage("verify --theorem " + t + " does not apply to finite groups");
      }
      report_["midconvex"] = v.positive;
      if (v.mismatch) {
        report_["mismatch"] = {{"lhs", v.mismatch->lhs}, {"rhs", v.mismatch->rhs}};
        return finish("mismatch", kCounterexample);
      }
      return finish("passed", kHolds);
    }
    if (const auto* z = std::get_if<dsl::IntegerContext>(&ctx)) {
      return verify_integer(*z, t);
    }
    if (const auto* q = std::get_if<dsl::RationalContext>(&ctx)) {
      return verify_rational(*q, cmd, seed);
    }

    VerificationReport report;
    if (t == "1" || t == "2" || t == "lemma1") {
      const auto max_order = cmd.max_order.value_or(t == "1" ? 10 : 12);
      if (max_order < 1) usage("--max-order must be positive");
      report = t == "1" ? exhaustive_theorem1(max_order, config)
               : t == "2" ? exhaustive_theorem2(max_order, config)
                          : exhaustive_lemma1(max_order, config);
      stats_["count"] = report.subsets;
    } else if (t == "3") {
      report = theorem3_roundtrip(50, cmd.samples.value_or(1000), seed, options_.timing);
      stats_["count"] = report.samples;
    } else if (t == "purity") {
      report = sample_two_purity(cmd.samples.value_or(100), seed, {2, 3, 5, 7}, 200, {}, options_.timing);
      stats_["count"] = report.samples;
    } else {
      usage("verify --theorem hull needs a Q group and an explicit set");
    }
    return campaign(report);
  }

  int campaign(const VerificationReport& report) {
    report_["campaign"] = report_json(report);
    if (report.elapsed_ms) stats_["elapsed_ms"] = *report.elapsed_ms;
    return report.passed() ? finish("passed", kHolds) : finish("mismatches found", kCounterexample);
  }

  int verify_integer(const dsl::IntegerContext& z, const std::string& t) {
    const auto& s = z.set;
    const auto direct = is_midconvex_z(s).holds;
    report_["midconvex"] = direct;
    if (t == "1") {
      bool all = true;
      for (auto x : s.elements()) {
        try {
          (void)decompose_z(s, x);
        } catch (const NotMidconvexError&) {
          all = false;
        }
      }
      report_["decomposes_at_every_point"] = all;
      return all == direct ? finish("passed", kHolds) : finish("mismatch", kCounterexample);
    }
    if (t == "lemma1") {
      if (!direct) return finish("passed", kHolds);
      const auto e = s.elements();
      for (auto a : e) {
        for (auto b : e) {
          if (a != b && !lemma1_check(s, a, b)) {
            report_["mismatch"] = {{"x", a}, {"y", b}};
            return finish("mismatch", kCounterexample);
          }
        }
      }
      return finish("passed", kHolds);
    }
    usage("verify --theorem " + t + " does not apply to Z");
  }

  int verify_rational(const dsl::RationalContext& q, const dsl::VerifyCmd& cmd, std::uint64_t seed) {
    const auto& t = cmd.theorem;
    const auto* desc = std::get_if<RationalMidconvexDescription>(&q.set);
    const auto* points = std::get_if<std::set<Rational>>(&q.set);
    if (t == "3") {
      if (!desc) usage("verify --theorem 3 needs a conv[...] ∩ (...) set");
      if (!is_two_pure(desc->subgroup, q.group)) {
        report_["reason"] = "subgroup " + to_string(desc->subgroup) + " is not 2-pure in " + to_string(q.group);
        return finish("rejected", kCounterexample);
      }
      const auto r = verify_theorem3_if(*desc, q.group, cmd.samples.value_or(1000), seed);
      stats_["count"] = r.pairs;
      report_["admissible_pairs"] = r.admissible;
      if (r) return finish("passed", kHolds);
      const auto& w = *r.violation;
      report_["witness"] = witness_json(to_string(w.x), to_string(w.y), to_string(w.z));
      return finish("violation", kCounterexample);
    }
    if (t == "purity") {
      if (!desc) usage("verify --theorem purity needs a conv[...] ∩ (...) set");
      const bool formula = is_two_pure(desc->subgroup, q.group);
      Rng rng(seed);
      const auto samples = cmd.samples.value_or(200);
      const auto violation = sample_purity_violation(desc->subgroup, q.group, samples, rng);
      stats_["count"] = samples;
      report_["two_pure"] = formula;
      if (violation) report_["sampled_violation"] = to_string(*violation);
      return formula == !violation ? finish("passed", kHolds) : finish("mismatch", kCounterexample);
    }
    if (t == "hull") {
      if (!points || points->empty()) usage("verify --theorem hull needs a nonempty explicit set");
      const auto h = conjecture_hull_check(q.group, {points->begin(), points->end()}, cmd.max_order.value_or(6),
                                           cmd.samples.value_or(200), seed);
      stats_["count"] = h.report.samples;
      return campaign(h.report);
    }
    usage("verify --theorem " + t + " does not apply to Q");
  }

  std::string render() const {
    if (options_.format == Format::kJson) return report_.dump(2) + "\n";
    std::ostringstream out;
    render_text(report_, 0, out);
    return out.str();
  }

  const dsl::Program& program_;
  RunOptions options_;
  Json report_ = Json::object();
  Json stats_ = Json::object();
};

}  // namespace detail

/// Executes a parsed program. Exit codes: 0 holds, 1 counterexample,
/// 2 usage, 3 window or resource limit.
inline RunResult run(const dsl::Program& program, const RunOptions& options = {}) {
  try {
    return detail::Runner(program, options).run();
  } catch (const dsl::TypeError& e) {
    return {kUsage, std::string("error: ") + e.what() + "\n"};
  } catch (const PreconditionError& e) {
    return {kUsage, std::string("error: ") + e.what() + "\n"};
  } catch (const WindowTooSmallError& e) {
    return {kLimit, std::string("error: window too small: ") + e.what() + "\n"};
  } catch (const ResourceCapError& e) {
    return {kLimit, std::string("error: resource cap: ") + e.what() + "\n"};
  }
}

/// Parses and executes program text.
inline RunResult run_text(std::string_view text, const RunOptions& options = {}) {
  try {
    return run(dsl::parse_syntax(text), options);
  } catch (const dsl::ParseError& e) {
    return {kUsage, std::string("error: ") + e.what() + "\n"};
  }
}

}  // namespace midconvex::cli

#include "midconvex/midconvex_engine.hpp"

#include <gtest/gtest.h>

#include <functional>
#include <set>
#include <vector>

using namespace midconvex;

namespace {

GroupElement el(std::initializer_list<std::int64_t> r) { return GroupElement(std::vector<std::int64_t>(r)); }

GroupSubset subset(const FiniteAbelianGroup& g, std::initializer_list<std::int64_t> cyclic_residues) {
  GroupSubset s(g);
  for (auto r : cyclic_residues) s.insert(el({r}));
  return s;
}

Rational q(std::int64_t a, std::int64_t b = 1) { return Rational(a, b); }

// Oracle: scan every triple (x, y, z) of the group.
bool midconvex_by_triples(const GroupSubset& s) {
  const auto& g = s.group();
  const auto all = g.elements();
  for (const auto& x : s.elements()) {
    for (const auto& y : s.elements()) {
      for (const auto& z : all) {
        if (g.add(z, z) == g.add(x, y) && !s.contains(z)) return false;
      }
    }
  }
  return true;
}

const std::vector<std::vector<std::int64_t>> kSmallShapes = {{1}, {2}, {3}, {4}, {2, 2}, {5}, {6}, {7}, {8}, {4, 2}, {2, 2, 2}};

}  // namespace

TEST(IsMidconvex, Examples) {
  const auto z4 = make_group({4});
  const auto r = is_midconvex(subset(z4, {0}));
  ASSERT_FALSE(r.holds);
  EXPECT_EQ(*r.witness, (GroupWitness{el({0}), el({0}), el({2})}));
  EXPECT_TRUE(is_midconvex(subset(make_group({5}), {2})).holds);
  EXPECT_TRUE(is_midconvex(GroupSubset(z4)).holds);
  EXPECT_TRUE(is_midconvex(GroupSubset::full(z4)).holds);
}

TEST(IsMidconvex, AgreesWithTripleScan) {
  for (const auto& shape : kSmallShapes) {
    const auto g = make_group(shape);
    for (std::uint64_t mask = 0; mask < (1ULL << g.order()); ++mask) {
      const auto s = GroupSubset::from_mask(g, mask);
      const auto r = is_midconvex(s);
      ASSERT_EQ(r.holds, midconvex_by_triples(s)) << to_string(g) << " " << to_string(s);
      if (!r.holds) {
        const auto& w = *r.witness;
        ASSERT_TRUE(s.contains(w.x) && s.contains(w.y) && !s.contains(w.z));
        ASSERT_EQ(g.add(w.z, w.z), g.add(w.x, w.y));
      }
    }
  }
}

TEST(Closure, Examples) {
  const auto z4 = make_group({4});
  EXPECT_EQ(midconvex_closure(subset(z4, {0})), GroupSubset::full(z4));
  const auto z15 = make_group({15});
  EXPECT_EQ(midconvex_closure(subset(z15, {0, 1})), GroupSubset::full(z15));
  const auto z5 = make_group({5});
  EXPECT_EQ(midconvex_closure(subset(z5, {2})), subset(z5, {2}));
  EXPECT_EQ(midconvex_closure(subset(z15, {0, 3})), subset(z15, {0, 3, 6, 9, 12}));
}

// Oracle: intersection of every midconvex superset.
TEST(Closure, EqualsIntersectionOfMidconvexSupersets) {
  for (const auto& shape : kSmallShapes) {
    const auto g = make_group(shape);
    const auto n = static_cast<std::uint64_t>(g.order());
    std::vector<std::uint64_t> midconvex_masks;
    for (std::uint64_t mask = 0; mask < (1ULL << n); ++mask) {
      if (midconvex_by_triples(GroupSubset::from_mask(g, mask))) midconvex_masks.push_back(mask);
    }
    for (std::uint64_t mask = 0; mask < (1ULL << n); ++mask) {
      std::uint64_t meet = (1ULL << n) - 1;
      for (auto m : midconvex_masks) {
        if ((m & mask) == mask) meet &= m;
      }
      ASSERT_EQ(midconvex_closure(GroupSubset::from_mask(g, mask)), GroupSubset::from_mask(g, meet));
    }
  }
}

TEST(TraceInGroup, Examples) {
  const auto z15 = make_group({15});
  const auto t = trace_in_group(subset(z15, {1, 4, 7, 10, 13}), el({1}), el({1}));
  EXPECT_EQ(t.period, 15);
  EXPECT_EQ(t.residues, IntWindowSet::from_elements(0, 14, std::vector<std::int64_t>{0, 3, 6, 9, 12}));

  const auto z = trace_in_group(subset(z15, {1}), el({1}), el({0}));
  EXPECT_EQ(z.period, 1);
  EXPECT_EQ(z.residues.elements(), std::vector<std::int64_t>{0});

  const auto z4 = make_group({4});
  const auto two = trace_in_group(subset(z4, {0}), el({0}), el({2}));
  EXPECT_EQ(two.period, 2);
  EXPECT_EQ(two.residues.elements(), std::vector<std::int64_t>{0});
  EXPECT_THROW(decompose_trace(two.residues, two.options()), NotMidconvexError);

  EXPECT_THROW(trace_in_group(subset(z4, {0}), el({1}), el({1})), PreconditionError);
}

TEST(Theorem1, Examples) {
  const auto z4 = make_group({4});
  const auto r = verify_theorem1(subset(z4, {0}));
  EXPECT_FALSE(r.holds);
  ASSERT_TRUE(r.failure.has_value());
  EXPECT_NE(r.failure->reason.find("even"), std::string::npos);
  EXPECT_TRUE(verify_theorem1(subset(make_group({15}), {1, 4, 7, 10, 13})).holds);
  EXPECT_TRUE(verify_theorem1(GroupSubset::full(make_group({6, 2}))).holds);
}

TEST(Periodic, Examples) {
  const auto z15 = make_group({15});
  const auto d = decompose_periodic(subset(z15, {1, 4, 7, 10, 13}), el({1}));
  EXPECT_EQ(d.subgroup, subset(z15, {0, 3, 6, 9, 12}));
  EXPECT_EQ(d.index, 3);
  EXPECT_TRUE(d.odd_index);

  const auto z4 = make_group({4});
  EXPECT_THROW(decompose_periodic(subset(z4, {0, 2}), el({0})), NotMidconvexError);
  EXPECT_THROW(decompose_periodic(subset(z4, {0, 1}), el({0})), NotMidconvexError);

  const auto g = make_group({3, 3});
  const auto full = decompose_periodic(GroupSubset::full(g), el({2, 1}));
  EXPECT_EQ(full.subgroup, GroupSubset::full(g));
  EXPECT_EQ(full.index, 1);
}

TEST(Periodic, SubgroupIndependentOfBase) {
  const auto g = make_group({9});
  const auto x = subset(g, {2, 5, 8});
  for (const auto& b : x.elements()) EXPECT_EQ(decompose_periodic(x, b).subgroup, subset(g, {0, 3, 6}));
}

TEST(Doubling, Examples) {
  EXPECT_TRUE(doubling_claim_check(subset(make_group({15}), {1, 4, 7, 10, 13}), el({1})));
  EXPECT_TRUE(doubling_claim_check(subset(make_group({7}), {4}), el({4})));
  EXPECT_TRUE(doubling_claim_check(subset(make_group({9}), {0, 3, 6}), el({0})));
}

// All characterizations agree with the triple scan, exhaustively.
TEST(Characterizations, AgreeExhaustively) {
  for (const auto& shape : kSmallShapes) {
    const auto g = make_group(shape);
    for (std::uint64_t mask = 0; mask < (1ULL << g.order()); ++mask) {
      const auto s = GroupSubset::from_mask(g, mask);
      const bool mc = midconvex_by_triples(s);
      ASSERT_EQ(verify_theorem1(s).holds, mc) << to_string(s);
      ASSERT_EQ(theorem2_characterization(s), mc) << to_string(s);
      ASSERT_EQ(midconvex_closure(s) == s, mc);
      if (mc) {
        for (const auto& b : s.elements()) ASSERT_TRUE(doubling_claim_check(s, b));
      }
    }
  }
}

TEST(RationalPoints, FiniteSets) {
  EXPECT_TRUE(check_rational_points(RationalGroupDescriptor(1, {}), {q(0), q(3), q(6), q(9)}).holds);
  const auto r = check_rational_points(RationalGroupDescriptor(1, {2}), {q(0), q(1)});
  ASSERT_FALSE(r.holds);
  EXPECT_EQ(*r.witness, (RationalWitness{q(0), q(1), q(1, 2)}));
  EXPECT_TRUE(check_rational_points(RationalGroupDescriptor(1, {3}), {q(0), q(1)}).holds);
}

TEST(RationalDescription, Check) {
  const RationalGroupDescriptor z(1, {});
  const auto bad = make_description(QIntervalSpec::closed(0, 10), RationalGroupDescriptor(2, {}), 0, z);
  const auto r = check_rational_description(bad, z);
  ASSERT_FALSE(r.holds);
  EXPECT_EQ(*r.witness, (RationalWitness{q(0), q(2), q(1)}));

  const auto single = make_description(QIntervalSpec::closed(4, 4), RationalGroupDescriptor(2, {}), 4, z);
  EXPECT_TRUE(check_rational_description(single, z).holds);

  const RationalGroupDescriptor dyadic(1, {2});
  const auto dense = make_description(QIntervalSpec{q(0), q(1, 1000), true, false}, RationalGroupDescriptor(1, {3}),
                                      0, RationalGroupDescriptor(1, {2, 3}));
  const auto dr = check_rational_description(dense, RationalGroupDescriptor(1, {2, 3}));
  ASSERT_FALSE(dr.holds);
  EXPECT_TRUE(dense.contains(dr.witness->y));
  EXPECT_FALSE(dense.contains(dr.witness->z));

  const auto good = make_description(QIntervalSpec::closed(0, 1), dyadic, 0, dyadic);
  EXPECT_TRUE(check_rational_description(good, dyadic).holds);
}

TEST(Theorem3If, Examples) {
  const RationalGroupDescriptor dyadic(1, {2});
  const auto d = make_description(QIntervalSpec::closed(0, 1), dyadic, 0, dyadic);
  const auto r = verify_theorem3_if(d, dyadic, 1000, 1);
  EXPECT_TRUE(r.holds);
  EXPECT_EQ(r.pairs, 1000);
  EXPECT_EQ(r.admissible, 1000);

  const RationalGroupDescriptor z(1, {});
  const auto ap = make_description(QIntervalSpec::closed(0, 10), RationalGroupDescriptor(3, {}), 0, z);
  const auto s = verify_theorem3_if(ap, z, 1000, 2);
  EXPECT_TRUE(s.holds);
  EXPECT_GT(s.admissible, 0);
  EXPECT_LT(s.admissible, 1000);

  const auto bad = make_description(QIntervalSpec::closed(0, 10), RationalGroupDescriptor(2, {}), 0, z);
  EXPECT_THROW(verify_theorem3_if(bad, z, 10, 1), PreconditionError);
}

TEST(Theorem3If, SamplesStayInsideTheSet) {
  const RationalGroupDescriptor g(1, {2, 3});
  const auto d = make_description(QIntervalSpec{q(-1, 3), q(5, 2), false, true}, RationalGroupDescriptor(5, {2, 3}),
                                  q(1, 6), RationalGroupDescriptor(1, {2, 3}));
  Rng rng(3);
  for (int i = 0; i < 500; ++i) EXPECT_TRUE(d.contains(sample_description_point(d, rng)));
  EXPECT_EQ(verify_theorem3_if(d, g, 200, 9).pairs, 200);
}

TEST(DecomposeRational, DyadicInterval) {
  const RationalGroupDescriptor dyadic(1, {2});
  auto in_x = [](const Rational& r) { return r >= 0 && r <= 1; };
  RationalDecomposeOptions opt;
  opt.window = QIntervalSpec::closed(-1, 2);
  const auto r = decompose_rational(dyadic, in_x, q(0), q(1), opt);
  EXPECT_EQ(r.description.interval, QIntervalSpec::closed(0, 1));
  EXPECT_EQ(r.description.subgroup, dyadic);
  EXPECT_EQ(r.levels.size(), 5U);
  for (const auto& level : r.levels) EXPECT_EQ(level.multiplier, 1);
}

TEST(DecomposeRational, IntegerProgression) {
  const RationalGroupDescriptor z(1, {});
  const std::set<Rational> pts{q(0), q(3), q(6), q(9)};
  auto in_x = [&](const Rational& r) { return pts.count(r) != 0; };
  RationalDecomposeOptions opt;
  opt.window = QIntervalSpec::closed(-3, 12);
  const auto r = decompose_rational(z, in_x, q(0), q(3), opt);
  EXPECT_EQ(r.description.interval, QIntervalSpec::closed(0, 9));
  EXPECT_EQ(r.description.subgroup, RationalGroupDescriptor(3, {}));
}

TEST(DecomposeRational, MissingMidpointIsRejected) {
  const RationalGroupDescriptor dyadic(1, {2});
  auto in_x = [](const Rational& r) { return r == 0 || r == 1; };
  RationalDecomposeOptions opt;
  opt.window = QIntervalSpec::closed(-1, 2);
  EXPECT_THROW(decompose_rational(dyadic, in_x, q(0), q(1), opt), NotMidconvexError);
}

TEST(DecomposeRational, PrimeThatNeverEnlargesIsDropped) {
  // X = [0,5] ∩ Z inside Z[1/3]: refining by 3 never adds points.
  const RationalGroupDescriptor g(1, {3});
  auto in_x = [](const Rational& r) { return is_integer(r) && r >= 0 && r <= 5; };
  RationalDecomposeOptions opt;
  opt.depth = 3;
  opt.window = QIntervalSpec::closed(-2, 7);
  const auto r = decompose_rational(g, in_x, q(0), q(1), opt);
  EXPECT_EQ(r.description.subgroup, RationalGroupDescriptor(1, {}));
  EXPECT_EQ(r.levels.back().multiplier, 27);
  EXPECT_EQ(r.description.interval, QIntervalSpec::closed(0, 5));
}

TEST(DecomposeRational, TriadicDenseSet) {
  const RationalGroupDescriptor g(1, {3});
  auto in_x = [](const Rational& r) { return r >= 0 && r <= 2; };
  RationalDecomposeOptions opt;
  opt.depth = 3;
  opt.window = QIntervalSpec::closed(-1, 3);
  const auto r = decompose_rational(g, in_x, q(0), q(1), opt);
  EXPECT_EQ(r.description.subgroup, g);
  EXPECT_EQ(r.description.interval, QIntervalSpec::closed(0, 2));
}

// Membership of the recovered description agrees with the source set on the
// deepest lattice inside the window.
TEST(DecomposeRational, RoundTripOnDeepestLattice) {
  struct Case {
    RationalGroupDescriptor g;
    RationalMidconvexDescription truth;
    Rational x2;
  };
  const RationalGroupDescriptor g23(1, {2, 3});
  const RationalGroupDescriptor g5(1, {5});
  const std::vector<Case> cases = {
      {g23, make_description(QIntervalSpec{q(-1, 2), q(7, 3), false, true}, RationalGroupDescriptor(1, {2}), 0, g23),
       q(1)},
      {g5, make_description(QIntervalSpec::closed(q(-7, 5), 4), RationalGroupDescriptor(3, {5}), q(1, 5), g5), q(16, 5)},
      {g5, make_description(QIntervalSpec::closed(-10, 10), RationalGroupDescriptor(7, {}), 1, g5), q(8)},
  };
  for (const auto& c : cases) {
    auto in_x = [&](const Rational& r) { return c.truth.contains(r); };
    RationalDecomposeOptions opt;
    opt.depth = 4;
    const auto h = c.truth.subgroup.gen();
    opt.window = QIntervalSpec::closed(c.truth.base - 12 * h, c.truth.base + 12 * h);
    const auto r = decompose_rational(c.g, in_x, c.truth.base, c.x2, opt);
    const auto step = r.levels.back().step;
    for (auto k = ceil(Rational(*opt.window.lower / step)); k <= floor(Rational(*opt.window.upper / step)); ++k) {
      const Rational p = step * Rational(k);
      ASSERT_EQ(r.description.contains(p), c.truth.contains(p)) << to_string(r.description) << " at " << to_string(p);
    }
    EXPECT_TRUE(is_two_pure(r.description.subgroup, c.g));
  }
}

TEST(DecomposeRational, Preconditions) {
  const RationalGroupDescriptor z(1, {});
  auto all = [](const Rational&) { return true; };
  RationalDecomposeOptions opt;
  opt.window = QIntervalSpec::closed(-5, 5);
  EXPECT_THROW(decompose_rational(z, all, q(1), q(0), opt), PreconditionError);
  EXPECT_THROW(decompose_rational(z, all, q(0), q(1, 2), opt), PreconditionError);
  EXPECT_THROW(decompose_rational(z, all, q(0), q(9), opt), PreconditionError);
  opt.window = QIntervalSpec{q(-5), std::nullopt};
  EXPECT_THROW(decompose_rational(z, all, q(0), q(1), opt), PreconditionError);
  opt.window = QIntervalSpec::closed(-5, 5);
  opt.max_points = 4;
  EXPECT_THROW(decompose_rational(z, all, q(0), q(1), opt), ResourceCapError);
}

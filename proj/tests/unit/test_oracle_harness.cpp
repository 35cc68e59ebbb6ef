#include "midconvex/oracle_harness.hpp"

#include <gtest/gtest.h>

#include <map>
#include <set>

using namespace midconvex;

namespace {

Rational q(std::int64_t a, std::int64_t b = 1) { return Rational(a, b); }

// Oracle: partitions of e by the usual recurrence.
std::int64_t partition_count(int e) {
  std::vector<std::int64_t> p(static_cast<std::size_t>(e) + 1, 0);
  p[0] = 1;
  for (int part = 1; part <= e; ++part) {
    for (int s = part; s <= e; ++s) p[static_cast<std::size_t>(s)] += p[static_cast<std::size_t>(s - part)];
  }
  return p[static_cast<std::size_t>(e)];
}

std::int64_t class_count(std::int64_t n) {
  std::int64_t c = 1;
  for (std::int64_t p = 2; p <= n; ++p) {
    int e = 0;
    while (n % p == 0) {
      n /= p;
      ++e;
    }
    c *= partition_count(e);
  }
  return c;
}

// Element-order histogram; distinguishes finite Abelian groups up to isomorphism.
std::map<std::int64_t, std::int64_t> order_histogram(const FiniteAbelianGroup& g) {
  std::map<std::int64_t, std::int64_t> h;
  for (const auto& a : g.elements()) ++h[g.element_order(a)];
  return h;
}

void expect_same(const VerificationReport& a, const VerificationReport& b) {
  EXPECT_EQ(a.campaign, b.campaign);
  EXPECT_EQ(a.groups, b.groups);
  EXPECT_EQ(a.subsets, b.subsets);
  EXPECT_EQ(a.samples, b.samples);
  EXPECT_EQ(a.mismatches, b.mismatches);
  EXPECT_EQ(a.notes, b.notes);
  ASSERT_EQ(a.tallies.size(), b.tallies.size());
  for (std::size_t i = 0; i < a.tallies.size(); ++i) {
    EXPECT_EQ(a.tallies[i].group, b.tallies[i].group);
    EXPECT_EQ(a.tallies[i].subsets, b.tallies[i].subsets);
    EXPECT_EQ(a.tallies[i].positives, b.tallies[i].positives);
  }
}

}  // namespace

TEST(EnumerateGroups, Examples) {
  const auto one = enumerate_abelian_groups(1);
  ASSERT_EQ(one.size(), 1U);
  EXPECT_EQ(one[0].order(), 1);

  std::vector<std::vector<std::int64_t>> order8;
  std::int64_t order6 = 0;
  for (const auto& g : enumerate_abelian_groups(8)) {
    if (g.order() == 8) order8.push_back(g.orders());
    if (g.order() == 6) ++order6;
  }
  EXPECT_EQ(order8, (std::vector<std::vector<std::int64_t>>{{8}, {4, 2}, {2, 2, 2}}));
  EXPECT_EQ(order6, 1);
  EXPECT_THROW(enumerate_abelian_groups(0), PreconditionError);
}

TEST(EnumerateGroups, OneRepresentativePerClass) {
  const auto groups = enumerate_abelian_groups(64);
  std::map<std::int64_t, std::set<std::map<std::int64_t, std::int64_t>>> seen;
  std::int64_t last = 0;
  for (const auto& g : groups) {
    ASSERT_GE(g.order(), last);
    last = g.order();
    ASSERT_TRUE(seen[g.order()].insert(order_histogram(g)).second) << to_string(g);
  }
  for (std::int64_t n = 1; n <= 64; ++n) {
    EXPECT_EQ(static_cast<std::int64_t>(seen[n].size()), class_count(n)) << n;
  }
}

TEST(Theorem2Sweep, SmallOrderCounts) {
  const auto r = exhaustive_theorem2(5);
  EXPECT_TRUE(r.passed());
  std::map<std::string, std::int64_t> positives;
  for (const auto& t : r.tallies) positives[t.group] = t.positives;
  EXPECT_EQ(positives.at("Z(4)"), 2);
  EXPECT_EQ(positives.at("Z(5)"), 7);
  EXPECT_EQ(positives.at("Z(1)"), 2);
  EXPECT_EQ(r.groups, 6);
  EXPECT_EQ(r.subsets, 2 + 4 + 8 + 16 + 16 + 32);
}

TEST(Theorem2Sweep, FullDefaultRangePasses) {
  CampaignConfig cfg;
  cfg.jobs = 4;
  const auto r = exhaustive_theorem2(12, cfg);
  EXPECT_TRUE(r.passed());
  EXPECT_EQ(r.groups, 17);
}

TEST(Theorem1Sweep, PassesAndFlagsEvenTrace) {
  const auto r = exhaustive_theorem1(8);
  EXPECT_TRUE(r.passed());
  const auto z4 = make_group({4});
  GroupSubset x(z4);
  x.insert(z4.zero());
  const auto v = theorem1_verdict(x);
  EXPECT_FALSE(v.positive);
  EXPECT_FALSE(v.mismatch.has_value());
  const auto trivial = exhaustive_theorem1(1);
  EXPECT_TRUE(trivial.passed());
  EXPECT_EQ(trivial.subsets, 2);
}

TEST(Lemma1Sweep, MidconvexSubsetsPass) {
  const auto r = exhaustive_lemma1(8);
  EXPECT_TRUE(r.passed());
  std::int64_t positives = 0;
  for (const auto& t : r.tallies) positives += t.positives;
  EXPECT_GT(positives, 0);
}

TEST(Lemma1Sweep, LiftedTraceOfNonMidconvexSetHasGap) {
  // {0, 2} in Z(5) is not midconvex; its line trace from 0 through 2 is {..,0,1,5,6,..}.
  const auto z5 = make_group({5});
  const auto x = GroupSubset::from_mask(z5, 0b00101);
  const auto t = lifted_line_trace(x, z5.element_at(0), z5.element_at(2));
  EXPECT_EQ(t.lo(), -10);
  EXPECT_EQ(t.hi(), 10);
  EXPECT_FALSE(is_order_convex(t));
  EXPECT_TRUE(t.contains(0) && t.contains(1) && !t.contains(2) && t.contains(5));
}

TEST(Sweep, SampledRangeAndDeterminism) {
  CampaignConfig cfg;
  cfg.exhaustive_limit = 6;
  cfg.sampled_limit = 10;
  cfg.sampled_subsets = 700;
  cfg.seed = 42;
  const auto a = exhaustive_theorem2(10, cfg);
  cfg.jobs = 3;
  const auto b = exhaustive_theorem2(10, cfg);
  expect_same(a, b);
  EXPECT_TRUE(a.passed());
  EXPECT_FALSE(a.elapsed_ms.has_value());
  for (const auto& t : a.tallies) {
    if (!t.exhaustive) {
      EXPECT_EQ(t.subsets, 700);
    }
  }
  cfg.seed = 43;
  const auto c = exhaustive_theorem2(10, cfg);
  bool differs = false;
  for (std::size_t i = 0; i < a.tallies.size(); ++i) differs = differs || a.tallies[i].positives != c.tallies[i].positives;
  EXPECT_TRUE(differs);
}

TEST(Sweep, RejectsOrdersAboveTheLimit) { EXPECT_THROW(exhaustive_theorem2(25), ResourceCapError); }

TEST(Sweep, TimingIsOptIn) {
  CampaignConfig cfg;
  cfg.timing = true;
  EXPECT_TRUE(exhaustive_theorem2(3, cfg).elapsed_ms.has_value());
}

TEST(Purity, Examples) {
  Rng rng(1);
  const RationalGroupDescriptor z(1, {});
  EXPECT_TRUE(is_two_pure(RationalGroupDescriptor(3, {}), z));
  EXPECT_FALSE(sample_purity_violation(RationalGroupDescriptor(3, {}), z, 200, rng).has_value());

  const RationalGroupDescriptor dyadic(1, {2});
  EXPECT_FALSE(is_two_pure(z, dyadic));
  const auto v = sample_purity_violation(z, dyadic, 200, rng);
  ASSERT_TRUE(v.has_value());
  EXPECT_FALSE(member(*v, z));
  EXPECT_TRUE(member(2 * *v, z));
  EXPECT_EQ(den(*v), 2);

  for (const auto& g : {z, dyadic, RationalGroupDescriptor(q(2, 3), {3, 5})}) {
    EXPECT_TRUE(is_two_pure(g, g));
    EXPECT_FALSE(sample_purity_violation(g, g, 200, rng).has_value());
  }
}

TEST(Purity, CampaignPassesAndIsDeterministic) {
  const auto a = sample_two_purity(100, 7);
  EXPECT_TRUE(a.passed());
  EXPECT_EQ(a.groups, 100);
  EXPECT_EQ(a.samples, 100 * 200);
  expect_same(a, sample_two_purity(100, 7));
}

TEST(BoundedClosure, Examples) {
  const RationalGroupDescriptor z(1, {});
  const auto a = bounded_closure_oracle(z, {q(0), q(3)}, 10);
  EXPECT_TRUE(a.complete);
  EXPECT_EQ(a.points, (std::set<Rational>{q(0), q(3)}));

  const auto b = bounded_closure_oracle(z, {q(0), q(2)}, 10);
  EXPECT_TRUE(b.complete);
  EXPECT_EQ(b.points, (std::set<Rational>{q(0), q(1), q(2)}));

  const RationalGroupDescriptor dyadic(1, {2});
  for (std::int64_t iters : {1, 3, 6}) {
    const auto c = bounded_closure_oracle(dyadic, {q(0), q(1)}, iters);
    EXPECT_FALSE(c.complete);
    EXPECT_EQ(static_cast<std::int64_t>(c.points.size()), (std::int64_t{1} << iters) + 1);
  }
  EXPECT_THROW(bounded_closure_oracle(z, {q(1, 2)}, 1), PreconditionError);
}

TEST(BoundedClosure, StaysBetweenExtremes) {
  const RationalGroupDescriptor g(1, {2, 3});
  const std::vector<Rational> start{q(-1, 3), q(1, 2), q(2)};
  const auto c = bounded_closure_oracle(g, start, 4);
  for (const auto& p : c.points) {
    EXPECT_GE(p, q(-1, 3));
    EXPECT_LE(p, q(2));
  }
}

TEST(Hull, Examples) {
  const RationalGroupDescriptor z(1, {});
  const auto a = conjecture_hull_check(z, {q(0), q(2)}, 10, 200, 1);
  EXPECT_EQ(a.candidate, make_description(QIntervalSpec::closed(0, 2), z, 0, z));
  EXPECT_TRUE(a.report.passed());
  EXPECT_TRUE(a.oracle.complete);

  const RationalGroupDescriptor dyadic(1, {2});
  const auto b = conjecture_hull_check(dyadic, {q(0), q(1)}, 3, 200, 1);
  EXPECT_EQ(b.candidate, make_description(QIntervalSpec::closed(0, 1), dyadic, 0, dyadic));
  EXPECT_TRUE(b.report.passed());
  EXPECT_FALSE(b.oracle.complete);
  EXPECT_GT(b.unfalsified, 0);

  const auto c = conjecture_hull_check(z, {q(5)}, 3, 50, 1);
  EXPECT_TRUE(c.report.passed());
  EXPECT_EQ(c.oracle.points, (std::set<Rational>{q(5)}));
  EXPECT_TRUE(c.candidate.contains(q(5)));
  EXPECT_FALSE(c.candidate.contains(q(6)));
}

TEST(Hull, SpanGetsPureClosure) {
  // <{0,2,6} - 0> = 2Z, whose 2-pure closure in Z is Z: the hull is [0,6] ∩ Z.
  const RationalGroupDescriptor z(1, {});
  const auto r = conjecture_hull_check(z, {q(0), q(2), q(6)}, 10, 300, 4);
  EXPECT_EQ(r.candidate.subgroup, z);
  EXPECT_TRUE(r.oracle.complete);
  EXPECT_EQ(r.oracle.points.size(), 7U);
  EXPECT_TRUE(r.report.passed());
}

TEST(SyntheticCases, AreWellFormed) {
  Rng rng(3);
  for (int i = 0; i < 200; ++i) {
    const auto c = make_synthetic_case(rng);
    EXPECT_TRUE(is_two_pure(c.truth.subgroup, c.ambient));
    EXPECT_TRUE(c.truth.contains(c.truth.base));
    EXPECT_TRUE(c.truth.contains(c.second));
    EXPECT_LT(c.truth.base, c.second);
  }
}

TEST(Theorem3Roundtrip, SmallCampaign) {
  const auto r = theorem3_roundtrip(10, 100, 5);
  EXPECT_TRUE(r.passed());
  EXPECT_EQ(r.groups, 10);
  EXPECT_EQ(r.samples, 1000);
  expect_same(r, theorem3_roundtrip(10, 100, 5));
}

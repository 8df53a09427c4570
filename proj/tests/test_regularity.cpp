#include <gtest/gtest.h>

#include <cmath>

#include "altbd/error.hpp"
#include "altbd/regularity.hpp"
#include "support/random_rates.hpp"

namespace altbd {
namespace {

using Kind = RegularityVerdict::Kind;

RateSet with_up(const std::string& up) {
  const auto one = RateSpec::constant(1.0);
  const auto u = parse_rate_expr(up);
  return RateSet({u, one, one, one, one, one}, Topology::one_sided());
}

TEST(ReuterCoeffs, AllOnes) {
  const auto c = reuter_coeffs(RateSet::uniform(1.0, Topology::one_sided()), 0);
  EXPECT_DOUBLE_EQ(c.D, 1.0);
  EXPECT_DOUBLE_EQ(c.E, 2.0);
  EXPECT_FALSE(c.B_minus.has_value());
  const auto t = reuter_coeffs(RateSet::uniform(1.0, Topology::two_sided()), 1);
  ASSERT_TRUE(t.B_minus.has_value());
  EXPECT_DOUBLE_EQ(*t.B_minus, 1.0);
  EXPECT_DOUBLE_EQ(*t.C_minus, 2.0);
}

TEST(ReuterRecursion, FirstStep) {
  const auto r = RateSet::uniform(1.0, Topology::one_sided());
  const auto trace = reuter_recursion_one_sided(r, 1);
  ASSERT_EQ(trace.iterates.size(), 2u);
  EXPECT_DOUBLE_EQ(trace.iterates[0].y_b, 1.0);
  EXPECT_DOUBLE_EQ(trace.iterates[0].y_d, 0.5);
  EXPECT_DOUBLE_EQ(trace.iterates[1].y_b, 2.5);
  EXPECT_DOUBLE_EQ(trace.iterates[1].y_d, 1.0);
  EXPECT_FALSE(trace.exact_fallback);

  const auto exact = reuter_recursion_one_sided_exact(r, 1);
  ASSERT_EQ(exact.size(), 2u);
  EXPECT_EQ(exact[0].y_d, "1/2");
  EXPECT_EQ(exact[1].y_b, "5/2");
  EXPECT_EQ(exact[1].y_d, "1");

  const auto b = reuter_bounds(r, 0);
  EXPECT_NEAR(b.lower(), 2.0, 1e-15);
  EXPECT_NEAR(b.upper(), 3.0, 1e-15);
}

TEST(ReuterRecursion, ExactAgreesWithDouble) {
  testing::Rng rng(3);
  for (int i = 0; i < 10; ++i) {
    const auto r = testing::random_rate_set(rng, Topology::one_sided());
    const auto d = reuter_recursion_one_sided(r, 8);
    const auto e = reuter_recursion_one_sided_exact(r, 8);
    ASSERT_EQ(d.iterates.size(), e.size());
    for (std::size_t k = 0; k < e.size(); ++k) {
      const auto to_double = [](const std::string& s) {
        const auto slash = s.find('/');
        if (slash == std::string::npos) return std::stod(s);
        return std::stod(s.substr(0, slash)) / std::stod(s.substr(slash + 1));
      };
      EXPECT_NEAR(to_double(e[k].y_b) / d.iterates[k].y_b, 1.0, 1e-9);
      EXPECT_NEAR(to_double(e[k].y_d) / d.iterates[k].y_d, 1.0, 1e-9);
    }
  }
}

TEST(ReuterRecursion, SandwichMonotoneAndResidual) {
  testing::Rng rng(4);
  for (int i = 0; i < 30; ++i) {
    const auto r = testing::random_rate_set(rng, Topology::one_sided());
    const auto trace = reuter_recursion_one_sided(r, 40);
    const auto& it = trace.iterates;
    for (std::size_t k = 1; k < it.size(); ++k) {
      EXPECT_GT(it[k].y_b, it[k - 1].y_b);
      EXPECT_GE(it[k].y_b, it[k].y_d);
      const auto b = reuter_bounds(r, static_cast<Level>(k) - 1);
      EXPECT_GE(std::log(it[k].y_b), b.log_lower - 1e-9);
      EXPECT_LE(std::log(it[k].y_b), b.log_upper + 1e-9);
    }
    EXPECT_LT(reuter_residual(r, it), 1e-9);
  }
}

TEST(ReuterRecursion, ConstantRatesRaiseFirstDeathIterate) {
  // With constant rates y(1,d) - y(0,d) is a positive multiple of nu.
  testing::Rng rng(8);
  for (int i = 0; i < 200; ++i) {
    const auto c = [&] { return RateSpec::constant(rng.log_uniform(0.01, 100.0)); };
    const RateSet r({c(), c(), c(), c(), c(), c()}, Topology::one_sided());
    const auto it = reuter_recursion_one_sided(r, 1).iterates;
    EXPECT_GT(it[1].y_d, it[0].y_d);
  }
}

TEST(Regularity, AllOnesNonExplosive) {
  const auto v = regularity(RateSet::uniform(1.0, Topology::one_sided()));
  EXPECT_EQ(v.verdict, Kind::kNonExplosive);
  EXPECT_FALSE(v.series.empty());
}

TEST(Regularity, LinearGrowthNonExplosive) {
  EXPECT_EQ(regularity(with_up("n + 1")).verdict, Kind::kNonExplosive);
}

TEST(Regularity, ExponentialGrowthExplosive) {
  EXPECT_EQ(regularity(with_up("2^n")).verdict, Kind::kExplosive);
}

TEST(Regularity, FastSkipFreeJumpsDoNotExplode) {
  // kappa_n = lambda_n: half the jumps leave phase B, so the div series terms tend to 1/5.
  const auto one = RateSpec::constant(1.0);
  const auto u = parse_rate_expr("2^n");
  const RateSet r({u, one, one, one, u, one}, Topology::one_sided());
  EXPECT_EQ(regularity(r).verdict, Kind::kNonExplosive);
}

TEST(Regularity, FiniteTrivial) {
  EXPECT_EQ(regularity(RateSet::uniform(1.0, Topology::finite(4))).verdict, Kind::kNonExplosive);
}

TEST(Regularity, TwoSidedNeverExplosive) {
  EXPECT_EQ(regularity(RateSet::uniform(1.0, Topology::two_sided())).verdict, Kind::kNonExplosive);
  const auto one = RateSpec::constant(1.0);
  const auto fast = parse_rate_expr("2^abs(n)");
  const RateSet r({fast, fast, one, one, fast, fast}, Topology::two_sided());
  EXPECT_NE(regularity(r).verdict, Kind::kExplosive);
}

TEST(TwoSidedRecursion, AllOnesAnchors) {
  const auto r = RateSet::uniform(1.0, Topology::two_sided());
  const auto a = two_sided_recursion(r, 0, 1.0, 0.5, 3);
  ASSERT_GE(a.up.size(), 2u);
  EXPECT_DOUBLE_EQ(a.up[1].y_b, 2.5);
  EXPECT_DOUBLE_EQ(a.up[1].y_d, 1.0);
  const auto b = two_sided_recursion(r, 0, 0.5, 1.0, 3);
  ASSERT_GE(b.down.size(), 2u);
  EXPECT_DOUBLE_EQ(b.down[1].y_d, 2.5);
  EXPECT_DOUBLE_EQ(b.down[1].y_b, 1.0);
  const auto c = two_sided_recursion(r, 0, 1.0, 1.0, 3);
  ASSERT_EQ(c.up.size(), 4u);
  const double yb[] = {1, 2, 5, 13};
  const double yd[] = {1, 1, 2, 5};
  for (std::size_t k = 0; k < 4; ++k) {
    EXPECT_DOUBLE_EQ(c.up[k].y_b, yb[k]);
    EXPECT_DOUBLE_EQ(c.up[k].y_d, yd[k]);
  }
  EXPECT_EQ(c.up_monotone_from, 0);
  EXPECT_EQ(c.down_monotone_from, 0);
  EXPECT_LT(reuter_residual(r, a.up), 1e-12);
}

}  // namespace
}  // namespace altbd

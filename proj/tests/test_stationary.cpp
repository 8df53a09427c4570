#include <gtest/gtest.h>

#include <cmath>

#include "altbd/error.hpp"
#include "altbd/presets.hpp"
#include "altbd/stationary.hpp"
#include "support/oracles.hpp"
#include "support/random_rates.hpp"

namespace altbd {
namespace {

using testing::rel_diff;
using testing::Rng;

ErrorKind kind_of(const std::function<void()>& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.kind();
  }
  ADD_FAILURE() << "expected an altbd::Error";
  return ErrorKind::kInvalidArgument;
}

// Cut identity in log space for every adjacent pair of the table.
double max_cut_violation(const WeightTable& w, const RateSet& r) {
  double worst = 0.0;
  for (Level n = w.n_min(); n < w.n_max(); ++n) {
    const double lhs = w.log_weight(n, Phase::B) + std::log(aggregates(r, n).up);
    const double rhs = w.log_weight(n + 1, Phase::D) + std::log(aggregates(r, n + 1).down);
    worst = std::max(worst, std::fabs(lhs - rhs));
  }
  return worst;
}

TEST(OneSidedWeights, AllOnes) {
  const auto r = RateSet::uniform(1.0, Topology::one_sided());
  const auto w = one_sided_weights(r, 40);
  EXPECT_DOUBLE_EQ(w.weight(0, Phase::D), 1.0);
  for (Level n = 0; n <= 40; ++n) EXPECT_NEAR(w.weight(n, Phase::B), 0.5, 1e-15);
  for (Level n = 1; n <= 40; ++n) EXPECT_NEAR(w.weight(n, Phase::D), 0.5, 1e-15);
  // Dense oracle on a truncation agrees away from the cap.
  const auto dense = dense_balance_solve(r, 0, 40);
  const double scale = dense.probability(0, Phase::D);
  for (Level n = 0; n < 40; ++n) {
    EXPECT_LT(rel_diff(dense.probability(n, Phase::B) / scale, w.weight(n, Phase::B)), 1e-10);
    if (n > 0) EXPECT_LT(rel_diff(dense.probability(n, Phase::D) / scale, w.weight(n, Phase::D)), 1e-10);
  }
}

TEST(OneSidedWeights, DamPreset) {
  const auto r = dam_rate_set({1.0, 3.0, 1.0, 1.0});
  const auto w = one_sided_weights(r, 30);
  for (Level n = 0; n <= 30; ++n) {
    EXPECT_LT(rel_diff(w.weight(n, Phase::B), 0.5 * std::pow(0.75, n)), 1e-13);
    if (n > 0) EXPECT_LT(rel_diff(w.weight(n, Phase::D), 0.25 * std::pow(0.75, n - 1)), 1e-13);
  }
}

TEST(OneSidedWeights, FalinRetrial) {
  RetrialParams p;
  p.arrival_busy = RateSpec::constant(1.0);
  p.arrival_idle = RateSpec::constant(1.0);
  p.service = RateSpec::constant(3.0);
  p.retrial = RateSpec::constant(1.0);
  const auto w = one_sided_weights(retrial_rate_set(p), 30);
  for (Level n = 0; n <= 30; ++n) {
    EXPECT_LT(rel_diff(w.weight(n, Phase::B), std::pow(2.0 / 3.0, n) / 3.0), 1e-13);
    if (n > 0) EXPECT_LT(rel_diff(w.weight(n, Phase::D), 0.5 * std::pow(2.0 / 3.0, n)), 1e-13);
  }
}

TEST(TwoSidedWeights, BalancedTelegraph) {
  const auto r = telegraph_rate_set({});
  const auto w = two_sided_weights(r, -20, 20);
  for (Level n = -20; n <= 20; ++n) {
    EXPECT_NEAR(w.log_weight(n, Phase::B), 0.0, 1e-13);
    EXPECT_NEAR(w.log_weight(n, Phase::D), 0.0, 1e-13);
  }
}

TEST(TwoSidedWeights, TelegraphRatio) {
  TelegraphParams p;
  p.to_left = RateSpec::constant(3.0);
  const auto r = telegraph_rate_set(p);
  const auto w = two_sided_weights(r, -20, 20);
  for (Level n = 2; n <= 20; ++n) {
    EXPECT_NEAR(std::exp(w.log_weight(n, Phase::B) - w.log_weight(n - 1, Phase::B)), 0.5, 1e-13);
  }
  const auto dense = dense_balance_solve(r, -20, 20);
  const double scale = dense.probability(0, Phase::B);
  for (Level n = -19; n <= 19; ++n) {
    for (Phase ph : {Phase::B, Phase::D}) {
      EXPECT_LT(rel_diff(dense.probability(n, ph) / scale, w.weight(n, ph)), 1e-10) << n;
    }
  }
  EXPECT_LT(max_cut_violation(w, r), 1e-12);
  EXPECT_LT(balance_residual(w, r), 1e-10);
}

TEST(FiniteWeights, TwoLevels) {
  const auto r = RateSet::uniform(1.0, Topology::finite(2));
  const auto w = finite_weights(r);
  EXPECT_NEAR(w.weight(0, Phase::D), 1.0, 1e-15);
  EXPECT_NEAR(w.weight(0, Phase::B), 0.5, 1e-15);
  EXPECT_NEAR(w.weight(1, Phase::B), 0.5, 1e-15);
  EXPECT_NEAR(w.weight(1, Phase::D), 0.5, 1e-15);
  EXPECT_NEAR(w.weight(2, Phase::B), 1.0, 1e-15);
  EXPECT_NEAR(w.weight(2, Phase::D), 0.5, 1e-15);
  const auto d = normalize(w, {});
  EXPECT_NEAR(std::exp(d.log_normalizer), 4.0, 1e-14);
  EXPECT_NEAR(d.probability(2, Phase::B), 0.25, 1e-15);
  EXPECT_EQ(d.tail_error, 0.0);
}

TEST(FiniteWeights, OneLevel) {
  const auto w = finite_weights(RateSet::uniform(1.0, Topology::finite(1)));
  EXPECT_NEAR(w.weight(1, Phase::B), 1.0, 1e-15);
  EXPECT_NEAR(w.weight(1, Phase::D), 0.5, 1e-15);
}

TEST(FiniteWeights, AsymmetricBoundary) {
  // beta_N and delta_N away from 1 exercise the boundary formula.
  const RateSet r({RateSpec::constant(0.7), RateSpec::constant(1.3), RateSpec::constant(2.5), RateSpec::constant(0.4),
                   RateSpec::constant(0.9), RateSpec::constant(1.7)},
                  Topology::finite(3));
  const auto w = finite_weights(r);
  const auto d = dense_balance_solve(r, 0, 3);
  const auto n = normalize(w, {});
  for (Level k = 0; k <= 3; ++k) {
    for (Phase p : {Phase::B, Phase::D}) EXPECT_LT(rel_diff(n.probability(k, p), d.probability(k, p)), 1e-12);
  }
}

TEST(Weights, DegenerateDenominator) {
  const auto zero = RateSpec::constant(0.0);
  const auto one = RateSpec::constant(1.0);
  // Lambda_0 mu_1 + M_1 delta_0 = 0 with mu = nu = 0.
  const RateSet r({one, zero, one, one, zero, zero}, Topology::one_sided(), true);
  EXPECT_EQ(kind_of([&] { one_sided_weights(r, 3); }), ErrorKind::kDegenerateDenominator);
}

TEST(Normalize, DamCertificate) {
  const auto r = dam_rate_set({1.0, 3.0, 1.0, 1.0});
  const auto d = normalize(one_sided_weights(r, 60), {{0, 0.75, TailSide::kPositive}});
  EXPECT_NEAR(d.probability(0, Phase::D), 0.25, 1e-7);
  EXPECT_LT(d.tail_error, 1e-7);
  EXPECT_GE(d.total_mass() + d.tail_error, 1.0 - 1e-12);
  EXPECT_LE(d.total_mass(), 1.0 + 1e-12);
}

TEST(Normalize, Errors) {
  const auto ones = RateSet::uniform(1.0, Topology::one_sided());
  const auto w = one_sided_weights(ones, 20);
  EXPECT_EQ(kind_of([&] { normalize(w, {}); }), ErrorKind::kMissingCertificate);
  for (double rho : {0.5, 0.9, 0.999999}) {
    EXPECT_EQ(kind_of([&] { normalize(w, {{0, rho, TailSide::kPositive}}); }), ErrorKind::kCertificateViolated);
  }
  EXPECT_EQ(kind_of([&] { normalize(w, {{20, 0.5, TailSide::kPositive}}); }), ErrorKind::kInvalidArgument);
  TelegraphParams p;
  p.to_left = parse_rate_expr("1 + 2*min(1, max(0, n))");
  p.to_right = parse_rate_expr("1 + 2*min(1, max(0, -n))");
  const auto two = two_sided_weights(telegraph_rate_set(p), -5, 5);
  EXPECT_EQ(kind_of([&] { normalize(two, {{1, 0.5, TailSide::kPositive}}); }), ErrorKind::kMissingCertificate);
}

TEST(Normalize, TwoSidedGeometricTails) {
  // Telegraph with drift towards 0 from both sides.
  TelegraphParams p;
  p.to_left = parse_rate_expr("1 + 2*min(1, max(0, n))");
  p.to_right = parse_rate_expr("1 + 2*min(1, max(0, -n))");
  const auto r = telegraph_rate_set(p);
  const auto w = two_sided_weights(r, -60, 60);
  const auto d = normalize(w, {{1, 0.5, TailSide::kPositive}, {1, 0.5, TailSide::kNegative}});
  EXPECT_LT(d.tail_error, 1e-15);
  const auto dense = dense_balance_solve(r, -60, 60);
  for (Level n = -10; n <= 10; ++n) {
    EXPECT_LT(rel_diff(d.probability(n, Phase::B), dense.probability(n, Phase::B)), 1e-10);
  }
}

TEST(BalanceResidual, ClosedFormsSolveBalance) {
  Rng rng(7);
  for (int i = 0; i < 20; ++i) {
    const auto r1 = testing::random_rate_set(rng, Topology::one_sided());
    EXPECT_LT(balance_residual(one_sided_weights(r1, 40), r1), 1e-10);
    const auto r2 = testing::random_rate_set(rng, Topology::two_sided());
    EXPECT_LT(balance_residual(two_sided_weights(r2, -20, 20), r2), 1e-10);
    const auto r3 = testing::random_rate_set(rng, Topology::finite(5));
    EXPECT_LT(balance_residual(finite_weights(r3), r3), 1e-10);
  }
}

TEST(BalanceResidual, DetectsPerturbation) {
  const auto r = RateSet::uniform(1.0, Topology::one_sided());
  auto w = one_sided_weights(r, 20);
  w.set_log_weight(7, Phase::B, w.log_weight(7, Phase::B) + std::log(1.1));
  EXPECT_GT(balance_residual(w, r), 1e-3);
}

TEST(StationaryProperties, CutIdentityAllTopologies) {
  Rng rng(11);
  for (int i = 0; i < 50; ++i) {
    const auto r1 = testing::random_rate_set(rng, Topology::one_sided());
    EXPECT_LT(max_cut_violation(one_sided_weights(r1, 60), r1), 1e-12);
    const auto r2 = testing::random_rate_set(rng, Topology::two_sided());
    EXPECT_LT(max_cut_violation(two_sided_weights(r2, -30, 30), r2), 1e-12);
    const auto r3 = testing::random_rate_set(rng, Topology::finite(8));
    EXPECT_LT(max_cut_violation(finite_weights(r3), r3), 1e-12);
  }
}

TEST(StationaryProperties, ScalingInvariance) {
  Rng rng(12);
  for (int i = 0; i < 20; ++i) {
    const auto r = testing::random_rate_set(rng, Topology::finite(10));
    const auto base = normalize(finite_weights(r), {});
    for (double c : {0.01, 3.0, 250.0}) {
      const auto scaled = normalize(finite_weights(r.scaled(c)), {});
      for (Level n = 0; n <= 10; ++n) {
        for (Phase p : {Phase::B, Phase::D}) {
          EXPECT_LT(rel_diff(base.probability(n, p), scaled.probability(n, p)), 1e-10);
        }
      }
    }
  }
}

TEST(StationaryProperties, NotReversible) {
  const auto r = RateSet::uniform(1.0, Topology::one_sided());
  const auto w = one_sided_weights(r, 5);
  // q((0,b),(1,d)) = kappa_0 = 1 while q((1,d),(0,b)) = nu_1 = 1, but the weights differ.
  const double forward = w.weight(0, Phase::B) * r.kappa(0);
  const double backward = w.weight(1, Phase::D) * r.nu(1);
  EXPECT_NEAR(forward, 0.5, 1e-15);
  EXPECT_NEAR(backward, 0.5, 1e-15);
  // Detailed balance fails on the pair ((0,d),(0,b)): beta_0 x(0,d) = 1 vs delta_0 x(0,b) = 1/2.
  EXPECT_GT(std::fabs(w.weight(0, Phase::D) * r.beta(0) - w.weight(0, Phase::B) * r.delta(0)), 0.4);
}

TEST(DenseSolve, FourStates) {
  const auto r = RateSet::uniform(1.0, Topology::one_sided());
  // Reflecting cap at level 1 removes lambda_1 and kappa_1; hand-solved balance gives (2,1,2,1)/6.
  const auto d = dense_balance_solve(r, 0, 1);
  EXPECT_NEAR(d.probability(0, Phase::D), 2.0 / 6.0, 1e-15);
  EXPECT_NEAR(d.probability(0, Phase::B), 1.0 / 6.0, 1e-15);
  EXPECT_NEAR(d.probability(1, Phase::B), 2.0 / 6.0, 1e-15);
  EXPECT_NEAR(d.probability(1, Phase::D), 1.0 / 6.0, 1e-15);
}

TEST(DenseSolve, OrderingsAgreeAndMatchLu) {
  Rng rng(5);
  for (int i = 0; i < 10; ++i) {
    const auto r = testing::random_rate_set(rng, Topology::two_sided());
    const auto a = dense_balance_solve(r, -6, 6, StateOrder::kLevelAscending);
    const auto b = dense_balance_solve(r, -6, 6, StateOrder::kLevelDescending);
    const auto lu = testing::lu_stationary(r, -6, 6);
    for (Level n = -6; n <= 6; ++n) {
      for (Phase p : {Phase::B, Phase::D}) {
        EXPECT_LT(rel_diff(a.probability(n, p), b.probability(n, p)), 1e-12);
        EXPECT_LT(rel_diff(a.probability(n, p), lu.at({n, p})), 1e-9);
      }
    }
  }
}

TEST(DenseSolve, FiniteMatchesClosedFormExactly) {
  const auto r = RateSet::uniform(1.0, Topology::finite(2));
  const auto a = dense_balance_solve(r, 0, 2);
  const auto b = dense_balance_solve(r, 0, 2, StateOrder::kLevelDescending);
  const auto w = normalize(finite_weights(r), {});
  for (Level n = 0; n <= 2; ++n) {
    for (Phase p : {Phase::B, Phase::D}) {
      EXPECT_LT(rel_diff(a.probability(n, p), w.probability(n, p)), 1e-12);
      EXPECT_LT(rel_diff(b.probability(n, p), w.probability(n, p)), 1e-12);
    }
  }
}

TEST(DenseSolve, DamTruncation) {
  const auto d = dense_balance_solve(dam_rate_set({1.0, 3.0, 1.0, 1.0}), 0, 60);
  EXPECT_NEAR(d.probability(0, Phase::D), 0.25, 1e-7);
}

TEST(DenseSolve, Singular) {
  const auto zero = RateSpec::constant(0.0);
  const auto one = RateSpec::constant(1.0);
  // No way down: states above 0 never return.
  const RateSet r({one, zero, one, one, zero, zero}, Topology::one_sided(), true);
  EXPECT_EQ(kind_of([&] { dense_balance_solve(r, 0, 5); }), ErrorKind::kSingularSystem);
  EXPECT_EQ(kind_of([&] { dense_balance_solve(r, 0, 0); }), ErrorKind::kInvalidArgument);
}

}  // namespace
}  // namespace altbd

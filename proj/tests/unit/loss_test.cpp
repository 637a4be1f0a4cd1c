#include <gtest/gtest.h>

#include <cmath>

#include "mixlab/errors.hpp"
#include "mixlab/loss.hpp"
#include "oracles.hpp"

namespace mixlab {
namespace {

long double reference(LossKind kind, long double y, long double v) {
  switch (kind) {
    case LossKind::square: return oracle::square(y, v);
    case LossKind::entropy: return oracle::entropy(y, v);
    case LossKind::exponential: return oracle::exponential(y, v);
    case LossKind::logit: return oracle::logit(y, v);
  }
  return 0.0L;
}

constexpr LossKind kAll[] = {LossKind::square, LossKind::entropy, LossKind::exponential,
                             LossKind::logit};

TEST(LossEvaluate, HandValues) {
  const LossSpec sq = make_loss(LossKind::square);
  EXPECT_NEAR(evaluate(sq, 1.0, 0.8), 0.04, 1e-15);
  EXPECT_EQ(evaluate(sq, 0.3, 0.3), 0.0);
  const LossSpec en = make_loss(LossKind::entropy);
  EXPECT_EQ(evaluate(en, 0.0, 1.0), kInfinity);
  EXPECT_EQ(evaluate(en, 1.0, 0.0), kInfinity);
  EXPECT_EQ(evaluate(en, 0.5, 1.5), kInfinity);
  EXPECT_NEAR(evaluate(en, 1.0, 0.5), std::log(2.0), 1e-15);
}

TEST(LossEvaluate, LabelOutsideIntervalThrows) {
  EXPECT_THROW(evaluate(make_loss(LossKind::square), 1.5, 0.2), DomainError);
  EXPECT_THROW(evaluate(make_loss(LossKind::logit), -1.01, 0.2), DomainError);
}

TEST(LossEvaluate, MatchesExtendedPrecisionFormulas) {
  for (LossKind kind : kAll) {
    const LossSpec loss = make_loss(kind);
    for (double y : uniform_grid(loss.interval, 21)) {
      for (double v : uniform_grid(loss.interval, 21)) {
        const double got = evaluate(loss, y, v);
        const long double want = reference(kind, y, v);
        if (std::isinf(want)) {
          EXPECT_TRUE(std::isinf(got)) << to_string(kind) << " y=" << y << " v=" << v;
        } else {
          EXPECT_NEAR(got, static_cast<double>(want), 1e-14) << to_string(kind) << " y=" << y;
        }
      }
    }
  }
}

TEST(ExpConcavity, ClosedForms) {
  EXPECT_DOUBLE_EQ(exp_concavity_parameter(LossKind::square, {0.0, 1.0}), 0.5);
  EXPECT_DOUBLE_EQ(exp_concavity_parameter(LossKind::square, {-1.0, 1.0}), 0.125);
  EXPECT_DOUBLE_EQ(exp_concavity_parameter(LossKind::entropy, {0.0, 1.0}), 1.0);
  EXPECT_NEAR(exp_concavity_parameter(LossKind::logit, {-1.0, 1.0}), 0.367879, 1e-6);
  EXPECT_NEAR(exp_concavity_parameter(LossKind::exponential, {-2.0, 2.0}), std::exp(-4.0), 1e-15);
}

TEST(RangeBound, MatchesBruteForceSupremum) {
  for (LossKind kind : {LossKind::square, LossKind::exponential, LossKind::logit}) {
    const LossSpec loss = make_loss(kind);
    double sup = 0.0;
    const auto grid = uniform_grid(loss.interval, 201);
    for (double y : grid) {
      double lo = INFINITY, hi = -INFINITY;
      for (double v : grid) {
        const double l = static_cast<double>(reference(kind, y, v));
        lo = std::min(lo, l);
        hi = std::max(hi, l);
      }
      sup = std::max(sup, hi - lo);
    }
    EXPECT_NEAR(loss.range_bound, sup, 1e-12) << to_string(kind);
  }
  EXPECT_DOUBLE_EQ(make_loss(LossKind::square).range_bound, 1.0);
  EXPECT_TRUE(std::isinf(make_loss(LossKind::entropy).range_bound));
}

TEST(LossSpecInvariants, SymmetricIntervalAndCenter) {
  for (LossKind kind : kAll) {
    const LossSpec loss = make_loss(kind);
    EXPECT_DOUBLE_EQ(loss.interval.lo + loss.interval.hi, 2.0 * loss.center);
    EXPECT_GT(loss.lambda, 0.0);
  }
  EXPECT_THROW(make_loss(LossKind::entropy, {0.0, 2.0}), DomainError);
  EXPECT_THROW(make_loss(LossKind::logit, {-1.0, 2.0}), DomainError);
}

TEST(Derivatives, HandValues) {
  const LossSpec sq = make_loss(LossKind::square);
  const Derivatives d = derivatives(sq, 1.0, 0.2);
  EXPECT_NEAR(d.first, -1.6, 1e-15);
  EXPECT_NEAR(d.second, 2.0, 1e-15);
  const Derivatives at_min = derivatives(sq, 1.0, 1.0);
  EXPECT_EQ(at_min.first, 0.0);
  EXPECT_EQ(at_min.second, 2.0);
  EXPECT_LT(derivatives(sq, 1.0, 0.5).first, 0.0);
}

TEST(Derivatives, EntropyBoundaryThrows) {
  const LossSpec en = make_loss(LossKind::entropy);
  EXPECT_THROW(derivatives(en, 0.5, 0.0), DomainError);
  EXPECT_THROW(derivatives(en, 0.5, 1.0), DomainError);
}

TEST(Derivatives, AgreeWithCentralDifferences) {
  const long double h = 1e-5L;
  for (LossKind kind : kAll) {
    const LossSpec loss = make_loss(kind);
    const auto grid = uniform_grid(loss.interval, 101);
    for (double y : grid) {
      for (std::size_t k = 1; k + 1 < grid.size(); ++k) {
        const long double v = grid[k];
        const long double fp = reference(kind, y, v + h);
        const long double fm = reference(kind, y, v - h);
        const long double f0 = reference(kind, y, v);
        const double first = static_cast<double>((fp - fm) / (2.0L * h));
        const double second = static_cast<double>((fp - 2.0L * f0 + fm) / (h * h));
        const Derivatives d = derivatives(loss, y, grid[k]);
        EXPECT_LE(std::abs(d.first - first), 1e-6 * std::max(1.0, std::abs(d.first)))
            << to_string(kind) << " y=" << y << " v=" << grid[k];
        EXPECT_LE(std::abs(d.second - second), 1e-6 * std::max(1.0, std::abs(d.second)))
            << to_string(kind) << " y=" << y << " v=" << grid[k];
      }
    }
  }
}

TEST(Assumptions, CanonicalSettingsPass) {
  for (LossKind kind : kAll) {
    const AssumptionReport r = verify_assumptions(make_loss(kind), 101);
    EXPECT_TRUE(r.all_passed()) << to_string(kind) << " expc=" << r.exp_concavity.worst_violation
                                << " sym=" << r.symmetry.worst_violation
                                << " adm=" << r.admissibility.worst_violation;
    EXPECT_EQ(r.exp_concavity.tolerance, 1e-9);
    EXPECT_EQ(r.symmetry.tolerance, 1e-12);
  }
}

TEST(Assumptions, LargeLambdaBreaksExpConcavity) {
  const AssumptionReport r = verify_assumptions(make_loss(LossKind::square), 101, 10.0);
  EXPECT_FALSE(r.exp_concavity.passed);
  EXPECT_GT(r.exp_concavity.worst_violation, 1e-9);
  EXPECT_TRUE(r.symmetry.passed);
}

TEST(Assumptions, ConvexityOnGrid) {
  for (LossKind kind : kAll) {
    const LossSpec loss = make_loss(kind);
    const auto grid = uniform_grid(loss.interval, 101);
    for (double y : grid) {
      for (std::size_t k = 1; k + 1 < grid.size(); ++k) {
        const long double s = reference(kind, y, grid[k - 1]) - 2.0L * reference(kind, y, grid[k]) +
                              reference(kind, y, grid[k + 1]);
        if (std::isfinite(static_cast<double>(s))) EXPECT_GE(static_cast<double>(s), -1e-9);
      }
    }
  }
}

TEST(Assumptions, SymmetryFixedPoint) {
  for (LossKind kind : kAll) {
    const LossSpec loss = make_loss(kind);
    const double a = loss.center;
    EXPECT_EQ(evaluate(loss, a, a), evaluate(loss, 2 * a - a, 2 * a - a));
  }
}

TEST(Assumptions, GridPointsPrecondition) {
  EXPECT_THROW(verify_assumptions(make_loss(LossKind::square), 2), DomainError);
}

TEST(LossNames, RoundTrip) {
  for (LossKind kind : kAll) EXPECT_EQ(parse_loss_kind(to_string(kind)), kind);
  EXPECT_THROW(parse_loss_kind("hinge"), DomainError);
}

}  // namespace
}  // namespace mixlab

#include <gtest/gtest.h>

#include <bit>
#include <cmath>
#include <map>

#include "mixlab/construction.hpp"
#include "mixlab/errors.hpp"
#include "mixlab/random_walk.hpp"
#include "oracles.hpp"

namespace mixlab {
namespace {

TEST(WalkPath, SumsAndValidation) {
  const WalkPath p({-1, -1, -1, 1});
  ASSERT_EQ(p.length(), 4u);
  EXPECT_EQ(p.sum(0), 0);
  EXPECT_EQ(p.sum(3), -3);
  EXPECT_EQ(p.sum(4), -2);
  EXPECT_THROW(WalkPath({1, 0, -1}), DomainError);
}

TEST(WalkPath, FromLabels) {
  const std::vector<Sample> data{{0, 1.0}, {0, 0.0}, {0, 1.0}};
  const WalkPath p = WalkPath::from_labels(data, 1.0);
  EXPECT_EQ(p.sum(3), 1);
  EXPECT_EQ(p.steps()[1], -1);
}

TEST(Excursion, HandCases) {
  EXPECT_TRUE(excursion_holds(WalkPath({-1, -1, -1, -1}), {4, 2}));
  EXPECT_FALSE(excursion_holds(WalkPath({1, 1, 1, 1}), {4, 2}));
  EXPECT_TRUE(excursion_holds(WalkPath({-1, -1, -1, 1}), {4, 2}));
  EXPECT_FALSE(excursion_holds(WalkPath({-1, 1, -1, -1}), {4, 2}));
  EXPECT_THROW(validate(ExcursionSpec{5, 2}), DomainError);
  EXPECT_THROW(validate(ExcursionSpec{4, 0}), DomainError);
}

TEST(Reflection, HandValue) {
  const ReflectionResult r = reflection_identity(4, 1, 1);
  EXPECT_EQ(r.lhs, (Rational{1, 2}));
  EXPECT_EQ(r.rhs, (Rational{1, 2}));
  const ReflectionResult far = reflection_identity(5, 6, 2);
  EXPECT_EQ(far.lhs.num, 0);
  EXPECT_EQ(far.rhs.num, 0);
}

TEST(Reflection, BothSidesMatchIndependentCounts) {
  for (int N = 1; N <= 16; ++N) {
    for (int t = 1; t <= 4; ++t) {
      for (int m = 1; m <= 4; ++m) {
        std::int64_t count = 0;
        for (std::uint32_t mask = 0; mask < (1u << N); ++mask) {
          int s = 0, best = -1000;
          for (int j = 0; j < N; ++j) {
            s += ((mask >> j) & 1u) ? 1 : -1;
            best = std::max(best, s);
          }
          if (best >= t && s != t && std::abs(s - t) <= m) ++count;
        }
        std::int64_t rhs = 0;
        for (int s = t + 1; s <= t + m; ++s) {
          if ((N + s) % 2 == 0 && s <= N) rhs += 2 * static_cast<std::int64_t>(oracle::binomial(N, (N + s) / 2));
        }
        const std::int64_t den = std::int64_t{1} << N;
        const ReflectionResult r = reflection_identity(N, t, m);
        EXPECT_EQ(r.lhs, Rational::make(count, den)) << N << " " << t << " " << m;
        EXPECT_EQ(r.rhs, Rational::make(rhs, den)) << N << " " << t << " " << m;
        EXPECT_EQ(r.lhs, r.rhs);
      }
    }
  }
  EXPECT_THROW(reflection_identity(25, 1, 1), DomainError);
}

TEST(Reflection, SerialAndParallelCountsAgree) {
  for (int N : {3, 10, 14, 18}) {
    for (int t = 1; t <= 3; ++t) {
      EXPECT_EQ(reflection_count_serial(N, t, 2), reflection_count_omp(N, t, 2));
    }
  }
}

TEST(ChangeOfMeasure, NoShiftIsEquality) {
  const auto any = [](std::uint32_t mask) { return mask % 3 == 0; };
  const auto r = change_of_measure_check(8, 8, 0.0, any);
  EXPECT_DOUBLE_EQ(r.lhs, r.rhs);
  EXPECT_TRUE(r.holds);
}

TEST(ChangeOfMeasure, AllMinusSequenceIsEquality) {
  for (double g : {0.1, 0.3, 0.6}) {
    const int N = 10;
    const auto only = [](std::uint32_t mask) { return mask == 0; };
    const auto r = change_of_measure_check(N, N, g, only);
    EXPECT_NEAR(r.lhs, std::pow((1 - g) / 2, N), 1e-16);
    EXPECT_NEAR(r.rhs, std::pow((1 - g) / 2, N), 1e-16);
    EXPECT_TRUE(r.holds);
  }
}

TEST(ChangeOfMeasure, RandomEventsAgainstDirectSums) {
  std::uint64_t key = 12345;
  for (double g : {0.1, 0.3, 0.6}) {
    for (int trial = 0; trial < 20; ++trial) {
      key = splitmix64(key);
      const int N = 10, M = 4;
      const auto in_event = [key](std::uint32_t mask) { return (splitmix64(key + mask) & 1u) != 0; };
      double shifted = 0.0, symmetric = 0.0;
      std::uint64_t excluded = 0;
      for (std::uint32_t mask = 0; mask < (1u << N); ++mask) {
        if (!in_event(mask)) continue;
        const int ups = std::popcount(mask);
        if (std::abs(2 * ups - N) > M) {
          ++excluded;
          continue;
        }
        shifted += std::pow((1 + g) / 2, ups) * std::pow((1 - g) / 2, N - ups);
        symmetric += std::pow(0.5, N);
      }
      const double rhs = std::pow((1 - g) / (1 + g), M / 2.0) * std::pow(1 - g * g, N / 2.0) * symmetric;
      const auto r = change_of_measure_check(N, M, g, in_event);
      EXPECT_NEAR(r.lhs, shifted, 1e-15);
      EXPECT_NEAR(r.rhs, rhs, 1e-15);
      EXPECT_EQ(r.excluded, excluded);
      EXPECT_TRUE(r.holds);
      EXPECT_GE(shifted, rhs - 1e-15);
    }
  }
}

TEST(Stirling, HandValuesAndStrictness) {
  const StirlingBounds one = stirling_bounds(1);
  EXPECT_NEAR(one.lower, 0.995870, 1e-6);
  EXPECT_NEAR(one.upper, 1.002274, 1e-6);
  const StirlingBounds five = stirling_bounds(5);
  EXPECT_NEAR(five.lower, 119.9699, 1e-4);
  EXPECT_NEAR(five.upper, 120.0026, 1e-4);
  for (int n = 1; n <= 20; ++n) {
    const StirlingBounds b = stirling_bounds(n);
    const double f = oracle::factorial(n);
    EXPECT_LT(b.lower, f) << n;
    EXPECT_GT(b.upper, f) << n;
  }
  const StirlingBounds big = stirling_bounds(1000);
  EXPECT_TRUE(std::isinf(big.upper) || big.upper > 0);
  EXPECT_NEAR(big.log_upper, std::lgamma(1001.0), 1e-6);
}

TEST(Stirling, PerturbedDenominatorBreaksLowerBound) {
  const StirlingBounds b = stirling_bounds(1, 11.0);
  EXPECT_GT(b.lower, 1.0);
}

TEST(BinomialPoint, HandValues) {
  EXPECT_NEAR(binomial_point(4, 2).exact, 0.25, 1e-15);
  EXPECT_NEAR(binomial_point(4, 0).exact, 0.375, 1e-15);
  const BinomialPoint edge = binomial_point(6, 6);
  EXPECT_NEAR(edge.exact, 1.0 / 64.0, 1e-16);
  EXPECT_TRUE(std::isnan(edge.lower));
  EXPECT_THROW(binomial_point(4, 1), DomainError);
  EXPECT_THROW(binomial_point(4, 6), DomainError);
}

TEST(BinomialPoint, EnvelopesOverInteriorPoints) {
  std::int64_t violations_no_width = 0;
  for (std::int64_t N = 2; N <= 200; ++N) {
    for (std::int64_t s = -N + 2; s <= N - 2; s += 2) {
      if (s == 0) continue;
      const BinomialPoint p = binomial_point(N, s);
      const double exact = std::exp(std::lgamma(N + 1.0) - std::lgamma((N + s) / 2 + 1.0) -
                                    std::lgamma((N - s) / 2 + 1.0) - N * std::log(2.0));
      EXPECT_NEAR(p.exact, exact, 1e-12 * exact);
      EXPECT_LE(p.lower, p.exact) << N << " " << s;
      EXPECT_GE(p.upper_with_width, p.exact) << N << " " << s;
      violations_no_width += p.upper < p.exact;
    }
  }
  // The variant without the width factor is not an upper bound.
  EXPECT_GT(violations_no_width, 0);
  EXPECT_LT(binomial_point(4, 2).upper, 0.25);
}

TEST(ExcursionDp, HandValues) {
  EXPECT_EQ(excursion_probability_exact(4, 2, 0.0), 0.125);
  EXPECT_LT(excursion_probability_exact(4, 2, 1.0 - 1e-12), 1e-20);
  EXPECT_THROW(excursion_probability_exact(5, 2, 0.0), DomainError);
}

TEST(ExcursionDp, MatchesIndependentEnumeration) {
  for (int n = 1; n <= 20; ++n) {
    for (int t = 1; t <= n; ++t) {
      if ((n - t) % 2) continue;
      for (double g : {0.0, 0.1, 0.5}) {
        const double want = oracle::enumerate_walks(n, 0.5 * (1 + g), [&](const std::vector<int>& s) {
          for (int i = t; i <= n; ++i) {
            if (s[static_cast<std::size_t>(i)] > -t) return 0.0;
          }
          return 1.0;
        });
        EXPECT_NEAR(excursion_probability_exact(n, t, g), want, 1e-14) << n << " " << t << " " << g;
        EXPECT_NEAR(excursion_probability_enumerated(n, t, g), want, 1e-14);
      }
    }
  }
}

TEST(ExcursionDp, DeterministicAndMonotoneInGamma) {
  const double a = excursion_probability_exact(2000, 26, 0.06);
  const double b = excursion_probability_exact(2000, 26, 0.06);
  EXPECT_EQ(a, b);
  double prev = 1.0;
  for (double g : {0.0, 0.02, 0.05, 0.1, 0.2}) {
    const double p = excursion_probability_exact(500, 20, g);
    EXPECT_LT(p, prev);
    prev = p;
  }
}

TEST(ExcursionSampler, ProbabilityMatchesForwardDp) {
  for (auto [n, t] : {std::pair{20, 4}, std::pair{200, 10}, std::pair{1000, 24}}) {
    const ExcursionSampler s(n, t, 0.05);
    EXPECT_NEAR(s.probability(), excursion_probability_exact(n, t, 0.05),
                1e-12 * excursion_probability_exact(n, t, 0.05));
  }
}

TEST(ExcursionSampler, DrawsFollowConditionalLaw) {
  const int n = 8, t = 2;
  const double g = 0.2, up = 0.6;
  const ExcursionSampler sampler(n, t, g);
  std::map<std::uint32_t, int> counts;
  RngStream rng(77);
  const int draws = 200000;
  for (int k = 0; k < draws; ++k) {
    const auto steps = sampler.sample(rng);
    ASSERT_TRUE(excursion_holds(WalkPath(steps), {n, t}));
    std::uint32_t mask = 0;
    for (int j = 0; j < n; ++j) mask |= (steps[static_cast<std::size_t>(j)] > 0 ? 1u : 0u) << j;
    ++counts[mask];
  }
  const double total = sampler.probability();
  for (const auto& [mask, c] : counts) {
    const int ups = std::popcount(mask);
    const double p = std::pow(up, ups) * std::pow(1 - up, n - ups) / total;
    const double sd = std::sqrt(p * (1 - p) / draws);
    EXPECT_NEAR(static_cast<double>(c) / draws, p, 5 * sd + 1e-12) << mask;
  }
}

TEST(ExcursionScan, ZeroConstantNeverHolds) {
  const std::vector<std::int64_t> grid{100, 200, 400};
  const auto r = excursion_threshold_scan(1e-9, grid, 0.5, 0.6);
  for (const auto& row : r.rows) EXPECT_FALSE(row.holds);
  EXPECT_FALSE(r.threshold.has_value());
  EXPECT_FALSE(r.holds_on_top_half);
}

TEST(ExcursionScan, ThresholdIsSuffixStart) {
  // A large lambda*delta makes tau tiny, and the inequality easy.
  const std::vector<std::int64_t> grid{10, 20, 40, 80, 160};
  const auto r = excursion_threshold_scan(0.05, grid, 50.0, 1.0);
  ASSERT_EQ(r.rows.size(), grid.size());
  if (r.threshold) {
    bool inside = false;
    for (const auto& row : r.rows) {
      if (row.n == *r.threshold) inside = true;
      if (inside) EXPECT_TRUE(row.holds);
    }
  }
  for (const auto& row : r.rows) {
    EXPECT_NEAR(row.target, std::pow(static_cast<double>(row.n), -0.05), 1e-15);
  }
}

TEST(LowerBoundChain, OrderedAgainstExact) {
  for (std::int64_t n : {500, 1000, 2000, 4000}) {
    const double g = gamma_schedule(n, 1.0);
    const LowerBoundChain c = lower_bound_chain(n, g, 0.5, 0.6);
    ASSERT_TRUE(c.applicable) << n;
    EXPECT_EQ(c.tau, tau(n, 0.5, 0.6));
    EXPECT_EQ(c.big_m, big_m(n));
    EXPECT_EQ(c.walk_length, n - 2 * c.tau);
    EXPECT_GT(c.bound_binomial, 0.0);
    EXPECT_LE(c.bound_binomial, c.exact);
    EXPECT_NEAR(c.exact, excursion_probability_exact(n, c.tau, g), 0.0);
  }
  EXPECT_NEAR(closed_form_constant(), std::sqrt(2.0 / M_PI) * (1.0 - std::exp(-0.5)), 1e-15);
}

}  // namespace
}  // namespace mixlab

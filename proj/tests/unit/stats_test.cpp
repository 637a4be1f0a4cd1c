#include <gtest/gtest.h>

#include <cmath>
#include <vector>

#include "mixlab/stats.hpp"

namespace mixlab {
namespace {

TEST(Wilson, KnownValues) {
  // 10 of 100 at z = 1.96: (0.0552, 0.1744)
  const auto w = wilson_interval(10, 100, kZ95);
  EXPECT_NEAR(w.lo, 0.05522914, 1e-6);
  EXPECT_NEAR(w.hi, 0.17436566, 1e-6);
  const auto zero = wilson_interval(0, 100, kZ95);
  EXPECT_EQ(zero.lo, 0.0);
  EXPECT_NEAR(zero.hi, kZ95 * kZ95 / (100 + kZ95 * kZ95), 1e-15);
  const auto all = wilson_interval(100, 100, kZ3Sigma);
  EXPECT_NEAR(all.hi, 1.0, 1e-15);
  EXPECT_LT(all.lo, 1.0);
}

TEST(Wilson, ContainsPointEstimate) {
  for (std::int64_t k : {0, 1, 7, 50, 99, 100}) {
    const auto w = wilson_interval(k, 100, kZ3Sigma);
    EXPECT_LE(w.lo, k / 100.0);
    EXPECT_GE(w.hi, k / 100.0);
  }
}

TEST(MeanSem, HandValues) {
  const std::vector<double> v{1.0, 2.0, 3.0, 4.0};
  const auto m = mean_and_sem(v);
  EXPECT_DOUBLE_EQ(m.mean, 2.5);
  EXPECT_NEAR(m.sem, std::sqrt(5.0 / 3.0) / 2.0, 1e-15);
  EXPECT_EQ(m.count, 4);
  const std::vector<double> one{3.0};
  EXPECT_EQ(mean_and_sem(one).sem, 0.0);
}

TEST(NormalCdf, Values) {
  EXPECT_DOUBLE_EQ(normal_cdf(0.0), 0.5);
  EXPECT_NEAR(normal_cdf(-0.5), 0.3085375387259869, 1e-15);
  EXPECT_NEAR(normal_cdf(1.959963984540054), 0.975, 1e-12);
}

}  // namespace
}  // namespace mixlab

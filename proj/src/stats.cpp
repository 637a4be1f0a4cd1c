/* Copyright 2026 The mixlab Authors. All Rights Reserved.

Licensed under the Apache License, Version 2.0 (the "License");
you may not use this file except in compliance with the License.
You may obtain a copy of the License at

    http://www.apache.org/licenses/LICENSE-2.0

Unless required by applicable law or agreed to in writing, software
distributed under the License is distributed on an "AS IS" BASIS,
WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
See the License for the specific language governing permissions and
limitations under the License.
==============================================================================*/

#include "mixlab/stats.hpp"

#include <cmath>

namespace mixlab {

ProportionInterval wilson_interval(std::int64_t successes, std::int64_t trials, double z) {
  if (trials <= 0) return {0.0, 1.0};
  const double n = static_cast<double>(trials);
  const double phat = static_cast<double>(successes) / n;
  const double z2 = z * z;
  const double denom = 1.0 + z2 / n;
  const double centre = (phat + z2 / (2.0 * n)) / denom;
  const double half = z * std::sqrt(phat * (1.0 - phat) / n + z2 / (4.0 * n * n)) / denom;
  ProportionInterval out{centre - half, centre + half};
  if (successes == 0) out.lo = 0.0;
  if (successes == trials) out.hi = 1.0;
  if (out.lo < 0.0) out.lo = 0.0;
  if (out.hi > 1.0) out.hi = 1.0;
  return out;
}

MeanEstimate mean_and_sem(std::span<const double> values) {
  MeanEstimate est;
  est.count = static_cast<std::int64_t>(values.size());
  if (values.empty()) return est;
  // Two-pass for stability; order is fixed so the result is reproducible.
  double sum = 0.0;
  for (double v : values) sum += v;
  est.mean = sum / static_cast<double>(values.size());
  if (values.size() < 2) return est;
  double ss = 0.0;
  for (double v : values) ss += (v - est.mean) * (v - est.mean);
  const double var = ss / static_cast<double>(values.size() - 1);
  est.sem = std::sqrt(var / static_cast<double>(values.size()));
  return est;
}

double normal_cdf(double x) { return 0.5 * std::erfc(-x / std::sqrt(2.0)); }

}  // namespace mixlab

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

#pragma once

#include <cstdint>
#include <span>

namespace mixlab {

inline constexpr double kZ95 = 1.959963984540054;
inline constexpr double kZ3Sigma = 3.0;

struct ProportionInterval {
  double lo = 0.0;
  double hi = 0.0;
};

/// Wilson score interval for `successes` out of `trials` at normal quantile z.
ProportionInterval wilson_interval(std::int64_t successes, std::int64_t trials, double z);

struct MeanEstimate {
  double mean = 0.0;
  double sem = 0.0;  // sample standard deviation / sqrt(count); 0 for one value
  std::int64_t count = 0;
};

MeanEstimate mean_and_sem(std::span<const double> values);

/// Standard normal CDF.
double normal_cdf(double x);

}  // namespace mixlab

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
#include <vector>

#include "mixlab/loss.hpp"
#include "mixlab/rng.hpp"

namespace mixlab {

/// Predictor g(x) = value for every input.
struct ConstantExpert {
  double value = 0.0;
  double operator()(double /*x*/) const noexcept { return value; }
};

/// Two-atom output law P(Y=y1) = (1+gamma)/2, P(Y=2a-y1) = (1-gamma)/2, and
/// the mirrored constant experts g1 = ytilde1, g2 = 2a - ytilde1.
struct TwoPointConstruction {
  LossSpec loss;
  double y1 = 1.0;
  double gamma = 0.0;
  double ytilde1 = 0.8;
  // derived
  double y2 = 0.0;
  double ytilde2 = 0.2;
  double delta = 0.0;  // l(y1, ytilde2) - l(y1, ytilde1)
  double kappa = 0.0;  // sup_y [l(y1, a) - l(y1, y)]

  double prob_y1() const noexcept { return 0.5 * (1.0 + gamma); }
  ConstantExpert g1() const noexcept { return {ytilde1}; }
  ConstantExpert g2() const noexcept { return {ytilde2}; }
};

/// Validates and completes a construction. Throws InfeasibleConstruction when
/// y1 <= a, ytilde1 not in (a, y_hi], gamma not in [0,1), or delta is not a
/// finite positive number.
TwoPointConstruction make_construction(const LossSpec& loss, double y1, double gamma,
                                       double ytilde1);

struct Sample {
  double x = 0.0;
  double y = 0.0;
};

/// n i.i.d. pairs; x ~ U[0,1) (never read by constant experts), then
/// y = y1 with probability (1+gamma)/2 else y2. Two draws per pair.
std::vector<Sample> sample_dataset(const TwoPointConstruction& c, int n, RngStream& stream);

/// R(g) for the constant predictor g = v.
double exact_risk(const TwoPointConstruction& c, double v);

/// gamma * delta = R(g2) - R(g1).
double risk_gap(const TwoPointConstruction& c);

/// l(y1, a) - min_y l(y1, y); ternary search on the convex l_{y1}.
double kappa(const LossSpec& loss, double y1);

/// sqrt(C0 log n / n), clamped into [0, 1).
double gamma_schedule(std::int64_t n, double c0);

/// Smallest integer tau >= log(n)/(lambda delta) with n - tau even.
std::int64_t tau(std::int64_t n, double lambda, double delta);

/// Smallest integer M > sqrt(n) with n - M even.
std::int64_t big_m(std::int64_t n);

/// min(sqrt(1/(4n)), 1).
double erm_gamma(std::int64_t n);

}  // namespace mixlab

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

#include <limits>
#include <string>
#include <string_view>
#include <vector>

namespace mixlab {

inline constexpr double kInfinity = std::numeric_limits<double>::infinity();

enum class LossKind { square, entropy, exponential, logit };

std::string_view to_string(LossKind kind);
/// Parses "square", "entropy", "exponential" or "logit"; throws DomainError.
LossKind parse_loss_kind(std::string_view name);

struct Interval {
  double lo = 0.0;
  double hi = 1.0;

  double center() const noexcept { return 0.5 * (lo + hi); }
  double width() const noexcept { return hi - lo; }
  bool contains(double y) const noexcept { return lo <= y && y <= hi; }
};

/// A loss setting: formula, symmetric output interval, center a,
/// exp-concavity parameter lambda and range bound B (may be +inf).
struct LossSpec {
  LossKind kind = LossKind::square;
  Interval interval;
  double center = 0.5;
  double lambda = 0.5;
  double range_bound = 1.0;
};

/// Canonical interval for each setting: [0,1] for square and entropy,
/// [-1,1] for exponential and logit.
Interval canonical_interval(LossKind kind);

/// Builds a LossSpec with lambda and B from their closed forms.
/// Entropy only accepts [0,1]; exponential/logit need an interval centered at 0.
LossSpec make_loss(LossKind kind, Interval interval);
LossSpec make_loss(LossKind kind);

double exp_concavity_parameter(LossKind kind, Interval interval);

/// sup over y, y', y'' of l(y,y') - l(y,y''). +inf for entropy.
double range_bound(LossKind kind, Interval interval);

/// l(y, y_pred). Throws DomainError if y is outside the interval.
/// Returns +inf where the loss is infinite (entropy at l(0,1), l(1,0),
/// and any prediction outside [0,1]).
double evaluate(const LossSpec& loss, double y, double y_pred);

struct Derivatives {
  double first = 0.0;
  double second = 0.0;
};

/// First and second derivative of y' -> l(y, y') at y_pred.
/// Throws DomainError at or beyond the finiteness boundary.
Derivatives derivatives(const LossSpec& loss, double y, double y_pred);

struct AssumptionCheck {
  std::string name;
  bool passed = true;
  double worst_violation = 0.0;  // largest amount by which the check failed (or came closest)
  double tolerance = 0.0;
  double worst_y = 0.0;
  double worst_y_pred = 0.0;
};

struct AssumptionReport {
  int grid_points = 0;
  double lambda = 0.0;
  AssumptionCheck exp_concavity;
  AssumptionCheck symmetry;
  AssumptionCheck admissibility;

  bool all_passed() const noexcept {
    return exp_concavity.passed && symmetry.passed && admissibility.passed;
  }
};

inline constexpr double kCurvatureTolerance = 1e-9;
inline constexpr double kIdentityTolerance = 1e-12;

/// Samples the structural assumptions on a uniform grid over interval x interval.
/// `lambda` defaults to loss.lambda when not positive.
AssumptionReport verify_assumptions(const LossSpec& loss, int grid_points,
                                    double lambda = 0.0);

/// Uniform grid of `points` values spanning the interval, endpoints included.
std::vector<double> uniform_grid(Interval interval, int points);

}  // namespace mixlab

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

#include "mixlab/loss.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "mixlab/errors.hpp"

namespace mixlab {
namespace {

std::string describe(double y) {
  std::ostringstream os;
  os.precision(17);
  os << y;
  return os.str();
}

// x * log(x / z) with 0 log 0 = 0; +inf when x > 0 and z <= 0.
double xlogx_over(double x, double z) {
  if (x == 0.0) return 0.0;
  if (z <= 0.0) return kInfinity;
  return x * std::log(x / z);
}

double softplus_neg(double z) {
  // log(1 + exp(-z)) without overflow for very negative z.
  if (z < -30.0) return -z + std::log1p(std::exp(z));
  return std::log1p(std::exp(-z));
}

double sigmoid(double z) {
  if (z >= 0.0) return 1.0 / (1.0 + std::exp(-z));
  const double e = std::exp(z);
  return e / (1.0 + e);
}

double raw_loss(LossKind kind, double y, double p) {
  switch (kind) {
    case LossKind::square:
      return (y - p) * (y - p);
    case LossKind::entropy:
      if (p < 0.0 || p > 1.0) return kInfinity;
      return xlogx_over(y, p) + xlogx_over(1.0 - y, 1.0 - p);
    case LossKind::exponential:
      return std::exp(-y * p);
    case LossKind::logit:
      return softplus_neg(y * p);
  }
  return kInfinity;
}

}  // namespace

std::string_view to_string(LossKind kind) {
  switch (kind) {
    case LossKind::square: return "square";
    case LossKind::entropy: return "entropy";
    case LossKind::exponential: return "exponential";
    case LossKind::logit: return "logit";
  }
  return "unknown";
}

LossKind parse_loss_kind(std::string_view name) {
  if (name == "square") return LossKind::square;
  if (name == "entropy") return LossKind::entropy;
  if (name == "exponential") return LossKind::exponential;
  if (name == "logit") return LossKind::logit;
  throw DomainError("unknown loss '" + std::string(name) + "'");
}

Interval canonical_interval(LossKind kind) {
  switch (kind) {
    case LossKind::square:
    case LossKind::entropy:
      return {0.0, 1.0};
    case LossKind::exponential:
    case LossKind::logit:
      return {-1.0, 1.0};
  }
  return {0.0, 1.0};
}

double exp_concavity_parameter(LossKind kind, Interval interval) {
  switch (kind) {
    case LossKind::square:
      return 1.0 / (2.0 * interval.width() * interval.width());
    case LossKind::entropy:
      return 1.0;
    case LossKind::exponential:
    case LossKind::logit:
      return std::exp(-interval.hi * interval.hi);
  }
  return 0.0;
}

double range_bound(LossKind kind, Interval interval) {
  switch (kind) {
    case LossKind::square:
      return interval.width() * interval.width();
    case LossKind::entropy:
      return kInfinity;
    case LossKind::exponential: {
      const double m2 = interval.hi * interval.hi;
      return std::exp(m2) - std::exp(-m2);
    }
    case LossKind::logit:
      // log(1 + e^z) - log(1 + e^-z) = z with z = y_max^2.
      return interval.hi * interval.hi;
  }
  return kInfinity;
}

LossSpec make_loss(LossKind kind, Interval interval) {
  if (!(interval.lo < interval.hi) || !std::isfinite(interval.lo) ||
      !std::isfinite(interval.hi)) {
    throw DomainError("output interval must be bounded with lo < hi");
  }
  if (kind == LossKind::entropy && (interval.lo != 0.0 || interval.hi != 1.0)) {
    throw DomainError("entropy loss is defined on [0,1] only");
  }
  if ((kind == LossKind::exponential || kind == LossKind::logit) &&
      interval.lo != -interval.hi) {
    throw DomainError(std::string(to_string(kind)) +
                      " loss needs an interval [-y_max, y_max]");
  }
  LossSpec spec;
  spec.kind = kind;
  spec.interval = interval;
  spec.center = interval.center();
  spec.lambda = exp_concavity_parameter(kind, interval);
  spec.range_bound = range_bound(kind, interval);
  return spec;
}

LossSpec make_loss(LossKind kind) { return make_loss(kind, canonical_interval(kind)); }

double evaluate(const LossSpec& loss, double y, double y_pred) {
  if (!loss.interval.contains(y)) {
    throw DomainError("output " + describe(y) + " outside the loss interval");
  }
  return raw_loss(loss.kind, y, y_pred);
}

Derivatives derivatives(const LossSpec& loss, double y, double y_pred) {
  if (!loss.interval.contains(y)) {
    throw DomainError("output " + describe(y) + " outside the loss interval");
  }
  switch (loss.kind) {
    case LossKind::square:
      return {-2.0 * (y - y_pred), 2.0};
    case LossKind::entropy: {
      if (!(y_pred > 0.0 && y_pred < 1.0)) {
        throw DomainError("entropy derivative requested at " + describe(y_pred) +
                          ", outside (0,1)");
      }
      const double q = 1.0 - y_pred;
      return {-y / y_pred + (1.0 - y) / q,
              y / (y_pred * y_pred) + (1.0 - y) / (q * q)};
    }
    case LossKind::exponential: {
      const double e = std::exp(-y * y_pred);
      return {-y * e, y * y * e};
    }
    case LossKind::logit: {
      const double z = y * y_pred;
      const double s_neg = sigmoid(-z);
      return {-y * s_neg, y * y * sigmoid(z) * s_neg};
    }
  }
  return {};
}

std::vector<double> uniform_grid(Interval interval, int points) {
  std::vector<double> grid(static_cast<std::size_t>(points));
  const double step = interval.width() / static_cast<double>(points - 1);
  for (int k = 0; k < points; ++k) grid[k] = interval.lo + step * k;
  grid.back() = interval.hi;
  return grid;
}

AssumptionReport verify_assumptions(const LossSpec& loss, int grid_points,
                                    double lambda) {
  if (grid_points < 3) throw DomainError("verify_assumptions needs at least 3 grid points");
  AssumptionReport report;
  report.grid_points = grid_points;
  report.lambda = lambda > 0.0 ? lambda : loss.lambda;
  const auto grid = uniform_grid(loss.interval, grid_points);
  const double a = loss.center;

  // Exp-concavity: second differences of y' -> exp(-lambda l(y,y')) stay <= tol.
  auto& conc = report.exp_concavity;
  conc.name = "exp_concavity";
  conc.tolerance = kCurvatureTolerance;
  conc.worst_violation = -kInfinity;
  for (double y : grid) {
    std::vector<double> f(grid.size());
    for (std::size_t k = 0; k < grid.size(); ++k) {
      f[k] = std::exp(-report.lambda * evaluate(loss, y, grid[k]));
    }
    for (std::size_t k = 1; k + 1 < grid.size(); ++k) {
      const double d2 = f[k - 1] - 2.0 * f[k] + f[k + 1];
      if (d2 > conc.worst_violation) {
        conc.worst_violation = d2;
        conc.worst_y = y;
        conc.worst_y_pred = grid[k];
      }
    }
  }
  conc.passed = conc.worst_violation <= conc.tolerance;

  // Symmetry: l(y1,y2) == l(2a-y1, 2a-y2).
  auto& sym = report.symmetry;
  sym.name = "symmetry";
  sym.tolerance = kIdentityTolerance;
  for (double y1 : grid) {
    for (double y2 : grid) {
      const double lhs = evaluate(loss, y1, y2);
      const double rhs = evaluate(loss, 2.0 * a - y1, 2.0 * a - y2);
      double gap = 0.0;
      if (std::isinf(lhs) || std::isinf(rhs)) {
        gap = (lhs == rhs) ? 0.0 : kInfinity;
      } else {
        gap = std::abs(lhs - rhs);
      }
      if (gap > sym.worst_violation) {
        sym.worst_violation = gap;
        sym.worst_y = y1;
        sym.worst_y_pred = y2;
      }
    }
  }
  sym.passed = sym.worst_violation <= sym.tolerance;

  // Admissibility: l(y, 2a-y') > l(y, y') for y, y' > a. Worst = smallest margin,
  // reported as a negated margin so that "violation > 0" means failure.
  auto& adm = report.admissibility;
  adm.name = "admissibility";
  adm.tolerance = 0.0;
  adm.worst_violation = -kInfinity;
  bool any = false;
  for (double y : grid) {
    if (!(y > a)) continue;
    for (double yp : grid) {
      if (!(yp > a)) continue;
      const double mirrored = evaluate(loss, y, 2.0 * a - yp);
      const double direct = evaluate(loss, y, yp);
      // Both sides infinite (entropy at y' = 1, y < 1): no ordering to check.
      if (std::isinf(mirrored) && std::isinf(direct)) continue;
      any = true;
      const double margin = mirrored - direct;
      if (-margin > adm.worst_violation) {
        adm.worst_violation = -margin;
        adm.worst_y = y;
        adm.worst_y_pred = yp;
      }
    }
  }
  if (!any) adm.worst_violation = 0.0;
  adm.passed = adm.worst_violation < 0.0 || !any;
  return report;
}

}  // namespace mixlab

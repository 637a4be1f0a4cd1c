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

#include "mixlab/construction.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "mixlab/errors.hpp"

namespace mixlab {

TwoPointConstruction make_construction(const LossSpec& loss, double y1, double gamma,
                                       double ytilde1) {
  const double a = loss.center;
  if (!loss.interval.contains(y1) || !(y1 > a)) {
    throw InfeasibleConstruction("y1 must lie in the output interval and exceed a = " +
                                 std::to_string(a));
  }
  if (!(ytilde1 > a) || !(ytilde1 <= loss.interval.hi)) {
    throw InfeasibleConstruction("ytilde1 must lie in (a, y_hi]");
  }
  if (!(gamma >= 0.0 && gamma < 1.0)) {
    throw InfeasibleConstruction("gamma must lie in [0, 1)");
  }
  TwoPointConstruction c;
  c.loss = loss;
  c.y1 = y1;
  c.gamma = gamma;
  c.ytilde1 = ytilde1;
  c.y2 = 2.0 * a - y1;
  c.ytilde2 = 2.0 * a - ytilde1;
  c.delta = evaluate(loss, y1, c.ytilde2) - evaluate(loss, y1, c.ytilde1);
  if (!(c.delta > 0.0) || !std::isfinite(c.delta)) {
    throw InfeasibleConstruction("delta = l(y1, ytilde2) - l(y1, ytilde1) must be finite and positive");
  }
  c.kappa = kappa(loss, y1);
  return c;
}

std::vector<Sample> sample_dataset(const TwoPointConstruction& c, int n, RngStream& stream) {
  std::vector<Sample> data(static_cast<std::size_t>(std::max(n, 0)));
  const double p1 = c.prob_y1();
  for (auto& s : data) {
    s.x = stream.uniform();
    s.y = stream.uniform() < p1 ? c.y1 : c.y2;
  }
  return data;
}

double exact_risk(const TwoPointConstruction& c, double v) {
  const double l1 = evaluate(c.loss, c.y1, v);
  const double l2 = evaluate(c.loss, c.y2, v);
  return 0.5 * (1.0 + c.gamma) * l1 + 0.5 * (1.0 - c.gamma) * l2;
}

double risk_gap(const TwoPointConstruction& c) { return c.gamma * c.delta; }

double kappa(const LossSpec& loss, double y1) {
  if (!(y1 > loss.center)) throw DomainError("kappa needs y1 > a");
  auto f = [&](double y) { return evaluate(loss, y1, y); };
  double lo = loss.interval.lo;
  double hi = loss.interval.hi;
  for (int it = 0; it < 200 && hi - lo > 1e-10; ++it) {
    const double m1 = lo + (hi - lo) / 3.0;
    const double m2 = hi - (hi - lo) / 3.0;
    if (f(m1) <= f(m2)) {
      hi = m2;
    } else {
      lo = m1;
    }
  }
  const double best = std::min({f(0.5 * (lo + hi)), f(loss.interval.lo), f(loss.interval.hi)});
  return f(loss.center) - best;
}

double gamma_schedule(std::int64_t n, double c0) {
  if (n < 2) throw DomainError("gamma_schedule needs n >= 2");
  if (!(c0 > 0.0)) return 0.0;
  const double g = std::sqrt(c0 * std::log(static_cast<double>(n)) / static_cast<double>(n));
  return std::min(g, std::nextafter(1.0, 0.0));
}

std::int64_t tau(std::int64_t n, double lambda, double delta) {
  if (n < 2) throw DomainError("tau needs n >= 2");
  if (!(lambda * delta > 0.0)) throw DomainError("tau needs lambda * delta > 0");
  const double bound = std::log(static_cast<double>(n)) / (lambda * delta);
  auto t = static_cast<std::int64_t>(std::ceil(bound));
  if ((n - t) % 2 != 0) ++t;
  return t;
}

std::int64_t big_m(std::int64_t n) {
  if (n < 2) throw DomainError("big_m needs n >= 2");
  auto m = static_cast<std::int64_t>(std::floor(std::sqrt(static_cast<double>(n))));
  while (m * m > n) --m;
  while ((m + 1) * (m + 1) <= n) ++m;
  ++m;  // now m > sqrt(n)
  if ((n - m) % 2 != 0) ++m;
  return m;
}

double erm_gamma(std::int64_t n) {
  if (n < 1) throw DomainError("erm_gamma needs n >= 1");
  return std::min(std::sqrt(1.0 / (4.0 * static_cast<double>(n))), 1.0);
}

}  // namespace mixlab

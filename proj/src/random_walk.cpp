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

#include "mixlab/random_walk.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <numbers>
#include <numeric>

#include "mixlab/errors.hpp"

namespace mixlab {
namespace {

std::uint64_t binomial_u64(int n, int k) {
  if (k < 0 || k > n) return 0;
  k = std::min(k, n - k);
  std::uint64_t r = 1;
  for (int i = 1; i <= k; ++i) r = r * static_cast<std::uint64_t>(n - k + i) / i;
  return r;
}

double log_binomial(std::int64_t n, std::int64_t k) {
  return std::lgamma(static_cast<double>(n) + 1.0) - std::lgamma(static_cast<double>(k) + 1.0) -
         std::lgamma(static_cast<double>(n - k) + 1.0);
}

}  // namespace

WalkPath::WalkPath(std::vector<std::int8_t> steps) : steps_(std::move(steps)) {
  sums_.resize(steps_.size() + 1);
  sums_[0] = 0;
  for (std::size_t j = 0; j < steps_.size(); ++j) {
    if (steps_[j] != 1 && steps_[j] != -1) throw DomainError("walk steps must be +1 or -1");
    sums_[j + 1] = sums_[j] + steps_[j];
  }
}

WalkPath WalkPath::from_labels(std::span<const Sample> data, double y1) {
  std::vector<std::int8_t> steps(data.size());
  for (std::size_t j = 0; j < data.size(); ++j) steps[j] = data[j].y == y1 ? 1 : -1;
  return WalkPath(std::move(steps));
}

void validate(const ExcursionSpec& spec) {
  if (spec.tau < 1 || spec.tau > spec.n || (spec.n - spec.tau) % 2 != 0) {
    throw DomainError("excursion spec needs 1 <= tau <= n with n - tau even");
  }
}

bool excursion_holds(const WalkPath& path, const ExcursionSpec& spec) {
  if (path.length() < static_cast<std::size_t>(spec.n)) {
    throw DomainError("walk shorter than the excursion horizon");
  }
  for (std::int64_t i = spec.tau; i <= spec.n; ++i) {
    if (path.sum(static_cast<std::size_t>(i)) > -spec.tau) return false;
  }
  return true;
}

Rational Rational::make(std::int64_t num, std::int64_t den) {
  if (den == 0) throw DomainError("rational with zero denominator");
  if (den < 0) {
    num = -num;
    den = -den;
  }
  const std::int64_t g = std::gcd(num < 0 ? -num : num, den);
  if (g > 1) {
    num /= g;
    den /= g;
  }
  if (num == 0) den = 1;
  return {num, den};
}

std::string to_string(const Rational& r) {
  return std::to_string(r.num) + "/" + std::to_string(r.den);
}

ReflectionResult reflection_identity(int N, int t, int m) {
  if (N < 1 || N > kMaxReflectionLength) {
    throw DomainError("reflection identity enumerates at most 2^24 sequences");
  }
  if (t < 1 || m < 1) throw DomainError("reflection identity needs positive t and m");
  const auto total = static_cast<std::int64_t>(1) << N;
  const auto lhs_count = static_cast<std::int64_t>(reflection_count_omp(N, t, m));
  std::int64_t rhs_count = 0;
  for (int s = t + 1; s <= t + m; ++s) {
    if (s > N || (N - s) % 2 != 0) continue;
    rhs_count += static_cast<std::int64_t>(binomial_u64(N, (N + s) / 2));
  }
  return {Rational::make(lhs_count, total), Rational::make(2 * rhs_count, total)};
}

ChangeOfMeasureResult change_of_measure_check(int N, int M, double gamma,
                                              const SequencePredicate& in_event) {
  if (N < 1 || N > kMaxChangeOfMeasureLength) {
    throw DomainError("change-of-measure check enumerates at most 2^20 sequences");
  }
  if (M < 1) throw DomainError("change-of-measure check needs M >= 1");
  if (!(gamma >= 0.0 && gamma < 1.0)) throw DomainError("gamma must lie in [0, 1)");
  ChangeOfMeasureResult out;
  std::vector<std::uint64_t> by_ups(static_cast<std::size_t>(N) + 1, 0);
  const std::uint32_t total = 1u << N;
  for (std::uint32_t mask = 0; mask < total; ++mask) {
    if (!in_event(mask)) continue;
    const int ups = std::popcount(mask);
    const int s = 2 * ups - N;
    if (std::abs(s) > M) {
      ++out.excluded;
      continue;
    }
    ++out.members;
    ++by_ups[static_cast<std::size_t>(ups)];
  }
  const double p = 0.5 * (1.0 + gamma);
  const double q = 0.5 * (1.0 - gamma);
  double shifted = 0.0;
  double symmetric = 0.0;
  for (int k = 0; k <= N; ++k) {
    if (by_ups[k] == 0) continue;
    const double c = static_cast<double>(by_ups[k]);
    shifted += c * std::pow(p, k) * std::pow(q, N - k);
    symmetric += c * std::ldexp(1.0, -N);
  }
  out.lhs = shifted;
  out.rhs = std::pow((1.0 - gamma) / (1.0 + gamma), 0.5 * M) *
            std::pow(1.0 - gamma * gamma, 0.5 * N) * symmetric;
  out.holds = out.lhs >= out.rhs - kChangeOfMeasureSlack;
  return out;
}

StirlingBounds stirling_bounds(std::int64_t n, double denominator) {
  if (n < 1) throw DomainError("Stirling bounds need n >= 1");
  const double x = static_cast<double>(n);
  const double base = x * std::log(x) - x + 0.5 * std::log(2.0 * std::numbers::pi * x);
  StirlingBounds b;
  b.log_lower = base + 1.0 / (denominator * x + 1.0);
  b.log_upper = base + 1.0 / (denominator * x);
  b.lower = std::exp(b.log_lower);
  b.upper = std::exp(b.log_upper);
  return b;
}

BinomialPoint binomial_point(std::int64_t N, std::int64_t s) {
  if (N < 1 || s > N || s < -N) throw DomainError("binomial point needs |s| <= N");
  if ((N - s) % 2 != 0) throw DomainError("binomial point needs N - s even");
  BinomialPoint out;
  const std::int64_t ups = (N + s) / 2;
  out.log_exact = log_binomial(N, ups) - static_cast<double>(N) * std::numbers::ln2;
  out.exact = std::exp(out.log_exact);
  if (s == N || s == -N) {
    const double nan = std::numeric_limits<double>::quiet_NaN();
    out.lower = out.upper = out.upper_with_width = nan;
    return out;
  }
  const double n = static_cast<double>(N);
  const double r = static_cast<double>(s) / n;
  const double sd = static_cast<double>(s);
  // log of sqrt(2/(pi N)) (1 - r^2)^{-N/2} ((1-r)/(1+r))^{s/2}
  const double core = 0.5 * std::log(2.0 / (std::numbers::pi * n)) -
                      0.5 * n * std::log1p(-r * r) +
                      0.5 * sd * (std::log1p(-r) - std::log1p(r));
  out.lower = std::exp(core - 1.0 / (6.0 * (n + sd)) - 1.0 / (6.0 * (n - sd)));
  out.upper = std::exp(core + 1.0 / (12.0 * n + 1.0));
  out.upper_with_width = std::exp(core - 0.5 * std::log1p(-r * r) + 1.0 / (12.0 * n + 1.0));
  return out;
}

double excursion_probability_exact(std::int64_t n, std::int64_t tau, double gamma) {
  if (n < 1 || n > kMaxExcursionDpLength) throw DomainError("excursion DP needs 1 <= n <= 1e5");
  if (tau < 0 || (n - tau) % 2 != 0) throw DomainError("excursion DP needs n - tau even");
  if (!(gamma >= -1.0 && gamma <= 1.0)) throw DomainError("gamma must lie in [-1, 1]");
  const double up = 0.5 * (1.0 + gamma);
  const double down = 0.5 * (1.0 - gamma);
  // prob[s + n] = P(S_i = s, barrier respected so far)
  std::vector<double> prob(static_cast<std::size_t>(2 * n + 3), 0.0);
  std::vector<double> next(prob.size(), 0.0);
  const std::int64_t off = n + 1;
  prob[off] = 1.0;
  std::int64_t lo = 0, hi = 0;  // support of prob
  for (std::int64_t i = 1; i <= n; ++i) {
    std::int64_t nlo = lo - 1;
    std::int64_t nhi = hi + 1;
    if (i >= tau) nhi = std::min(nhi, -tau);
    if (nhi < nlo) return 0.0;
    for (std::int64_t s = nlo; s <= nhi; ++s) {
      next[off + s] = up * prob[off + s - 1] + down * prob[off + s + 1];
    }
    for (std::int64_t s = lo; s <= hi; ++s) prob[off + s] = 0.0;
    for (std::int64_t s = nlo; s <= nhi; ++s) {
      prob[off + s] = next[off + s];
      next[off + s] = 0.0;
    }
    lo = nlo;
    hi = nhi;
  }
  double total = 0.0;
  for (std::int64_t s = lo; s <= hi; ++s) total += prob[off + s];
  return total;
}

double excursion_probability_enumerated(int n, int tau, double gamma) {
  if (n < 1 || n > 24) throw DomainError("enumeration limited to n <= 24");
  const double up = 0.5 * (1.0 + gamma);
  const double down = 0.5 * (1.0 - gamma);
  double total = 0.0;
  const std::uint32_t count = 1u << n;
  for (std::uint32_t mask = 0; mask < count; ++mask) {
    int s = 0;
    bool ok = tau > 0 || s <= -tau;
    for (int i = 1; i <= n && ok; ++i) {
      s += (mask >> (i - 1)) & 1u ? 1 : -1;
      if (i >= tau && s > -tau) ok = false;
    }
    if (!ok) continue;
    const int ups = std::popcount(mask);
    total += std::pow(up, ups) * std::pow(down, n - ups);
  }
  return total;
}

ExcursionSampler::ExcursionSampler(std::int64_t n, std::int64_t tau, double gamma)
    : n_(n), tau_(tau), up_(0.5 * (1.0 + gamma)) {
  validate(ExcursionSpec{n, tau});
  const double down = 1.0 - up_;
  table_.assign(static_cast<std::size_t>((n + 1) * (n + 1)), 0.0);
  auto cell = [&](std::int64_t i, std::int64_t s) -> double& {
    return table_[static_cast<std::size_t>(i * (n_ + 1) + (s + n_))];
  };
  // Every path in E_tau (tau >= 1) stays at or below 0, so s ranges over [-n, 0].
  for (std::int64_t s = -n; s <= 0; ++s) cell(n, s) = (s <= -tau) ? 1.0 : 0.0;
  for (std::int64_t i = n - 1; i >= 0; --i) {
    for (std::int64_t s = -n; s <= 0; ++s) {
      if (i >= tau && s > -tau) continue;
      cell(i, s) = up_ * at(i + 1, s + 1) + down * at(i + 1, s - 1);
    }
  }
}

double ExcursionSampler::at(std::int64_t i, std::int64_t s) const {
  if (s > 0 || s < -n_) return 0.0;
  return table_[static_cast<std::size_t>(i * (n_ + 1) + (s + n_))];
}

std::vector<std::int8_t> ExcursionSampler::sample(RngStream& stream) const {
  if (!(probability() > 0.0)) throw DomainError("excursion event has probability zero");
  std::vector<std::int8_t> steps(static_cast<std::size_t>(n_));
  std::int64_t s = 0;
  for (std::int64_t i = 0; i < n_; ++i) {
    const double p_up = up_ * at(i + 1, s + 1) / at(i, s);
    const bool go_up = stream.uniform() < p_up;
    steps[static_cast<std::size_t>(i)] = go_up ? 1 : -1;
    s += go_up ? 1 : -1;
  }
  return steps;
}

ExcursionScanReport excursion_threshold_scan(double c0, std::span<const std::int64_t> n_grid, double lambda,
                          double delta) {
  ExcursionScanReport report;
  report.c0 = c0;
  report.lambda_delta = lambda * delta;
  for (std::int64_t n : n_grid) {
    ExcursionScanRow row;
    row.n = n;
    row.gamma = gamma_schedule(n, c0);
    row.tau = tau(n, lambda, delta);
    row.probability = excursion_probability_exact(n, row.tau, row.gamma);
    row.target = std::pow(static_cast<double>(n), -c0);
    row.holds = row.probability >= row.target;
    report.rows.push_back(row);
  }
  // Scan from the top of the grid down while the inequality keeps holding.
  for (auto it = report.rows.rbegin(); it != report.rows.rend() && it->holds; ++it) {
    report.threshold = it->n;
  }
  if (report.threshold && !report.rows.empty()) {
    const std::size_t half = report.rows.size() / 2;
    report.holds_on_top_half = *report.threshold <= report.rows[half].n;
  }
  return report;
}

double closed_form_constant() {
  return std::sqrt(2.0 / std::numbers::pi) * (1.0 - std::exp(-0.5));
}

LowerBoundChain lower_bound_chain(std::int64_t n, double gamma, double lambda, double delta) {
  LowerBoundChain out;
  out.n = n;
  out.gamma = gamma;
  out.tau = tau(n, lambda, delta);
  out.big_m = big_m(n);
  out.walk_length = n - 2 * out.tau;
  out.exact = excursion_probability_exact(n, out.tau, gamma);
  out.applicable = out.big_m > out.tau && out.walk_length > out.big_m;
  if (!out.applicable) return out;
  const double t = static_cast<double>(out.tau);
  const double m = static_cast<double>(out.big_m);
  const double nn = static_cast<double>(out.walk_length);
  const double log_factors = 2.0 * t * std::log(0.5 * (1.0 - gamma)) +
                             0.5 * m * (std::log1p(-gamma) - std::log1p(gamma)) +
                             0.5 * nn * std::log1p(-gamma * gamma);
  const double gap = binomial_point(out.walk_length, out.tau).exact -
                     binomial_point(out.walk_length, out.big_m).exact;
  out.bound_binomial = t * std::exp(log_factors) * gap;
  out.bound_closed_form =
      closed_form_constant() * t / (2.0 * std::sqrt(static_cast<double>(n))) * std::exp(log_factors);
  return out;
}

}  // namespace mixlab

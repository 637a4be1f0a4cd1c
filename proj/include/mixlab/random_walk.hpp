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
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "mixlab/construction.hpp"
#include "mixlab/rng.hpp"

namespace mixlab {

/// +-1 steps W_1..W_n and partial sums S_0 = 0, S_i = W_1 + ... + W_i.
class WalkPath {
 public:
  WalkPath() : sums_{0} {}
  explicit WalkPath(std::vector<std::int8_t> steps);

  /// W_j = 1{Y_j = y1} - 1{Y_j != y1}.
  static WalkPath from_labels(std::span<const Sample> data, double y1);

  std::size_t length() const noexcept { return steps_.size(); }
  std::span<const std::int8_t> steps() const noexcept { return steps_; }
  std::int64_t sum(std::size_t i) const { return sums_[i]; }
  std::span<const std::int64_t> sums() const noexcept { return sums_; }

 private:
  std::vector<std::int8_t> steps_;
  std::vector<std::int64_t> sums_;
};

/// Event E_tau = { S_i <= -tau for every i in {tau..n} }.
struct ExcursionSpec {
  std::int64_t n = 0;
  std::int64_t tau = 1;
};

/// Throws DomainError unless tau >= 1, tau <= n and n - tau is even.
void validate(const ExcursionSpec& spec);

bool excursion_holds(const WalkPath& path, const ExcursionSpec& spec);

/// Exact rational in lowest terms.
struct Rational {
  std::int64_t num = 0;
  std::int64_t den = 1;

  static Rational make(std::int64_t num, std::int64_t den);
  double value() const noexcept { return static_cast<double>(num) / static_cast<double>(den); }
  friend bool operator==(const Rational&, const Rational&) = default;
};

std::string to_string(const Rational& r);

struct ReflectionResult {
  Rational lhs;  // P(max_k s_k >= t; s_N != t; |s_N - t| <= m), by enumeration
  Rational rhs;  // 2 P(t < s_N <= t + m), by binomial sums
};

inline constexpr int kMaxReflectionLength = 24;

/// Both sides of the mirror identity for a symmetric +-1 walk of length N.
/// Throws DomainError for N > 24 or non-positive t, m.
ReflectionResult reflection_identity(int N, int t, int m);

/// Enumeration count behind the left-hand side (number of the 2^N sequences).
/// Serial reference and OpenMP kernel; both must agree exactly.
std::uint64_t reflection_count_serial(int N, int t, int m);
std::uint64_t reflection_count_omp(int N, int t, int m);

/// Membership test for an event over sign sequences; bit j of `mask` set means
/// epsilon_{j+1} = +1.
using SequencePredicate = std::function<bool(std::uint32_t mask)>;

struct ChangeOfMeasureResult {
  double lhs = 0.0;  // P(sigma' in A), P(sigma'_i = +1) = (1+gamma)/2
  double rhs = 0.0;  // ((1-g)/(1+g))^{M/2} (1-g^2)^{N/2} P(sigma in A)
  bool holds = false;
  std::uint64_t excluded = 0;  // members of A with |sum| > M, dropped with a warning
  std::uint64_t members = 0;
};

inline constexpr double kChangeOfMeasureSlack = 1e-15;
inline constexpr int kMaxChangeOfMeasureLength = 20;

ChangeOfMeasureResult change_of_measure_check(int N, int M, double gamma,
                                              const SequencePredicate& in_event);

struct StirlingBounds {
  double lower = 0.0;
  double upper = 0.0;
  double log_lower = 0.0;
  double log_upper = 0.0;
};

/// n^n e^-n sqrt(2 pi n) e^{1/(d n + 1)} and ... e^{1/(d n)} with d = 12.
/// The denominator is a parameter only so that self-checks can be mutation-tested.
StirlingBounds stirling_bounds(std::int64_t n, double denominator = 12.0);

struct BinomialPoint {
  double exact = 0.0;
  double log_exact = 0.0;
  /// Stirling-based lower envelope. NaN when |s| == N.
  double lower = 0.0;
  /// Upper envelope without the (1 - s^2/N^2)^{-1/2} width factor. Falls below
  /// the exact value for most interior s.
  double upper = 0.0;
  /// Upper envelope keeping the width factor; a valid bound for 0 < |s| < N.
  double upper_with_width = 0.0;
};

/// P(s_N = s) for a symmetric walk, with its Stirling envelopes.
/// Throws DomainError if |s| > N or N - s is odd.
BinomialPoint binomial_point(std::int64_t N, std::int64_t s);

inline constexpr std::int64_t kMaxExcursionDpLength = 100000;

/// P(E_tau) for steps +1 w.p. (1+gamma)/2, by forward dynamic programming over
/// (i, S_i) with the barrier applied from index tau inclusive.
double excursion_probability_exact(std::int64_t n, std::int64_t tau, double gamma);

/// The same probability by summing over all 2^n paths (n <= 24).
double excursion_probability_enumerated(int n, int tau, double gamma);

/// Draws step sequences from the law of the walk conditioned on E_tau, using a
/// backward table h(i, s) = P(barrier respected on i+1..n | S_i = s).
class ExcursionSampler {
 public:
  ExcursionSampler(std::int64_t n, std::int64_t tau, double gamma);

  /// P(E_tau) = h(0, 0), computed backwards.
  double probability() const noexcept { return at(0, 0); }
  std::vector<std::int8_t> sample(RngStream& stream) const;

 private:
  double at(std::int64_t i, std::int64_t s) const;

  std::int64_t n_;
  std::int64_t tau_;
  double up_;
  std::vector<double> table_;  // rows i = 0..n, columns s = -n..0
};

struct ExcursionScanRow {
  std::int64_t n = 0;
  double gamma = 0.0;
  std::int64_t tau = 0;
  double probability = 0.0;
  double target = 0.0;  // n^{-C0}
  bool holds = false;
};

struct ExcursionScanReport {
  double c0 = 0.0;
  double lambda_delta = 0.0;
  std::vector<ExcursionScanRow> rows;
  /// Smallest grid n from which the inequality holds at every larger grid point.
  std::optional<std::int64_t> threshold;
  bool holds_on_top_half = false;
};

ExcursionScanReport excursion_threshold_scan(double c0, std::span<const std::int64_t> n_grid, double lambda,
                          double delta);

struct LowerBoundChain {
  std::int64_t n = 0;
  double gamma = 0.0;
  std::int64_t tau = 0;
  std::int64_t big_m = 0;
  std::int64_t walk_length = 0;  // N = n - 2 tau
  bool applicable = false;       // M > tau and N > 0
  double exact = 0.0;
  double bound_binomial = 0.0;
  double bound_closed_form = 0.0;
};

/// sqrt(2/pi) (1 - e^{-1/2}).
double closed_form_constant();

LowerBoundChain lower_bound_chain(std::int64_t n, double gamma, double lambda, double delta);

}  // namespace mixlab

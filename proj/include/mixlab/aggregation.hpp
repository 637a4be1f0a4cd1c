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
#include <span>
#include <string>
#include <vector>

#include "mixlab/construction.hpp"
#include "mixlab/loss.hpp"

namespace mixlab {

/// A prediction function x -> y'.
using Expert = std::function<double(double)>;

/// Sigma_i(g) for every expert g and i = 0..L, with Sigma_0 = 0.
class CumulativeLossTable {
 public:
  CumulativeLossTable() = default;
  CumulativeLossTable(std::size_t experts, std::size_t steps);

  std::size_t num_experts() const noexcept { return experts_; }
  /// L, the number of samples; rows hold L + 1 entries.
  std::size_t num_steps() const noexcept { return steps_; }

  double at(std::size_t expert, std::size_t i) const { return data_[expert * (steps_ + 1) + i]; }
  double& at(std::size_t expert, std::size_t i) { return data_[expert * (steps_ + 1) + i]; }

  std::span<const double> row(std::size_t expert) const {
    return {data_.data() + expert * (steps_ + 1), steps_ + 1};
  }
  /// (Sigma_i(g))_g at a fixed step.
  std::vector<double> column(std::size_t i) const;

 private:
  std::size_t experts_ = 0;
  std::size_t steps_ = 0;
  std::vector<double> data_;
};

CumulativeLossTable cumulative_losses(const LossSpec& loss, std::span<const Expert> experts,
                                      std::span<const Sample> data);

/// Probability vector over experts, proportional to exp(-lambda Sigma_i).
using GibbsWeights = std::vector<double>;

/// Max-subtracted softmax of -lambda * cumulative. Infinite entries get weight 0;
/// throws DomainError if every entry is infinite or lambda <= 0.
GibbsWeights gibbs_weights(std::span<const double> cumulative, double lambda);
GibbsWeights gibbs_weights(const CumulativeLossTable& table, std::size_t step, double lambda);

/// Weight of g1 in the two-expert construction: 1 / (1 + exp(-lambda delta S_i)).
double two_expert_weight(std::int64_t walk_sum, double lambda, double delta);

/// -(1/lambda) log sum_g w_g exp(-lambda l(y, pred_g)).
double mixture_loss(const LossSpec& loss, double lambda, std::span<const double> weights,
                    std::span<const double> predictions, double y);

enum class Selector { midpoint, lower, upper };

/// How an intermediate predictor h_i is produced from the Gibbs mixture.
struct Substitution {
  enum class Kind { gibbs_mean, feasible_interval };
  Kind kind = Kind::gibbs_mean;
  Selector selector = Selector::midpoint;

  static Substitution gibbs_mean() { return {}; }
  static Substitution feasible(Selector s) { return {Kind::feasible_interval, s}; }
  std::string name() const;
};

/// Parses "mean", "midpoint", "lower" or "upper".
Substitution parse_substitution(const std::string& name);

struct FeasibleInterval {
  double lo = 0.0;
  double hi = 0.0;
};

inline constexpr double kBisectionTolerance = 1e-10;
inline constexpr double kFeasibilitySlack = 1e-12;

/// The set of v in the output interval with l(y, v) <= mixture_loss(y) for every
/// probe y. It is an interval (each l_y is convex) containing the Gibbs mean;
/// endpoints are located by bisection between the Gibbs mean and the interval ends,
/// always keeping the feasible side. Throws DomainError if the Gibbs mean itself
/// violates a constraint.
FeasibleInterval feasible_interval(const LossSpec& loss, double lambda,
                                   std::span<const double> weights,
                                   std::span<const double> predictions,
                                   std::span<const double> probe_ys);

/// h_i(x) for the given substitution.
double pim_predict(const LossSpec& loss, double lambda, std::span<const double> weights,
                   std::span<const Expert> experts, double x, std::span<const double> probe_ys,
                   const Substitution& substitution);

/// Progressive mixture prediction sum_g wbar_g g(x), wbar the time-averaged weights.
double pm_predict(std::span<const double> averaged_weights, std::span<const Expert> experts,
                  double x);

struct TraceStep {
  GibbsWeights weights;
  double prediction = 0.0;  // h_i(x_{i+1}); NaN on the last step
  double loss = 0.0;        // l(y_{i+1}, h_i(x_{i+1})); NaN on the last step
};

/// Steps i = 0..L of a progressive (indirect) mixture over a sequence of length L.
struct AggregatorTrace {
  double lambda = 0.0;
  Substitution substitution;
  std::vector<TraceStep> steps;
  GibbsWeights averaged_weights;  // (1/(L+1)) sum_i pi_i, the progressive-mixture weights

  std::size_t size() const noexcept { return steps.size(); }
};

AggregatorTrace build_trace(const LossSpec& loss, double lambda, std::span<const Expert> experts,
                            std::span<const Sample> data, const CumulativeLossTable& table,
                            const Substitution& substitution, std::span<const double> probe_ys);

/// g_pim(x) = (1/(L+1)) sum_i h_i(x).
double pim_rule_predict(const LossSpec& loss, const AggregatorTrace& trace,
                        std::span<const Expert> experts, double x,
                        std::span<const double> probe_ys);

inline constexpr double kErmTieTolerance = 1e-12;

/// Index of the smallest Sigma_L; ties go to the lowest index. Totals within a
/// relative kErmTieTolerance count as tied, so summation order cannot break a tie.
std::size_t erm_select(const CumulativeLossTable& table);

struct Regret {
  double regret = 0.0;
  double bound = 0.0;
};

inline constexpr double kRegretTolerance = 1e-9;

/// sum_i l(y_{i+1}, h_i(x_{i+1})) - min_g Sigma_L(g) against log|G| / lambda.
Regret per_sequence_regret(const AggregatorTrace& trace, const CumulativeLossTable& table);

}  // namespace mixlab

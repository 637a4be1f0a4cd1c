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

#include "mixlab/aggregation.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "mixlab/errors.hpp"

namespace mixlab {

CumulativeLossTable::CumulativeLossTable(std::size_t experts, std::size_t steps)
    : experts_(experts), steps_(steps), data_(experts * (steps + 1), 0.0) {}

std::vector<double> CumulativeLossTable::column(std::size_t i) const {
  std::vector<double> col(experts_);
  for (std::size_t g = 0; g < experts_; ++g) col[g] = at(g, i);
  return col;
}

CumulativeLossTable cumulative_losses(const LossSpec& loss, std::span<const Expert> experts,
                                      std::span<const Sample> data) {
  CumulativeLossTable table(experts.size(), data.size());
  for (std::size_t g = 0; g < experts.size(); ++g) {
    double sum = 0.0;
    for (std::size_t j = 0; j < data.size(); ++j) {
      sum += evaluate(loss, data[j].y, experts[g](data[j].x));
      table.at(g, j + 1) = sum;
    }
  }
  return table;
}

GibbsWeights gibbs_weights(std::span<const double> cumulative, double lambda) {
  if (!(lambda > 0.0)) throw DomainError("Gibbs weights need lambda > 0");
  double best = kInfinity;
  for (double s : cumulative) best = std::min(best, s);
  if (std::isinf(best)) throw DomainError("every cumulative loss is infinite");
  GibbsWeights w(cumulative.size());
  double total = 0.0;
  for (std::size_t g = 0; g < cumulative.size(); ++g) {
    w[g] = std::isinf(cumulative[g]) ? 0.0 : std::exp(-lambda * (cumulative[g] - best));
    total += w[g];
  }
  for (double& x : w) x /= total;
  return w;
}

GibbsWeights gibbs_weights(const CumulativeLossTable& table, std::size_t step, double lambda) {
  return gibbs_weights(table.column(step), lambda);
}

double two_expert_weight(std::int64_t walk_sum, double lambda, double delta) {
  return 1.0 / (1.0 + std::exp(-lambda * delta * static_cast<double>(walk_sum)));
}

double mixture_loss(const LossSpec& loss, double lambda, std::span<const double> weights,
                    std::span<const double> predictions, double y) {
  // log-sum-exp of log w_g - lambda l_g over experts with positive weight.
  double top = -kInfinity;
  std::vector<double> terms(weights.size(), -kInfinity);
  for (std::size_t g = 0; g < weights.size(); ++g) {
    if (!(weights[g] > 0.0)) continue;
    const double l = evaluate(loss, y, predictions[g]);
    if (std::isinf(l)) continue;
    terms[g] = std::log(weights[g]) - lambda * l;
    top = std::max(top, terms[g]);
  }
  if (std::isinf(top)) return kInfinity;
  double sum = 0.0;
  for (double t : terms) {
    if (!std::isinf(t)) sum += std::exp(t - top);
  }
  return -(top + std::log(sum)) / lambda;
}

std::string Substitution::name() const {
  if (kind == Kind::gibbs_mean) return "mean";
  switch (selector) {
    case Selector::midpoint: return "midpoint";
    case Selector::lower: return "lower";
    case Selector::upper: return "upper";
  }
  return "midpoint";
}

Substitution parse_substitution(const std::string& name) {
  if (name == "mean" || name == "gibbs_mean") return Substitution::gibbs_mean();
  if (name == "midpoint") return Substitution::feasible(Selector::midpoint);
  if (name == "lower") return Substitution::feasible(Selector::lower);
  if (name == "upper") return Substitution::feasible(Selector::upper);
  throw DomainError("unknown substitution '" + name + "'");
}

FeasibleInterval feasible_interval(const LossSpec& loss, double lambda,
                                   std::span<const double> weights,
                                   std::span<const double> predictions,
                                   std::span<const double> probe_ys) {
  std::vector<double> thresholds(probe_ys.size());
  for (std::size_t k = 0; k < probe_ys.size(); ++k) {
    thresholds[k] = mixture_loss(loss, lambda, weights, predictions, probe_ys[k]);
  }
  auto feasible = [&](double v) {
    for (std::size_t k = 0; k < probe_ys.size(); ++k) {
      const double t = thresholds[k];
      if (std::isinf(t)) continue;
      if (evaluate(loss, probe_ys[k], v) > t + kFeasibilitySlack * std::max(1.0, std::abs(t))) {
        return false;
      }
    }
    return true;
  };

  double anchor = 0.0;
  for (std::size_t g = 0; g < weights.size(); ++g) anchor += weights[g] * predictions[g];
  anchor = std::clamp(anchor, loss.interval.lo, loss.interval.hi);
  if (!feasible(anchor)) {
    throw DomainError("feasible set is empty: the Gibbs mean violates the mixture constraint");
  }

  // Bisection between an infeasible end and the feasible anchor.
  auto edge = [&](double outside) {
    if (feasible(outside)) return outside;
    double bad = outside;
    double good = anchor;
    for (int it = 0; it < 200 && std::abs(good - bad) > kBisectionTolerance; ++it) {
      const double mid = 0.5 * (good + bad);
      (feasible(mid) ? good : bad) = mid;
    }
    return good;
  };
  return {edge(loss.interval.lo), edge(loss.interval.hi)};
}

double pim_predict(const LossSpec& loss, double lambda, std::span<const double> weights,
                   std::span<const Expert> experts, double x, std::span<const double> probe_ys,
                   const Substitution& substitution) {
  std::vector<double> preds(experts.size());
  for (std::size_t g = 0; g < experts.size(); ++g) preds[g] = experts[g](x);
  if (substitution.kind == Substitution::Kind::gibbs_mean) {
    double mean = 0.0;
    for (std::size_t g = 0; g < preds.size(); ++g) mean += weights[g] * preds[g];
    return mean;
  }
  const auto range = feasible_interval(loss, lambda, weights, preds, probe_ys);
  switch (substitution.selector) {
    case Selector::lower: return range.lo;
    case Selector::upper: return range.hi;
    case Selector::midpoint: break;
  }
  return 0.5 * (range.lo + range.hi);
}

double pm_predict(std::span<const double> averaged_weights, std::span<const Expert> experts,
                  double x) {
  double out = 0.0;
  for (std::size_t g = 0; g < experts.size(); ++g) out += averaged_weights[g] * experts[g](x);
  return out;
}

AggregatorTrace build_trace(const LossSpec& loss, double lambda, std::span<const Expert> experts,
                            std::span<const Sample> data, const CumulativeLossTable& table,
                            const Substitution& substitution, std::span<const double> probe_ys) {
  const std::size_t steps = data.size();
  AggregatorTrace trace;
  trace.lambda = lambda;
  trace.substitution = substitution;
  trace.steps.resize(steps + 1);
  trace.averaged_weights.assign(experts.size(), 0.0);
  const double nan = std::numeric_limits<double>::quiet_NaN();
  for (std::size_t i = 0; i <= steps; ++i) {
    auto& step = trace.steps[i];
    step.weights = gibbs_weights(table, i, lambda);
    for (std::size_t g = 0; g < experts.size(); ++g) trace.averaged_weights[g] += step.weights[g];
    if (i < steps) {
      step.prediction = pim_predict(loss, lambda, step.weights, experts, data[i].x, probe_ys,
                                    substitution);
      step.loss = evaluate(loss, data[i].y, step.prediction);
    } else {
      step.prediction = nan;
      step.loss = nan;
    }
  }
  for (double& w : trace.averaged_weights) w /= static_cast<double>(steps + 1);
  return trace;
}

double pim_rule_predict(const LossSpec& loss, const AggregatorTrace& trace,
                        std::span<const Expert> experts, double x,
                        std::span<const double> probe_ys) {
  double sum = 0.0;
  for (const auto& step : trace.steps) {
    sum += pim_predict(loss, trace.lambda, step.weights, experts, x, probe_ys,
                       trace.substitution);
  }
  return sum / static_cast<double>(trace.steps.size());
}

std::size_t erm_select(const CumulativeLossTable& table) {
  if (table.num_experts() == 0) throw DomainError("ERM over an empty expert set");
  const std::size_t last = table.num_steps();
  std::size_t best = 0;
  for (std::size_t g = 1; g < table.num_experts(); ++g) {
    const double gap = table.at(best, last) - table.at(g, last);
    if (gap > kErmTieTolerance * std::max(1.0, std::abs(table.at(best, last)))) best = g;
  }
  return best;
}

Regret per_sequence_regret(const AggregatorTrace& trace, const CumulativeLossTable& table) {
  double incurred = 0.0;
  for (std::size_t i = 0; i + 1 < trace.steps.size(); ++i) incurred += trace.steps[i].loss;
  const std::size_t last = table.num_steps();
  double best = kInfinity;
  for (std::size_t g = 0; g < table.num_experts(); ++g) best = std::min(best, table.at(g, last));
  return {incurred - best,
          std::log(static_cast<double>(table.num_experts())) / trace.lambda};
}

}  // namespace mixlab

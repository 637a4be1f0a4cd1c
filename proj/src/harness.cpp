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

#include "mixlab/harness.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "mixlab/errors.hpp"

namespace mixlab {

namespace {

constexpr double kNan = std::numeric_limits<double>::quiet_NaN();
constexpr double kExcessSlack = 1e-12;
constexpr std::int64_t kMaxConditionedLength = 4096;
constexpr int kHistogramBins = 20;

bool excursion_defined(std::int64_t n, std::int64_t t) {
  return t >= 1 && t <= n && (n - t) % 2 == 0;
}

RuleStats rule_stats(std::span<const ReplicateRecord> records, double ReplicateRecord::*field,
                     bool enabled, std::span<const double> thresholds) {
  RuleStats stats;
  stats.enabled = enabled;
  if (!enabled || records.empty()) return stats;
  std::vector<double> values;
  values.reserve(records.size());
  for (const auto& r : records) values.push_back(r.*field);
  const MeanEstimate est = mean_and_sem(values);
  stats.mean = est.mean;
  stats.sem = est.sem;
  stats.min = *std::min_element(values.begin(), values.end());
  stats.max = *std::max_element(values.begin(), values.end());
  const auto trials = static_cast<std::int64_t>(values.size());
  for (double t : thresholds) {
    TailFrequency tail;
    tail.threshold = t;
    tail.count = std::count_if(values.begin(), values.end(), [t](double v) { return v >= t; });
    tail.freq = static_cast<double>(tail.count) / static_cast<double>(trials);
    const ProportionInterval ci = wilson_interval(tail.count, trials, kZ95);
    tail.wilson_lo = ci.lo;
    tail.wilson_hi = ci.hi;
    stats.tails.push_back(tail);
  }
  return stats;
}

}  // namespace

std::string_view to_string(ExperimentKind kind) {
  return kind == ExperimentKind::expectation ? "expectation" : "deviation";
}

LossSpec ExperimentConfig::loss_spec() const {
  return interval ? make_loss(loss, *interval) : make_loss(loss);
}

double ExperimentConfig::gamma_for(std::int64_t n) const {
  if (gamma) return *gamma;
  if (c0) return gamma_schedule(n, *c0);
  throw ConfigError("either gamma or c0 must be set", 0, "gamma");
}

TwoPointConstruction ExperimentConfig::construction_for(std::int64_t n) const {
  return make_construction(loss_spec(), y1, gamma_for(n), ytilde1);
}

void validate(const ExperimentConfig& config) {
  if (config.n_grid.empty()) throw ConfigError("n grid is empty", 0, "n");
  for (std::int64_t n : config.n_grid) {
    if (n < 2) throw ConfigError("every n must be at least 2", 0, "n");
  }
  if (config.replicates < 1) throw ConfigError("replicates must be at least 1", 0, "replicates");
  if (config.experts != 1 && config.experts != 2) {
    throw ConfigError("experts must be 1 or 2", 0, "experts");
  }
  if (config.gamma && config.c0) throw ConfigError("set gamma or c0, not both", 0, "gamma");
  if (!config.gamma && !config.c0) throw ConfigError("missing gamma or c0", 0, "gamma");
  if (config.c0 && !(*config.c0 >= 0.0)) throw ConfigError("c0 must be >= 0", 0, "c0");
  if (config.workers < 0) throw ConfigError("workers must be >= 0", 0, "workers");
  if (config.conditional_replicates < 0) {
    throw ConfigError("conditional_replicates must be >= 0", 0, "conditional_replicates");
  }
  for (double e : config.epsilons) {
    if (!(e > 0.0 && e < 1.0)) throw ConfigError("epsilons must lie in (0, 1)", 0, "epsilons");
  }
  try {
    (void)config.loss_spec();
  } catch (const DomainError& e) {
    throw ConfigError(e.what(), 0, "loss");
  }
  for (std::int64_t n : config.n_grid) (void)config.construction_for(n);
}

ReplicateContext make_context(const ExperimentConfig& config, std::int64_t n) {
  ReplicateContext ctx;
  ctx.construction = config.construction_for(n);
  ctx.n = n;
  const auto& c = ctx.construction;
  ctx.tau = tau(n, c.loss.lambda, c.delta);
  ctx.experts = config.experts;
  ctx.rules = config.rules;
  ctx.seed = config.seed;
  ctx.family = static_cast<std::uint64_t>(n);
  ctx.risk_g1 = exact_risk(c, c.ytilde1);

  const std::size_t size = static_cast<std::size_t>(2 * n + 3);
  ctx.weight.assign(size, 1.0);
  ctx.mean_pred.assign(size, c.ytilde1);
  ctx.pim_pred.assign(size, c.ytilde1);
  if (config.experts == 2) {
    const std::vector<Expert> experts{c.g1(), c.g2()};
    const double probes[2] = {c.y1, c.y2};
    const bool general_pim =
        config.rules.pim && config.rules.pim_substitution.kind != Substitution::Kind::gibbs_mean;
    for (std::int64_t s = -(n + 1); s <= n + 1; ++s) {
      const std::size_t k = ctx.index(s);
      const double w = two_expert_weight(s, c.loss.lambda, c.delta);
      ctx.weight[k] = w;
      ctx.mean_pred[k] = c.ytilde2 + w * (c.ytilde1 - c.ytilde2);
      if (general_pim) {
        const double weights[2] = {w, 1.0 - w};
        ctx.pim_pred[k] = pim_predict(c.loss, c.loss.lambda, weights, experts, 0.0, probes,
                                      config.rules.pim_substitution);
      } else {
        ctx.pim_pred[k] = ctx.mean_pred[k];
      }
    }
  }
  ctx.mean_loss_y1.resize(size);
  ctx.mean_loss_y2.resize(size);
  ctx.pim_loss_y1.resize(size);
  ctx.pim_loss_y2.resize(size);
  for (std::size_t k = 0; k < size; ++k) {
    ctx.mean_loss_y1[k] = evaluate(c.loss, c.y1, ctx.mean_pred[k]);
    ctx.mean_loss_y2[k] = evaluate(c.loss, c.y2, ctx.mean_pred[k]);
    ctx.pim_loss_y1[k] = evaluate(c.loss, c.y1, ctx.pim_pred[k]);
    ctx.pim_loss_y2[k] = evaluate(c.loss, c.y2, ctx.pim_pred[k]);
  }
  return ctx;
}

ReplicateRecord simulate_walk(const ReplicateContext& ctx, std::span<const std::int8_t> steps,
                              bool next_label_is_y1) {
  const auto& c = ctx.construction;
  const std::int64_t n = ctx.n;
  if (static_cast<std::int64_t>(steps.size()) != n) throw DomainError("walk length must equal n");

  const double l11 = evaluate(c.loss, c.y1, c.ytilde1);
  const double l12 = evaluate(c.loss, c.y1, c.ytilde2);
  const double l21 = evaluate(c.loss, c.y2, c.ytilde1);
  const double l22 = evaluate(c.loss, c.y2, c.ytilde2);

  ReplicateRecord rec;
  rec.n = n;
  const bool check_excursion = excursion_defined(n, ctx.tau);
  bool excursion = check_excursion;
  double weight_sum = 0.0, pim_sum = 0.0, max_w = 0.0;
  double online = 0.0, online_pim = 0.0, sigma1 = 0.0, sigma2 = 0.0;
  std::int64_t s = 0;
  for (std::int64_t i = 0; i <= n; ++i) {
    const std::size_t k = ctx.index(s);
    weight_sum += ctx.weight[k];
    pim_sum += ctx.pim_pred[k];
    if (i >= ctx.tau) {
      max_w = std::max(max_w, ctx.weight[k]);
      if (s > -ctx.tau) excursion = false;
    }
    // Y_{i+1}: a training label for i < n, the extra label for i = n.
    const bool label_y1 = i < n ? steps[static_cast<std::size_t>(i)] > 0 : next_label_is_y1;
    if (label_y1) {
      online += ctx.mean_loss_y1[k];
      online_pim += ctx.pim_loss_y1[k];
      sigma1 += l11;
      sigma2 += l12;
    } else {
      online += ctx.mean_loss_y2[k];
      online_pim += ctx.pim_loss_y2[k];
      sigma1 += l21;
      sigma2 += l22;
    }
    if (i < n) s += steps[static_cast<std::size_t>(i)];
  }
  const double count = static_cast<double>(n + 1);
  rec.walk_sum = s;
  rec.excursion = check_excursion && excursion;
  rec.p = weight_sum / count;
  rec.max_weight_from_tau = max_w;
  rec.pm_value = c.ytilde2 + rec.p * (c.ytilde1 - c.ytilde2);
  rec.pim_value = pim_sum / count;
  if (ctx.experts == 1) {
    rec.pm_value = c.ytilde1;
    rec.pim_value = c.ytilde1;
  }
  rec.excess_pm = ctx.rules.pm ? exact_risk(c, rec.pm_value) - ctx.risk_g1 : kNan;
  rec.excess_pim = ctx.rules.pim ? exact_risk(c, rec.pim_value) - ctx.risk_g1 : kNan;
  rec.erm_choice = (ctx.experts == 2 && s < 0) ? 1 : 0;
  rec.excess_erm =
      ctx.rules.erm ? (rec.erm_choice == 1 ? exact_risk(c, c.ytilde2) - ctx.risk_g1 : 0.0) : kNan;
  const double best = ctx.experts == 2 ? std::min(sigma1, sigma2) : sigma1;
  rec.regret = online - best;
  rec.regret_pim = online_pim - best;
  rec.regret_bound = std::log(static_cast<double>(ctx.experts)) / c.loss.lambda;
  return rec;
}

ReplicateRecord simulate_replicate(const ReplicateContext& ctx, std::int64_t replicate) {
  const std::uint64_t seed =
      substream_seed(ctx.seed, ctx.family, static_cast<std::uint64_t>(replicate));
  RngStream stream(seed);
  const auto data = sample_dataset(ctx.construction, static_cast<int>(ctx.n + 1), stream);
  std::vector<std::int8_t> steps(static_cast<std::size_t>(ctx.n));
  for (std::size_t j = 0; j < steps.size(); ++j) {
    steps[j] = data[j].y == ctx.construction.y1 ? 1 : -1;
  }
  ReplicateRecord rec = simulate_walk(ctx, steps, data.back().y == ctx.construction.y1);
  rec.replicate = replicate;
  rec.seed_stream = seed;
  return rec;
}

SummaryStats summarize(const ExperimentConfig& config, const ReplicateContext& ctx,
                       std::span<const ReplicateRecord> records,
                       std::span<const ReplicateRecord> conditioned) {
  const auto& c = ctx.construction;
  SummaryStats out;
  out.n = ctx.n;
  out.gamma = c.gamma;
  out.tau = ctx.tau;
  out.lambda = c.loss.lambda;
  out.delta = c.delta;
  out.range_bound = c.loss.range_bound;
  out.experts = ctx.experts;
  out.replicates = static_cast<std::int64_t>(records.size());
  out.pm = rule_stats(records, &ReplicateRecord::excess_pm, config.rules.pm,
                      config.tail_thresholds);
  out.pim = rule_stats(records, &ReplicateRecord::excess_pim, config.rules.pim,
                       config.tail_thresholds);
  out.erm = rule_stats(records, &ReplicateRecord::excess_erm, config.rules.erm,
                       config.tail_thresholds);
  const double log_g = std::log(static_cast<double>(ctx.experts));
  out.expectation_bound = log_g / (c.loss.lambda * static_cast<double>(ctx.n + 1));
  out.erm_upper_bound =
      ctx.experts == 1 ? 0.0 : c.loss.range_bound * std::sqrt(2.0 * log_g / static_cast<double>(ctx.n));

  if (config.rules.pm && !records.empty()) {
    const double half = risk_gap(c) / 2.0;
    out.half_gap_tail = rule_stats(records, &ReplicateRecord::excess_pm, true,
                                   std::span<const double>(&half, 1))
                            .tails.front();
  }
  out.excursion_count = std::count_if(records.begin(), records.end(),
                                      [](const ReplicateRecord& r) { return r.excursion; });
  if (!records.empty()) {
    out.excursion_freq =
        static_cast<double>(out.excursion_count) / static_cast<double>(records.size());
    out.excursion_wilson95 = wilson_interval(out.excursion_count, out.replicates, kZ95);
    out.excursion_wilson3 = wilson_interval(out.excursion_count, out.replicates, kZ3Sigma);
  }
  if (excursion_defined(ctx.n, ctx.tau) && ctx.n <= 100000) {
    out.has_dp_exact = true;
    out.dp_exact = excursion_probability_exact(ctx.n, ctx.tau, c.gamma);
    out.excursion_consistent =
        out.dp_exact >= out.excursion_wilson3.lo && out.dp_exact <= out.excursion_wilson3.hi;
  }

  const double gap = risk_gap(c);
  const double spread = c.ytilde1 - c.ytilde2;
  const double slope = ctx.experts == 2 ? std::abs(derivatives(c.loss, c.y1, c.ytilde2).first) : 0.0;
  const double n1 = static_cast<double>(ctx.n + 1);
  const double weight_cap = 1.0 / n1;

  bool first = true;
  auto visit_all = [&](const ReplicateRecord& r) {
    const double margin = std::max(r.regret - r.regret_bound, r.regret_pim - r.regret_bound);
    if (margin > kRegretTolerance) ++out.regret_violations;
    out.worst_regret_margin = first ? margin : std::max(out.worst_regret_margin, margin);
    first = false;
    if (config.rules.erm && r.excess_erm < -kExcessSlack) ++out.erm_negative_excess;
    if (config.rules.pm && r.excess_pm < gap - spread * slope * r.p - kExcessSlack) {
      ++out.argab_violations;
    }
  };
  for (const auto& r : records) visit_all(r);
  for (const auto& r : conditioned) visit_all(r);

  ConditionalStats& cond = out.conditional;
  std::vector<const ReplicateRecord*> hits;
  for (const auto& r : records) {
    if (r.excursion) hits.push_back(&r);
  }
  cond.from_monte_carlo = static_cast<std::int64_t>(hits.size());
  for (const auto& r : conditioned) {
    if (r.excursion) hits.push_back(&r);
  }
  cond.count = static_cast<std::int64_t>(hits.size());
  cond.available = cond.count > 0;
  if (cond.available) {
    std::vector<double> pm_values, pim_values;
    std::int64_t pm_above = 0, pim_above = 0;
    for (const auto* r : hits) {
      pm_values.push_back(r->excess_pm);
      pim_values.push_back(r->excess_pim);
      if (r->excess_pm >= gap / 2.0) ++pm_above;
      if (r->excess_pim >= gap / 2.0) ++pim_above;
      if (r->max_weight_from_tau > weight_cap) ++cond.weight_violations;
      if (r->pm_value < c.ytilde2 || r->pm_value > c.ytilde1) ++cond.pm_bracket_violations;
      if (r->pim_value < c.ytilde2 || r->pim_value > c.ytilde1) ++cond.pim_bracket_violations;
      const double p_cap =
          spread * (static_cast<double>(ctx.tau + 1) / n1 + r->max_weight_from_tau);
      if (r->pm_value - c.ytilde2 > p_cap + kExcessSlack) ++cond.p_bound_violations;
    }
    const double count = static_cast<double>(cond.count);
    if (config.rules.pm) {
      cond.mean_excess_pm = mean_and_sem(pm_values).mean;
      cond.min_excess_pm = *std::min_element(pm_values.begin(), pm_values.end());
      cond.frac_pm_above_half_gap = static_cast<double>(pm_above) / count;
      Histogram& h = cond.pm_histogram;
      h.lo = std::min(0.0, cond.min_excess_pm);
      h.hi = std::max(gap, *std::max_element(pm_values.begin(), pm_values.end()));
      h.counts.assign(kHistogramBins, 0);
      const double width = (h.hi - h.lo) / kHistogramBins;
      for (double v : pm_values) {
        auto bin = width > 0.0 ? static_cast<std::int64_t>((v - h.lo) / width) : 0;
        bin = std::clamp<std::int64_t>(bin, 0, kHistogramBins - 1);
        ++h.counts[static_cast<std::size_t>(bin)];
      }
    }
    if (config.rules.pim) {
      cond.mean_excess_pim = mean_and_sem(pim_values).mean;
      cond.min_excess_pim = *std::min_element(pim_values.begin(), pim_values.end());
      cond.frac_pim_above_half_gap = static_cast<double>(pim_above) / count;
    }
  }
  return out;
}

ExperimentResult run_experiment(const ExperimentConfig& config) {
  validate(config);
  ExperimentResult result;
  for (std::int64_t n : config.n_grid) {
    const ReplicateContext ctx = make_context(config, n);
    auto records = run_replicates_omp(ctx, config.replicates, config.workers);
    std::vector<ReplicateRecord> conditioned;
    if (config.kind == ExperimentKind::deviation && config.conditional_replicates > 0 &&
        ctx.experts == 2 && excursion_defined(n, ctx.tau) && n <= kMaxConditionedLength) {
      const ExcursionSampler sampler(n, ctx.tau, ctx.construction.gamma);
      if (sampler.probability() > 0.0) {
        conditioned = run_conditioned_omp(ctx, sampler, config.conditional_replicates,
                                          config.workers);
      }
    }
    result.summaries.push_back(summarize(config, ctx, records, conditioned));
    result.records.insert(result.records.end(), records.begin(), records.end());
    result.conditioned.insert(result.conditioned.end(), conditioned.begin(), conditioned.end());
  }
  return result;
}

ExperimentConfig default_deviation_config(std::int64_t n, double c0, std::int64_t replicates) {
  ExperimentConfig config;
  config.kind = ExperimentKind::deviation;
  config.loss = LossKind::square;
  config.interval = Interval{0.0, 1.0};
  config.y1 = 1.0;
  config.ytilde1 = 0.8;
  config.c0 = c0;
  config.n_grid = {n};
  config.replicates = replicates;
  config.rules.pim_substitution = Substitution::gibbs_mean();
  return config;
}

std::vector<DeviationReport> deviation_experiment(const ExperimentConfig& config) {
  const ExperimentResult result = run_experiment(config);
  std::vector<DeviationReport> reports;
  std::size_t offset = 0;
  for (const auto& summary : result.summaries) {
    DeviationReport report;
    report.summary = summary;
    report.gamma = summary.gamma;
    report.half_gap = summary.gamma * summary.delta / 2.0;
    report.target = config.c0 ? std::pow(static_cast<double>(summary.n), -*config.c0) : kNan;
    const auto count = static_cast<std::size_t>(summary.replicates);
    for (std::size_t k = offset; k < offset + count; ++k) {
      if (result.records[k].excess_pm >= report.half_gap) ++report.tail_count;
    }
    offset += count;
    report.tail_freq =
        static_cast<double>(report.tail_count) / static_cast<double>(summary.replicates);
    report.tail_wilson95 = wilson_interval(report.tail_count, summary.replicates, kZ95);
    reports.push_back(report);
  }
  return reports;
}

std::vector<DeviationUpperReport> deviation_upper_check(const ExperimentConfig& config) {
  const LossSpec loss = config.loss_spec();
  if (!std::isfinite(loss.range_bound)) {
    throw DomainError("deviation upper check needs a finite range bound");
  }
  const ExperimentResult result = run_experiment(config);
  std::vector<DeviationUpperReport> reports;
  std::size_t offset = 0;
  for (const auto& summary : result.summaries) {
    DeviationUpperReport report;
    report.n = summary.n;
    report.gamma = summary.gamma;
    report.note =
        "threshold level 2*eps follows the proof; the statement claims eps";
    const auto count = static_cast<std::size_t>(summary.replicates);
    const double reps = static_cast<double>(summary.replicates);
    const double n1 = static_cast<double>(summary.n + 1);
    const double log_g = std::log(static_cast<double>(summary.experts));
    for (double eps : config.epsilons) {
      DeviationUpperRow row;
      row.epsilon = eps;
      row.threshold = loss.range_bound * std::sqrt(2.0 * std::log(1.0 / eps) / n1) +
                      log_g / (loss.lambda * n1);
      std::int64_t pm_hits = 0, pim_hits = 0;
      for (std::size_t k = offset; k < offset + count; ++k) {
        if (result.records[k].excess_pm > row.threshold) ++pm_hits;
        if (result.records[k].excess_pim > row.threshold) ++pim_hits;
      }
      row.freq_pm = static_cast<double>(pm_hits) / reps;
      row.freq_pim = static_cast<double>(pim_hits) / reps;
      const double level = std::min(2.0 * eps, 1.0);
      row.sigma = std::sqrt(level * (1.0 - level) / reps);
      const double worst = std::max(config.rules.pm ? row.freq_pm : 0.0,
                                    config.rules.pim ? row.freq_pim : 0.0);
      row.within_proof_level = worst <= level + 3.0 * row.sigma;
      row.within_stated_level = worst <= eps + 3.0 * std::sqrt(eps * (1.0 - eps) / reps);
      report.rows.push_back(row);
    }
    offset += count;
    reports.push_back(report);
  }
  return reports;
}

double walk_negative_probability(std::int64_t n, double up_prob) {
  if (n < 0) throw DomainError("walk length must be nonnegative");
  if (!(up_prob >= 0.0 && up_prob <= 1.0)) throw DomainError("step probability outside [0, 1]");
  // S_n = 2k - n < 0 iff k < n/2, with k ~ Binomial(n, up_prob).
  if (up_prob == 0.0) return n > 0 ? 1.0 : 0.0;
  if (up_prob == 1.0) return 0.0;
  const long double lu = std::log(static_cast<long double>(up_prob));
  const long double ld = std::log1p(-static_cast<long double>(up_prob));
  const long double nd = static_cast<long double>(n);
  const long double log_nfact = std::lgamma(nd + 1.0L);
  long double sum = 0.0L;
  for (std::int64_t k = 0; 2 * k < n; ++k) {
    const long double kd = static_cast<long double>(k);
    sum += std::exp(log_nfact - std::lgamma(kd + 1.0L) - std::lgamma(nd - kd + 1.0L) + kd * lu +
                    (nd - kd) * ld);
  }
  const double total = static_cast<double>(sum);
  return std::min(total, 1.0);
}

ErmLowerReport erm_exact_lower(std::span<const std::int64_t> n_grid, double delta) {
  ErmLowerReport report;
  report.delta = delta;
  report.normal_limit = normal_cdf(-0.5) / 2.0;
  for (std::int64_t n : n_grid) {
    ErmLowerRow row;
    row.n = n;
    row.gamma = erm_gamma(n);
    const double gd = row.gamma * delta;
    row.excess_plus = gd * walk_negative_probability(n, 0.5 * (1.0 + row.gamma));
    row.excess_minus = gd * (1.0 - walk_negative_probability(n, 0.5 * (1.0 - row.gamma)));
    row.max_excess = std::max(row.excess_plus, row.excess_minus);
    const double nd = static_cast<double>(n);
    row.bound = delta / 8.0 * std::min(std::sqrt(1.0 / nd), 2.0);
    row.asserted = n >= 64;
    row.holds = row.max_excess >= row.bound;
    row.normalized = row.max_excess / (delta / std::sqrt(nd));
    report.rows.push_back(row);
  }
  return report;
}

std::vector<ErmUpperRow> erm_upper_check(const ExperimentConfig& config) {
  const ExperimentResult result = run_experiment(config);
  std::vector<ErmUpperRow> rows;
  for (const auto& s : result.summaries) {
    ErmUpperRow row;
    row.n = s.n;
    row.gamma = s.gamma;
    row.mean_excess = s.erm.mean;
    row.sem = s.erm.sem;
    row.bound = s.erm_upper_bound;
    row.holds = row.mean_excess <= row.bound + 3.0 * row.sem;
    rows.push_back(row);
  }
  return rows;
}

PmMoments pm_weight_moments(std::int64_t n, double gamma, double lambda, double delta) {
  if (n < 0) throw DomainError("n must be nonnegative");
  const double up = 0.5 * (1.0 + gamma);
  const double down = 0.5 * (1.0 - gamma);
  const std::size_t size = static_cast<std::size_t>(2 * n + 3);
  const std::int64_t off = n + 1;
  // prob = P(S_i = s), m1 = E[A_i 1{S_i = s}], m2 = E[A_i^2 1{S_i = s}],
  // with A_i = sum_{j <= i} w(S_j).
  std::vector<double> prob(size, 0.0), m1(size, 0.0), m2(size, 0.0);
  std::vector<double> nprob(size), nm1(size), nm2(size);
  const double w0 = two_expert_weight(0, lambda, delta);
  prob[off] = 1.0;
  m1[off] = w0;
  m2[off] = w0 * w0;
  for (std::int64_t i = 1; i <= n; ++i) {
    std::fill(nprob.begin(), nprob.end(), 0.0);
    std::fill(nm1.begin(), nm1.end(), 0.0);
    std::fill(nm2.begin(), nm2.end(), 0.0);
    for (std::int64_t s = -i; s <= i; s += 2) {
      const double w = two_expert_weight(s, lambda, delta);
      double p = 0.0, a = 0.0, b = 0.0;
      const auto from = [&](std::int64_t src, double q) {
        const std::size_t k = static_cast<std::size_t>(src + off);
        p += q * prob[k];
        a += q * (m1[k] + w * prob[k]);
        b += q * (m2[k] + 2.0 * w * m1[k] + w * w * prob[k]);
      };
      if (s - 1 >= -(i - 1)) from(s - 1, up);
      if (s + 1 <= i - 1) from(s + 1, down);
      const std::size_t k = static_cast<std::size_t>(s + off);
      nprob[k] = p;
      nm1[k] = a;
      nm2[k] = b;
    }
    prob.swap(nprob);
    m1.swap(nm1);
    m2.swap(nm2);
  }
  PmMoments out;
  const double n1 = static_cast<double>(n + 1);
  for (std::size_t k = 0; k < size; ++k) {
    out.mean_p += m1[k];
    out.mean_p2 += m2[k];
  }
  out.mean_p /= n1;
  out.mean_p2 /= n1 * n1;
  return out;
}

std::vector<MixtureLowerScaleRow> mixture_lower_scale(const ExperimentConfig& config) {
  std::vector<MixtureLowerScaleRow> rows;
  for (std::int64_t n : config.n_grid) {
    ExperimentConfig local = config;
    local.gamma = 1.0 / static_cast<double>(n + 1);
    local.c0.reset();
    local.experts = 2;
    local.n_grid = {n};
    const ExperimentResult result = run_experiment(local);
    const SummaryStats& s = result.summaries.front();
    const TwoPointConstruction c = local.construction_for(n);

    MixtureLowerScaleRow row;
    row.n = n;
    row.gamma = c.gamma;
    const double n1 = static_cast<double>(n + 1);
    row.benchmark = c.kappa / (std::exp(1.0) * n1);
    row.pm_upper = std::log(2.0) / (c.loss.lambda * n1);
    row.erm_exact = risk_gap(c) * walk_negative_probability(n, c.prob_y1());
    if (c.loss.kind == LossKind::square) {
      const PmMoments m = pm_weight_moments(n, c.gamma, c.loss.lambda, c.delta);
      const double mu = c.prob_y1() * c.y1 + (1.0 - c.prob_y1()) * c.y2;
      const double d = c.ytilde1 - c.ytilde2;
      const double base = c.ytilde2 - mu;
      row.has_pm_exact = true;
      row.pm_exact = base * base + 2.0 * base * d * m.mean_p + d * d * m.mean_p2 -
                     (c.ytilde1 - mu) * (c.ytilde1 - mu);
    }
    row.pm_mc = s.pm.mean;
    row.pm_mc_sem = s.pm.sem;
    row.pim_mc = s.pim.mean;
    row.pim_mc_sem = s.pim.sem;
    row.pm_within_upper = row.has_pm_exact ? row.pm_exact <= row.pm_upper
                                           : row.pm_mc <= row.pm_upper + 3.0 * row.pm_mc_sem;
    rows.push_back(row);
  }
  return rows;
}

}  // namespace mixlab

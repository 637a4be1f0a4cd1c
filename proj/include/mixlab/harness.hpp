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
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "mixlab/aggregation.hpp"
#include "mixlab/construction.hpp"
#include "mixlab/loss.hpp"
#include "mixlab/random_walk.hpp"
#include "mixlab/stats.hpp"

namespace mixlab {

enum class ExperimentKind { expectation, deviation };

std::string_view to_string(ExperimentKind kind);

struct RuleSet {
  bool pm = true;
  bool pim = true;
  Substitution pim_substitution = Substitution::feasible(Selector::midpoint);
  bool erm = true;
};

struct ExperimentConfig {
  ExperimentKind kind = ExperimentKind::expectation;
  LossKind loss = LossKind::square;
  std::optional<Interval> interval;  // canonical interval when unset
  double y1 = 1.0;
  double ytilde1 = 0.8;
  std::optional<double> gamma;  // fixed gamma, or
  std::optional<double> c0;     // gamma = gamma_schedule(n, c0)
  int experts = 2;              // 1 (g1 only) or 2 (g1, g2)
  std::vector<std::int64_t> n_grid;
  std::int64_t replicates = 1000;
  std::uint64_t seed = 0;
  int workers = 0;  // 0: OpenMP default
  RuleSet rules;
  std::vector<double> tail_thresholds;
  std::vector<double> epsilons;
  /// Paths drawn from the law conditioned on E_tau (deviation runs only).
  std::int64_t conditional_replicates = 0;

  LossSpec loss_spec() const;
  double gamma_for(std::int64_t n) const;
  TwoPointConstruction construction_for(std::int64_t n) const;
};

/// Throws ConfigError / InfeasibleConstruction on invalid settings.
void validate(const ExperimentConfig& config);

struct ReplicateRecord {
  std::int64_t n = 0;
  std::int64_t replicate = 0;
  std::uint64_t seed_stream = 0;
  std::int64_t walk_sum = 0;  // S_n
  bool excursion = false;
  bool conditioned = false;  // drawn from the law conditioned on E_tau
  double p = 0.0;            // time-averaged g1 weight
  double excess_pm = 0.0;
  double excess_pim = 0.0;
  double excess_erm = 0.0;
  double regret = 0.0;  // Gibbs-mean substitution
  double regret_bound = 0.0;
  // diagnostics
  double regret_pim = 0.0;
  double pm_value = 0.0;
  double pim_value = 0.0;
  double max_weight_from_tau = 0.0;  // max_{tau <= i <= n} pi_i(g1)
  std::size_t erm_choice = 0;
};

/// Per-S lookup tables for the two-expert closed forms at one sample size.
struct ReplicateContext {
  TwoPointConstruction construction;
  std::int64_t n = 0;
  std::int64_t tau = 0;
  int experts = 2;
  RuleSet rules;
  std::uint64_t seed = 0;
  std::uint64_t family = 0;  // substream family, derived from n
  double risk_g1 = 0.0;
  // indexed by S + n + 1 for S in [-(n+1), n+1]
  std::vector<double> weight;
  std::vector<double> mean_pred, mean_loss_y1, mean_loss_y2;
  std::vector<double> pim_pred, pim_loss_y1, pim_loss_y2;

  std::size_t index(std::int64_t s) const { return static_cast<std::size_t>(s + n + 1); }
};

/// Builds the tables; feasible-interval substitutions are evaluated once per S.
/// Throws DomainError if a substitution is infeasible.
ReplicateContext make_context(const ExperimentConfig& config, std::int64_t n);

/// Replicate from a given training walk (n steps) and the extra label Y_{n+1}
/// used by the online regret.
ReplicateRecord simulate_walk(const ReplicateContext& ctx, std::span<const std::int8_t> steps,
                              bool next_label_is_y1);

/// Draws n + 1 pairs from the construction on substream (seed, family, replicate).
ReplicateRecord simulate_replicate(const ReplicateContext& ctx, std::int64_t replicate);

/// Serial reference and OpenMP kernel over replicates 0..count-1. Results are
/// ordered by replicate index and identical for every worker count.
std::vector<ReplicateRecord> run_replicates_serial(const ReplicateContext& ctx,
                                                   std::int64_t count);
std::vector<ReplicateRecord> run_replicates_omp(const ReplicateContext& ctx, std::int64_t count,
                                                int workers);

/// Substream family of the conditioned draws at the context's n.
std::uint64_t conditioned_family(const ReplicateContext& ctx);

/// Replicates whose training walk is drawn from the law conditioned on E_tau.
std::vector<ReplicateRecord> run_conditioned_omp(const ReplicateContext& ctx,
                                                 const ExcursionSampler& sampler,
                                                 std::int64_t count, int workers);

struct TailFrequency {
  double threshold = 0.0;
  std::int64_t count = 0;
  double freq = 0.0;
  double wilson_lo = 0.0;
  double wilson_hi = 0.0;
  friend bool operator==(const TailFrequency&, const TailFrequency&) = default;
};

struct RuleStats {
  bool enabled = false;
  double mean = 0.0;
  double sem = 0.0;
  double min = 0.0;
  double max = 0.0;
  std::vector<TailFrequency> tails;
  friend bool operator==(const RuleStats&, const RuleStats&) = default;
};

struct Histogram {
  double lo = 0.0;
  double hi = 0.0;
  std::vector<std::int64_t> counts;
  friend bool operator==(const Histogram&, const Histogram&) = default;
};

struct ConditionalStats {
  std::int64_t count = 0;  // excursion replicates (Monte Carlo + conditioned)
  std::int64_t from_monte_carlo = 0;
  bool available = false;
  double mean_excess_pm = 0.0;
  double min_excess_pm = 0.0;
  double mean_excess_pim = 0.0;
  double min_excess_pim = 0.0;
  double frac_pm_above_half_gap = 0.0;   // excess_pm >= gamma delta / 2
  double frac_pim_above_half_gap = 0.0;
  std::int64_t weight_violations = 0;    // pi_i(g1) > 1/(n+1) for some i >= tau
  std::int64_t pm_bracket_violations = 0;   // g_pm outside [ytilde2, ytilde1]
  std::int64_t pim_bracket_violations = 0;
  std::int64_t p_bound_violations = 0;      // g_pm - ytilde2 > (ytilde1-ytilde2)[(tau+1)/(n+1) + max pi]
  Histogram pm_histogram;
  friend bool operator==(const ConditionalStats&, const ConditionalStats&) = default;
};

struct SummaryStats {
  std::int64_t n = 0;
  double gamma = 0.0;
  std::int64_t tau = 0;
  double lambda = 0.0;
  double delta = 0.0;
  double range_bound = 0.0;
  int experts = 2;
  std::int64_t replicates = 0;
  RuleStats pm, pim, erm;
  double expectation_bound = 0.0;  // log|G| / (lambda (n+1))
  double erm_upper_bound = 0.0;    // B sqrt(2 log|G| / n)
  TailFrequency half_gap_tail;  // P(excess_pm >= gamma delta / 2), Wilson 95%
  std::int64_t excursion_count = 0;
  double excursion_freq = 0.0;
  ProportionInterval excursion_wilson95;
  ProportionInterval excursion_wilson3;
  bool has_dp_exact = false;
  double dp_exact = 0.0;
  bool excursion_consistent = true;  // dp_exact inside excursion_wilson3
  ConditionalStats conditional;
  std::int64_t regret_violations = 0;
  double worst_regret_margin = 0.0;  // max(regret - bound)
  std::int64_t erm_negative_excess = 0;  // ERM excess below -1e-12
  std::int64_t argab_violations = 0;     // excess_pm < gamma delta - (y~1 - y~2)|l'_{y1}(y~2)| p
  friend bool operator==(const SummaryStats&, const SummaryStats&) = default;
};

inline bool operator==(const ProportionInterval& a, const ProportionInterval& b) {
  return a.lo == b.lo && a.hi == b.hi;
}

struct ExperimentResult {
  std::vector<ReplicateRecord> records;
  std::vector<ReplicateRecord> conditioned;
  std::vector<SummaryStats> summaries;
};

/// Runs every n in the grid. Deterministic given config.seed.
ExperimentResult run_experiment(const ExperimentConfig& config);

/// Summary of the records at one n (plus conditioned excursion paths).
SummaryStats summarize(const ExperimentConfig& config, const ReplicateContext& ctx,
                       std::span<const ReplicateRecord> records,
                       std::span<const ReplicateRecord> conditioned);

/// The square-loss construction used for the deviation phenomenon:
/// interval [0,1], a = 0.5, y1 = 1, ytilde1 = 0.8 (lambda = 0.5, delta = 0.6).
ExperimentConfig default_deviation_config(std::int64_t n, double c0, std::int64_t replicates);

struct DeviationReport {
  SummaryStats summary;
  double gamma = 0.0;
  double half_gap = 0.0;  // gamma delta / 2
  double target = 0.0;    // n^{-C0}
  std::int64_t tail_count = 0;  // excess_pm >= gamma delta / 2, unconditional
  double tail_freq = 0.0;
  ProportionInterval tail_wilson95;
};

/// One report per n in the grid.
std::vector<DeviationReport> deviation_experiment(const ExperimentConfig& config);

struct DeviationUpperRow {
  double epsilon = 0.0;
  double threshold = 0.0;  // B sqrt(2 log(1/eps)/(n+1)) + log|G|/(lambda(n+1))
  double freq_pm = 0.0;
  double freq_pim = 0.0;
  double sigma = 0.0;          // sqrt(2eps(1-2eps)/R)
  bool within_proof_level = false;   // freq <= 2 eps + 3 sigma (both rules)
  bool within_stated_level = false;  // freq <= eps + 3 sqrt(eps(1-eps)/R)
};

struct DeviationUpperReport {
  std::int64_t n = 0;
  double gamma = 0.0;
  std::vector<DeviationUpperRow> rows;
  std::string note;
};

/// Requires a finite range bound B; one report per n in the grid.
std::vector<DeviationUpperReport> deviation_upper_check(const ExperimentConfig& config);

struct ErmLowerRow {
  std::int64_t n = 0;
  double gamma = 0.0;
  double excess_plus = 0.0;   // g1 optimal: gamma delta P(S_n < 0)
  double excess_minus = 0.0;  // g2 optimal: gamma delta P(S_n >= 0)
  double max_excess = 0.0;
  double bound = 0.0;  // (delta/8) min(sqrt(1/n), 2)
  bool asserted = false;  // n >= 64
  bool holds = false;
  double normalized = 0.0;  // max_excess / (delta / sqrt(n))
};

struct ErmLowerReport {
  double delta = 0.0;
  double normal_limit = 0.0;  // Phi(-1/2) / 2
  std::vector<ErmLowerRow> rows;
};

/// P(S_n < 0) when steps are +1 with probability up_prob (exact binomial sum).
double walk_negative_probability(std::int64_t n, double up_prob);

ErmLowerReport erm_exact_lower(std::span<const std::int64_t> n_grid, double delta);

struct ErmUpperRow {
  std::int64_t n = 0;
  double gamma = 0.0;
  double mean_excess = 0.0;
  double sem = 0.0;
  double bound = 0.0;  // B sqrt(2 log|G| / n)
  bool holds = false;
};

std::vector<ErmUpperRow> erm_upper_check(const ExperimentConfig& config);

struct PmMoments {
  double mean_p = 0.0;
  double mean_p2 = 0.0;
};

/// E[p] and E[p^2] for p = (1/(n+1)) sum_i 1/(1 + exp(-lambda delta S_i)), by
/// forward dynamic programming over (i, S_i).
PmMoments pm_weight_moments(std::int64_t n, double gamma, double lambda, double delta);

struct MixtureLowerScaleRow {
  std::int64_t n = 0;
  double gamma = 0.0;
  double benchmark = 0.0;  // e^{-1} kappa / (n+1)
  double pm_upper = 0.0;   // log 2 / (lambda (n+1))
  double erm_exact = 0.0;
  bool has_pm_exact = false;  // square loss only
  double pm_exact = 0.0;
  double pm_mc = 0.0, pm_mc_sem = 0.0;
  double pim_mc = 0.0, pim_mc_sem = 0.0;
  bool pm_within_upper = false;
};

std::vector<MixtureLowerScaleRow> mixture_lower_scale(const ExperimentConfig& config);

}  // namespace mixlab

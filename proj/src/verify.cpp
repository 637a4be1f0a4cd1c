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

#include "mixlab/verify.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <iomanip>
#include <limits>
#include <sstream>
#include <stdexcept>

#include "mixlab/aggregation.hpp"
#include "mixlab/construction.hpp"
#include "mixlab/harness.hpp"
#include "mixlab/loss.hpp"
#include "mixlab/random_walk.hpp"
#include "mixlab/regret_batch.hpp"
#include "mixlab/rng.hpp"

namespace mixlab {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

/// Accumulates cases for one table row; margin >= 0 means the case passed.
class RowBuilder {
 public:
  RowBuilder(std::string suite, std::string check, double tolerance) {
    row_.suite = std::move(suite);
    row_.check = std::move(check);
    row_.tolerance = tolerance;
    row_.worst_margin = kInf;
  }

  void add(double margin, const std::string& description) {
    ++row_.cases;
    const bool ok = margin >= 0.0;
    if (!ok) {
      ++row_.violations;
      if (row_.failing_case.empty()) row_.failing_case = description;
    }
    row_.worst_margin = std::min(row_.worst_margin, margin);
  }

  template <typename Describe>
  void add_lazy(double margin, Describe&& describe) {
    if (margin >= 0.0) {
      ++row_.cases;
      row_.worst_margin = std::min(row_.worst_margin, margin);
    } else {
      add(margin, describe());
    }
  }

  void add_bulk(std::int64_t cases, std::int64_t violations, double worst_margin,
                const std::string& description) {
    row_.cases += cases;
    row_.violations += violations;
    if (violations > 0 && row_.failing_case.empty()) row_.failing_case = description;
    row_.worst_margin = std::min(row_.worst_margin, worst_margin);
  }

  VerifyRow done(bool counted = true) {
    row_.counted = counted;
    if (row_.cases == 0) row_.worst_margin = 0.0;
    return row_;
  }

 private:
  VerifyRow row_;
};

std::string describe(std::initializer_list<std::pair<const char*, double>> fields) {
  std::ostringstream out;
  out << std::setprecision(17);
  bool first = true;
  for (const auto& [name, value] : fields) {
    if (!first) out << ", ";
    out << name << "=" << value;
    first = false;
  }
  return out.str();
}

long double log_factorial_exact(int n) {
  std::uint64_t f = 1;
  for (int k = 2; k <= n; ++k) f *= static_cast<std::uint64_t>(k);
  return std::log(static_cast<long double>(f));
}

/// Loss in extended precision; independent of `evaluate`.
long double loss_ld(LossKind kind, long double y, long double v) {
  switch (kind) {
    case LossKind::square: return (y - v) * (y - v);
    case LossKind::entropy: {
      long double out = 0.0L;
      if (y > 0.0L) out += y * std::log(y / v);
      if (y < 1.0L) out += (1.0L - y) * std::log((1.0L - y) / (1.0L - v));
      return out;
    }
    case LossKind::exponential: return std::exp(-y * v);
    case LossKind::logit: return std::log1p(std::exp(-y * v));
  }
  return 0.0L;
}

}  // namespace

std::vector<VerifyRow> verify_lemmas(const VerifyOptions& options) {
  std::vector<VerifyRow> rows;

  {
    RowBuilder b("lemmas", "reflection_identity", 0.0);
    for (int N = 1; N <= 16; ++N) {
      for (int t = 1; t <= 4; ++t) {
        for (int m = 1; m <= 4; ++m) {
          const ReflectionResult r = reflection_identity(N, t, m);
          const bool equal = r.lhs == r.rhs;
          b.add_lazy(equal ? 0.0 : -std::abs(r.lhs.value() - r.rhs.value()), [&] {
            return "N=" + std::to_string(N) + ", t=" + std::to_string(t) + ", m=" +
                   std::to_string(m) + ": " + to_string(r.lhs) + " != " + to_string(r.rhs);
          });
        }
      }
    }
    rows.push_back(b.done());
  }

  {
    RowBuilder b("lemmas", "change_of_measure", kChangeOfMeasureSlack);
    const double gammas[] = {0.05, 0.1, 0.3, 0.6, 0.9};
    for (int N = 1; N <= 14; ++N) {
      for (double gamma : gammas) {
        for (int M : {2, 4, N}) {
          for (int set = 0; set < 100; ++set) {
            const std::uint64_t key = substream_seed(
                options.seed, static_cast<std::uint64_t>(N * 1000 + M),
                static_cast<std::uint64_t>(set) * 16 + static_cast<std::uint64_t>(gamma * 10));
            const auto in_event = [key](std::uint32_t mask) {
              return (splitmix64(key ^ mask) >> 63) != 0;
            };
            const ChangeOfMeasureResult r = change_of_measure_check(N, M, gamma, in_event);
            b.add_lazy(r.lhs - r.rhs + kChangeOfMeasureSlack, [&] {
              return describe({{"N", N}, {"M", M}, {"gamma", gamma}, {"set", set},
                               {"lhs", r.lhs}, {"rhs", r.rhs}});
            });
          }
        }
      }
    }
    rows.push_back(b.done());
  }

  {
    RowBuilder b("lemmas", "stirling_bounds", 0.0);
    for (int n = 1; n <= 20; ++n) {
      const StirlingBounds s = stirling_bounds(n, options.stirling_denominator);
      const long double exact = log_factorial_exact(n);
      const double margin = static_cast<double>(
          std::min(exact - static_cast<long double>(s.log_lower),
                   static_cast<long double>(s.log_upper) - exact));
      // strict: a zero margin is a violation
      b.add_lazy(margin > 0.0 ? margin : std::min(margin, -0.0) - 1e-300, [&] {
        return describe({{"n", n}, {"log_lower", s.log_lower}, {"log_upper", s.log_upper},
                         {"log_factorial", static_cast<double>(exact)},
                         {"denominator", options.stirling_denominator}});
      });
    }
    rows.push_back(b.done());
  }

  {
    RowBuilder lower("lemmas", "binomial_lower_envelope", 0.0);
    RowBuilder upper_w("lemmas", "binomial_upper_envelope_with_width", 0.0);
    RowBuilder upper_p("lemmas", "binomial_upper_envelope_no_width", 0.0);
    for (std::int64_t N = 2; N <= 200; ++N) {
      for (std::int64_t s = -N + 2; s <= N - 2; s += 2) {
        if (s == 0) continue;
        const BinomialPoint p = binomial_point(N, s);
        auto text = [&] { return describe({{"N", static_cast<double>(N)}, {"s", static_cast<double>(s)},
                                           {"exact", p.exact}, {"lower", p.lower},
                                           {"upper", p.upper},
                                           {"upper_with_width", p.upper_with_width}}); };
        lower.add_lazy((p.exact - p.lower) / p.exact, text);
        upper_w.add_lazy((p.upper_with_width - p.exact) / p.exact, text);
        upper_p.add_lazy((p.upper - p.exact) / p.exact, text);
      }
    }
    rows.push_back(lower.done());
    rows.push_back(upper_w.done());
    rows.push_back(upper_p.done(false));
  }

  {
    RowBuilder b("lemmas", "excursion_dp_vs_enumeration", 1e-14);
    const double gammas[] = {0.0, 0.1, 0.5};
    for (int n = 1; n <= 20; ++n) {
      for (int t = 1; t <= n; ++t) {
        if ((n - t) % 2 != 0) continue;
        for (double gamma : gammas) {
          const double dp = excursion_probability_exact(n, t, gamma);
          const double en = excursion_probability_enumerated(n, t, gamma);
          b.add_lazy(1e-14 - std::abs(dp - en), [&] {
            return describe({{"n", n}, {"tau", t}, {"gamma", gamma}, {"dp", dp}, {"enum", en}});
          });
        }
      }
    }
    const double anchor = excursion_probability_exact(4, 2, 0.0);
    b.add(anchor == 0.125 ? 0.0 : -std::abs(anchor - 0.125),
          describe({{"n", 4}, {"tau", 2}, {"gamma", 0}, {"dp", anchor}}));
    rows.push_back(b.done());
  }

  {
    RowBuilder b("lemmas", "excursion_lower_chain", 0.0);
    for (std::int64_t n : {100, 200, 500, 1000, 2000, 5000}) {
      const double gamma = gamma_schedule(n, 1.0);
      const LowerBoundChain c = lower_bound_chain(n, gamma, 0.5, 0.6);
      if (!c.applicable) continue;
      b.add_lazy((c.exact - c.bound_binomial) / c.exact, [&] {
        return describe({{"n", static_cast<double>(n)}, {"exact", c.exact},
                         {"low4", c.bound_binomial}});
      });
    }
    rows.push_back(b.done());
  }
  return rows;
}

std::vector<VerifyRow> verify_losses(const VerifyOptions&) {
  std::vector<VerifyRow> rows;
  const LossKind kinds[] = {LossKind::square, LossKind::entropy, LossKind::exponential,
                            LossKind::logit};
  RowBuilder expc("losses", "exp_concavity", kCurvatureTolerance);
  RowBuilder sym("losses", "symmetry", kIdentityTolerance);
  RowBuilder adm("losses", "admissibility", 0.0);
  RowBuilder convex("losses", "convexity", kCurvatureTolerance);
  RowBuilder deriv("losses", "derivatives_vs_finite_differences", 1e-6);
  for (LossKind kind : kinds) {
    const LossSpec loss = make_loss(kind);
    const AssumptionReport report = verify_assumptions(loss, 101);
    const std::string name(to_string(kind));
    auto add_check = [&](RowBuilder& b, const AssumptionCheck& c) {
      const double margin = c.passed ? std::max(0.0, c.tolerance - c.worst_violation)
                                     : std::min(-1e-300, c.tolerance - c.worst_violation);
      b.add(margin, name + ": " + describe({{"y", c.worst_y}, {"y_pred", c.worst_y_pred},
                                            {"violation", c.worst_violation}}));
    };
    add_check(expc, report.exp_concavity);
    add_check(sym, report.symmetry);
    add_check(adm, report.admissibility);

    const auto grid = uniform_grid(loss.interval, 101);
    const double h = 1e-5;
    for (double y : grid) {
      for (std::size_t k = 1; k + 1 < grid.size(); ++k) {
        const double v = grid[k];
        const double second = evaluate(loss, y, grid[k - 1]) - 2.0 * evaluate(loss, y, v) +
                              evaluate(loss, y, grid[k + 1]);
        if (std::isfinite(second)) {
          convex.add_lazy(second + kCurvatureTolerance, [&] {
            return name + ": " + describe({{"y", y}, {"y_pred", v}, {"second_difference", second}});
          });
        }
        const Derivatives d = derivatives(loss, y, v);
        const long double yl = y, vl = v, hl = h;
        const long double f0 = loss_ld(kind, yl, vl);
        const long double fp = loss_ld(kind, yl, vl + hl);
        const long double fm = loss_ld(kind, yl, vl - hl);
        const double fd1 = static_cast<double>((fp - fm) / (2.0L * hl));
        const double fd2 = static_cast<double>((fp - 2.0L * f0 + fm) / (hl * hl));
        const double m1 = 1e-6 * std::max(1.0, std::abs(d.first)) - std::abs(fd1 - d.first);
        const double m2 = 1e-6 * std::max(1.0, std::abs(d.second)) - std::abs(fd2 - d.second);
        deriv.add_lazy(std::min(m1, m2), [&] {
          return name + ": " + describe({{"y", y}, {"y_pred", v}, {"first", d.first},
                                         {"fd_first", fd1}, {"second", d.second},
                                         {"fd_second", fd2}});
        });
      }
    }
  }
  rows.push_back(expc.done());
  rows.push_back(sym.done());
  rows.push_back(adm.done());
  rows.push_back(convex.done());
  rows.push_back(deriv.done());

  {
    // Mutation guard: an oversized lambda must be rejected.
    RowBuilder b("losses", "exp_concavity_detects_large_lambda", 0.0);
    const AssumptionReport r = verify_assumptions(make_loss(LossKind::square), 101, 10.0);
    b.add(r.exp_concavity.passed ? -1.0 : 0.0, "square on [0,1] with lambda=10 passed");
    rows.push_back(b.done());
  }
  return rows;
}

std::vector<VerifyRow> verify_aggregation(const VerifyOptions& options) {
  std::vector<VerifyRow> rows;
  const LossKind kinds[] = {LossKind::square, LossKind::entropy, LossKind::exponential,
                            LossKind::logit};
  {
    RowBuilder b("aggregation", "pathwise_regret", kRegretTolerance);
    for (LossKind kind : kinds) {
      const LossSpec loss = make_loss(kind);
      for (int g : {2, 4, 8}) {
        const RegretBatch batch = regret_batch_omp(loss, g, options.regret_sequences,
                                                   options.regret_length + 1, options.seed);
        b.add_bulk(batch.sequences, batch.violations, kRegretTolerance - batch.worst_margin,
                   std::string(to_string(kind)) + ": " +
                       describe({{"experts", g},
                                 {"sequence", static_cast<double>(batch.worst_sequence)},
                                 {"regret_minus_bound", batch.worst_margin}}));
      }
    }
    rows.push_back(b.done());
  }

  {
    RowBuilder shift("aggregation", "gibbs_shift_invariance", 1e-12);
    RowBuilder closed("aggregation", "two_expert_weight_closed_form", 1e-12);
    RowBuilder jensen("aggregation", "gibbs_mean_feasible", 0.0);
    RngStream rng(substream_seed(options.seed, 7, 0));
    for (int trial = 0; trial < 1000; ++trial) {
      std::vector<double> sigma(4);
      for (double& s : sigma) s = 50.0 * rng.uniform();
      const double c = 100.0 * (rng.uniform() - 0.5);
      std::vector<double> shifted = sigma;
      for (double& s : shifted) s += c;
      const double lambda = 0.1 + 2.0 * rng.uniform();
      const auto w1 = gibbs_weights(sigma, lambda);
      const auto w2 = gibbs_weights(shifted, lambda);
      double diff = 0.0;
      for (std::size_t g = 0; g < w1.size(); ++g) diff = std::max(diff, std::abs(w1[g] - w2[g]));
      shift.add_lazy(1e-12 - diff, [&] { return describe({{"trial", trial}, {"diff", diff}}); });

      const std::int64_t s = static_cast<std::int64_t>(rng.uniform() * 401.0) - 200;
      const double delta = 0.6;
      const double pair[2] = {0.0, delta * static_cast<double>(s)};
      const double direct = gibbs_weights(pair, 0.5)[0];
      const double formula = two_expert_weight(s, 0.5, delta);
      closed.add_lazy(1e-12 - std::abs(direct - formula), [&] {
        return describe({{"S", static_cast<double>(s)}, {"gibbs", direct}, {"closed", formula}});
      });
    }
    for (LossKind kind : kinds) {
      const LossSpec loss = make_loss(kind);
      const double a = loss.center;
      const double y1 = loss.interval.hi;
      const double yt1 = a + 0.6 * (loss.interval.hi - a);
      const TwoPointConstruction c = make_construction(loss, y1, 0.0, yt1);
      const std::vector<Expert> experts{c.g1(), c.g2()};
      const double probes[2] = {c.y1, c.y2};
      const double preds[2] = {c.ytilde1, c.ytilde2};
      for (int trial = 0; trial < 250; ++trial) {
        const double w = rng.uniform();
        const double weights[2] = {w, 1.0 - w};
        const double mean = w * c.ytilde1 + (1.0 - w) * c.ytilde2;
        double margin = kInf;
        for (double y : probes) {
          const double bound = mixture_loss(loss, loss.lambda, weights, preds, y);
          margin = std::min(margin, bound - evaluate(loss, y, mean) +
                                        kFeasibilitySlack * std::max(1.0, std::abs(bound)));
        }
        const FeasibleInterval fi = feasible_interval(loss, loss.lambda, weights, preds, probes);
        if (mean < fi.lo || mean > fi.hi) margin = std::min(margin, -1e-300);
        jensen.add_lazy(margin, [&] {
          return std::string(to_string(kind)) + ": " +
                 describe({{"w", w}, {"mean", mean}, {"lo", fi.lo}, {"hi", fi.hi}});
        });
      }
    }
    rows.push_back(shift.done());
    rows.push_back(closed.done());
    rows.push_back(jensen.done());
  }

  {
    RowBuilder b("aggregation", "risk_gap_identity", 1e-12);
    const LossKind all[] = {LossKind::square, LossKind::entropy, LossKind::exponential,
                            LossKind::logit};
    for (LossKind kind : all) {
      const LossSpec loss = make_loss(kind);
      const double a = loss.center;
      for (double frac : {0.3, 0.6, 1.0}) {
        for (double gamma : {0.0, 0.1, 0.5, 0.9}) {
          const double yt1 = a + frac * (loss.interval.hi - a);
          if (kind == LossKind::entropy && yt1 >= 1.0) continue;
          const TwoPointConstruction c = make_construction(loss, loss.interval.hi, gamma, yt1);
          const double direct = exact_risk(c, c.ytilde2) - exact_risk(c, c.ytilde1);
          const double gap = risk_gap(c);
          b.add_lazy(1e-12 - std::abs(direct - gap), [&] {
            return std::string(to_string(kind)) +
                   ": " + describe({{"ytilde1", yt1}, {"gamma", gamma}, {"direct", direct},
                                    {"gap", gap}});
          });
        }
      }
    }
    rows.push_back(b.done());
  }

  {
    RowBuilder b("aggregation", "replicates_serial_equals_parallel", 0.0);
    ExperimentConfig config = default_deviation_config(300, 1.0, 200);
    config.seed = options.seed;
    config.rules.pim_substitution = Substitution::feasible(Selector::midpoint);
    const ReplicateContext ctx = make_context(config, 300);
    const auto serial = run_replicates_serial(ctx, config.replicates);
    for (int workers : {1, 2, 4}) {
      const auto parallel = run_replicates_omp(ctx, config.replicates, workers);
      std::int64_t mismatches = 0;
      for (std::size_t r = 0; r < serial.size(); ++r) {
        const auto& x = serial[r];
        const auto& y = parallel[r];
        if (x.seed_stream != y.seed_stream || x.walk_sum != y.walk_sum || x.p != y.p ||
            x.excess_pim != y.excess_pim || x.regret != y.regret) {
          ++mismatches;
        }
      }
      b.add(mismatches == 0 ? 0.0 : -static_cast<double>(mismatches),
            describe({{"workers", workers}, {"mismatches", static_cast<double>(mismatches)}}));
    }
    rows.push_back(b.done());
  }
  return rows;
}

std::vector<VerifyRow> run_verify_suite(const std::string& suite, const VerifyOptions& options) {
  if (suite == "lemmas") return verify_lemmas(options);
  if (suite == "losses") return verify_losses(options);
  if (suite == "aggregation") return verify_aggregation(options);
  if (suite == "all") {
    auto rows = verify_losses(options);
    for (auto& r : verify_lemmas(options)) rows.push_back(std::move(r));
    for (auto& r : verify_aggregation(options)) rows.push_back(std::move(r));
    return rows;
  }
  throw std::invalid_argument("unknown suite '" + suite + "'");
}

void print_verify_table(std::ostream& out, const std::vector<VerifyRow>& rows) {
  char line[256];
  std::snprintf(line, sizeof line, "%-12s %-38s %9s %6s %14s %9s  %s\n", "suite", "check",
                "cases", "fails", "worst_margin", "tol", "status");
  out << line;
  for (const auto& r : rows) {
    const char* status = r.passed() ? "PASS" : (r.counted ? "FAIL" : "FAIL (informational)");
    std::snprintf(line, sizeof line, "%-12s %-38s %9lld %6lld %14.6e %9.1e  %s\n",
                  r.suite.c_str(), r.check.c_str(), static_cast<long long>(r.cases),
                  static_cast<long long>(r.violations), r.worst_margin, r.tolerance, status);
    out << line;
  }
  for (const auto& r : rows) {
    if (!r.passed()) {
      out << (r.counted ? "failing case " : "informational case ") << r.suite << "/" << r.check
          << ": " << r.failing_case << "\n";
    }
  }
}

bool verify_passed(const std::vector<VerifyRow>& rows) {
  return std::all_of(rows.begin(), rows.end(),
                     [](const VerifyRow& r) { return !r.counted || r.passed(); });
}

}  // namespace mixlab

// Acceptance checks: one PASS/FAIL line per criterion.
#include <CLI11.hpp>

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <string>
#include <vector>

#include "mixlab/aggregation.hpp"
#include "mixlab/harness.hpp"
#include "mixlab/random_walk.hpp"
#include "mixlab/regret_batch.hpp"
#include "mixlab/rng.hpp"
#include "oracles.hpp"

using namespace mixlab;

namespace {

struct Outcome {
  bool pass = false;
  std::string detail;
};

std::string fmt(const char* format, auto... args) {
  char buf[512];
  std::snprintf(buf, sizeof buf, format, args...);
  return buf;
}

// ln k! by direct summation in extended precision.
long double log_factorial(std::int64_t n) {
  long double out = 0.0L;
  for (std::int64_t k = 2; k <= n; ++k) out += std::log(static_cast<long double>(k));
  return out;
}

// ln P(s_N = s) for the symmetric walk.
long double log_binomial_point(std::int64_t N, std::int64_t s) {
  const std::int64_t k = (N + s) / 2;
  return log_factorial(N) - log_factorial(k) - log_factorial(N - k) -
         static_cast<long double>(N) * std::log(2.0L);
}

Outcome reflection() {
  std::int64_t cells = 0, bad = 0;
  std::string first;
  for (int N = 1; N <= 16; ++N) {
    for (int t = 1; t <= 4; ++t) {
      for (int m = 1; m <= 4; ++m) {
        std::int64_t count = 0;
        for (std::uint32_t mask = 0; mask < (1u << N); ++mask) {
          int s = 0, peak = 0;
          for (int j = 0; j < N; ++j) {
            s += ((mask >> j) & 1u) ? 1 : -1;
            peak = std::max(peak, s);
          }
          if (peak >= t && s != t && std::abs(s - t) <= m) ++count;
        }
        std::int64_t rhs = 0;
        for (int s = t + 1; s <= t + m; ++s) {
          if (s <= N && (N - s) % 2 == 0) rhs += static_cast<std::int64_t>(oracle::binomial(N, (N + s) / 2));
        }
        const ReflectionResult r = reflection_identity(N, t, m);
        const std::int64_t total = std::int64_t{1} << N;
        const bool ok = r.lhs == r.rhs && r.lhs == Rational::make(count, total) &&
                        r.rhs == Rational::make(2 * rhs, total);
        ++cells;
        if (!ok) {
          ++bad;
          if (first.empty()) first = fmt(" first N=%d t=%d m=%d", N, t, m);
        }
      }
    }
  }
  return {bad == 0, fmt("cells=%lld mismatches=%lld%s", static_cast<long long>(cells),
                        static_cast<long long>(bad), first.c_str())};
}

Outcome change_of_measure() {
  const double gammas[] = {0.05, 0.1, 0.3, 0.6, 0.9};
  std::int64_t sets = 0, bad = 0, oracle_bad = 0;
  double worst = INFINITY;
  for (int N = 1; N <= 14; ++N) {
    for (double gamma : gammas) {
      for (int M : {2, 4, N}) {
        for (int set = 0; set < 100; ++set) {
          const std::uint64_t key =
              substream_seed(0xacce97, static_cast<std::uint64_t>(N * 100 + M),
                             static_cast<std::uint64_t>(set) * 7919 +
                                 static_cast<std::uint64_t>(gamma * 100));
          const std::uint64_t density = 1 + static_cast<std::uint64_t>(set % 10) * 11;
          const auto in_event = [key, density](std::uint32_t mask) {
            return splitmix64(key ^ mask) % 100 < density;
          };
          const ChangeOfMeasureResult r = change_of_measure_check(N, M, gamma, in_event);
          long double lhs = 0.0L, sym = 0.0L;
          const long double p = 0.5L * (1.0L + gamma), q = 0.5L * (1.0L - gamma);
          for (std::uint32_t mask = 0; mask < (1u << N); ++mask) {
            if (!in_event(mask)) continue;
            const int ups = std::popcount(mask);
            if (std::abs(2 * ups - N) > M) continue;
            lhs += std::pow(p, ups) * std::pow(q, N - ups);
            sym += std::ldexp(1.0L, -N);
          }
          const long double rhs = std::pow((1.0L - gamma) / (1.0L + gamma), 0.5L * M) *
                                  std::pow(1.0L - static_cast<long double>(gamma) * gamma, 0.5L * N) *
                                  sym;
          ++sets;
          const double slack = static_cast<double>(lhs - rhs);
          worst = std::min(worst, slack);
          if (slack < -kChangeOfMeasureSlack || !r.holds) ++bad;
          if (std::abs(static_cast<long double>(r.lhs) - lhs) > 1e-15L * (1.0L + lhs)) ++oracle_bad;
        }
      }
    }
  }
  return {bad == 0 && oracle_bad == 0,
          fmt("event_sets=%lld violations=%lld library_mismatch=%lld min_slack=%.3g",
              static_cast<long long>(sets), static_cast<long long>(bad),
              static_cast<long long>(oracle_bad), worst)};
}

Outcome stirling() {
  std::int64_t strict_bad = 0;
  for (int n = 1; n <= 20; ++n) {
    const StirlingBounds b = stirling_bounds(n);
    const long double exact = log_factorial(n);
    if (!(static_cast<long double>(b.log_lower) < exact && exact < static_cast<long double>(b.log_upper))) {
      ++strict_bad;
    }
  }
  std::int64_t points = 0, lower_bad = 0, upper_bad = 0, width_bad = 0;
  std::string first_upper;
  for (std::int64_t N = 2; N <= 200; ++N) {
    for (std::int64_t s = -N + 2; s <= N - 2; s += 2) {
      if (s == 0) continue;
      const BinomialPoint bp = binomial_point(N, s);
      const long double exact = std::exp(log_binomial_point(N, s));
      ++points;
      if (bp.lower > exact) ++lower_bad;
      if (bp.upper < exact) {
        if (first_upper.empty()) first_upper = fmt(" first N=%lld s=%lld", static_cast<long long>(N), static_cast<long long>(s));
        ++upper_bad;
      }
      if (bp.upper_with_width < exact) ++width_bad;
    }
  }
  return {strict_bad == 0 && lower_bad == 0 && upper_bad == 0,
          fmt("stirling_strict_violations=%lld interior_points=%lld lower_violations=%lld "
              "upper_violations=%lld%s (with width factor: %lld)",
              static_cast<long long>(strict_bad), static_cast<long long>(points),
              static_cast<long long>(lower_bad), static_cast<long long>(upper_bad),
              first_upper.c_str(), static_cast<long long>(width_bad))};
}

Outcome excursion_dp() {
  std::int64_t cases = 0, bad = 0;
  double worst = 0.0;
  for (int n = 1; n <= 20; ++n) {
    for (int t = 1; t <= n; ++t) {
      if ((n - t) % 2 != 0) continue;
      for (double gamma : {0.0, 0.1, 0.5}) {
        const double want = oracle::enumerate_walks(n, 0.5 * (1 + gamma), [n, t](const std::vector<int>& s) {
          for (int i = t; i <= n; ++i) {
            if (s[static_cast<std::size_t>(i)] > -t) return 0.0;
          }
          return 1.0;
        });
        const double got = excursion_probability_exact(n, t, gamma);
        const double err = std::abs(got - want);
        worst = std::max(worst, err);
        ++cases;
        if (err > 1e-14) ++bad;
      }
    }
  }
  const double anchor = excursion_probability_exact(4, 2, 0.0);
  return {bad == 0 && anchor == 0.125,
          fmt("cases=%lld over_tolerance=%lld max_abs_error=%.3g anchor(4,2,0)=%.17g",
              static_cast<long long>(cases), static_cast<long long>(bad), worst, anchor)};
}

Outcome excursion_scan() {
  std::vector<std::int64_t> grid;
  for (int k = 0; k <= 20; ++k) {
    grid.push_back(static_cast<std::int64_t>(std::llround(100.0 * std::pow(100.0, k / 20.0))));
  }
  const ExcursionScanReport r = excursion_threshold_scan(1.0, grid, 0.5, 0.6);
  std::string rows;
  for (const auto& row : r.rows) {
    if (row.n == 100 || row.n == 1000 || row.n == 10000) {
      rows += fmt(" n=%lld:P=%.3g/target=%.3g", static_cast<long long>(row.n), row.probability,
                  row.target);
    }
  }
  const std::string threshold =
      r.threshold ? std::to_string(*r.threshold) : std::string("none");
  return {r.threshold.has_value() && r.holds_on_top_half,
          "threshold_n0=" + threshold + fmt(" top_half=%s", r.holds_on_top_half ? "yes" : "no") +
              rows};
}

Outcome pathwise_regret() {
  std::int64_t sequences = 0, violations = 0;
  double worst = -INFINITY;
  std::string where;
  for (LossKind kind : {LossKind::square, LossKind::entropy, LossKind::exponential, LossKind::logit}) {
    const LossSpec loss = make_loss(kind);
    for (int g : {2, 4, 8}) {
      const RegretBatch b = regret_batch_omp(loss, g, 10000, 201, 0x5eed0 + g, 0);
      sequences += b.sequences;
      violations += b.violations;
      if (b.worst_margin > worst) {
        worst = b.worst_margin;
        where = std::string(to_string(kind)) + "/G=" + std::to_string(g);
      }
      const double again = regret_margin(loss, g, 201, 0x5eed0 + g, b.worst_sequence);
      if (again != b.worst_margin) ++violations;
    }
  }
  return {violations == 0, fmt("sequences=%lld violations=%lld worst_margin=%.3g at %s",
                               static_cast<long long>(sequences),
                               static_cast<long long>(violations), worst, where.c_str())};
}

// Runs the square-loss grid shared by the two expectation criteria.
std::vector<SummaryStats> expectation_grid() {
  std::vector<SummaryStats> out;
  for (double gamma : {0.0, 0.1, 0.3}) {
    ExperimentConfig c;
    c.loss = LossKind::square;
    c.gamma = gamma;
    c.n_grid = {100, 1000};
    c.replicates = 10000;
    c.seed = 0xe1;
    for (const auto& s : run_experiment(c).summaries) out.push_back(s);
  }
  return out;
}

Outcome pm_expectation() {
  bool ok = true;
  std::string text;
  for (const auto& s : expectation_grid()) {
    const bool cell = s.pm.mean <= s.expectation_bound + 3 * s.pm.sem;
    ok = ok && cell;
    text += fmt(" [g=%.1f n=%lld mean=%.3g bound=%.3g sem=%.2g %s]", s.gamma,
                static_cast<long long>(s.n), s.pm.mean, s.expectation_bound, s.pm.sem,
                cell ? "ok" : "over");
  }
  return {ok, text.substr(1)};
}

Outcome erm_expectation() {
  bool ok = true;
  std::string text;
  for (const auto& s : expectation_grid()) {
    const bool cell = s.erm.mean <= s.erm_upper_bound + 3 * s.erm.sem;
    ok = ok && cell;
    text += fmt(" [g=%.1f n=%lld mean=%.3g bound=%.3g %s]", s.gamma,
                static_cast<long long>(s.n), s.erm.mean, s.erm_upper_bound, cell ? "ok" : "over");
  }
  return {ok, text.substr(1)};
}

Outcome erm_lower() {
  const std::vector<std::int64_t> grid{16, 64, 256, 1024, 4096};
  const double delta = 0.6;
  const ErmLowerReport r = erm_exact_lower(grid, delta);
  bool ok = true;
  std::string text;
  for (const auto& row : r.rows) {
    // P(S_n < 0) by summing binomial terms in extended precision.
    const auto neg = [&](long double up) {
      long double sum = 0.0L;
      for (std::int64_t k = 0; 2 * k < row.n; ++k) {
        sum += std::exp(log_factorial(row.n) - log_factorial(k) - log_factorial(row.n - k) +
                        k * std::log(up) + (row.n - k) * std::log1p(-up));
      }
      return sum;
    };
    const long double g = row.gamma;
    const long double plus = g * delta * neg(0.5L * (1 + g));
    const long double minus = g * delta * (1.0L - neg(0.5L * (1 - g)));
    const bool agrees = std::abs(plus - row.excess_plus) <= 1e-12L * plus &&
                        std::abs(minus - row.excess_minus) <= 1e-12L * minus;
    const bool cell = agrees && (!row.asserted || row.max_excess >= row.bound);
    ok = ok && cell;
    text += fmt(" [n=%lld max=%.5g bound=%.5g%s%s]", static_cast<long long>(row.n),
                row.max_excess, row.bound, row.asserted ? "" : " reported",
                cell ? "" : " FAIL");
  }
  return {ok, text.substr(1)};
}

Outcome deviation_lower() {
  ExperimentConfig c = default_deviation_config(2000, 1.0, 100000);
  c.conditional_replicates = 2000;
  c.seed = 0xde71;
  const DeviationReport r = deviation_experiment(c).front();
  const SummaryStats& s = r.summary;
  const ConditionalStats& k = s.conditional;
  const bool a = s.has_dp_exact && s.excursion_consistent;
  const bool b = k.available && k.count > 0 && k.weight_violations == 0 &&
                 k.pm_bracket_violations == 0;
  const bool cc = k.available && k.count > 0 && k.frac_pm_above_half_gap >= 0.99;
  return {a && b && cc,
          fmt("gamma=%.5f (a)%s mc_excursions=%lld/%lld wilson3=[%.3g,%.3g] dp=%.3g "
              "(b)%s paths=%lld weight_violations=%lld bracket_violations=%lld "
              "(c)%s frac_above_half_gap=%.4f half_gap=%.4f expectation_bound=%.4f",
              r.gamma, a ? "ok" : "FAIL", static_cast<long long>(s.excursion_count),
              static_cast<long long>(s.replicates), s.excursion_wilson3.lo,
              s.excursion_wilson3.hi, s.dp_exact, b ? "ok" : "FAIL",
              static_cast<long long>(k.count), static_cast<long long>(k.weight_violations),
              static_cast<long long>(k.pm_bracket_violations), cc ? "ok" : "FAIL",
              k.frac_pm_above_half_gap, r.half_gap, s.expectation_bound)};
}

Outcome deviation_upper() {
  ExperimentConfig c = default_deviation_config(500, 1.0, 10000);
  c.epsilons = {0.05, 0.1, 0.25};
  c.seed = 0x0de7;
  const DeviationUpperReport r = deviation_upper_check(c).front();
  bool ok = true;
  std::string text;
  for (const auto& row : r.rows) {
    ok = ok && row.within_proof_level;
    text += fmt(" [eps=%.2f threshold=%.4f pm=%.4f pim=%.4f limit=%.4f%s]", row.epsilon,
                row.threshold, row.freq_pm, row.freq_pim, 2 * row.epsilon + 3 * row.sigma,
                row.within_proof_level ? "" : " over");
  }
  return {ok, text.substr(1)};
}

struct Criterion {
  int id;
  double limit_seconds;  // 0: no runtime requirement
  std::function<Outcome()> run;
};

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"acceptance checks"};
  int only = 0;
  app.add_option("--criterion", only, "run a single criterion (1-11)")->check(CLI::Range(1, 11));
  CLI11_PARSE(app, argc, argv);

  const std::vector<Criterion> all{
      {1, 30, reflection},
      {2, 60, change_of_measure},
      {3, 0, stirling},
      {4, 0, excursion_dp},
      {5, 120, excursion_scan},
      {6, 0, pathwise_regret},
      {7, 0, pm_expectation},
      {8, 0, erm_expectation},
      {9, 0, erm_lower},
      {10, 600, deviation_lower},
      {11, 0, deviation_upper},
  };
  bool all_pass = true;
  for (const auto& c : all) {
    if (only != 0 && c.id != only) continue;
    const auto start = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = c.run();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    const double seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    const bool in_time = c.limit_seconds == 0 || seconds < c.limit_seconds;
    const bool pass = o.pass && in_time;
    all_pass = all_pass && pass;
    std::printf("criterion %d: %s %s runtime=%.1fs%s\n", c.id, pass ? "PASS" : "FAIL",
                o.detail.c_str(), seconds, in_time ? "" : " (over time limit)");
    std::fflush(stdout);
  }
  return all_pass ? 0 : 1;
}

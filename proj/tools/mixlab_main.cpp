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

#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "mixlab/config.hpp"
#include "mixlab/errors.hpp"
#include "mixlab/harness.hpp"
#include "mixlab/io.hpp"
#include "mixlab/verify.hpp"

namespace fs = std::filesystem;
using namespace mixlab;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitFailure = 1;
constexpr int kExitParse = 2;
constexpr int kExitInfeasible = 3;
constexpr int kExitIncomplete = 4;

int config_error(const ConfigError& e) {
  std::cerr << "config error";
  if (e.line() > 0) std::cerr << " at line " << e.line();
  if (!e.field().empty()) std::cerr << " (field '" << e.field() << "')";
  std::cerr << ": " << e.what() << "\n";
  return kExitParse;
}

std::optional<std::uint64_t> env_seed() {
  const char* text = std::getenv("MIXLAB_SEED");
  if (!text || !*text) return std::nullopt;
  char* end = nullptr;
  const unsigned long long v = std::strtoull(text, &end, 10);
  if (*end != '\0') throw ConfigError("MIXLAB_SEED is not an unsigned integer", 0, "MIXLAB_SEED");
  return v;
}

void print_summary(const SummaryStats& s) {
  std::printf("n=%lld gamma=%.6g tau=%lld replicates=%lld\n", static_cast<long long>(s.n), s.gamma,
              static_cast<long long>(s.tau), static_cast<long long>(s.replicates));
  auto rule = [](const char* name, const RuleStats& r) {
    if (r.enabled) std::printf("  %-4s mean excess %.6e  sem %.3e\n", name, r.mean, r.sem);
  };
  rule("pm", s.pm);
  rule("pim", s.pim);
  rule("erm", s.erm);
  std::printf("  bound log|G|/(lambda(n+1)) %.6e   erm bound %.6e\n", s.expectation_bound,
              s.erm_upper_bound);
  std::printf("  excursions %lld (freq %.3e)", static_cast<long long>(s.excursion_count),
              s.excursion_freq);
  if (s.has_dp_exact) std::printf("  exact %.6e  consistent=%s", s.dp_exact,
                                  s.excursion_consistent ? "yes" : "no");
  std::printf("\n");
  if (s.conditional.available) {
    const auto& c = s.conditional;
    std::printf("  given E_tau: %lld paths, pm excess >= gamma*delta/2 on %.4f, weight/bracket "
                "violations %lld/%lld\n",
                static_cast<long long>(c.count), c.frac_pm_above_half_gap,
                static_cast<long long>(c.weight_violations),
                static_cast<long long>(c.pm_bracket_violations));
  }
  std::printf("  regret violations %lld\n", static_cast<long long>(s.regret_violations));
}

int cmd_verify(const std::string& suite, const VerifyOptions& options) {
  std::vector<VerifyRow> rows;
  try {
    rows = run_verify_suite(suite, options);
  } catch (const std::invalid_argument& e) {
    std::cerr << e.what() << "\n";
    return kExitParse;
  }
  print_verify_table(std::cout, rows);
  const bool ok = verify_passed(rows);
  std::cout << (ok ? "verify: PASS" : "verify: FAIL") << "\n";
  return ok ? kExitOk : kExitFailure;
}

int cmd_run(const std::string& config_path, const std::string& out,
            std::optional<std::uint64_t> seed, std::optional<std::int64_t> replicates,
            std::optional<int> workers) {
  ExperimentConfig config;
  try {
    config = load_config(config_path);
    if (seed) {
      config.seed = *seed;
    } else if (auto from_env = env_seed()) {
      config.seed = *from_env;
    }
    if (replicates) config.replicates = *replicates;
    if (workers) config.workers = *workers;
    validate(config);
  } catch (const ConfigError& e) {
    return config_error(e);
  } catch (const InfeasibleConstruction& e) {
    std::cerr << "infeasible construction: " << e.what() << "\n";
    return kExitInfeasible;
  }

  const fs::path dir(out);
  fs::create_directories(dir);
  RunManifest manifest;
  manifest.version = MIXLAB_VERSION;
  manifest.config_hash = semantic_hash(config);
  manifest.seed = config.seed;
  manifest.timestamp = utc_timestamp();
  manifest.replicates = config.replicates;
  write_file(dir / "manifest.json", manifest_json(manifest));

  ExperimentResult result;
  try {
    result = run_experiment(config);
  } catch (const InfeasibleConstruction& e) {
    std::cerr << "infeasible construction: " << e.what() << "\n";
    return kExitInfeasible;
  } catch (const DomainError& e) {
    std::cerr << "run aborted: " << e.what() << "\n";
    return kExitFailure;
  }

  RunSummary summary;
  summary.kind = config.kind;
  summary.loss = std::string(to_string(config.loss));
  summary.has_c0 = config.c0.has_value();
  summary.c0 = config.c0.value_or(0.0);
  summary.summaries = result.summaries;
  write_records_csv(dir / "records.csv", result.records);
  if (!result.conditioned.empty()) write_records_csv(dir / "conditioned.csv", result.conditioned);
  write_file(dir / "summary.json", summary_json(summary));

  manifest.suites = run_suites(summary);
  manifest.complete = true;
  write_file(dir / "manifest.json", manifest_json(manifest));

  for (const auto& s : result.summaries) print_summary(s);
  for (const auto& [name, ok] : manifest.suites) {
    std::printf("suite %-24s %s\n", name.c_str(), ok ? "pass" : "fail");
  }
  std::printf("wrote %s\n", dir.string().c_str());
  return kExitOk;
}

int cmd_report(const std::string& out) {
  try {
    const ReportFiles files = write_report(out);
    for (const auto& p : files.written) std::printf("wrote %s\n", p.string().c_str());
    return kExitOk;
  } catch (const IncompleteRun& e) {
    std::cerr << "incomplete run: " << e.what() << "\n";
    return kExitIncomplete;
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"mixlab: progressive mixture rules, ERM and their deviation behaviour"};
  app.set_version_flag("--version", std::string(MIXLAB_VERSION));
  app.require_subcommand(1);

  auto* verify = app.add_subcommand("verify", "run oracle and property self-checks");
  std::string suite = "all";
  VerifyOptions verify_options;
  verify->add_option("suite", suite, "lemmas | losses | aggregation | all")
      ->check(CLI::IsMember({"lemmas", "losses", "aggregation", "all"}));
  verify->add_option("--stirling-denominator", verify_options.stirling_denominator,
                     "denominator of the Stirling correction (mutation testing)");
  verify->add_option("--regret-sequences", verify_options.regret_sequences,
                     "random sequences per loss and expert count");

  auto* run = app.add_subcommand("run", "run an experiment from a config file");
  std::string config_path, out_dir;
  std::optional<std::uint64_t> seed;
  std::optional<std::int64_t> replicates;
  std::optional<int> workers;
  run->add_option("config", config_path, "INI or JSON config")->required();
  run->add_option("--out", out_dir, "output directory")->required();
  run->add_option("--seed", seed, "master seed (default: MIXLAB_SEED, then config)");
  run->add_option("--replicates", replicates, "replicates per n");
  run->add_option("--workers", workers, "OpenMP threads (0: default)");

  auto* report = app.add_subcommand("report", "write plot data for a finished run");
  std::string report_dir;
  report->add_option("out_dir", report_dir, "run directory")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForVersion& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitParse;
  }

  try {
    if (*verify) return cmd_verify(suite, verify_options);
    if (*run) return cmd_run(config_path, out_dir, seed, replicates, workers);
    if (*report) return cmd_report(report_dir);
  } catch (const ConfigError& e) {
    return config_error(e);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitFailure;
  }
  return kExitFailure;
}

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

#include "mixlab/io.hpp"

#include <chrono>
#include <cmath>
#include <cctype>
#include <cstdio>
#include <cstdlib>
#include <ctime>
#include <fstream>
#include <limits>
#include <sstream>

#include <nlohmann/json.hpp>

namespace mixlab {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

constexpr const char* kRecordsHeader =
    "n,replicate,seed_stream,S_n,excursion,p,excess_pm,excess_pim,excess_erm,regret,regret_bound";

json encode(double v) {
  if (std::isfinite(v)) return v;
  return format_double(v);
}

double decode(const json& v) {
  if (v.is_string()) return parse_double(v.get<std::string>());
  return v.get<double>();
}

json encode(const ProportionInterval& ci) { return {{"lo", encode(ci.lo)}, {"hi", encode(ci.hi)}}; }

ProportionInterval decode_interval(const json& j) {
  return {decode(j.at("lo")), decode(j.at("hi"))};
}

json encode(const TailFrequency& t) {
  return {{"threshold", encode(t.threshold)}, {"count", t.count}, {"freq", encode(t.freq)},
          {"wilson_lo", encode(t.wilson_lo)}, {"wilson_hi", encode(t.wilson_hi)}};
}

TailFrequency decode_tail(const json& j) {
  TailFrequency t;
  t.threshold = decode(j.at("threshold"));
  t.count = j.at("count").get<std::int64_t>();
  t.freq = decode(j.at("freq"));
  t.wilson_lo = decode(j.at("wilson_lo"));
  t.wilson_hi = decode(j.at("wilson_hi"));
  return t;
}

json encode(const RuleStats& r) {
  json tails = json::array();
  for (const auto& t : r.tails) tails.push_back(encode(t));
  return {{"enabled", r.enabled}, {"mean", encode(r.mean)}, {"sem", encode(r.sem)},
          {"min", encode(r.min)},   {"max", encode(r.max)},   {"tails", tails}};
}

RuleStats decode_rule(const json& j) {
  RuleStats r;
  r.enabled = j.at("enabled").get<bool>();
  r.mean = decode(j.at("mean"));
  r.sem = decode(j.at("sem"));
  r.min = decode(j.at("min"));
  r.max = decode(j.at("max"));
  for (const auto& t : j.at("tails")) r.tails.push_back(decode_tail(t));
  return r;
}

json encode(const ConditionalStats& c) {
  return {{"count", c.count},
          {"from_monte_carlo", c.from_monte_carlo},
          {"available", c.available},
          {"mean_excess_pm", encode(c.mean_excess_pm)},
          {"min_excess_pm", encode(c.min_excess_pm)},
          {"mean_excess_pim", encode(c.mean_excess_pim)},
          {"min_excess_pim", encode(c.min_excess_pim)},
          {"frac_pm_above_half_gap", encode(c.frac_pm_above_half_gap)},
          {"frac_pim_above_half_gap", encode(c.frac_pim_above_half_gap)},
          {"weight_violations", c.weight_violations},
          {"pm_bracket_violations", c.pm_bracket_violations},
          {"pim_bracket_violations", c.pim_bracket_violations},
          {"p_bound_violations", c.p_bound_violations},
          {"pm_histogram",
           {{"lo", encode(c.pm_histogram.lo)},
            {"hi", encode(c.pm_histogram.hi)},
            {"counts", c.pm_histogram.counts}}}};
}

ConditionalStats decode_conditional(const json& j) {
  ConditionalStats c;
  c.count = j.at("count").get<std::int64_t>();
  c.from_monte_carlo = j.at("from_monte_carlo").get<std::int64_t>();
  c.available = j.at("available").get<bool>();
  c.mean_excess_pm = decode(j.at("mean_excess_pm"));
  c.min_excess_pm = decode(j.at("min_excess_pm"));
  c.mean_excess_pim = decode(j.at("mean_excess_pim"));
  c.min_excess_pim = decode(j.at("min_excess_pim"));
  c.frac_pm_above_half_gap = decode(j.at("frac_pm_above_half_gap"));
  c.frac_pim_above_half_gap = decode(j.at("frac_pim_above_half_gap"));
  c.weight_violations = j.at("weight_violations").get<std::int64_t>();
  c.pm_bracket_violations = j.at("pm_bracket_violations").get<std::int64_t>();
  c.pim_bracket_violations = j.at("pim_bracket_violations").get<std::int64_t>();
  c.p_bound_violations = j.at("p_bound_violations").get<std::int64_t>();
  const auto& h = j.at("pm_histogram");
  c.pm_histogram.lo = decode(h.at("lo"));
  c.pm_histogram.hi = decode(h.at("hi"));
  c.pm_histogram.counts = h.at("counts").get<std::vector<std::int64_t>>();
  return c;
}

json encode(const SummaryStats& s) {
  return {{"n", s.n},
          {"gamma", encode(s.gamma)},
          {"tau", s.tau},
          {"lambda", encode(s.lambda)},
          {"delta", encode(s.delta)},
          {"range_bound", encode(s.range_bound)},
          {"experts", s.experts},
          {"replicates", s.replicates},
          {"pm", encode(s.pm)},
          {"pim", encode(s.pim)},
          {"erm", encode(s.erm)},
          {"expectation_bound", encode(s.expectation_bound)},
          {"erm_upper_bound", encode(s.erm_upper_bound)},
          {"half_gap_tail", encode(s.half_gap_tail)},
          {"excursion_count", s.excursion_count},
          {"excursion_freq", encode(s.excursion_freq)},
          {"excursion_wilson95", encode(s.excursion_wilson95)},
          {"excursion_wilson3", encode(s.excursion_wilson3)},
          {"has_dp_exact", s.has_dp_exact},
          {"dp_exact", encode(s.dp_exact)},
          {"excursion_consistent", s.excursion_consistent},
          {"conditional", encode(s.conditional)},
          {"regret_violations", s.regret_violations},
          {"worst_regret_margin", encode(s.worst_regret_margin)},
          {"erm_negative_excess", s.erm_negative_excess},
          {"argab_violations", s.argab_violations}};
}

SummaryStats decode_summary(const json& j) {
  SummaryStats s;
  s.n = j.at("n").get<std::int64_t>();
  s.gamma = decode(j.at("gamma"));
  s.tau = j.at("tau").get<std::int64_t>();
  s.lambda = decode(j.at("lambda"));
  s.delta = decode(j.at("delta"));
  s.range_bound = decode(j.at("range_bound"));
  s.experts = j.at("experts").get<int>();
  s.replicates = j.at("replicates").get<std::int64_t>();
  s.pm = decode_rule(j.at("pm"));
  s.pim = decode_rule(j.at("pim"));
  s.erm = decode_rule(j.at("erm"));
  s.expectation_bound = decode(j.at("expectation_bound"));
  s.erm_upper_bound = decode(j.at("erm_upper_bound"));
  s.half_gap_tail = decode_tail(j.at("half_gap_tail"));
  s.excursion_count = j.at("excursion_count").get<std::int64_t>();
  s.excursion_freq = decode(j.at("excursion_freq"));
  s.excursion_wilson95 = decode_interval(j.at("excursion_wilson95"));
  s.excursion_wilson3 = decode_interval(j.at("excursion_wilson3"));
  s.has_dp_exact = j.at("has_dp_exact").get<bool>();
  s.dp_exact = decode(j.at("dp_exact"));
  s.excursion_consistent = j.at("excursion_consistent").get<bool>();
  s.conditional = decode_conditional(j.at("conditional"));
  s.regret_violations = j.at("regret_violations").get<std::int64_t>();
  s.worst_regret_margin = decode(j.at("worst_regret_margin"));
  s.erm_negative_excess = j.at("erm_negative_excess").get<std::int64_t>();
  s.argab_violations = j.at("argab_violations").get<std::int64_t>();
  return s;
}

std::vector<std::string> split_csv(const std::string& line) {
  std::vector<std::string> cells;
  std::stringstream ss(line);
  std::string cell;
  while (std::getline(ss, cell, ',')) cells.push_back(cell);
  return cells;
}

}  // namespace

std::string format_double(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

double parse_double(const std::string& text) {
  if (text == "nan") return std::numeric_limits<double>::quiet_NaN();
  if (text == "inf") return std::numeric_limits<double>::infinity();
  if (text == "-inf") return -std::numeric_limits<double>::infinity();
  // strtod rather than stod: subnormals set ERANGE but still parse exactly
  char* end = nullptr;
  const double v = std::strtod(text.c_str(), &end);
  if (text.empty() || end != text.c_str() + text.size() || std::isspace(static_cast<unsigned char>(text[0]))) {
    throw std::runtime_error("malformed number '" + text + "'");
  }
  return v;
}

std::string records_csv(const std::vector<ReplicateRecord>& records) {
  std::string out = std::string("schema=") + kRecordsSchema + "\n" + kRecordsHeader + "\n";
  for (const auto& r : records) {
    out += std::to_string(r.n) + "," + std::to_string(r.replicate) + "," +
           std::to_string(r.seed_stream) + "," + std::to_string(r.walk_sum) + "," +
           (r.excursion ? "1" : "0") + "," + format_double(r.p) + "," +
           format_double(r.excess_pm) + "," + format_double(r.excess_pim) + "," +
           format_double(r.excess_erm) + "," + format_double(r.regret) + "," +
           format_double(r.regret_bound) + "\n";
  }
  return out;
}

void write_records_csv(const fs::path& path, const std::vector<ReplicateRecord>& records) {
  write_file(path, records_csv(records));
}

std::vector<ReplicateRecord> read_records_csv(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open " + path.string());
  std::string line;
  if (!std::getline(in, line) || line != std::string("schema=") + kRecordsSchema) {
    throw std::runtime_error("unexpected records schema in " + path.string());
  }
  if (!std::getline(in, line) || line != kRecordsHeader) {
    throw std::runtime_error("unexpected records header in " + path.string());
  }
  std::vector<ReplicateRecord> records;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    const auto cells = split_csv(line);
    if (cells.size() != 11) throw std::runtime_error("malformed record row: " + line);
    ReplicateRecord r;
    r.n = std::stoll(cells[0]);
    r.replicate = std::stoll(cells[1]);
    r.seed_stream = std::stoull(cells[2]);
    r.walk_sum = std::stoll(cells[3]);
    r.excursion = cells[4] == "1";
    r.p = parse_double(cells[5]);
    r.excess_pm = parse_double(cells[6]);
    r.excess_pim = parse_double(cells[7]);
    r.excess_erm = parse_double(cells[8]);
    r.regret = parse_double(cells[9]);
    r.regret_bound = parse_double(cells[10]);
    records.push_back(r);
  }
  return records;
}

std::string summary_json(const RunSummary& summary) {
  json doc;
  doc["schema"] = kSummarySchema;
  doc["kind"] = std::string(to_string(summary.kind));
  doc["loss"] = summary.loss;
  doc["has_c0"] = summary.has_c0;
  doc["c0"] = encode(summary.c0);
  json list = json::array();
  for (const auto& s : summary.summaries) list.push_back(encode(s));
  doc["summaries"] = list;
  return doc.dump(2) + "\n";
}

RunSummary parse_summary_json(const std::string& text) {
  const json doc = json::parse(text);
  if (doc.at("schema").get<std::string>() != kSummarySchema) {
    throw std::runtime_error("unexpected summary schema");
  }
  RunSummary out;
  out.kind = doc.at("kind").get<std::string>() == "deviation" ? ExperimentKind::deviation
                                                               : ExperimentKind::expectation;
  out.loss = doc.at("loss").get<std::string>();
  out.has_c0 = doc.at("has_c0").get<bool>();
  out.c0 = decode(doc.at("c0"));
  for (const auto& s : doc.at("summaries")) out.summaries.push_back(decode_summary(s));
  return out;
}

std::string manifest_json(const RunManifest& m) {
  json doc;
  doc["schema"] = kManifestSchema;
  doc["version"] = m.version;
  doc["config_hash"] = m.config_hash;
  doc["seed"] = m.seed;
  doc["timestamp"] = m.timestamp;
  doc["replicates"] = m.replicates;
  doc["complete"] = m.complete;
  doc["suites"] = m.suites;
  return doc.dump(2) + "\n";
}

RunManifest parse_manifest_json(const std::string& text) {
  const json doc = json::parse(text);
  if (doc.at("schema").get<std::string>() != kManifestSchema) {
    throw std::runtime_error("unexpected manifest schema");
  }
  RunManifest m;
  m.version = doc.at("version").get<std::string>();
  m.config_hash = doc.at("config_hash").get<std::string>();
  m.seed = doc.at("seed").get<std::uint64_t>();
  m.timestamp = doc.at("timestamp").get<std::string>();
  m.replicates = doc.at("replicates").get<std::int64_t>();
  m.complete = doc.at("complete").get<bool>();
  m.suites = doc.at("suites").get<std::map<std::string, bool>>();
  return m;
}

std::map<std::string, bool> run_suites(const RunSummary& summary) {
  std::map<std::string, bool> suites{{"regret_bound", true},
                                     {"erm_nonnegative", true},
                                     {"excursion_consistency", true},
                                     {"excursion_structure", true},
                                     {"pm_expectation_bound", true},
                                     {"erm_expectation_bound", true}};
  for (const auto& s : summary.summaries) {
    if (s.regret_violations != 0) suites["regret_bound"] = false;
    if (s.erm_negative_excess != 0) suites["erm_nonnegative"] = false;
    if (s.has_dp_exact && !s.excursion_consistent) suites["excursion_consistency"] = false;
    const auto& c = s.conditional;
    if (c.weight_violations || c.pm_bracket_violations || c.p_bound_violations) {
      suites["excursion_structure"] = false;
    }
    if (s.pm.enabled && s.pm.mean > s.expectation_bound + 3.0 * s.pm.sem) {
      suites["pm_expectation_bound"] = false;
    }
    if (s.erm.enabled && s.erm.mean > s.erm_upper_bound + 3.0 * s.erm.sem) {
      suites["erm_expectation_bound"] = false;
    }
  }
  return suites;
}

std::string read_file(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open " + path.string());
  std::stringstream buffer;
  buffer << in.rdbuf();
  return buffer.str();
}

void write_file(const fs::path& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out << content;
  if (!out) throw std::runtime_error("write failed for " + path.string());
}

ReportFiles write_report(const fs::path& out_dir) {
  const fs::path manifest_path = out_dir / "manifest.json";
  const fs::path summary_path = out_dir / "summary.json";
  const fs::path records_path = out_dir / "records.csv";
  for (const auto& p : {manifest_path, summary_path, records_path}) {
    if (!fs::exists(p)) throw IncompleteRun("missing " + p.string());
  }
  RunManifest manifest;
  RunSummary summary;
  std::vector<ReplicateRecord> records;
  try {
    manifest = parse_manifest_json(read_file(manifest_path));
    summary = parse_summary_json(read_file(summary_path));
    records = read_records_csv(records_path);
  } catch (const std::exception& e) {
    throw IncompleteRun(e.what());
  }
  if (!manifest.complete) throw IncompleteRun("run is not marked complete");
  if (records.empty()) throw IncompleteRun("records.csv has no rows");
  if (summary.summaries.empty()) throw IncompleteRun("summary.json has no entries");

  ReportFiles files;
  {
    std::string out =
        "# n pm_mean pm_sem pim_mean pim_sem erm_mean erm_sem bound erm_bound\n";
    for (const auto& s : summary.summaries) {
      out += std::to_string(s.n) + " " + format_double(s.pm.mean) + " " +
             format_double(s.pm.sem) + " " + format_double(s.pim.mean) + " " +
             format_double(s.pim.sem) + " " + format_double(s.erm.mean) + " " +
             format_double(s.erm.sem) + " " + format_double(s.expectation_bound) + " " +
             format_double(s.erm_upper_bound) + "\n";
    }
    write_file(out_dir / "gap_vs_n.dat", out);
    files.written.push_back(out_dir / "gap_vs_n.dat");
  }
  if (summary.kind == ExperimentKind::deviation) {
    std::string out = "# n freq wilson_lo wilson_hi dp_exact n_pow_minus_c0 excursion_freq\n";
    for (const auto& s : summary.summaries) {
      const double target = summary.has_c0
                                ? std::pow(static_cast<double>(s.n), -summary.c0)
                                : std::numeric_limits<double>::quiet_NaN();
      out += std::to_string(s.n) + " " + format_double(s.half_gap_tail.freq) + " " +
             format_double(s.half_gap_tail.wilson_lo) + " " +
             format_double(s.half_gap_tail.wilson_hi) + " " +
             format_double(s.has_dp_exact ? s.dp_exact
                                          : std::numeric_limits<double>::quiet_NaN()) +
             " " + format_double(target) + " " + format_double(s.excursion_freq) + "\n";
    }
    write_file(out_dir / "tail_vs_n.dat", out);
    files.written.push_back(out_dir / "tail_vs_n.dat");
  }
  for (const auto& s : summary.summaries) {
    const auto& h = s.conditional.pm_histogram;
    if (!s.conditional.available || h.counts.empty()) continue;
    std::string out = "# bin_lo bin_hi count  (pm excess given E_tau, n=" +
                      std::to_string(s.n) + ")\n";
    const double width = (h.hi - h.lo) / static_cast<double>(h.counts.size());
    for (std::size_t b = 0; b < h.counts.size(); ++b) {
      out += format_double(h.lo + width * static_cast<double>(b)) + " " +
             format_double(h.lo + width * static_cast<double>(b + 1)) + " " +
             std::to_string(h.counts[b]) + "\n";
    }
    const fs::path path = out_dir / ("conditional_excess_n" + std::to_string(s.n) + ".dat");
    write_file(path, out);
    files.written.push_back(path);
  }
  return files;
}

std::string utc_timestamp() {
  const std::time_t now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&now, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

}  // namespace mixlab

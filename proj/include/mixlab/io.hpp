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

#include <filesystem>
#include <map>
#include <stdexcept>
#include <string>
#include <vector>

#include "mixlab/harness.hpp"

namespace mixlab {

inline constexpr const char* kRecordsSchema = "mixlab.records/1";
inline constexpr const char* kSummarySchema = "mixlab.summary/1";
inline constexpr const char* kManifestSchema = "mixlab.manifest/1";

/// %.17g, with "nan", "inf" and "-inf" for non-finite values.
std::string format_double(double v);
double parse_double(const std::string& text);

/// Row 1: "schema=mixlab.records/1"; row 2: column names; then one row per record.
void write_records_csv(const std::filesystem::path& path,
                       const std::vector<ReplicateRecord>& records);
std::string records_csv(const std::vector<ReplicateRecord>& records);
/// Throws std::runtime_error on a schema mismatch or malformed row.
std::vector<ReplicateRecord> read_records_csv(const std::filesystem::path& path);

struct RunSummary {
  ExperimentKind kind = ExperimentKind::expectation;
  std::string loss;
  bool has_c0 = false;
  double c0 = 0.0;
  std::vector<SummaryStats> summaries;
  friend bool operator==(const RunSummary&, const RunSummary&) = default;
};

std::string summary_json(const RunSummary& summary);
RunSummary parse_summary_json(const std::string& text);

struct RunManifest {
  std::string version;
  std::string config_hash;
  std::uint64_t seed = 0;
  std::string timestamp;  // UTC, ISO 8601
  std::int64_t replicates = 0;
  bool complete = false;
  std::map<std::string, bool> suites;
};

std::string manifest_json(const RunManifest& manifest);
RunManifest parse_manifest_json(const std::string& text);

/// Per-suite checks of a finished run (regret bound, excursion consistency, ...).
std::map<std::string, bool> run_suites(const RunSummary& summary);

std::string read_file(const std::filesystem::path& path);
void write_file(const std::filesystem::path& path, const std::string& content);

class IncompleteRun : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct ReportFiles {
  std::vector<std::filesystem::path> written;
};

/// Plot data for a completed run directory. Throws IncompleteRun when the
/// manifest, summary or records are missing, unfinished or empty.
ReportFiles write_report(const std::filesystem::path& out_dir);

std::string utc_timestamp();

}  // namespace mixlab

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
#include <ostream>
#include <string>
#include <vector>

namespace mixlab {

/// One line of the self-check table. `worst_margin` is the smallest slack seen
/// (negative means violated by that amount).
struct VerifyRow {
  std::string suite;
  std::string check;
  std::int64_t cases = 0;
  std::int64_t violations = 0;
  double worst_margin = 0.0;
  double tolerance = 0.0;
  /// Informational rows are printed but never affect the exit status.
  bool counted = true;
  std::string failing_case;

  bool passed() const noexcept { return violations == 0; }
};

struct VerifyOptions {
  /// Denominator of the Stirling correction terms; 12 is correct.
  double stirling_denominator = 12.0;
  std::int64_t regret_sequences = 1000;
  std::int64_t regret_length = 200;
  std::uint64_t seed = 20240611;
};

std::vector<VerifyRow> verify_lemmas(const VerifyOptions& options = {});
std::vector<VerifyRow> verify_losses(const VerifyOptions& options = {});
std::vector<VerifyRow> verify_aggregation(const VerifyOptions& options = {});

/// "lemmas", "losses", "aggregation" or "all". Throws std::invalid_argument otherwise.
std::vector<VerifyRow> run_verify_suite(const std::string& suite, const VerifyOptions& options);

void print_verify_table(std::ostream& out, const std::vector<VerifyRow>& rows);

/// True iff every counted row passed.
bool verify_passed(const std::vector<VerifyRow>& rows);

}  // namespace mixlab

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

#include "mixlab/loss.hpp"

namespace mixlab {

/// Pathwise regret of the Gibbs-mean progressive mixture over random sequences.
/// Experts are affine maps x -> u + (v - u) x with u, v drawn inside the output
/// interval; labels are uniform on it. Sequence k uses substream (seed, experts, k).
struct RegretBatch {
  std::int64_t sequences = 0;
  std::int64_t violations = 0;  // regret > bound + kRegretTolerance
  double worst_margin = 0.0;    // max(regret - bound)
  std::int64_t worst_sequence = 0;
  double bound = 0.0;
};

/// `length` is the number of observed pairs (n + 1 for a sample of size n).
RegretBatch regret_batch_serial(const LossSpec& loss, int experts, std::int64_t sequences,
                                std::int64_t length, std::uint64_t seed);
RegretBatch regret_batch_omp(const LossSpec& loss, int experts, std::int64_t sequences,
                             std::int64_t length, std::uint64_t seed, int workers = 0);

/// Regret minus bound for one sequence of the batch.
double regret_margin(const LossSpec& loss, int experts, std::int64_t length, std::uint64_t seed,
                     std::int64_t sequence);

}  // namespace mixlab

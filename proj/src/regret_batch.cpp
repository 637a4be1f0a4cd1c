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

#include "mixlab/regret_batch.hpp"

#include <cmath>
#include <limits>
#include <vector>

#include <omp.h>

#include "mixlab/aggregation.hpp"
#include "mixlab/rng.hpp"

namespace mixlab {

namespace {

Interval draw_range(const LossSpec& loss) {
  // Keep entropy experts off {0, 1}, where some labels give infinite loss.
  if (loss.kind == LossKind::entropy) return {0.01, 0.99};
  return loss.interval;
}

RegretBatch finish(const LossSpec& loss, int experts, std::int64_t sequences,
                   const std::vector<double>& margins) {
  RegretBatch out;
  out.sequences = sequences;
  out.bound = std::log(static_cast<double>(experts)) / loss.lambda;
  out.worst_margin = -std::numeric_limits<double>::infinity();
  for (std::int64_t k = 0; k < sequences; ++k) {
    const double m = margins[static_cast<std::size_t>(k)];
    if (m > kRegretTolerance) ++out.violations;
    if (m > out.worst_margin) {
      out.worst_margin = m;
      out.worst_sequence = k;
    }
  }
  return out;
}

}  // namespace

double regret_margin(const LossSpec& loss, int experts, std::int64_t length, std::uint64_t seed,
                     std::int64_t sequence) {
  RngStream stream(substream_seed(seed, static_cast<std::uint64_t>(experts),
                                  static_cast<std::uint64_t>(sequence)));
  const Interval range = draw_range(loss);
  std::vector<Expert> pool;
  pool.reserve(static_cast<std::size_t>(experts));
  for (int g = 0; g < experts; ++g) {
    const double u = range.lo + range.width() * stream.uniform();
    const double v = range.lo + range.width() * stream.uniform();
    pool.emplace_back([u, v](double x) { return u + (v - u) * x; });
  }
  std::vector<Sample> data(static_cast<std::size_t>(length));
  for (auto& s : data) {
    s.x = stream.uniform();
    s.y = loss.interval.lo + loss.interval.width() * stream.uniform();
  }
  const CumulativeLossTable table = cumulative_losses(loss, pool, data);
  const AggregatorTrace trace =
      build_trace(loss, loss.lambda, pool, data, table, Substitution::gibbs_mean(), {});
  const Regret r = per_sequence_regret(trace, table);
  return r.regret - r.bound;
}

RegretBatch regret_batch_serial(const LossSpec& loss, int experts, std::int64_t sequences,
                                std::int64_t length, std::uint64_t seed) {
  std::vector<double> margins(static_cast<std::size_t>(sequences));
  for (std::int64_t k = 0; k < sequences; ++k) {
    margins[static_cast<std::size_t>(k)] = regret_margin(loss, experts, length, seed, k);
  }
  return finish(loss, experts, sequences, margins);
}

RegretBatch regret_batch_omp(const LossSpec& loss, int experts, std::int64_t sequences,
                             std::int64_t length, std::uint64_t seed, int workers) {
  std::vector<double> margins(static_cast<std::size_t>(sequences));
  const int threads = workers > 0 ? workers : omp_get_max_threads();
#pragma omp parallel for schedule(dynamic, 16) num_threads(threads)
  for (std::int64_t k = 0; k < sequences; ++k) {
    margins[static_cast<std::size_t>(k)] = regret_margin(loss, experts, length, seed, k);
  }
  return finish(loss, experts, sequences, margins);
}

}  // namespace mixlab

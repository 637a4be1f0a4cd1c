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

#include <exception>
#include <mutex>

#include <omp.h>

#include "mixlab/harness.hpp"

namespace mixlab {

namespace {

/// Fills out[r] = task(r) for r in [0, count); the first exception is rethrown.
template <typename Task>
void parallel_fill(std::vector<ReplicateRecord>& out, std::int64_t count, int workers,
                   Task&& task) {
  out.resize(static_cast<std::size_t>(count));
  std::exception_ptr error;
  std::mutex error_mutex;
  const int threads = workers > 0 ? workers : omp_get_max_threads();
#pragma omp parallel for schedule(dynamic, 64) num_threads(threads)
  for (std::int64_t r = 0; r < count; ++r) {
    try {
      out[static_cast<std::size_t>(r)] = task(r);
    } catch (...) {
      std::lock_guard<std::mutex> lock(error_mutex);
      if (!error) error = std::current_exception();
    }
  }
  if (error) std::rethrow_exception(error);
}

}  // namespace

std::vector<ReplicateRecord> run_replicates_omp(const ReplicateContext& ctx, std::int64_t count,
                                                int workers) {
  std::vector<ReplicateRecord> records;
  parallel_fill(records, count, workers,
                [&ctx](std::int64_t r) { return simulate_replicate(ctx, r); });
  return records;
}

std::uint64_t conditioned_family(const ReplicateContext& ctx) {
  return ctx.family | (std::uint64_t{1} << 63);
}

std::vector<ReplicateRecord> run_conditioned_omp(const ReplicateContext& ctx,
                                                 const ExcursionSampler& sampler,
                                                 std::int64_t count, int workers) {
  const std::uint64_t family = conditioned_family(ctx);
  std::vector<ReplicateRecord> records;
  parallel_fill(records, count, workers, [&](std::int64_t r) {
    const std::uint64_t seed = substream_seed(ctx.seed, family, static_cast<std::uint64_t>(r));
    RngStream stream(seed);
    const auto steps = sampler.sample(stream);
    const bool next_y1 = stream.bernoulli(ctx.construction.prob_y1());
    ReplicateRecord rec = simulate_walk(ctx, steps, next_y1);
    rec.replicate = r;
    rec.seed_stream = seed;
    rec.conditioned = true;
    return rec;
  });
  return records;
}

}  // namespace mixlab

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

#include <cstdint>
#include <cstdlib>

#include "mixlab/random_walk.hpp"

namespace mixlab {
namespace {

// Number of completions of a partial walk (k steps taken, position s,
// `reached` = running max already >= t) that land in the event.
std::uint64_t count_from(int k, int N, int s, bool reached, int t, int m) {
  if (k == N) return (reached && s != t && std::abs(s - t) <= m) ? 1 : 0;
  const int up = s + 1;
  const int down = s - 1;
  return count_from(k + 1, N, up, reached || up >= t, t, m) +
         count_from(k + 1, N, down, reached || down >= t, t, m);
}

}  // namespace

std::uint64_t reflection_count_serial(int N, int t, int m) {
  return count_from(0, N, 0, false, t, m);
}

std::uint64_t reflection_count_omp(int N, int t, int m) {
  const int prefix = N < 10 ? N : 10;
  const std::int64_t prefixes = std::int64_t{1} << prefix;
  std::uint64_t total = 0;
#pragma omp parallel for schedule(dynamic, 16) reduction(+ : total)
  for (std::int64_t mask = 0; mask < prefixes; ++mask) {
    int s = 0;
    bool reached = false;
    for (int j = 0; j < prefix; ++j) {
      s += (mask >> j) & 1 ? 1 : -1;
      reached = reached || s >= t;
    }
    total += count_from(prefix, N, s, reached, t, m);
  }
  return total;
}

}  // namespace mixlab

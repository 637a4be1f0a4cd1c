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

#include "mixlab/harness.hpp"

namespace mixlab {

std::vector<ReplicateRecord> run_replicates_serial(const ReplicateContext& ctx,
                                                   std::int64_t count) {
  std::vector<ReplicateRecord> records;
  records.reserve(static_cast<std::size_t>(count));
  for (std::int64_t r = 0; r < count; ++r) records.push_back(simulate_replicate(ctx, r));
  return records;
}

}  // namespace mixlab

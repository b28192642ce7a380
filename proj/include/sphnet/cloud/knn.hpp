// Copyright 2026 The sphnet Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <cstdint>
#include <vector>

#include "sphnet/cloud/point_cloud.hpp"

namespace sphnet::cloud {

/// k-nearest-neighbor patches: row q lists the patch of point q, self first,
/// the rest ordered by (distance, original index). Also carries the inverse
/// adjacency (for every point, the (q, slot) pairs that reference it) in CSR
/// form, ordered by q then slot.
struct PatchIndex {
  int k = 0;
  std::int64_t n = 0;
  std::vector<std::int32_t> indices;  // n * k, row-major

  std::vector<std::int64_t> inv_offsets;          // n + 1
  std::vector<std::pair<std::int32_t, std::int32_t>> inv_entries;  // (q, slot)

  std::int32_t at(std::int64_t q, int slot) const { return indices[q * k + slot]; }
};

/// Exact Euclidean kNN by brute force; deterministic tie-breaks by smaller
/// original index. Throws std::invalid_argument unless 1 <= k <= N.
PatchIndex knn_patches(const PointCloud& cloud, int k);

}  // namespace sphnet::cloud

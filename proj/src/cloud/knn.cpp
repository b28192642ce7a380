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

#include "sphnet/cloud/knn.hpp"

#include <algorithm>

#include "sphnet/common.hpp"

namespace sphnet::cloud {

PatchIndex knn_patches(const PointCloud& cloud, int k) {
  const std::int64_t n = cloud.size();
  check_arg(k >= 1 && k <= n, "knn_patches: k must be in [1, N]");

  PatchIndex patch;
  patch.k = k;
  patch.n = n;
  patch.indices.resize(static_cast<std::size_t>(n) * k);

  std::vector<std::pair<double, std::int32_t>> cand;
  cand.reserve(n);
  for (std::int64_t q = 0; q < n; ++q) {
    const Eigen::RowVector3d p = cloud.pts.row(q);
    cand.clear();
    for (std::int64_t j = 0; j < n; ++j) {
      if (j == q) continue;
      cand.emplace_back((cloud.pts.row(j) - p).squaredNorm(), static_cast<std::int32_t>(j));
    }
    const int m = k - 1;
    if (m > 0) {
      std::nth_element(cand.begin(), cand.begin() + (m - 1), cand.end());
      std::sort(cand.begin(), cand.begin() + m);
    }
    std::int32_t* row = patch.indices.data() + q * k;
    row[0] = static_cast<std::int32_t>(q);
    for (int s = 0; s < m; ++s) row[s + 1] = cand[s].second;
  }

  // Inverse adjacency, entries ordered by (q, slot).
  std::vector<std::int64_t> counts(n + 1, 0);
  for (std::int32_t idx : patch.indices) ++counts[idx + 1];
  for (std::int64_t i = 0; i < n; ++i) counts[i + 1] += counts[i];
  patch.inv_offsets = counts;
  patch.inv_entries.resize(patch.indices.size());
  std::vector<std::int64_t> cursor(patch.inv_offsets.begin(), patch.inv_offsets.end() - 1);
  for (std::int64_t q = 0; q < n; ++q)
    for (int s = 0; s < k; ++s) {
      const std::int32_t i = patch.indices[q * k + s];
      patch.inv_entries[cursor[i]++] = {static_cast<std::int32_t>(q), s};
    }
  return patch;
}

}  // namespace sphnet::cloud

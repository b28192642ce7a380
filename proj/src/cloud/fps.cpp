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

#include "sphnet/cloud/fps.hpp"

#include <limits>

#include "sphnet/common.hpp"

namespace sphnet::cloud {

FpsVoronoiResult fps_voronoi_pool(const PointCloud& cloud, const FeatureMatrix& features,
                                  std::int64_t target) {
  const std::int64_t n = cloud.size();
  check_arg(target >= 1, "fps_voronoi_pool: target must be at least 1");
  check_arg(target <= n, "fps_voronoi_pool: target exceeds point count");
  check_arg(features.rows() == n, "fps_voronoi_pool: feature row count mismatch");

  FpsVoronoiResult out;
  out.seeds.reserve(target);

  std::int32_t first = 0;
  double best = -1.0;
  for (std::int64_t i = 0; i < n; ++i) {
    const double norm2 = cloud.pts.row(i).squaredNorm();
    if (norm2 > best) {
      best = norm2;
      first = static_cast<std::int32_t>(i);
    }
  }
  out.seeds.push_back(first);

  // dist2[i] = squared distance to the nearest chosen seed; owner = its index
  // in out.seeds (ties to the earlier seed, hence the strict '>').
  std::vector<double> dist2(n);
  std::vector<std::int32_t> owner(n, 0);
  for (std::int64_t i = 0; i < n; ++i)
    dist2[i] = (cloud.pts.row(i) - cloud.pts.row(first)).squaredNorm();

  while (static_cast<std::int64_t>(out.seeds.size()) < target) {
    std::int32_t next = 0;
    double far = -1.0;
    for (std::int64_t i = 0; i < n; ++i)
      if (dist2[i] > far) {
        far = dist2[i];
        next = static_cast<std::int32_t>(i);
      }
    const std::int32_t seed_idx = static_cast<std::int32_t>(out.seeds.size());
    out.seeds.push_back(next);
    for (std::int64_t i = 0; i < n; ++i) {
      const double d = (cloud.pts.row(i) - cloud.pts.row(next)).squaredNorm();
      if (d < dist2[i]) {
        dist2[i] = d;
        owner[i] = seed_idx;
      }
    }
  }

  const std::int64_t m = target;
  out.positions.resize(m, 3);
  for (std::int64_t s = 0; s < m; ++s) out.positions.row(s) = cloud.pts.row(out.seeds[s]);
  out.features =
      FeatureMatrix::Constant(m, features.cols(), -std::numeric_limits<double>::infinity());
  for (std::int64_t i = 0; i < n; ++i)
    out.features.row(owner[i]) = out.features.row(owner[i]).cwiseMax(features.row(i));
  return out;
}

}  // namespace sphnet::cloud

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

#include <vector>

#include "sphnet/cloud/kdtree.hpp"
#include "sphnet/cloud/point_cloud.hpp"

namespace sphnet::cloud {

/// Quadratic pooling baseline: farthest-point sampling of M seeds (first
/// seed = point of maximum norm; all ties by smaller index), then per-seed
/// max over the seed's Voronoi cell (nearest-seed assignment).
struct FpsVoronoiResult {
  Points positions;        // M x 3, the seed coordinates
  FeatureMatrix features;  // M x C
  std::vector<std::int32_t> seeds;
};
FpsVoronoiResult fps_voronoi_pool(const PointCloud& cloud, const FeatureMatrix& features,
                                  std::int64_t target);

}  // namespace sphnet::cloud

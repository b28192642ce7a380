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

#include "sphnet/cloud/point_cloud.hpp"

namespace sphnet::layers {

/// Per-point weights of the Dirac extension: w_i = 1 / sum_j
/// exp(-|x_j - x_i|^2 / (2 sigma^2)), summed over the whole cloud. Each
/// weight lies in (0, 1]; an isolated point gets weight 1. Terms with
/// |x_j - x_i|^2 > 80 sigma^2 are below double precision and skipped.
std::vector<double> extension_weights(const cloud::Points& positions, double sigma);

inline std::vector<double> extension_weights(const cloud::PointCloud& cloud, double sigma) {
  return extension_weights(cloud.pts, sigma);
}

}  // namespace sphnet::layers

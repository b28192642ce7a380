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

#include <Eigen/Core>
#include <cstdint>
#include <vector>

namespace sphnet::cloud {

using Points = Eigen::Matrix<double, Eigen::Dynamic, 3, Eigen::RowMajor>;

struct PointCloud {
  Points pts;

  PointCloud() = default;
  explicit PointCloud(Points p) : pts(std::move(p)) {}

  std::int64_t size() const { return pts.rows(); }
  Eigen::Vector3d point(std::int64_t i) const { return pts.row(i).transpose(); }
};

/// Centers the cloud on its centroid and scales so the farthest point has
/// norm 1. Throws std::domain_error if all points coincide.
PointCloud normalize(const PointCloud& cloud);

/// Applies a rotation to every point.
PointCloud rotate(const PointCloud& cloud, const Eigen::Matrix3d& R);

/// Keeps the rows listed in indices, in order.
PointCloud subset(const PointCloud& cloud, const std::vector<int>& indices);

}  // namespace sphnet::cloud

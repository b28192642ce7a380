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

#include "sphnet/cloud/point_cloud.hpp"

#include "sphnet/common.hpp"

namespace sphnet::cloud {

PointCloud normalize(const PointCloud& cloud) {
  check_arg(cloud.size() >= 1, "normalize: empty cloud");
  const Eigen::RowVector3d centroid = cloud.pts.colwise().mean();
  Points centered = cloud.pts.rowwise() - centroid;
  const double max_norm = centered.rowwise().norm().maxCoeff();
  check_domain(max_norm > 0.0, "normalize: all points coincide");
  centered /= max_norm;
  return PointCloud{std::move(centered)};
}

PointCloud rotate(const PointCloud& cloud, const Eigen::Matrix3d& R) {
  return PointCloud{cloud.pts * R.transpose()};
}

PointCloud subset(const PointCloud& cloud, const std::vector<int>& indices) {
  Points out(static_cast<std::int64_t>(indices.size()), 3);
  for (std::size_t i = 0; i < indices.size(); ++i) out.row(i) = cloud.pts.row(indices[i]);
  return PointCloud{std::move(out)};
}

}  // namespace sphnet::cloud

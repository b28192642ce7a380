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

#include "sphnet/cloud/kdtree.hpp"

#include <algorithm>
#include <limits>

#include "sphnet/common.hpp"

namespace sphnet::cloud {

namespace {

bool is_power_of_two(std::int64_t n) { return n > 0 && (n & (n - 1)) == 0; }

void build_node(const Points& pts, std::int32_t* idx, std::int64_t count, std::size_t node,
                KdTree& tree) {
  if (count <= 1) return;

  // Axis of largest coordinate spread over this subtree.
  Eigen::Vector3d lo = Eigen::Vector3d::Constant(std::numeric_limits<double>::infinity());
  Eigen::Vector3d hi = -lo;
  for (std::int64_t i = 0; i < count; ++i) {
    const Eigen::RowVector3d p = pts.row(idx[i]);
    lo = lo.cwiseMin(p.transpose());
    hi = hi.cwiseMax(p.transpose());
  }
  int axis = 0;
  (hi - lo).maxCoeff(&axis);

  const std::int64_t half = count / 2;
  auto key_less = [&](std::int32_t a, std::int32_t b) {
    const double ca = pts(a, axis), cb = pts(b, axis);
    return ca < cb || (ca == cb && a < b);
  };
  std::nth_element(idx, idx + half, idx + count, key_less);
  // nth_element leaves [0, half) <= idx[half]; pin the left maximum so the
  // recorded threshold brackets both halves.
  double left_max = -std::numeric_limits<double>::infinity();
  for (std::int64_t i = 0; i < half; ++i) left_max = std::max(left_max, pts(idx[i], axis));
  tree.splits[node] = {axis, 0.5 * (left_max + pts(idx[half], axis))};

  build_node(pts, idx, half, 2 * node, tree);
  build_node(pts, idx + half, half, 2 * node + 1, tree);
}

}  // namespace

KdTree build_kdtree(const PointCloud& cloud) {
  const std::int64_t n = cloud.size();
  check_arg(is_power_of_two(n), "build_kdtree: point count must be a power of two");

  KdTree tree;
  tree.depth = 0;
  while ((std::int64_t{1} << tree.depth) < n) ++tree.depth;
  tree.perm.resize(n);
  for (std::int64_t i = 0; i < n; ++i) tree.perm[i] = static_cast<std::int32_t>(i);
  tree.splits.assign(static_cast<std::size_t>(n), {});
  build_node(cloud.pts, tree.perm.data(), n, 1, tree);
  return tree;
}

PoolResult pool(const KdTree& tree, const FeatureMatrix& features, const Points& positions, int k) {
  const std::int64_t n = tree.size();
  check_arg(k >= 0 && k <= tree.depth, "pool: depth reduction out of range");
  check_arg(features.rows() == n && positions.rows() == n, "pool: row count mismatch with tree");

  const std::int64_t group = std::int64_t{1} << k;
  const std::int64_t m = n / group;
  const Eigen::Index c = features.cols();

  PoolResult out;
  out.positions.setZero(m, 3);
  out.features.resize(m, c);
  for (std::int64_t g = 0; g < m; ++g) {
    Eigen::RowVector3d mean = Eigen::RowVector3d::Zero();
    Eigen::RowVectorXd fmax =
        Eigen::RowVectorXd::Constant(c, -std::numeric_limits<double>::infinity());
    for (std::int64_t s = 0; s < group; ++s) {
      const std::int32_t i = tree.perm[g * group + s];
      mean += positions.row(i);
      fmax = fmax.cwiseMax(features.row(i));
    }
    out.positions.row(g) = mean / static_cast<double>(group);
    out.features.row(g) = fmax;
  }
  return out;
}

KdTree truncate(const KdTree& tree, int k) {
  check_arg(k >= 0 && k <= tree.depth, "truncate: depth reduction out of range");
  KdTree out;
  out.depth = tree.depth - k;
  const std::int64_t m = std::int64_t{1} << out.depth;
  out.perm.resize(m);
  for (std::int64_t i = 0; i < m; ++i) out.perm[i] = static_cast<std::int32_t>(i);
  out.splits.assign(static_cast<std::size_t>(m), {});
  for (std::int64_t node = 1; node < m; ++node) out.splits[node] = tree.splits[node];
  return out;
}

FeatureMatrix upsample(const KdTree& tree, const FeatureMatrix& features, int k) {
  check_arg(k >= 0, "upsample: depth increase must be non-negative");
  const std::int64_t group = std::int64_t{1} << k;
  check_arg(features.rows() * group <= tree.size(), "upsample: size exceeds tree capacity");

  FeatureMatrix out(features.rows() * group, features.cols());
  for (std::int64_t i = 0; i < features.rows(); ++i)
    for (std::int64_t s = 0; s < group; ++s) out.row(i * group + s) = features.row(i);
  return out;
}

}  // namespace sphnet::cloud

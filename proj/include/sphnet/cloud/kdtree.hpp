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

#include "sphnet/cloud/point_cloud.hpp"

namespace sphnet::cloud {

using FeatureMatrix = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

/// Perfectly balanced binary partition of a 2^n-point cloud. Splits choose
/// the axis of largest coordinate spread and cut at the rank-N/2 element
/// (ties by original index), so every leaf sits at depth n. `perm[s]` is the
/// original index of the point in leaf slot s; consecutive runs of 2^k slots
/// are exactly the depth-(n-k) subtrees.
struct KdTree {
  struct Split {
    int axis = 0;
    double threshold = 0.0;
  };

  int depth = 0;                   // n, with N = 2^n
  std::vector<std::int32_t> perm;  // leaf slot -> original index
  std::vector<Split> splits;       // heap order: root at 1, children 2i, 2i+1

  std::int64_t size() const { return static_cast<std::int64_t>(perm.size()); }
};

/// Builds the balanced kd-tree. Throws std::invalid_argument unless N is a
/// power of two.
KdTree build_kdtree(const PointCloud& cloud);

/// Max-pools features and mean-pools positions over the depth-k subtrees,
/// reducing 2^n points to 2^(n-k), in left-to-right subtree order.
/// features/positions are indexed like the cloud the tree was built on.
struct PoolResult {
  Points positions;        // (N / 2^k) x 3
  FeatureMatrix features;  // (N / 2^k) x C
};
PoolResult pool(const KdTree& tree, const FeatureMatrix& features, const Points& positions, int k);

/// The kd-tree of the pooled cloud: splits above the cut depth, identity
/// permutation (pooled points are already in subtree order).
KdTree truncate(const KdTree& tree, int k);

/// Repeats each coarse feature across the 2^k members of its subtree.
/// Requires rows * 2^k <= N of the original tree.
FeatureMatrix upsample(const KdTree& tree, const FeatureMatrix& features, int k);

}  // namespace sphnet::cloud

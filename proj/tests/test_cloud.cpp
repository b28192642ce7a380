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

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <Eigen/Dense>
#include <algorithm>
#include <numeric>
#include <set>

#include "sphnet/cloud/fps.hpp"
#include "sphnet/cloud/kdtree.hpp"
#include "sphnet/cloud/knn.hpp"
#include "sphnet/cloud/point_cloud.hpp"
#include "sphnet/cloud/rotation.hpp"
#include "sphnet/common.hpp"

using namespace sphnet;
using namespace sphnet::cloud;

namespace {

PointCloud random_cloud(Rng& rng, std::int64_t n) {
  Points pts(n, 3);
  for (std::int64_t i = 0; i < n; ++i)
    pts.row(i) = Eigen::RowVector3d(rng.normal(), rng.normal(), rng.normal());
  return PointCloud{std::move(pts)};
}

// Reference kNN: full sort of every candidate list; self pinned first as in
// the production convention.
std::vector<std::int32_t> knn_reference_row(const PointCloud& c, std::int64_t q, int k) {
  std::vector<std::pair<double, std::int32_t>> all;
  for (std::int64_t j = 0; j < c.size(); ++j) {
    if (j == q) continue;
    all.emplace_back((c.pts.row(j) - c.pts.row(q)).squaredNorm(), static_cast<std::int32_t>(j));
  }
  std::sort(all.begin(), all.end());
  std::vector<std::int32_t> row{static_cast<std::int32_t>(q)};
  for (int s = 0; s + 1 < k; ++s) row.push_back(all[s].second);
  return row;
}

}  // namespace

TEST_CASE("normalize centers and scales") {
  Points pts(2, 3);
  pts << 1, 0, 0, 3, 0, 0;
  const PointCloud out = normalize(PointCloud{pts});
  CHECK(out.pts(0, 0) == doctest::Approx(-1.0));
  CHECK(out.pts(1, 0) == doctest::Approx(1.0));
  CHECK(out.pts.col(1).cwiseAbs().maxCoeff() == 0.0);

  Rng rng(3);
  const PointCloud cloud = normalize(random_cloud(rng, 50));
  CHECK(cloud.pts.colwise().mean().norm() < 1e-6);
  CHECK(cloud.pts.rowwise().norm().maxCoeff() == doctest::Approx(1.0).epsilon(1e-9));

  const PointCloud again = normalize(cloud);
  CHECK((again.pts - cloud.pts).cwiseAbs().maxCoeff() < 1e-12);
}

TEST_CASE("normalize rejects a degenerate cloud") {
  Points pts(3, 3);
  pts << 1, 2, 3, 1, 2, 3, 1, 2, 3;
  CHECK_THROWS_AS(normalize(PointCloud{pts}), std::domain_error);
}

TEST_CASE("knn on collinear equispaced points") {
  Points pts(4, 3);
  pts << 0, 0, 0, 1, 0, 0, 2, 0, 0, 3, 0, 0;
  const auto patch = knn_patches(PointCloud{pts}, 2);
  CHECK(patch.at(0, 0) == 0);
  CHECK(patch.at(0, 1) == 1);
  CHECK(patch.at(1, 0) == 1);
  CHECK(patch.at(1, 1) == 0);  // tie between 0 and 2 goes to the smaller index
  CHECK(patch.at(2, 1) == 1);
  CHECK(patch.at(3, 1) == 2);
  CHECK_THROWS_AS(knn_patches(PointCloud{pts}, 5), std::invalid_argument);
}

TEST_CASE("knn matches the brute-force oracle on 100 random instances") {
  Rng rng(7);
  for (int trial = 0; trial < 100; ++trial) {
    const std::int64_t n = 8 + rng.uniform_int(57);
    const int k = 1 + static_cast<int>(rng.uniform_int(std::min<std::int64_t>(n, 8)));
    const PointCloud c = random_cloud(rng, n);
    const auto patch = knn_patches(c, k);
    for (std::int64_t q = 0; q < n; ++q) {
      const auto expected = knn_reference_row(c, q, k);
      for (int s = 0; s < k; ++s) CHECK(patch.at(q, s) == expected[s]);
    }
  }
}

TEST_CASE("knn index sets are rotation invariant") {
  Rng rng(13);
  const PointCloud c = normalize(random_cloud(rng, 128));
  const auto before = knn_patches(c, 9);
  const auto after = knn_patches(rotate(c, random_rotation(rng)), 9);
  for (std::int64_t q = 0; q < c.size(); ++q) {
    std::set<std::int32_t> a, b;
    for (int s = 0; s < 9; ++s) {
      a.insert(before.at(q, s));
      b.insert(after.at(q, s));
    }
    CHECK(a == b);
  }
}

TEST_CASE("knn inverse adjacency is consistent") {
  Rng rng(17);
  const PointCloud c = random_cloud(rng, 32);
  const auto patch = knn_patches(c, 5);
  std::int64_t total = 0;
  for (std::int64_t i = 0; i < c.size(); ++i) {
    for (std::int64_t e = patch.inv_offsets[i]; e < patch.inv_offsets[i + 1]; ++e) {
      const auto [q, slot] = patch.inv_entries[e];
      CHECK(patch.at(q, slot) == i);
      ++total;
    }
  }
  CHECK(total == c.size() * 5);
}

TEST_CASE("kd-tree on two points") {
  Points pts(2, 3);
  pts << 0, 0, 0, 1, 0, 0;
  const KdTree tree = build_kdtree(PointCloud{pts});
  CHECK(tree.depth == 1);
  CHECK(tree.perm == std::vector<std::int32_t>{0, 1});
  CHECK(tree.splits[1].axis == 0);
}

TEST_CASE("kd-tree on a square splits along a max-spread axis") {
  Points pts(4, 3);
  pts << 0, 0, 0, 1, 0, 0, 0, 1, 0, 1, 1, 0;
  const KdTree tree = build_kdtree(PointCloud{pts});
  CHECK(tree.depth == 2);
  const int axis = tree.splits[1].axis;
  CHECK((axis == 0 || axis == 1));
  // Each child holds the two points on one side of the split.
  for (int side = 0; side < 2; ++side)
    for (int s = 0; s < 2; ++s) {
      const double coord = pts(tree.perm[side * 2 + s], axis);
      if (side == 0)
        CHECK(coord <= tree.splits[1].threshold);
      else
        CHECK(coord >= tree.splits[1].threshold);
    }
}

TEST_CASE("kd-tree rejects non-power-of-two input") {
  Rng rng(19);
  CHECK_THROWS_AS(build_kdtree(random_cloud(rng, 100)), std::invalid_argument);
}

TEST_CASE("kd-tree structural audit at 1024 points") {
  Rng rng(23);
  const PointCloud c = random_cloud(rng, 1024);
  const KdTree tree = build_kdtree(c);
  CHECK(tree.depth == 10);

  // perm is a bijection.
  std::vector<std::int32_t> sorted = tree.perm;
  std::sort(sorted.begin(), sorted.end());
  for (std::int64_t i = 0; i < 1024; ++i) CHECK(sorted[i] == i);

  // Every internal node separates its children by its threshold, and every
  // depth-k subtree covers exactly 2^(10-k) original points by construction
  // of the slot ranges.
  for (int depth = 0; depth < 10; ++depth) {
    const std::int64_t nodes = std::int64_t{1} << depth;
    const std::int64_t span = std::int64_t{1} << (10 - depth);
    for (std::int64_t node = 0; node < nodes; ++node) {
      const auto& split = tree.splits[nodes + node];
      const std::int64_t base = node * span;
      for (std::int64_t s = 0; s < span / 2; ++s) {
        CHECK(c.pts(tree.perm[base + s], split.axis) <= split.threshold + 1e-12);
        CHECK(c.pts(tree.perm[base + span / 2 + s], split.axis) >= split.threshold - 1e-12);
      }
    }
  }
}

TEST_CASE("pool max/mean over explicit pairs") {
  Points pts(4, 3);
  pts << 0, 0, 0, 0.1, 0, 0, 10, 0, 0, 10.1, 0, 0;
  const PointCloud c{pts};
  const KdTree tree = build_kdtree(c);
  FeatureMatrix f(4, 1);
  f << 1, 5, 2, 2;
  const auto pooled = pool(tree, f, c.pts, 1);
  REQUIRE(pooled.features.rows() == 2);
  CHECK(pooled.features(0, 0) == 5);
  CHECK(pooled.features(1, 0) == 2);
  CHECK(pooled.positions(0, 0) == doctest::Approx(0.05));
  CHECK(pooled.positions(1, 0) == doctest::Approx(10.05));

  const auto id = pool(tree, f, c.pts, 0);
  CHECK((id.features - f).cwiseAbs().maxCoeff() == 0.0);
  CHECK_THROWS_AS(pool(tree, f, c.pts, 3), std::invalid_argument);
}

TEST_CASE("pooling a constant feature stays constant") {
  Rng rng(29);
  const PointCloud c = random_cloud(rng, 64);
  const KdTree tree = build_kdtree(c);
  const FeatureMatrix f = FeatureMatrix::Constant(64, 3, 0.75);
  const auto pooled = pool(tree, f, c.pts, 2);
  CHECK(pooled.features.rows() == 16);
  CHECK((pooled.features.array() - 0.75).abs().maxCoeff() == 0.0);
}

TEST_CASE("pool is permutation-consistent") {
  Rng rng(31);
  const PointCloud c = random_cloud(rng, 32);
  const KdTree tree = build_kdtree(c);
  FeatureMatrix f(32, 2);
  for (std::int64_t i = 0; i < f.size(); ++i) f.data()[i] = rng.normal();

  const auto base = pool(tree, f, c.pts, 2);

  // Permute storage order while keeping the tree assignment fixed.
  std::vector<std::int32_t> shuffle(32);
  std::iota(shuffle.begin(), shuffle.end(), 0);
  for (std::int64_t i = 31; i > 0; --i)
    std::swap(shuffle[i], shuffle[rng.uniform_int(i + 1)]);
  Points pts2(32, 3);
  FeatureMatrix f2(32, 2);
  KdTree tree2 = tree;
  std::vector<std::int32_t> inverse(32);
  for (std::int64_t i = 0; i < 32; ++i) inverse[shuffle[i]] = static_cast<std::int32_t>(i);
  for (std::int64_t i = 0; i < 32; ++i) {
    pts2.row(inverse[i]) = c.pts.row(i);
    f2.row(inverse[i]) = f.row(i);
  }
  for (auto& p : tree2.perm) p = inverse[p];

  const auto moved = pool(tree2, f2, pts2, 2);
  CHECK((moved.features - base.features).cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("upsample repeats subtree features and inverts pooling") {
  Points pts(4, 3);
  pts << 0, 0, 0, 0.1, 0, 0, 10, 0, 0, 10.1, 0, 0;
  const KdTree tree = build_kdtree(PointCloud{pts});
  FeatureMatrix coarse(2, 1);
  coarse << 3, 7;
  const FeatureMatrix fine = upsample(tree, coarse, 1);
  REQUIRE(fine.rows() == 4);
  CHECK(fine(0, 0) == 3);
  CHECK(fine(1, 0) == 3);
  CHECK(fine(2, 0) == 7);
  CHECK(fine(3, 0) == 7);

  // pool(upsample(f)) = f exactly for max pooling, since copies are equal.
  Rng rng(37);
  const PointCloud c = random_cloud(rng, 64);
  const KdTree t64 = build_kdtree(c);
  FeatureMatrix f(16, 5);
  for (std::int64_t i = 0; i < f.size(); ++i) f.data()[i] = rng.normal();
  const FeatureMatrix up = upsample(t64, f, 2);
  // The upsampled features live in leaf order; pool them through the
  // identity-permutation (truncated-style) tree of the fine cloud.
  KdTree leaf_order = t64;
  for (std::int64_t i = 0; i < 64; ++i) leaf_order.perm[i] = static_cast<std::int32_t>(i);
  const auto back = pool(leaf_order, up, Points::Zero(64, 3), 2);
  CHECK((back.features - f).cwiseAbs().maxCoeff() == 0.0);

  CHECK_THROWS_AS(upsample(t64, FeatureMatrix::Zero(33, 1), 1), std::invalid_argument);
}

TEST_CASE("truncate keeps the top of the tree") {
  Rng rng(41);
  const PointCloud c = random_cloud(rng, 64);
  const KdTree tree = build_kdtree(c);
  const KdTree cut = truncate(tree, 2);
  CHECK(cut.depth == 4);
  CHECK(cut.size() == 16);
  for (std::int64_t node = 1; node < 16; ++node) {
    CHECK(cut.splits[node].axis == tree.splits[node].axis);
    CHECK(cut.splits[node].threshold == tree.splits[node].threshold);
  }
}

TEST_CASE("fps voronoi pooling degenerate targets") {
  Rng rng(43);
  const PointCloud c = random_cloud(rng, 24);
  FeatureMatrix f(24, 2);
  for (std::int64_t i = 0; i < f.size(); ++i) f.data()[i] = rng.normal();

  const auto all = fps_voronoi_pool(c, f, 24);
  std::multiset<double> in, out;
  for (std::int64_t i = 0; i < 24; ++i) {
    in.insert(f(i, 0));
    out.insert(all.features(i, 0));
  }
  CHECK(in == out);

  const auto one = fps_voronoi_pool(c, f, 1);
  CHECK(one.features(0, 0) == doctest::Approx(f.col(0).maxCoeff()));
  CHECK(one.features(0, 1) == doctest::Approx(f.col(1).maxCoeff()));

  CHECK_THROWS_AS(fps_voronoi_pool(c, f, 0), std::invalid_argument);
}

TEST_CASE("fps voronoi matches a brute-force reference on small instances") {
  Rng rng(47);
  for (int trial = 0; trial < 20; ++trial) {
    const std::int64_t n = 8 + rng.uniform_int(25);  // up to 32
    const std::int64_t m = 1 + rng.uniform_int(std::min<std::int64_t>(n, 6));
    const PointCloud c = random_cloud(rng, n);
    FeatureMatrix f(n, 1);
    for (std::int64_t i = 0; i < n; ++i) f(i, 0) = rng.normal();

    // Reference: recompute the min-distance-to-seed set from scratch at every
    // step instead of maintaining it incrementally.
    std::vector<std::int32_t> seeds;
    {
      std::int32_t first = 0;
      double best = -1.0;
      for (std::int64_t i = 0; i < n; ++i)
        if (c.pts.row(i).squaredNorm() > best) {
          best = c.pts.row(i).squaredNorm();
          first = static_cast<std::int32_t>(i);
        }
      seeds.push_back(first);
      while (static_cast<std::int64_t>(seeds.size()) < m) {
        std::int32_t far = 0;
        double far_d = -1.0;
        for (std::int64_t i = 0; i < n; ++i) {
          double dmin = std::numeric_limits<double>::infinity();
          for (std::int32_t s : seeds)
            dmin = std::min(dmin, (c.pts.row(i) - c.pts.row(s)).squaredNorm());
          if (dmin > far_d) {
            far_d = dmin;
            far = static_cast<std::int32_t>(i);
          }
        }
        seeds.push_back(far);
      }
    }
    std::vector<double> cell_max(seeds.size(), -std::numeric_limits<double>::infinity());
    for (std::int64_t i = 0; i < n; ++i) {
      std::size_t owner = 0;
      double best = std::numeric_limits<double>::infinity();
      for (std::size_t s = 0; s < seeds.size(); ++s) {
        const double d = (c.pts.row(i) - c.pts.row(seeds[s])).squaredNorm();
        if (d < best) {
          best = d;
          owner = s;
        }
      }
      cell_max[owner] = std::max(cell_max[owner], f(i, 0));
    }

    const auto got = fps_voronoi_pool(c, f, m);
    REQUIRE(got.seeds.size() == seeds.size());
    for (std::size_t s = 0; s < seeds.size(); ++s) {
      CHECK(got.seeds[s] == seeds[s]);
      CHECK(got.features(static_cast<std::int64_t>(s), 0) == cell_max[s]);
    }
  }
}

TEST_CASE("random rotations are proper and reproducible") {
  Rng rng(53);
  for (int i = 0; i < 20; ++i) {
    const Eigen::Matrix3d R = random_rotation(rng);
    CHECK((R.transpose() * R - Eigen::Matrix3d::Identity()).cwiseAbs().maxCoeff() < 1e-12);
    CHECK(R.determinant() == doctest::Approx(1.0).epsilon(1e-12));
  }
  CHECK((random_rotation(1234u) - random_rotation(1234u)).cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("rotation sampling covers SO(3) evenly") {
  Rng rng(59);
  Eigen::Matrix3d sum = Eigen::Matrix3d::Zero();
  const int n = 100'000;
  for (int i = 0; i < n; ++i) sum += random_rotation(rng);
  CHECK((sum / n).cwiseAbs().maxCoeff() < 5e-3);
}

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

#include <span>
#include <vector>

#include "sphnet/cloud/kdtree.hpp"
#include "sphnet/layers/geometry.hpp"

namespace sphnet::models {

/// Cloud resolutions a model computes convolutions at, plus the patch size
/// per level (k clamped to the level's point count).
struct GeometrySpec {
  std::vector<std::int64_t> level_sizes;
  std::vector<int> level_k;
};

/// Per-sample geometry that can be reused across rotations of the same
/// cloud: the kd leaf order and the patch tables of every level. Sharing a
/// plan between a cloud and its rotated copy bypasses the axis-aligned
/// kd split decisions, isolating the network's own invariance.
struct SamplePlan {
  std::vector<std::int32_t> perm;
  std::vector<cloud::PatchIndex> level_patches;
};

namespace detail {

/// Leaf-ordered positions of every level: level 0 is the permuted input,
/// level l+1 averages consecutive groups.
inline std::vector<cloud::Points> level_positions(const cloud::PointCloud& cloud,
                                                  const std::vector<std::int32_t>& perm,
                                                  const GeometrySpec& spec) {
  std::vector<cloud::Points> levels(spec.level_sizes.size());
  levels[0].resize(spec.level_sizes[0], 3);
  check_arg(cloud.size() == spec.level_sizes[0], "geometry: cloud size mismatch");
  for (std::int64_t s = 0; s < cloud.size(); ++s) levels[0].row(s) = cloud.pts.row(perm[s]);
  for (std::size_t l = 1; l < spec.level_sizes.size(); ++l) {
    const std::int64_t group = spec.level_sizes[l - 1] / spec.level_sizes[l];
    levels[l].resize(spec.level_sizes[l], 3);
    for (std::int64_t g = 0; g < spec.level_sizes[l]; ++g) {
      Eigen::RowVector3d mean = Eigen::RowVector3d::Zero();
      for (std::int64_t s = 0; s < group; ++s) mean += levels[l - 1].row(g * group + s);
      levels[l].row(g) = mean / static_cast<double>(group);
    }
  }
  return levels;
}

}  // namespace detail

/// Loose sanity check on a network input: roughly centered with maximum
/// point norm near 1. Subsampling a normalized cloud perturbs both slightly,
/// so the bounds are generous; raw unnormalized meshes still fail.
inline void check_network_input(const cloud::PointCloud& cloud) {
  check_arg(cloud.size() >= 1, "network input: empty cloud");
  const double max_norm = cloud.pts.rowwise().norm().maxCoeff();
  const double centroid = cloud.pts.colwise().mean().norm();
  check_arg(max_norm <= 1.0 + 1e-3 && max_norm > 0.25 && centroid < 0.5,
            "network input: cloud does not look normalized (center near 0, max norm near 1)");
}

inline SamplePlan make_sample_plan(const cloud::PointCloud& cloud, const GeometrySpec& spec) {
  SamplePlan plan;
  plan.perm = cloud::build_kdtree(cloud).perm;
  const auto positions = detail::level_positions(cloud, plan.perm, spec);
  plan.level_patches.resize(spec.level_sizes.size());
  for (std::size_t l = 0; l < positions.size(); ++l)
    plan.level_patches[l] =
        cloud::knn_patches(cloud::PointCloud{positions[l]}, spec.level_k[l]);
  return plan;
}

template <class T>
struct BatchGeometry {
  std::vector<layers::LevelGeometry<T>> levels;
};

/// Assembles the leveled geometry of a batch. When `plans` is supplied (one
/// per sample) the kd order and patch tables come from the plans; otherwise
/// a kd-tree and fresh kNN patches are built per sample.
template <class T>
BatchGeometry<T> make_batch_geometry(std::span<const cloud::PointCloud> clouds,
                                     const GeometrySpec& spec,
                                     std::span<const SamplePlan* const> plans = {},
                                     std::vector<std::vector<std::int32_t>>* perms_out = nullptr) {
  check_arg(!clouds.empty(), "geometry: empty batch");
  check_arg(plans.empty() || plans.size() == clouds.size(),
            "geometry: one plan per sample required");
  const int batch = static_cast<int>(clouds.size());
  const std::size_t n_levels = spec.level_sizes.size();

  std::vector<std::vector<cloud::Points>> positions(batch);
  std::vector<std::vector<cloud::PatchIndex>> patches(batch);
  if (perms_out) perms_out->assign(batch, {});
  std::exception_ptr error = nullptr;
#pragma omp parallel for schedule(dynamic)
  for (int b = 0; b < batch; ++b) {
    try {
      if (!plans.empty()) {
        positions[b] = detail::level_positions(clouds[b], plans[b]->perm, spec);
        patches[b] = plans[b]->level_patches;
        if (perms_out) (*perms_out)[b] = plans[b]->perm;
      } else {
        const auto perm = cloud::build_kdtree(clouds[b]).perm;
        positions[b] = detail::level_positions(clouds[b], perm, spec);
        patches[b].resize(n_levels);
        for (std::size_t l = 0; l < n_levels; ++l)
          patches[b][l] =
              cloud::knn_patches(cloud::PointCloud{positions[b][l]}, spec.level_k[l]);
        if (perms_out) (*perms_out)[b] = perm;
      }
    } catch (...) {
#pragma omp critical
      if (!error) error = std::current_exception();
    }
  }
  if (error) std::rethrow_exception(error);

  BatchGeometry<T> geom;
  geom.levels.resize(n_levels);
  for (std::size_t l = 0; l < n_levels; ++l) {
    auto& level = geom.levels[l];
    level.batch = batch;
    level.n_points = spec.level_sizes[l];
    level.k = spec.level_k[l];
    level.positions.reserve(batch);
    std::vector<cloud::PatchIndex> level_patches;
    level_patches.reserve(batch);
    for (int b = 0; b < batch; ++b) {
      level.positions.push_back(std::move(positions[b][l]));
      level_patches.push_back(std::move(patches[b][l]));
    }
    level.patches = layers::pack_patches(level_patches);
  }
  return geom;
}

}  // namespace sphnet::models

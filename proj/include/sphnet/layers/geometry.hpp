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

#include <map>
#include <memory>
#include <tuple>
#include <vector>

#include "sphnet/ad/ops.hpp"
#include "sphnet/cloud/knn.hpp"
#include "sphnet/cloud/point_cloud.hpp"
#include "sphnet/layers/extension.hpp"
#include "sphnet/sph/kernel.hpp"

namespace sphnet::layers {

/// One resolution level of a batch: per-sample positions, the packed patch
/// tables, and a cache of kernel tensors keyed by basis parameters (layers
/// at the same resolution with the same scale share one tensor).
template <class T>
struct LevelGeometry {
  int batch = 0;
  std::int64_t n_points = 0;
  int k = 0;
  std::vector<cloud::Points> positions;  // batch entries, n_points x 3
  std::shared_ptr<ad::BatchPatches> patches;

  /// Kernel constants [batch, n, k, basis.size()] with the extension weights
  /// folded in: entry (b, q, s, :) = w_i * kappa(x_i - x_q), i = patch(q, s).
  std::shared_ptr<ad::Tensor<T>> kernel(const sph::KernelBasis& basis) {
    const auto key = std::make_tuple(basis.rho, basis.n_radial, basis.n_degrees);
    auto it = kernel_cache_.find(key);
    if (it != kernel_cache_.end()) return it->second;
    auto tensor = build_kernel(basis);
    kernel_cache_.emplace(key, tensor);
    return tensor;
  }

 private:
  std::shared_ptr<ad::Tensor<T>> build_kernel(const sph::KernelBasis& basis) const {
    basis.validate();
    const std::int64_t q_size = basis.size();
    const std::vector<double>& weights = weights_for(basis);
    auto out = std::make_shared<ad::Tensor<T>>(
        ad::Tensor<T>::zeros({batch, n_points, k, q_size}));
    T* dst = out->data();
    const std::int32_t* idx = patches->idx.data();
#pragma omp parallel
    {
      std::vector<double> buf(static_cast<std::size_t>(q_size));
#pragma omp for schedule(static)
      for (std::int64_t bq = 0; bq < static_cast<std::int64_t>(batch) * n_points; ++bq) {
        const std::int64_t b = bq / n_points;
        const std::int64_t pt = bq % n_points;
        const cloud::Points& pos = positions[b];
        const Eigen::RowVector3d origin = pos.row(pt);
        for (int s = 0; s < k; ++s) {
          const std::int32_t i = idx[bq * k + s];
          const Eigen::Vector3d disp = (pos.row(i) - origin).transpose();
          sph::eval_kernel(basis, disp, buf);
          const double w = weights[static_cast<std::size_t>(b * n_points + i)];
          T* cell = dst + (bq * k + s) * q_size;
          for (std::int64_t c = 0; c < q_size; ++c)
            cell[c] = static_cast<T>(w * buf[c]);
        }
      }
    }
    return out;
  }

  const std::vector<double>& weights_for(const sph::KernelBasis& basis) const {
    const double sigma = basis.sigma();
    auto it = weight_cache_.find(sigma);
    if (it != weight_cache_.end()) return it->second;
    std::vector<double> all(static_cast<std::size_t>(batch) * n_points);
#pragma omp parallel for schedule(dynamic)
    for (int b = 0; b < batch; ++b) {
      const auto w = extension_weights(positions[b], sigma);
      std::copy(w.begin(), w.end(), all.begin() + static_cast<std::int64_t>(b) * n_points);
    }
    return weight_cache_.emplace(sigma, std::move(all)).first->second;
  }

  std::map<std::tuple<double, int, int>, std::shared_ptr<ad::Tensor<T>>> kernel_cache_;
  mutable std::map<double, std::vector<double>> weight_cache_;
};

/// Packs per-sample patch tables into the batched layout the graph op uses.
/// Every sample must share n and k.
inline std::shared_ptr<ad::BatchPatches> pack_patches(
    const std::vector<cloud::PatchIndex>& per_sample) {
  check_arg(!per_sample.empty(), "pack_patches: empty batch");
  auto out = std::make_shared<ad::BatchPatches>();
  out->batch = static_cast<int>(per_sample.size());
  out->n = per_sample[0].n;
  out->k = per_sample[0].k;
  out->idx.reserve(static_cast<std::size_t>(out->batch) * out->n * out->k);
  out->inv_offsets.push_back(0);
  for (const auto& p : per_sample) {
    check_arg(p.n == out->n && p.k == out->k, "pack_patches: inhomogeneous batch");
    out->idx.insert(out->idx.end(), p.indices.begin(), p.indices.end());
    const std::int64_t base = out->inv_entries.size();
    out->inv_entries.insert(out->inv_entries.end(), p.inv_entries.begin(), p.inv_entries.end());
    for (std::int64_t i = 1; i <= p.n; ++i) out->inv_offsets.push_back(base + p.inv_offsets[i]);
  }
  return out;
}

/// Builds a level from per-sample positions; patches are computed here
/// unless supplied (shared-plan mode reuses patch tables across rotations).
template <class T>
LevelGeometry<T> make_level(std::vector<cloud::Points> positions, int k,
                            const std::vector<cloud::PatchIndex>* shared_patches = nullptr) {
  LevelGeometry<T> level;
  level.batch = static_cast<int>(positions.size());
  level.n_points = positions[0].rows();
  level.k = k;
  level.positions = std::move(positions);
  if (shared_patches) {
    level.patches = pack_patches(*shared_patches);
  } else {
    std::vector<cloud::PatchIndex> per_sample(level.batch);
    std::exception_ptr error = nullptr;
#pragma omp parallel for schedule(dynamic)
    for (int b = 0; b < level.batch; ++b) {
      try {
        per_sample[b] = cloud::knn_patches(cloud::PointCloud{level.positions[b]}, k);
      } catch (...) {
#pragma omp critical
        if (!error) error = std::current_exception();
      }
    }
    if (error) std::rethrow_exception(error);
    level.patches = pack_patches(per_sample);
  }
  return level;
}

}  // namespace sphnet::layers

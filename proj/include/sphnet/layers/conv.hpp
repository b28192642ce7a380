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

#include <string>
#include <vector>

#include "sphnet/ad/ops.hpp"
#include "sphnet/layers/geometry.hpp"

namespace sphnet::layers {

/// Segment boundaries of the flattened (r, l, m) axis grouped per (r, l):
/// within radial shell r, degree l occupies a run of 2l+1 entries.
inline std::vector<std::int64_t> invariant_segments(const sph::KernelBasis& basis) {
  std::vector<std::int64_t> offsets{0};
  for (int r = 0; r < basis.n_radial; ++r)
    for (int l = 0; l < basis.n_degrees; ++l) offsets.push_back(offsets.back() + 2 * l + 1);
  return offsets;
}

/// Point convolution with the spherical-harmonics kernel basis. With
/// `invariant` set, an L2 norm over each degree's m-run makes the features
/// rotation-invariant before the learnable mixing (the default network);
/// without it the weights contract the raw (r, l, m) axis directly (the
/// non-invariant ablation).
template <class T>
struct SphConv {
  sph::KernelBasis basis;
  int in_channels = 0;
  int out_channels = 0;
  bool invariant = true;
  ad::NodeP<T> weight;  // [in_channels * feature_size, out_channels]
  ad::NodeP<T> bias;    // [out_channels]

  /// Basis features per input channel after the optional norm reduction.
  int feature_size() const {
    return invariant ? basis.n_radial * basis.n_degrees : basis.size();
  }

  static SphConv create(const std::string& name, const sph::KernelBasis& basis, int in_channels,
                        int out_channels, bool invariant, Rng& rng) {
    SphConv conv;
    conv.basis = basis;
    conv.in_channels = in_channels;
    conv.out_channels = out_channels;
    conv.invariant = invariant;
    const std::int64_t fan_in =
        static_cast<std::int64_t>(in_channels) * conv.feature_size();
    ad::Tensor<T> w = ad::Tensor<T>::zeros({fan_in, out_channels});
    const double stddev = std::sqrt(2.0 / static_cast<double>(fan_in));
    for (auto& x : w.v) x = static_cast<T>(stddev * rng.normal());
    conv.weight = ad::make_param(std::move(w), name + ".weight");
    conv.bias = ad::make_param(ad::Tensor<T>::zeros({out_channels}), name + ".bias");
    return conv;
  }

  /// f: [batch, n, in_channels] -> [batch, n, out_channels]. `raw_out`, when
  /// non-null, receives the pre-reduction features (used by the
  /// equivariance audits).
  ad::NodeP<T> forward(LevelGeometry<T>& geom, ad::NodeP<T> f,
                       ad::NodeP<T>* raw_out = nullptr) const {
    check_arg(f->value.rank() == 3 && f->value.dim(2) == in_channels,
              "SphConv: feature shape mismatch");
    const std::int64_t b = f->value.dim(0), n = f->value.dim(1);
    auto raw = ad::patch_conv(f, geom.kernel(basis), geom.patches);
    if (raw_out) *raw_out = raw;
    ad::NodeP<T> feats = invariant ? ad::segment_l2_norm_last(raw, invariant_segments(basis)) : raw;
    auto flat = ad::reshape(feats, {b * n, static_cast<std::int64_t>(in_channels) * feature_size()});
    auto mixed = ad::matmul(flat, weight);
    mixed = ad::add(mixed, ad::broadcast_to(bias, {b * n, static_cast<std::int64_t>(out_channels)}));
    return ad::reshape(mixed, {b, n, out_channels});
  }

  std::int64_t param_count() const { return weight->value.numel() + bias->value.numel(); }

  void collect(std::vector<ad::NodeP<T>>& params) const {
    params.push_back(weight);
    params.push_back(bias);
  }
};

template <class T>
struct BatchNormLayer {
  ad::NodeP<T> gamma;
  ad::NodeP<T> beta;
  ad::BnStats<T> stats;
  T momentum = T(0.9);
  bool track_running = true;  // disabled inside gradient checks

  static BatchNormLayer create(const std::string& name, std::int64_t channels) {
    BatchNormLayer bn;
    bn.gamma = ad::make_param(ad::Tensor<T>::full({channels}, T(1)), name + ".gamma");
    bn.beta = ad::make_param(ad::Tensor<T>::zeros({channels}), name + ".beta");
    bn.stats = ad::BnStats<T>::init(channels);
    return bn;
  }

  ad::NodeP<T> forward(ad::NodeP<T> x, bool training) {
    return ad::batchnorm(x, gamma, beta, training && !track_running ? nullptr : &stats, training,
                         momentum);
  }

  std::int64_t param_count() const { return gamma->value.numel() + beta->value.numel(); }

  void collect(std::vector<ad::NodeP<T>>& params) const {
    params.push_back(gamma);
    params.push_back(beta);
  }
};

/// conv -> batchnorm -> ReLU.
template <class T>
struct ConvBlock {
  SphConv<T> conv;
  BatchNormLayer<T> bn;

  static ConvBlock create(const std::string& name, const sph::KernelBasis& basis, int in_channels,
                          int out_channels, bool invariant, Rng& rng) {
    ConvBlock block;
    block.conv = SphConv<T>::create(name + ".conv", basis, in_channels, out_channels, invariant, rng);
    block.bn = BatchNormLayer<T>::create(name + ".bn", out_channels);
    return block;
  }

  ad::NodeP<T> forward(LevelGeometry<T>& geom, ad::NodeP<T> f, bool training) {
    return ad::relu(bn.forward(conv.forward(geom, f), training));
  }

  std::int64_t param_count() const { return conv.param_count() + bn.param_count(); }

  void collect(std::vector<ad::NodeP<T>>& params) const {
    conv.collect(params);
    bn.collect(params);
  }
};

template <class T>
struct DenseLayer {
  ad::NodeP<T> weight;  // [in, out]
  ad::NodeP<T> bias;    // [out]

  static DenseLayer create(const std::string& name, std::int64_t in, std::int64_t out, Rng& rng) {
    DenseLayer layer;
    ad::Tensor<T> w = ad::Tensor<T>::zeros({in, out});
    const double stddev = std::sqrt(2.0 / static_cast<double>(in));
    for (auto& x : w.v) x = static_cast<T>(stddev * rng.normal());
    layer.weight = ad::make_param(std::move(w), name + ".weight");
    layer.bias = ad::make_param(ad::Tensor<T>::zeros({out}), name + ".bias");
    return layer;
  }

  ad::NodeP<T> forward(ad::NodeP<T> x) const {
    auto out = ad::matmul(x, weight);
    return ad::add(out, ad::broadcast_to(bias, out->value.shape));
  }

  std::int64_t param_count() const { return weight->value.numel() + bias->value.numel(); }

  void collect(std::vector<ad::NodeP<T>>& params) const {
    params.push_back(weight);
    params.push_back(bias);
  }
};

/// Max pooling over consecutive groups of `factor` points (inputs are in
/// kd leaf order, so groups are subtrees): [B, N, C] -> [B, N/factor, C].
template <class T>
ad::NodeP<T> pool_max(ad::NodeP<T> x, std::int64_t factor) {
  const std::int64_t b = x->value.dim(0), n = x->value.dim(1), c = x->value.dim(2);
  check_arg(n % factor == 0, "pool_max: point count not divisible by pool factor");
  auto grouped = ad::reshape(x, {b, n / factor, factor, c});
  return ad::reduce_max(grouped, 2);
}

/// Repeats each point's features `factor` times: [B, M, C] -> [B, M*factor, C].
template <class T>
ad::NodeP<T> upsample_repeat(ad::NodeP<T> x, std::int64_t factor) {
  const std::int64_t b = x->value.dim(0), m = x->value.dim(1), c = x->value.dim(2);
  auto grouped = ad::reshape(x, {b, m, 1, c});
  auto wide = ad::broadcast_to(grouped, {b, m, factor, c});
  return ad::reshape(wide, {b, m * factor, c});
}

}  // namespace sphnet::layers

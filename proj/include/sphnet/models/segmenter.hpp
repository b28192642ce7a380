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

#include "sphnet/ad/checkpoint.hpp"
#include "sphnet/layers/conv.hpp"
#include "sphnet/models/classifier.hpp"  // ActivationLog
#include "sphnet/models/config.hpp"
#include "sphnet/models/geometry.hpp"

namespace sphnet::models {

/// U-shaped per-point labeling network. Three encoder conv blocks with
/// pooling after each; the decoder mirrors them, upsampling and
/// concatenating the encoder skip at the matching resolution before each
/// block; a final conv head emits per-point logits at full resolution.
template <class T>
class Segmenter {
 public:
  Segmenter(const SegmenterConfig& config, Variant variant, std::uint64_t seed)
      : config_(config), variant_(variant) {
    config_.validate();
    Rng rng(mix_seed(seed, 0x7365676d));
    const bool invariant = variant_ == Variant::kSphNet;
    const auto dec_channels = config_.decoder_channels();

    int in = 1;
    for (int i = 0; i < 3; ++i) {
      encoder_.push_back(layers::ConvBlock<T>::create(
          "enc" + std::to_string(i), level_basis(i), in, config_.encoder_channels[i], invariant,
          rng));
      in = config_.encoder_channels[i];
    }
    // Decoder blocks run at levels 2, 1, 0 with the encoder scales reversed.
    const std::vector<int> skip_channels = {config_.encoder_channels[2],
                                            config_.encoder_channels[1],
                                            config_.encoder_channels[0]};
    for (int i = 0; i < 3; ++i) {
      const int level = 2 - i;
      decoder_.push_back(layers::ConvBlock<T>::create("dec" + std::to_string(i),
                                                      level_basis(level), in + skip_channels[i],
                                                      dec_channels[i], invariant, rng));
      in = dec_channels[i];
    }
    head_ = layers::SphConv<T>::create("head", level_basis(0), in, config_.labels, invariant, rng);
  }

  const SegmenterConfig& config() const { return config_; }
  Variant variant() const { return variant_; }

  GeometrySpec geometry_spec() const {
    // Convolutions run at the three encoder resolutions; the bottleneck
    // after the last pool carries features only.
    GeometrySpec spec;
    std::int64_t n = config_.n_points;
    for (int i = 0; i < 3; ++i) {
      spec.level_sizes.push_back(n);
      n /= config_.pool_factors[i];
    }
    for (std::int64_t size : spec.level_sizes)
      spec.level_k.push_back(static_cast<int>(std::min<std::int64_t>(config_.k, size)));
    return spec;
  }

  /// Per-point logits [batch, n_points, labels].
  ad::NodeP<T> forward(BatchGeometry<T>& geom, bool training, Rng* dropout_rng = nullptr,
                       ActivationLog<T>* audit = nullptr, ActivationLog<T>* raw_audit = nullptr) {
    check_arg(geom.levels.size() == 3, "segmenter: geometry must carry three levels");
    check_arg(!training || dropout_rng, "segmenter: training mode needs a dropout generator");
    const std::int64_t batch = geom.levels[0].batch;

    auto x = ad::make_const(
        ad::Tensor<T>::full({batch, geom.levels[0].n_points, 1}, T(1)));
    std::vector<ad::NodeP<T>> skips;
    for (int i = 0; i < 3; ++i) {
      ad::NodeP<T> raw;
      auto conv = encoder_[i].conv.forward(geom.levels[i], x, raw_audit ? &raw : nullptr);
      if (raw_audit) raw_audit->emplace_back("enc" + std::to_string(i) + ".raw", raw);
      x = ad::relu(encoder_[i].bn.forward(conv, training));
      if (audit) audit->emplace_back("enc" + std::to_string(i), x);
      skips.push_back(x);
      x = layers::pool_max(x, config_.pool_factors[i]);
    }

    if (audit) audit->emplace_back("bottleneck", x);
    for (int i = 0; i < 3; ++i) {
      const int level = 2 - i;
      x = layers::upsample_repeat(x, config_.pool_factors[level]);
      x = ad::concat<T>({x, skips[level]}, 2);
      if (audit) audit->emplace_back("dec" + std::to_string(i) + ".input", x);
      x = ad::relu(decoder_[i].bn.forward(decoder_[i].conv.forward(geom.levels[level], x), training));
      if (audit) audit->emplace_back("dec" + std::to_string(i), x);
      if (training && i >= 1) x = apply_dropout(x, *dropout_rng);
    }
    return head_.forward(geom.levels[0], x);
  }

  std::vector<ad::NodeP<T>> params() const {
    std::vector<ad::NodeP<T>> out;
    for (const auto& b : encoder_) b.collect(out);
    for (const auto& b : decoder_) b.collect(out);
    head_.collect(out);
    return out;
  }

  std::int64_t param_count() const {
    std::int64_t total = 0;
    for (const auto& p : params()) total += p->value.numel();
    return total;
  }

  void set_track_running(bool track) {
    for (auto& b : encoder_) b.bn.track_running = track;
    for (auto& b : decoder_) b.bn.track_running = track;
  }

  void save(ad::Checkpoint& ckpt) const {
    for (const auto& p : params()) ckpt.put(p->name, p->value);
    for (const auto& b : encoder_) save_stats(ckpt, b.bn);
    for (const auto& b : decoder_) save_stats(ckpt, b.bn);
  }

  void load(const ad::Checkpoint& ckpt) {
    for (const auto& p : params()) {
      const auto t = ckpt.get<T>(p->name);
      check_arg(t.shape == p->value.shape, "segmenter: checkpoint shape mismatch for " + p->name);
      p->value = t;
    }
    for (auto& b : encoder_) load_stats(ckpt, b.bn);
    for (auto& b : decoder_) load_stats(ckpt, b.bn);
  }

 private:
  sph::KernelBasis level_basis(int level) const {
    return {config_.rho * static_cast<double>(std::int64_t{1} << level), config_.n_radial,
            config_.n_degrees};
  }

  ad::NodeP<T> apply_dropout(ad::NodeP<T> x, Rng& rng) {
    if (config_.dropout <= 0.0) return x;
    const T keep = static_cast<T>(1.0 - config_.dropout);
    auto mask = std::make_shared<ad::Tensor<T>>(ad::Tensor<T>::zeros(x->value.shape));
    for (auto& m : mask->v) m = rng.uniform() < config_.dropout ? T(0) : T(1);
    return ad::dropout(x, mask, keep);
  }

  static void save_stats(ad::Checkpoint& ckpt, const layers::BatchNormLayer<T>& bn) {
    ckpt.put(bn.gamma->name + ".running_mean", bn.stats.mean);
    ckpt.put(bn.gamma->name + ".running_var", bn.stats.var);
  }
  static void load_stats(const ad::Checkpoint& ckpt, layers::BatchNormLayer<T>& bn) {
    bn.stats.mean = ckpt.get<T>(bn.gamma->name + ".running_mean");
    bn.stats.var = ckpt.get<T>(bn.gamma->name + ".running_var");
  }

  SegmenterConfig config_;
  Variant variant_;
  std::vector<layers::ConvBlock<T>> encoder_;
  std::vector<layers::ConvBlock<T>> decoder_;
  layers::SphConv<T> head_;
};

}  // namespace sphnet::models

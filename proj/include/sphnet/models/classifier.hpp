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
#include "sphnet/models/config.hpp"
#include "sphnet/models/geometry.hpp"

namespace sphnet::models {

/// Optional per-layer activation capture for the invariance audits.
template <class T>
using ActivationLog = std::vector<std::pair<std::string, ad::NodeP<T>>>;

/// Classification network: conv blocks with max pooling between them over
/// the kd leaf order, a global max pool, fully connected blocks with
/// dropout, and a class-logit head. The input feature is the constant 1.
template <class T>
class Classifier {
 public:
  Classifier(const ClassifierConfig& config, Variant variant, std::uint64_t seed)
      : config_(config), variant_(variant) {
    config_.validate();
    Rng rng(mix_seed(seed, 0x636c7366));
    const bool invariant = variant_ == Variant::kSphNet;
    int in = 1;
    for (std::size_t i = 0; i < config_.channels.size(); ++i) {
      const sph::KernelBasis basis{config_.rho * static_cast<double>(std::int64_t{1} << i),
                                   config_.n_radial, config_.n_degrees};
      blocks_.push_back(layers::ConvBlock<T>::create("block" + std::to_string(i), basis, in,
                                                     config_.channels[i], invariant, rng));
      in = config_.channels[i];
    }
    for (std::size_t i = 0; i < config_.fc.size(); ++i) {
      fc_.push_back(layers::DenseLayer<T>::create("fc" + std::to_string(i), in, config_.fc[i], rng));
      fc_bn_.push_back(
          layers::BatchNormLayer<T>::create("fc" + std::to_string(i) + ".bn", config_.fc[i]));
      in = config_.fc[i];
    }
    head_ = layers::DenseLayer<T>::create("head", in, config_.classes, rng);
  }

  const ClassifierConfig& config() const { return config_; }
  Variant variant() const { return variant_; }

  GeometrySpec geometry_spec() const {
    GeometrySpec spec;
    std::int64_t n = config_.n_points;
    spec.level_sizes.push_back(n);
    for (int f : config_.pool_factors) {
      n /= f;
      spec.level_sizes.push_back(n);
    }
    for (std::int64_t size : spec.level_sizes)
      spec.level_k.push_back(static_cast<int>(std::min<std::int64_t>(config_.k, size)));
    return spec;
  }

  /// Logits [batch, classes]. `dropout_rng` is required in training mode.
  ad::NodeP<T> forward(BatchGeometry<T>& geom, bool training, Rng* dropout_rng = nullptr,
                       ActivationLog<T>* audit = nullptr, ActivationLog<T>* raw_audit = nullptr) {
    check_arg(geom.levels.size() == blocks_.size(), "classifier: geometry level count mismatch");
    check_arg(!training || dropout_rng, "classifier: training mode needs a dropout generator");
    const std::int64_t batch = geom.levels[0].batch;

    auto x = ad::make_const(
        ad::Tensor<T>::full({batch, geom.levels[0].n_points, 1}, T(1)));
    for (std::size_t i = 0; i < blocks_.size(); ++i) {
      ad::NodeP<T> raw;
      auto conv = blocks_[i].conv.forward(geom.levels[i], x, raw_audit ? &raw : nullptr);
      if (raw_audit) raw_audit->emplace_back("block" + std::to_string(i) + ".raw", raw);
      x = ad::relu(blocks_[i].bn.forward(conv, training));
      if (audit) audit->emplace_back("block" + std::to_string(i), x);
      if (i < config_.pool_factors.size()) x = layers::pool_max(x, config_.pool_factors[i]);
    }
    x = ad::reduce_max(x, 1);  // global pool -> [batch, channels]
    if (audit) audit->emplace_back("global_pool", x);

    for (std::size_t i = 0; i < fc_.size(); ++i) {
      x = ad::relu(fc_bn_[i].forward(fc_[i].forward(x), training));
      if (training) x = apply_dropout(x, *dropout_rng);
      if (audit) audit->emplace_back("fc" + std::to_string(i), x);
    }
    return head_.forward(x);
  }

  std::vector<ad::NodeP<T>> params() const {
    std::vector<ad::NodeP<T>> out;
    for (const auto& b : blocks_) b.collect(out);
    for (std::size_t i = 0; i < fc_.size(); ++i) {
      fc_[i].collect(out);
      fc_bn_[i].collect(out);
    }
    head_.collect(out);
    return out;
  }

  std::int64_t param_count() const {
    std::int64_t total = 0;
    for (const auto& p : params()) total += p->value.numel();
    return total;
  }

  /// Gradient checks rebuild graphs repeatedly; freezing the running
  /// statistics keeps those rebuilds side-effect free.
  void set_track_running(bool track) {
    for (auto& b : blocks_) b.bn.track_running = track;
    for (auto& bn : fc_bn_) bn.track_running = track;
  }

  void save(ad::Checkpoint& ckpt) const {
    for (const auto& p : params()) ckpt.put(p->name, p->value);
    for (const auto& b : blocks_) save_stats(ckpt, b.bn);
    for (const auto& bn : fc_bn_) save_stats(ckpt, bn);
  }

  void load(const ad::Checkpoint& ckpt) {
    for (const auto& p : params()) {
      const auto t = ckpt.get<T>(p->name);
      check_arg(t.shape == p->value.shape, "classifier: checkpoint shape mismatch for " + p->name);
      p->value = t;
    }
    for (auto& b : blocks_) load_stats(ckpt, b.bn);
    for (auto& bn : fc_bn_) load_stats(ckpt, bn);
  }

 private:
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

  ClassifierConfig config_;
  Variant variant_;
  std::vector<layers::ConvBlock<T>> blocks_;
  std::vector<layers::DenseLayer<T>> fc_;
  std::vector<layers::BatchNormLayer<T>> fc_bn_;
  layers::DenseLayer<T> head_;
};

}  // namespace sphnet::models

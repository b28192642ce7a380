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

#include <cmath>
#include <vector>

#include "sphnet/ad/graph.hpp"

namespace sphnet::ad {

struct AdamConfig {
  double lr = 1e-3;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double eps = 1e-8;
};

template <class T>
struct AdamState {
  std::int64_t t = 0;
  std::vector<Tensor<T>> m;
  std::vector<Tensor<T>> v;

  static AdamState init(const std::vector<NodeP<T>>& params) {
    AdamState s;
    for (const auto& p : params) {
      s.m.push_back(Tensor<T>::zeros(p->value.shape));
      s.v.push_back(Tensor<T>::zeros(p->value.shape));
    }
    return s;
  }
};

/// One bias-corrected Adam update from the gradients currently stored on the
/// parameter nodes. Parameters without an accumulated gradient are treated
/// as having zero gradient.
template <class T>
void adam_step(const std::vector<NodeP<T>>& params, AdamState<T>& state, const AdamConfig& cfg) {
  check_arg(params.size() == state.m.size() && params.size() == state.v.size(),
            "adam_step: state does not match parameter list");
  ++state.t;
  const double bc1 = 1.0 - std::pow(cfg.beta1, static_cast<double>(state.t));
  const double bc2 = 1.0 - std::pow(cfg.beta2, static_cast<double>(state.t));
  const T b1 = static_cast<T>(cfg.beta1), b2 = static_cast<T>(cfg.beta2);
  for (std::size_t p = 0; p < params.size(); ++p) {
    auto& node = *params[p];
    const bool has_grad = !node.grad.v.empty();
    T* m = state.m[p].data();
    T* v = state.v[p].data();
    T* w = node.value.data();
    const std::int64_t n = node.value.numel();
    for (std::int64_t i = 0; i < n; ++i) {
      const T g = has_grad ? node.grad.v[i] : T(0);
      m[i] = b1 * m[i] + (T(1) - b1) * g;
      v[i] = b2 * v[i] + (T(1) - b2) * g * g;
      const double mhat = static_cast<double>(m[i]) / bc1;
      const double vhat = static_cast<double>(v[i]) / bc2;
      w[i] -= static_cast<T>(cfg.lr * mhat / (std::sqrt(vhat) + cfg.eps));
    }
  }
}

}  // namespace sphnet::ad

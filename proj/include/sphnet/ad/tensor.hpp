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

#include <cstdint>
#include <initializer_list>
#include <numeric>
#include <vector>

#include "sphnet/common.hpp"

namespace sphnet::ad {

using Shape = std::vector<std::int64_t>;

inline std::int64_t shape_numel(const Shape& s) {
  std::int64_t n = 1;
  for (std::int64_t d : s) n *= d;
  return n;
}

inline std::string shape_str(const Shape& s) {
  std::string out = "[";
  for (std::size_t i = 0; i < s.size(); ++i) out += (i ? "," : "") + std::to_string(s[i]);
  return out + "]";
}

/// Dense row-major tensor. T is float or double; the choice selects the
/// network's working precision.
template <class T>
struct Tensor {
  Shape shape;
  std::vector<T> v;

  Tensor() = default;
  Tensor(Shape s, std::vector<T> data) : shape(std::move(s)), v(std::move(data)) {
    check_arg(shape_numel(shape) == static_cast<std::int64_t>(v.size()),
              "Tensor: data size does not match shape " + shape_str(shape));
  }

  static Tensor zeros(Shape s) {
    const auto n = shape_numel(s);
    return Tensor(std::move(s), std::vector<T>(static_cast<std::size_t>(n), T(0)));
  }
  static Tensor full(Shape s, T value) {
    const auto n = shape_numel(s);
    return Tensor(std::move(s), std::vector<T>(static_cast<std::size_t>(n), value));
  }
  static Tensor scalar(T value) { return Tensor({}, {value}); }

  std::int64_t numel() const { return static_cast<std::int64_t>(v.size()); }
  std::int64_t dim(int i) const { return shape[static_cast<std::size_t>(i)]; }
  int rank() const { return static_cast<int>(shape.size()); }
  T* data() { return v.data(); }
  const T* data() const { return v.data(); }

  /// Casts entries to another precision.
  template <class U>
  Tensor<U> cast() const {
    std::vector<U> out(v.size());
    for (std::size_t i = 0; i < v.size(); ++i) out[i] = static_cast<U>(v[i]);
    return Tensor<U>(shape, std::move(out));
  }
};

}  // namespace sphnet::ad

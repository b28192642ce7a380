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
#include <string>
#include <variant>

#include "sphnet/ad/tensor.hpp"

namespace sphnet::ad {

/// Versioned binary container of named tensors plus one free-form metadata
/// string. Little-endian layout:
///   u32 magic "SPHC" (0x43485053), u32 version = 1,
///   u64 metadata length, metadata bytes,
///   u64 entry count, then per entry:
///     u32 name length, name bytes,
///     u8 dtype (0 = float32, 1 = float64), u8 rank,
///     u64 dims[rank], raw values.
struct Checkpoint {
  using AnyTensor = std::variant<Tensor<float>, Tensor<double>>;

  std::string metadata;
  std::map<std::string, AnyTensor> entries;  // ordered for reproducible files

  template <class T>
  void put(const std::string& name, const Tensor<T>& t) {
    entries.insert_or_assign(name, t);
  }

  bool contains(const std::string& name) const { return entries.count(name) != 0; }

  /// Fetches an entry, converting precision if needed. Throws
  /// std::out_of_range if the name is missing.
  template <class T>
  Tensor<T> get(const std::string& name) const {
    const AnyTensor& any = entries.at(name);
    if (std::holds_alternative<Tensor<T>>(any)) return std::get<Tensor<T>>(any);
    if (std::holds_alternative<Tensor<float>>(any))
      return std::get<Tensor<float>>(any).template cast<T>();
    return std::get<Tensor<double>>(any).template cast<T>();
  }
};

/// Serialization; both throw std::runtime_error on I/O or format errors.
void save_checkpoint(const Checkpoint& ckpt, const std::string& path);
Checkpoint load_checkpoint(const std::string& path);

}  // namespace sphnet::ad

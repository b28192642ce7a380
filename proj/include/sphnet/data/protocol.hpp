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

#include "sphnet/cloud/point_cloud.hpp"
#include "sphnet/cloud/rotation.hpp"

namespace sphnet::data {

/// O = original canonical pose, A = augmented by Haar-uniform rotations.
enum class Aug { kOriginal, kAugmented };

/// Train/test augmentation pair; the four cells O/O, A/O, O/A, A/A
/// characterize rotational robustness.
struct Protocol {
  Aug train = Aug::kOriginal;
  Aug test = Aug::kOriginal;

  static Protocol parse(const std::string& text);  // "O/O", "A/O", "O/A", "A/A"
  std::string str() const;
};

/// Training-time rotation: fresh per (epoch, sample) under A, identity
/// under O. Applied before any subsampling.
Eigen::Matrix3d train_rotation(Aug aug, std::uint64_t seed, int epoch, int sample);

/// Test-time rotation: one fixed rotation per sample under A, identity
/// under O. Reproducible across runs with the same seed.
Eigen::Matrix3d test_rotation(Aug aug, std::uint64_t seed, int sample);

}  // namespace sphnet::data

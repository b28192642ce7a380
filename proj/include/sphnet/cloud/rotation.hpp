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

#include <Eigen/Core>
#include <cstdint>

#include "sphnet/common.hpp"

namespace sphnet::cloud {

/// Haar-uniform rotation from a unit quaternion with four standard-normal
/// components. Deterministic for a given generator state.
Eigen::Matrix3d random_rotation(Rng& rng);

/// Convenience overload seeding a fresh generator.
Eigen::Matrix3d random_rotation(std::uint64_t seed);

}  // namespace sphnet::cloud

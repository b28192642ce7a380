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
#include <string>
#include <vector>

#include "sphnet/cloud/point_cloud.hpp"
#include "sphnet/util/kv.hpp"

namespace sphnet::data {

struct Sample {
  cloud::PointCloud cloud;
  std::int32_t label = -1;                  // classification label, -1 if per-point
  std::vector<std::uint16_t> point_labels;  // empty for classification samples
};

struct Dataset {
  std::vector<Sample> samples;
  std::vector<std::string> class_names;
  util::KvDoc metadata;  // kind, seed, generation parameters
};

/// Five procedurally sampled shape classes (sphere, box, torus, cylinder,
/// cone) with randomized aspect parameters, Gaussian jitter, normalization,
/// in canonical axis-aligned pose. `per_class` samples per class, labels in
/// class order. Deterministic per (seed, parameters).
Dataset make_shapes_dataset(int per_class, int n_points, double jitter, std::uint64_t seed);

/// Two spheres of randomized radii joined by a cylindrical neck, with
/// intrinsic per-point labels {lobeA, lobeB, neck} assigned by generating
/// primitive. Canonical pose along the z axis.
Dataset make_dumbbell_segmentation_dataset(int count, int n_points, std::uint64_t seed);

}  // namespace sphnet::data

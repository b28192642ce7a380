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

#include "sphnet/cloud/point_cloud.hpp"
#include "sphnet/common.hpp"
#include "sphnet/data/off.hpp"

namespace sphnet::data {

/// n i.i.d. surface points: triangle chosen with probability proportional
/// to area, position uniform within the triangle (square-root barycentric
/// sampling). Deterministic per seed. Throws std::domain_error if the mesh
/// has no positive-area face.
cloud::PointCloud sample_surface(const Mesh& mesh, std::int64_t n, std::uint64_t seed);

/// Triangle areas, in face order.
std::vector<double> face_areas(const Mesh& mesh);

}  // namespace sphnet::data

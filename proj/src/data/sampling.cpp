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

#include "sphnet/data/sampling.hpp"

#include <Eigen/Geometry>
#include <algorithm>
#include <cmath>

namespace sphnet::data {

std::vector<double> face_areas(const Mesh& mesh) {
  std::vector<double> areas;
  areas.reserve(mesh.faces.size());
  for (const auto& f : mesh.faces) {
    const Eigen::Vector3d a = mesh.vertices[f[0]];
    const Eigen::Vector3d ab = mesh.vertices[f[1]] - a;
    const Eigen::Vector3d ac = mesh.vertices[f[2]] - a;
    areas.push_back(0.5 * ab.cross(ac).norm());
  }
  return areas;
}

cloud::PointCloud sample_surface(const Mesh& mesh, std::int64_t n, std::uint64_t seed) {
  check_arg(n >= 1, "sample_surface: need at least one sample");
  const auto areas = face_areas(mesh);
  std::vector<double> cumulative(areas.size());
  double total = 0.0;
  for (std::size_t i = 0; i < areas.size(); ++i) {
    total += areas[i];
    cumulative[i] = total;
  }
  check_domain(total > 0.0, "sample_surface: mesh has zero surface area");

  Rng rng(seed);
  cloud::Points pts(n, 3);
  for (std::int64_t s = 0; s < n; ++s) {
    const double u = rng.uniform() * total;
    const std::size_t face = static_cast<std::size_t>(
        std::lower_bound(cumulative.begin(), cumulative.end(), u) - cumulative.begin());
    const auto& f = mesh.faces[std::min(face, mesh.faces.size() - 1)];
    const double r1 = std::sqrt(rng.uniform());
    const double r2 = rng.uniform();
    const double wa = 1.0 - r1, wb = r1 * (1.0 - r2), wc = r1 * r2;
    pts.row(s) = (wa * mesh.vertices[f[0]] + wb * mesh.vertices[f[1]] + wc * mesh.vertices[f[2]])
                     .transpose();
  }
  return cloud::PointCloud{std::move(pts)};
}

}  // namespace sphnet::data

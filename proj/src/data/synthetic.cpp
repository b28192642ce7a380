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

#include "sphnet/data/synthetic.hpp"

#include <cmath>

#include "sphnet/common.hpp"

namespace sphnet::data {

namespace {

Eigen::Vector3d unit_sphere_point(Rng& rng) {
  Eigen::Vector3d v;
  do {
    v = Eigen::Vector3d(rng.normal(), rng.normal(), rng.normal());
  } while (v.norm() < 1e-9);
  return v.normalized();
}

Eigen::Vector3d sphere_point(Rng& rng) { return unit_sphere_point(rng); }

Eigen::Vector3d box_point(Rng& rng, double a, double b, double c) {
  // Face chosen proportional to area; half-extents (a, b, c).
  const double areas[3] = {b * c, a * c, a * b};  // x-, y-, z-normal face pairs
  const double total = 2.0 * (areas[0] + areas[1] + areas[2]);
  double u = rng.uniform() * total;
  int axis = 0;
  double side = 1.0;
  for (int i = 0; i < 3; ++i) {
    if (u < 2.0 * areas[i]) {
      axis = i;
      side = u < areas[i] ? 1.0 : -1.0;
      break;
    }
    u -= 2.0 * areas[i];
  }
  const double ext[3] = {a, b, c};
  Eigen::Vector3d p;
  for (int i = 0; i < 3; ++i) p[i] = ext[i] * (2.0 * rng.uniform() - 1.0);
  p[axis] = side * ext[axis];
  return p;
}

Eigen::Vector3d torus_point(Rng& rng, double ring_radius, double tube_radius) {
  const double theta = 2.0 * M_PI * rng.uniform();
  double phi = 0.0;
  // Surface density around the tube is proportional to R + r cos(phi).
  do {
    phi = 2.0 * M_PI * rng.uniform();
  } while (rng.uniform() * (ring_radius + tube_radius) >
           ring_radius + tube_radius * std::cos(phi));
  const double rad = ring_radius + tube_radius * std::cos(phi);
  return {rad * std::cos(theta), rad * std::sin(theta), tube_radius * std::sin(phi)};
}

Eigen::Vector3d cylinder_point(Rng& rng, double radius, double half_height) {
  const double lateral = 2.0 * M_PI * radius * 2.0 * half_height;
  const double cap = M_PI * radius * radius;
  const double u = rng.uniform() * (lateral + 2.0 * cap);
  const double angle = 2.0 * M_PI * rng.uniform();
  if (u < lateral) {
    const double z = half_height * (2.0 * rng.uniform() - 1.0);
    return {radius * std::cos(angle), radius * std::sin(angle), z};
  }
  const double r = radius * std::sqrt(rng.uniform());
  const double z = u < lateral + cap ? half_height : -half_height;
  return {r * std::cos(angle), r * std::sin(angle), z};
}

Eigen::Vector3d cone_point(Rng& rng, double base_radius, double height) {
  // Apex at (0, 0, height), base disk in the z = 0 plane.
  const double slant = std::sqrt(base_radius * base_radius + height * height);
  const double lateral = M_PI * base_radius * slant;
  const double cap = M_PI * base_radius * base_radius;
  const double angle = 2.0 * M_PI * rng.uniform();
  if (rng.uniform() * (lateral + cap) < lateral) {
    const double t = std::sqrt(rng.uniform());  // area density grows with distance from apex
    const double r = t * base_radius;
    return {r * std::cos(angle), r * std::sin(angle), height * (1.0 - t)};
  }
  const double r = base_radius * std::sqrt(rng.uniform());
  return {r * std::cos(angle), r * std::sin(angle), 0.0};
}

cloud::PointCloud finalize(cloud::Points pts, Rng& rng, double jitter) {
  if (jitter > 0.0)
    for (std::int64_t i = 0; i < pts.rows(); ++i)
      for (int d = 0; d < 3; ++d) pts(i, d) += jitter * rng.normal();
  return cloud::normalize(cloud::PointCloud{std::move(pts)});
}

}  // namespace

Dataset make_shapes_dataset(int per_class, int n_points, double jitter, std::uint64_t seed) {
  check_arg(per_class >= 1, "make_shapes_dataset: per_class must be at least 1");
  check_arg(n_points >= 8, "make_shapes_dataset: need at least 8 points");

  Dataset dataset;
  dataset.class_names = {"sphere", "box", "torus", "cylinder", "cone"};
  dataset.metadata.set("kind", "shapes");
  dataset.metadata.set_int("seed", static_cast<std::int64_t>(seed));
  dataset.metadata.set_int("per_class", per_class);
  dataset.metadata.set_int("n_points", n_points);
  dataset.metadata.set_double("jitter", jitter);

  for (int cls = 0; cls < 5; ++cls) {
    for (int idx = 0; idx < per_class; ++idx) {
      Rng rng(mix_seed(seed, static_cast<std::uint64_t>(cls), static_cast<std::uint64_t>(idx)));
      cloud::Points pts(n_points, 3);
      switch (cls) {
        case 0: {  // sphere stays round so its radius is constant pre-jitter
          for (std::int64_t i = 0; i < n_points; ++i) pts.row(i) = sphere_point(rng).transpose();
          break;
        }
        case 1: {
          const double a = 1.0, b = rng.uniform(0.3, 1.0), c = rng.uniform(0.3, 1.0);
          for (std::int64_t i = 0; i < n_points; ++i)
            pts.row(i) = box_point(rng, a, b, c).transpose();
          break;
        }
        case 2: {
          const double ratio = rng.uniform(0.2, 0.5);
          for (std::int64_t i = 0; i < n_points; ++i)
            pts.row(i) = torus_point(rng, 1.0, ratio).transpose();
          break;
        }
        case 3: {
          const double radius = rng.uniform(0.25, 0.6);
          const double half_height = rng.uniform(0.6, 1.2);
          for (std::int64_t i = 0; i < n_points; ++i)
            pts.row(i) = cylinder_point(rng, radius, half_height).transpose();
          break;
        }
        default: {
          const double radius = rng.uniform(0.4, 0.9);
          const double height = rng.uniform(1.0, 2.0);
          for (std::int64_t i = 0; i < n_points; ++i)
            pts.row(i) = cone_point(rng, radius, height).transpose();
          break;
        }
      }
      Sample sample;
      sample.cloud = finalize(std::move(pts), rng, jitter);
      sample.label = cls;
      dataset.samples.push_back(std::move(sample));
    }
  }
  return dataset;
}

Dataset make_dumbbell_segmentation_dataset(int count, int n_points, std::uint64_t seed) {
  check_arg(count >= 1, "make_dumbbell_segmentation_dataset: count must be at least 1");
  check_arg(n_points >= 8, "make_dumbbell_segmentation_dataset: need at least 8 points");

  Dataset dataset;
  dataset.class_names = {"lobeA", "lobeB", "neck"};
  dataset.metadata.set("kind", "dumbbell");
  dataset.metadata.set_int("seed", static_cast<std::int64_t>(seed));
  dataset.metadata.set_int("count", count);
  dataset.metadata.set_int("n_points", n_points);

  for (int idx = 0; idx < count; ++idx) {
    Rng rng(mix_seed(seed, 0x64756d62ull, static_cast<std::uint64_t>(idx)));
    const double ra = rng.uniform(0.35, 0.55);
    const double rb = rng.uniform(0.35, 0.55);
    const double neck_radius = rng.uniform(0.12, 0.2);
    const double d = rng.uniform(0.8, 1.1);  // lobe centers at z = +-d

    const double area_a = 4.0 * M_PI * ra * ra;
    const double area_b = 4.0 * M_PI * rb * rb;
    const double area_neck = 2.0 * M_PI * neck_radius * 2.0 * d;
    const double total = area_a + area_b + area_neck;

    cloud::Points pts(n_points, 3);
    Sample sample;
    sample.point_labels.resize(static_cast<std::size_t>(n_points));
    for (std::int64_t i = 0; i < n_points; ++i) {
      const double u = rng.uniform() * total;
      if (u < area_a) {
        pts.row(i) = (Eigen::Vector3d(0, 0, d) + ra * unit_sphere_point(rng)).transpose();
        sample.point_labels[i] = 0;
      } else if (u < area_a + area_b) {
        pts.row(i) = (Eigen::Vector3d(0, 0, -d) + rb * unit_sphere_point(rng)).transpose();
        sample.point_labels[i] = 1;
      } else {
        const double angle = 2.0 * M_PI * rng.uniform();
        const double z = d * (2.0 * rng.uniform() - 1.0);
        pts.row(i) = Eigen::RowVector3d(neck_radius * std::cos(angle),
                                        neck_radius * std::sin(angle), z);
        sample.point_labels[i] = 2;
      }
    }
    sample.cloud = finalize(std::move(pts), rng, 0.01);
    dataset.samples.push_back(std::move(sample));
  }
  return dataset;
}

}  // namespace sphnet::data

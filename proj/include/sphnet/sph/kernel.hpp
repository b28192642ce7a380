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
#include <span>
#include <vector>

namespace sphnet::sph {

/// Parameters of the spherical-harmonics kernel basis: Gaussian radial
/// shells at radii rho * r / (n_radial - 1), shell width sigma, times the
/// real harmonics up to degree n_degrees - 1.
struct KernelBasis {
  double rho = 0.1;   // kernel scale, object-space units
  int n_radial = 2;   // number of radial shells
  int n_degrees = 4;  // harmonic degrees 0..n_degrees-1

  double sigma() const { return n_radial > 1 ? rho / (n_radial - 1) : rho; }
  double shell_radius(int r) const { return n_radial > 1 ? rho * r / (n_radial - 1) : 0.0; }
  int angular_size() const { return n_degrees * n_degrees; }
  int size() const { return n_radial * angular_size(); }

  /// Throws std::invalid_argument unless rho > 0, n_radial >= 1, n_degrees >= 1.
  void validate() const;
};

/// Evaluates the kernel basis at displacement x into out (size basis.size(),
/// layout [r][flat (l,m)]): radial Gaussian shell factor times Y_{l,m}(x/|x|).
/// At x = 0 the direction is undefined; by convention the degree-0 angular
/// factor stays 1/(2 sqrt(pi)) and every l > 0 entry is 0.
void eval_kernel(const KernelBasis& basis, const Eigen::Vector3d& x, std::span<double> out);
std::vector<double> eval_kernel(const KernelBasis& basis, const Eigen::Vector3d& x);

}  // namespace sphnet::sph

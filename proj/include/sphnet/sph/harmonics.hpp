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

/// Highest degree with a hand-written closed form. Degrees above this are
/// served by the associated-Legendre recurrence path.
inline constexpr int kMaxClosedFormDegree = 3;

/// Number of basis functions for degrees 0..n_degrees-1: sum of (2l+1) = n^2.
constexpr int sh_flat_size(int n_degrees) { return n_degrees * n_degrees; }

/// Flat index of (l, m) in the library-wide ordering: degree ascending,
/// order m from -l to l within each degree.
constexpr int sh_flat_index(int l, int m) { return l * l + l + m; }

/// Real orthonormal spherical harmonic Y_{l,m} at a unit vector.
/// The family satisfies the integral of Y_{l,m} Y_{l',m'} over the sphere
/// = delta_{ll'} delta_{mm'}. Throws std::domain_error if |u| deviates from
/// 1 by more than 1e-6 or |m| > l.
double eval_real_sh(int l, int m, const Eigen::Vector3d& u);

/// All harmonics with degree <= max_degree, flat (l asc, m = -l..l) order,
/// written into out (size (max_degree+1)^2). Same preconditions as above.
void eval_sh_vector(int max_degree, const Eigen::Vector3d& u, std::span<double> out);
std::vector<double> eval_sh_vector(int max_degree, const Eigen::Vector3d& u);

namespace detail {
/// Unchecked evaluation for internal callers that already hold a unit vector.
void eval_sh_unit(int max_degree, double x, double y, double z, double* out);
}  // namespace detail

/// Recurrence-based evaluation, valid for any degree. Independent of the
/// closed forms; used as their oracle and as the path beyond degree 3.
double eval_real_sh_recurrence(int l, int m, const Eigen::Vector3d& u);

}  // namespace sphnet::sph

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

#include <Eigen/Dense>

namespace sphnet::sph {

/// The (2l+1)x(2l+1) orthonormal matrix mixing the degree-l real harmonics
/// under a rotation: Y_l(R u) = D Y_l(u).
struct WignerBlock {
  int degree = 0;
  Eigen::MatrixXd D;
};

/// Computes the degree-l block for rotation R by least-squares fit of
/// Y_l(R u_k) against Y_l(u_k) over a well-conditioned direction set.
/// Intended as a test oracle. Throws std::domain_error unless R^T R = I
/// within 1e-8 and det R = +1; throws std::runtime_error if the fit residual
/// exceeds 1e-10.
WignerBlock wigner_d(int l, const Eigen::Matrix3d& R);

/// True iff R^T R = I within tol and det R = +1 (within tol).
bool is_rotation(const Eigen::Matrix3d& R, double tol = 1e-8);

}  // namespace sphnet::sph

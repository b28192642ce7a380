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

#include "sphnet/sph/wigner.hpp"

#include <cmath>
#include <stdexcept>

#include "sphnet/common.hpp"
#include "sphnet/sph/harmonics.hpp"

namespace sphnet::sph {

bool is_rotation(const Eigen::Matrix3d& R, double tol) {
  const double ortho = (R.transpose() * R - Eigen::Matrix3d::Identity()).cwiseAbs().maxCoeff();
  return ortho <= tol && std::abs(R.determinant() - 1.0) <= tol;
}

WignerBlock wigner_d(int l, const Eigen::Matrix3d& R) {
  check_arg(l >= 0, "wigner_d: degree must be non-negative");
  check_domain(is_rotation(R), "wigner_d: input is not a proper rotation");

  const int dim = 2 * l + 1;
  if (l == 0) return {0, Eigen::MatrixXd::Ones(1, 1)};

  // Fibonacci-sphere directions: evenly spread, so Y Y^T is well-conditioned.
  const int n_samples = std::max(4 * dim, 16);
  const double golden = M_PI * (3.0 - std::sqrt(5.0));
  Eigen::MatrixXd Y(dim, n_samples), Yr(dim, n_samples);
  std::vector<double> buf(sh_flat_size(l + 1));
  for (int k = 0; k < n_samples; ++k) {
    const double z = 1.0 - 2.0 * (k + 0.5) / n_samples;
    const double r = std::sqrt(1.0 - z * z);
    const double phi = golden * k;
    Eigen::Vector3d u(r * std::cos(phi), r * std::sin(phi), z);
    detail::eval_sh_unit(l, u.x(), u.y(), u.z(), buf.data());
    for (int m = 0; m < dim; ++m) Y(m, k) = buf[l * l + m];
    const Eigen::Vector3d v = (R * u).normalized();
    detail::eval_sh_unit(l, v.x(), v.y(), v.z(), buf.data());
    for (int m = 0; m < dim; ++m) Yr(m, k) = buf[l * l + m];
  }

  // D solves D Y = Yr; fit row-wise via the transposed least-squares system.
  Eigen::MatrixXd Dt = Y.transpose().colPivHouseholderQr().solve(Yr.transpose());
  WignerBlock block{l, Dt.transpose()};

  const double residual = (block.D * Y - Yr).cwiseAbs().maxCoeff();
  if (residual > 1e-10)
    throw std::runtime_error("wigner_d: least-squares fit residual " + std::to_string(residual));
  return block;
}

}  // namespace sphnet::sph

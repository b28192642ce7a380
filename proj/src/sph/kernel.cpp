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

#include "sphnet/sph/kernel.hpp"

#include <cmath>

#include "sphnet/common.hpp"
#include "sphnet/sph/harmonics.hpp"

namespace sphnet::sph {

void KernelBasis::validate() const {
  check_arg(rho > 0.0, "KernelBasis: rho must be positive");
  check_arg(n_radial >= 1, "KernelBasis: n_radial must be at least 1");
  check_arg(n_degrees >= 1, "KernelBasis: n_degrees must be at least 1");
}

void eval_kernel(const KernelBasis& basis, const Eigen::Vector3d& x, std::span<double> out) {
  basis.validate();
  check_arg(static_cast<int>(out.size()) == basis.size(), "eval_kernel: output span has wrong size");

  const int ang = basis.angular_size();
  const double dist = x.norm();

  double ybuf[64];
  std::vector<double> ydyn;
  double* y = ybuf;
  if (ang > 64) {
    ydyn.resize(ang);
    y = ydyn.data();
  }
  if (dist > 0.0) {
    detail::eval_sh_unit(basis.n_degrees - 1, x.x() / dist, x.y() / dist, x.z() / dist, y);
  } else {
    // Origin convention: keep the constant harmonic, zero the rest.
    for (int i = 1; i < ang; ++i) y[i] = 0.0;
    y[0] = 0.5 / std::sqrt(M_PI);
  }

  const double inv_two_sigma2 = 1.0 / (2.0 * basis.sigma() * basis.sigma());
  for (int r = 0; r < basis.n_radial; ++r) {
    const double d = dist - basis.shell_radius(r);
    const double radial = std::exp(-d * d * inv_two_sigma2);
    double* dst = out.data() + static_cast<std::size_t>(r) * ang;
    for (int i = 0; i < ang; ++i) dst[i] = radial * y[i];
  }
}

std::vector<double> eval_kernel(const KernelBasis& basis, const Eigen::Vector3d& x) {
  std::vector<double> out(basis.size());
  eval_kernel(basis, x, out);
  return out;
}

}  // namespace sphnet::sph

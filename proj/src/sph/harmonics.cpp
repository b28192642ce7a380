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

#include "sphnet/sph/harmonics.hpp"

#include <cmath>

#include "sphnet/common.hpp"

namespace sphnet::sph {

namespace {

void check_unit(const Eigen::Vector3d& u) {
  check_domain(std::abs(u.norm() - 1.0) <= 1e-6, "spherical harmonic argument must be a unit vector");
}

double recurrence_unit(int l, int m, double x, double y, double z) {
  const int am = std::abs(m);

  // Q_l^m(z): associated Legendre with the sin(theta)^m factor stripped and
  // no Condon-Shortley phase. Q_m^m = (2m-1)!!, then upward in l.
  double qmm = 1.0;
  for (int i = 1; i <= am; ++i) qmm *= static_cast<double>(2 * i - 1);
  double q = qmm;
  if (l > am) {
    double q_prev = qmm;
    q = z * static_cast<double>(2 * am + 1) * qmm;  // Q_{m+1}^m
    for (int ll = am + 2; ll <= l; ++ll) {
      const double q_next =
          (static_cast<double>(2 * ll - 1) * z * q - static_cast<double>(ll - 1 + am) * q_prev) /
          static_cast<double>(ll - am);
      q_prev = q;
      q = q_next;
    }
  }

  double norm = (2.0 * l + 1.0) / (4.0 * M_PI);
  for (int i = l - am + 1; i <= l + am; ++i) norm /= static_cast<double>(i);
  norm = std::sqrt(norm);

  if (m == 0) return norm * q;

  // Re/Im of (x + iy)^|m| = sin(theta)^|m| (cos, sin)(|m| phi); pole-safe.
  double a = 1.0, b = 0.0;
  for (int i = 0; i < am; ++i) {
    const double an = x * a - y * b;
    b = x * b + y * a;
    a = an;
  }
  return std::sqrt(2.0) * norm * q * (m > 0 ? a : b);
}

}  // namespace

namespace detail {

// Closed forms of the real orthonormal basis (positive leading coefficients,
// no Condon-Shortley phase) in Cartesian coordinates on the unit sphere.
void eval_sh_unit(int max_degree, double x, double y, double z, double* out) {
  static const double c00 = 0.5 / std::sqrt(M_PI);
  static const double c1 = std::sqrt(3.0 / (4.0 * M_PI));
  static const double c2a = 0.5 * std::sqrt(15.0 / M_PI);
  static const double c2b = 0.25 * std::sqrt(5.0 / M_PI);
  static const double c2c = 0.25 * std::sqrt(15.0 / M_PI);
  static const double c3a = 0.25 * std::sqrt(35.0 / (2.0 * M_PI));
  static const double c3b = 0.5 * std::sqrt(105.0 / M_PI);
  static const double c3c = 0.25 * std::sqrt(21.0 / (2.0 * M_PI));
  static const double c3d = 0.25 * std::sqrt(7.0 / M_PI);
  static const double c3e = 0.25 * std::sqrt(105.0 / M_PI);

  out[0] = c00;
  if (max_degree < 1) return;
  out[1] = c1 * y;
  out[2] = c1 * z;
  out[3] = c1 * x;
  if (max_degree < 2) return;
  const double x2 = x * x, y2 = y * y, z2 = z * z;
  out[4] = c2a * x * y;
  out[5] = c2a * y * z;
  out[6] = c2b * (3.0 * z2 - 1.0);
  out[7] = c2a * x * z;
  out[8] = c2c * (x2 - y2);
  if (max_degree < 3) return;
  out[9] = c3a * y * (3.0 * x2 - y2);
  out[10] = c3b * x * y * z;
  out[11] = c3c * y * (5.0 * z2 - 1.0);
  out[12] = c3d * z * (5.0 * z2 - 3.0);
  out[13] = c3c * x * (5.0 * z2 - 1.0);
  out[14] = c3e * z * (x2 - y2);
  out[15] = c3a * x * (x2 - 3.0 * y2);
  for (int l = kMaxClosedFormDegree + 1; l <= max_degree; ++l)
    for (int m = -l; m <= l; ++m) out[sh_flat_index(l, m)] = recurrence_unit(l, m, x, y, z);
}

}  // namespace detail

double eval_real_sh(int l, int m, const Eigen::Vector3d& u) {
  check_domain(l >= 0 && std::abs(m) <= l, "spherical harmonic order must satisfy |m| <= l");
  check_unit(u);
  if (l <= kMaxClosedFormDegree) {
    double buf[16];
    detail::eval_sh_unit(l, u.x(), u.y(), u.z(), buf);
    return buf[sh_flat_index(l, m)];
  }
  return eval_real_sh_recurrence(l, m, u);
}

void eval_sh_vector(int max_degree, const Eigen::Vector3d& u, std::span<double> out) {
  check_arg(max_degree >= 0, "max_degree must be non-negative");
  check_arg(static_cast<int>(out.size()) == sh_flat_size(max_degree + 1),
            "eval_sh_vector: output span has wrong size");
  check_unit(u);
  detail::eval_sh_unit(max_degree, u.x(), u.y(), u.z(), out.data());
}

std::vector<double> eval_sh_vector(int max_degree, const Eigen::Vector3d& u) {
  std::vector<double> out(sh_flat_size(max_degree + 1));
  eval_sh_vector(max_degree, u, out);
  return out;
}

double eval_real_sh_recurrence(int l, int m, const Eigen::Vector3d& u) {
  check_domain(l >= 0 && std::abs(m) <= l, "spherical harmonic order must satisfy |m| <= l");
  check_unit(u);
  return recurrence_unit(l, m, u.x(), u.y(), u.z());
}

}  // namespace sphnet::sph

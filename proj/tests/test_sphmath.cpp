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

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <Eigen/Dense>
#include <cmath>

#include "sphnet/cloud/rotation.hpp"
#include "sphnet/common.hpp"
#include "sphnet/sph/harmonics.hpp"
#include "sphnet/sph/kernel.hpp"
#include "sphnet/sph/wigner.hpp"

using namespace sphnet;
using sph::eval_real_sh;
using sph::eval_real_sh_recurrence;
using sph::eval_sh_vector;
using sph::KernelBasis;
using sph::sh_flat_index;
using sph::sh_flat_size;
using sph::wigner_d;

namespace {

Eigen::Vector3d random_unit(Rng& rng) {
  Eigen::Vector3d v;
  do {
    v = Eigen::Vector3d(rng.normal(), rng.normal(), rng.normal());
  } while (v.norm() < 1e-6);
  return v.normalized();
}

}  // namespace

TEST_CASE("Y00 is the constant 1/(2 sqrt(pi)) everywhere") {
  Rng rng(11);
  for (int i = 0; i < 10; ++i)
    CHECK(eval_real_sh(0, 0, random_unit(rng)) == doctest::Approx(0.2820947918).epsilon(1e-9));
}

TEST_CASE("degree-1 values at the pole") {
  const Eigen::Vector3d pole(0, 0, 1);
  CHECK(eval_real_sh(1, 1, pole) == 0.0);
  CHECK(eval_real_sh(1, 0, pole) == doctest::Approx(0.4886025119).epsilon(1e-9));
}

TEST_CASE("domain errors on bad arguments") {
  CHECK_THROWS_AS(eval_real_sh(1, 0, Eigen::Vector3d(0, 0, 2)), std::domain_error);
  CHECK_THROWS_AS(eval_real_sh(1, 2, Eigen::Vector3d(0, 0, 1)), std::domain_error);
  CHECK_THROWS_AS(eval_real_sh_recurrence(2, -3, Eigen::Vector3d(0, 0, 1)), std::domain_error);
}

TEST_CASE("flat vector ordering and parity at the poles") {
  const auto up = eval_sh_vector(1, Eigen::Vector3d(0, 0, 1));
  REQUIRE(up.size() == 4);
  CHECK(up[0] == doctest::Approx(0.28209479).epsilon(1e-7));
  CHECK(up[1] == doctest::Approx(0.0).scale(1));
  CHECK(up[2] == doctest::Approx(0.48860251).epsilon(1e-7));
  CHECK(up[3] == doctest::Approx(0.0).scale(1));

  const auto down = eval_sh_vector(1, Eigen::Vector3d(0, 0, -1));
  CHECK(down[0] == doctest::Approx(0.28209479).epsilon(1e-7));
  CHECK(down[2] == doctest::Approx(-0.48860251).epsilon(1e-7));
}

TEST_CASE("vector evaluation matches per-entry calls") {
  Rng rng(17);
  for (int trial = 0; trial < 5; ++trial) {
    const Eigen::Vector3d u = random_unit(rng);
    const auto vec = eval_sh_vector(3, u);
    for (int l = 0; l <= 3; ++l)
      for (int m = -l; m <= l; ++m)
        CHECK(vec[sh_flat_index(l, m)] == doctest::Approx(eval_real_sh(l, m, u)).epsilon(1e-14));
  }
}

TEST_CASE("closed forms agree with the recurrence to 1e-12") {
  Rng rng(23);
  for (int trial = 0; trial < 100; ++trial) {
    const Eigen::Vector3d u = random_unit(rng);
    for (int l = 0; l <= 3; ++l)
      for (int m = -l; m <= l; ++m)
        CHECK(std::abs(eval_real_sh(l, m, u) - eval_real_sh_recurrence(l, m, u)) < 1e-12);
  }
}

TEST_CASE("recurrence handles degrees beyond the closed forms") {
  // Y_{4,0} at the pole: (3 / (16 sqrt(pi))) * (35 - 30 + 3) = 1.5 / sqrt(pi).
  const double y40 = eval_real_sh_recurrence(4, 0, Eigen::Vector3d(0, 0, 1));
  CHECK(y40 == doctest::Approx(1.5 / std::sqrt(M_PI)).epsilon(1e-12));
  // At the pole every m != 0 harmonic vanishes.
  for (int m = 1; m <= 5; ++m)
    CHECK(eval_real_sh_recurrence(5, m, Eigen::Vector3d(0, 0, 1)) == doctest::Approx(0.0).scale(1));
}

TEST_CASE("Monte-Carlo orthonormality over the sphere") {
  const int dim = sh_flat_size(4);
  Eigen::MatrixXd gram = Eigen::MatrixXd::Zero(dim, dim);
  Rng rng(31);
  const int n_samples = 4'000'000;
  std::vector<double> y(dim);
  for (int s = 0; s < n_samples; ++s) {
    const Eigen::Vector3d u = random_unit(rng);
    sph::eval_sh_vector(3, u, y);
    const Eigen::Map<const Eigen::VectorXd> yv(y.data(), dim);
    gram.noalias() += yv * yv.transpose();
  }
  gram *= 4.0 * M_PI / n_samples;  // surface integral estimate
  const double err = (gram - Eigen::MatrixXd::Identity(dim, dim)).cwiseAbs().maxCoeff();
  CHECK(err < 5e-3);
}

TEST_CASE("rotation equivariance through the Wigner blocks") {
  Rng rng(41);
  for (int r = 0; r < 20; ++r) {
    const Eigen::Matrix3d R = cloud::random_rotation(rng);
    std::array<sph::WignerBlock, 4> blocks;
    for (int l = 0; l <= 3; ++l) blocks[l] = wigner_d(l, R);
    for (int t = 0; t < 20; ++t) {
      const Eigen::Vector3d u = random_unit(rng);
      const auto yu = eval_sh_vector(3, u);
      const auto yru = eval_sh_vector(3, (R * u).normalized());
      for (int l = 0; l <= 3; ++l) {
        const int d = 2 * l + 1;
        Eigen::Map<const Eigen::VectorXd> a(yu.data() + l * l, d);
        Eigen::Map<const Eigen::VectorXd> b(yru.data() + l * l, d);
        CHECK((b - blocks[l].D * a).cwiseAbs().maxCoeff() < 1e-9);
        CHECK(std::abs(b.norm() - a.norm()) < 1e-10);
      }
    }
  }
}

TEST_CASE("Wigner blocks are orthonormal") {
  Rng rng(43);
  for (int r = 0; r < 50; ++r) {
    const Eigen::Matrix3d R = cloud::random_rotation(rng);
    for (int l = 0; l <= 3; ++l) {
      const auto block = wigner_d(l, R);
      const int d = 2 * l + 1;
      CHECK((block.D * block.D.transpose() - Eigen::MatrixXd::Identity(d, d))
                .cwiseAbs()
                .maxCoeff() < 1e-10);
    }
  }
}

TEST_CASE("Wigner special cases") {
  const Eigen::Matrix3d I = Eigen::Matrix3d::Identity();
  for (int l = 0; l <= 3; ++l) {
    const auto block = wigner_d(l, I);
    CHECK((block.D - Eigen::MatrixXd::Identity(2 * l + 1, 2 * l + 1)).cwiseAbs().maxCoeff() <
          1e-12);
  }
  Rng rng(47);
  const auto l0 = wigner_d(0, cloud::random_rotation(rng));
  CHECK(l0.D(0, 0) == doctest::Approx(1.0));

  Eigen::Matrix3d not_rot = Eigen::Matrix3d::Identity();
  not_rot(0, 0) = 2.0;
  CHECK_THROWS_AS(wigner_d(1, not_rot), std::domain_error);
  Eigen::Matrix3d reflect = Eigen::Matrix3d::Identity();
  reflect(2, 2) = -1.0;
  CHECK_THROWS_AS(wigner_d(1, reflect), std::domain_error);
}

TEST_CASE("degree-1 block for a quarter turn about z checks out on fresh directions") {
  Eigen::Matrix3d R;
  R = Eigen::AngleAxisd(M_PI / 2.0, Eigen::Vector3d::UnitZ());
  const auto block = wigner_d(1, R);
  Rng rng(53);
  for (int t = 0; t < 9; ++t) {
    const Eigen::Vector3d u = random_unit(rng);
    const auto yu = eval_sh_vector(1, u);
    const auto yru = eval_sh_vector(1, (R * u).normalized());
    Eigen::Map<const Eigen::VectorXd> a(yu.data() + 1, 3);
    Eigen::Map<const Eigen::VectorXd> b(yru.data() + 1, 3);
    CHECK((b - block.D * a).cwiseAbs().maxCoeff() < 1e-10);
  }
}

TEST_CASE("kernel basis bookkeeping") {
  KernelBasis basis{0.1, 2, 4};
  CHECK(basis.sigma() == doctest::Approx(0.1));
  CHECK(basis.angular_size() == 16);
  CHECK(basis.size() == 32);
  CHECK(basis.shell_radius(0) == doctest::Approx(0.0));
  CHECK(basis.shell_radius(1) == doctest::Approx(0.1));

  KernelBasis single{0.2, 1, 2};
  CHECK(single.sigma() == doctest::Approx(0.2));
  CHECK(single.shell_radius(0) == doctest::Approx(0.0));

  CHECK_THROWS_AS((KernelBasis{-1.0, 2, 4}.validate()), std::invalid_argument);
  CHECK_THROWS_AS((KernelBasis{0.1, 0, 4}.validate()), std::invalid_argument);
}

TEST_CASE("kernel values on the second shell at the north pole") {
  KernelBasis basis{0.1, 2, 2};
  const auto k = sph::eval_kernel(basis, Eigen::Vector3d(0, 0, 0.1));
  const auto y = eval_sh_vector(1, Eigen::Vector3d(0, 0, 1));
  const double r0 = std::exp(-0.5);
  for (int i = 0; i < 4; ++i) {
    CHECK(k[static_cast<std::size_t>(i)] == doctest::Approx(r0 * y[i]).epsilon(1e-12));
    CHECK(k[static_cast<std::size_t>(4 + i)] == doctest::Approx(y[i]).epsilon(1e-12));
  }
}

TEST_CASE("kernel origin convention") {
  KernelBasis basis{0.07, 3, 4};
  const auto k = sph::eval_kernel(basis, Eigen::Vector3d::Zero());
  CHECK(k[0] == doctest::Approx(0.2820947918).epsilon(1e-9));
  for (int r = 0; r < basis.n_radial; ++r)
    for (int i = 1; i < basis.angular_size(); ++i)
      CHECK(k[static_cast<std::size_t>(r * basis.angular_size() + i)] == 0.0);
  // Outer shells keep their radial envelope on the constant harmonic.
  const double shell1 = std::exp(-0.5) * 0.2820947918;
  CHECK(k[static_cast<std::size_t>(basis.angular_size())] ==
        doctest::Approx(shell1).epsilon(1e-9));
}

TEST_CASE("kernel equivariance under rotation") {
  Rng rng(59);
  KernelBasis basis{0.15, 2, 4};
  for (int trial = 0; trial < 50; ++trial) {
    const Eigen::Matrix3d R = cloud::random_rotation(rng);
    Eigen::Vector3d x(rng.normal(), rng.normal(), rng.normal());
    x *= 0.1;
    const auto kx = sph::eval_kernel(basis, x);
    const auto krx = sph::eval_kernel(basis, R * x);
    for (int r = 0; r < basis.n_radial; ++r)
      for (int l = 0; l <= 3; ++l) {
        const int d = 2 * l + 1;
        const auto block = wigner_d(l, R);
        Eigen::Map<const Eigen::VectorXd> a(kx.data() + r * 16 + l * l, d);
        Eigen::Map<const Eigen::VectorXd> b(krx.data() + r * 16 + l * l, d);
        CHECK((b - block.D * a).cwiseAbs().maxCoeff() < 1e-10);
      }
  }
}

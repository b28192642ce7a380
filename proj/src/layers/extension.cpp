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

#include "sphnet/layers/extension.hpp"

#include <cmath>

#include "sphnet/common.hpp"

namespace sphnet::layers {

std::vector<double> extension_weights(const cloud::Points& positions, double sigma) {
  check_arg(sigma > 0.0, "extension_weights: sigma must be positive");
  const std::int64_t n = positions.rows();
  check_arg(n >= 1, "extension_weights: empty cloud");

  const double inv_two_sigma2 = 1.0 / (2.0 * sigma * sigma);
  const double cutoff = 80.0 * sigma * sigma;
  std::vector<double> weights(static_cast<std::size_t>(n));
  for (std::int64_t i = 0; i < n; ++i) {
    const Eigen::RowVector3d p = positions.row(i);
    double sum = 0.0;
    for (std::int64_t j = 0; j < n; ++j) {
      const double d2 = (positions.row(j) - p).squaredNorm();
      if (d2 <= cutoff) sum += std::exp(-d2 * inv_two_sigma2);
    }
    weights[i] = 1.0 / sum;
  }
  return weights;
}

}  // namespace sphnet::layers

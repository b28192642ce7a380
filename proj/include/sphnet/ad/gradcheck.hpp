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

#include <functional>
#include <span>

#include "sphnet/ad/graph.hpp"
#include "sphnet/common.hpp"

namespace sphnet::ad {

struct GradCheckReport {
  double max_rel_err = 0.0;
  std::int64_t entries_checked = 0;
  double tolerance = 0.0;
  bool pass = false;
};

/// Compares reverse-mode gradients against central finite differences on a
/// scalar-output graph. `build` must construct the graph afresh from the
/// current leaf values (and must not mutate external state); `leaves` are the
/// shared nodes whose entries get perturbed. Checks every entry of a leaf up
/// to max_entries_per_leaf, beyond that a seeded random subset.
inline GradCheckReport grad_check(const std::function<NodeP<double>()>& build,
                                  std::span<const NodeP<double>> leaves, double tolerance,
                                  Rng& rng, std::int64_t max_entries_per_leaf = 40,
                                  double h = 1e-5) {
  auto root = build();
  check_arg(root->value.numel() == 1, "grad_check: graph output must be scalar");
  for (const auto& leaf : leaves) leaf->clear_grad();
  backward(root);

  GradCheckReport report;
  report.tolerance = tolerance;
  for (const auto& leaf : leaves) {
    check_arg(leaf->requires_grad, "grad_check: leaf does not require gradients");
    Tensor<double> analytic =
        leaf->grad.v.empty() ? Tensor<double>::zeros(leaf->value.shape) : leaf->grad;

    const std::int64_t n = leaf->value.numel();
    std::vector<std::int64_t> entries;
    if (n <= max_entries_per_leaf) {
      entries.resize(n);
      for (std::int64_t i = 0; i < n; ++i) entries[i] = i;
    } else {
      for (std::int64_t i = 0; i < max_entries_per_leaf; ++i)
        entries.push_back(rng.uniform_int(n));
    }

    for (std::int64_t e : entries) {
      const double saved = leaf->value.v[e];
      leaf->value.v[e] = saved + h;
      const double fp = build()->value.v[0];
      leaf->value.v[e] = saved - h;
      const double fm = build()->value.v[0];
      leaf->value.v[e] = saved;

      const double fd = (fp - fm) / (2.0 * h);
      const double a = analytic.v[e];
      const double denom = std::max(std::abs(a), std::abs(fd));
      const double err = denom < 1e-6 ? std::abs(a - fd) : std::abs(a - fd) / denom;
      report.max_rel_err = std::max(report.max_rel_err, err);
      ++report.entries_checked;
    }
  }
  report.pass = report.max_rel_err < tolerance;
  for (const auto& leaf : leaves) leaf->clear_grad();
  return report;
}

inline GradCheckReport grad_check(const std::function<NodeP<double>()>& build,
                                  const NodeP<double>& leaf, double tolerance, Rng& rng,
                                  std::int64_t max_entries_per_leaf = 40, double h = 1e-5) {
  const NodeP<double> one[] = {leaf};
  return grad_check(build, std::span<const NodeP<double>>(one, 1), tolerance, rng,
                    max_entries_per_leaf, h);
}

}  // namespace sphnet::ad

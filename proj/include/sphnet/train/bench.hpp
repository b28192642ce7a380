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

#include <cstdint>
#include <vector>

#include "sphnet/util/csv.hpp"

namespace sphnet::train {

/// Timing comparison of kd-tree build+pool against the quadratic
/// FPS/Voronoi baseline, both reducing N points to N/4. Slopes are
/// least-squares fits of log(seconds) against log(N).
struct PoolBenchResult {
  struct Row {
    std::int64_t n = 0;
    double kd_seconds = 0.0;
    double fps_seconds = 0.0;
  };
  std::vector<Row> rows;
  double kd_slope = 0.0;
  double fps_slope = 0.0;

  util::CsvTable to_csv() const;
  static PoolBenchResult from_csv(const util::CsvTable& table);
};

/// Runs the benchmark single-threaded at each size (powers of two),
/// median of `reps` measurements.
PoolBenchResult run_pool_benchmark(const std::vector<std::int64_t>& sizes, int reps,
                                   std::uint64_t seed);

}  // namespace sphnet::train

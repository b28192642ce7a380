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

#include "sphnet/train/bench.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>

#include "sphnet/cloud/fps.hpp"
#include "sphnet/cloud/kdtree.hpp"
#include "sphnet/common.hpp"
#include "sphnet/util/kv.hpp"

namespace sphnet::train {

namespace {

constexpr int kChannels = 8;

template <class F>
double time_once(F&& body, int inner) {
  const auto t0 = std::chrono::steady_clock::now();
  for (int i = 0; i < inner; ++i) body();
  const auto t1 = std::chrono::steady_clock::now();
  return std::chrono::duration<double>(t1 - t0).count() / inner;
}

template <class F>
double time_median(F&& body, int inner, int reps) {
  std::vector<double> times(reps);
  for (int r = 0; r < reps; ++r) times[r] = time_once(body, inner);
  std::sort(times.begin(), times.end());
  return times[reps / 2];
}

double fit_slope(const std::vector<std::pair<double, double>>& log_points) {
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  const double n = static_cast<double>(log_points.size());
  for (const auto& [x, y] : log_points) {
    sx += x;
    sy += y;
    sxx += x * x;
    sxy += x * y;
  }
  return (n * sxy - sx * sy) / (n * sxx - sx * sx);
}

}  // namespace

util::CsvTable PoolBenchResult::to_csv() const {
  util::CsvTable table;
  table.comments.push_back("schema = pool_bench_v1");
  table.comments.push_back("kd_slope = " + util::format_double(kd_slope));
  table.comments.push_back("fps_slope = " + util::format_double(fps_slope));
  table.header = {"n", "kd_seconds", "fps_seconds"};
  for (const auto& row : rows)
    table.rows.push_back({std::to_string(row.n), util::format_double(row.kd_seconds),
                          util::format_double(row.fps_seconds)});
  return table;
}

PoolBenchResult PoolBenchResult::from_csv(const util::CsvTable& table) {
  PoolBenchResult result;
  for (const auto& comment : table.comments) {
    const auto eq = comment.find('=');
    if (eq == std::string::npos) continue;
    const std::string key = comment.substr(0, comment.find(' '));
    if (key == "kd_slope") result.kd_slope = std::stod(comment.substr(eq + 1));
    if (key == "fps_slope") result.fps_slope = std::stod(comment.substr(eq + 1));
  }
  for (const auto& row : table.rows)
    result.rows.push_back({std::stoll(row[0]), std::stod(row[1]), std::stod(row[2])});
  return result;
}

PoolBenchResult run_pool_benchmark(const std::vector<std::int64_t>& sizes, int reps,
                                   std::uint64_t seed) {
  check_arg(!sizes.empty() && reps >= 1, "pool benchmark: need sizes and reps");
  PoolBenchResult result;
  std::vector<std::pair<double, double>> kd_log, fps_log;

  for (std::int64_t n : sizes) {
    check_arg(n > 0 && (n & (n - 1)) == 0, "pool benchmark: sizes must be powers of two");
    Rng rng(mix_seed(seed, static_cast<std::uint64_t>(n)));
    cloud::Points pts(n, 3);
    for (std::int64_t i = 0; i < n; ++i)
      pts.row(i) = Eigen::RowVector3d(rng.normal(), rng.normal(), rng.normal());
    const cloud::PointCloud cloud = cloud::normalize(cloud::PointCloud{std::move(pts)});
    cloud::FeatureMatrix features(n, kChannels);
    for (std::int64_t i = 0; i < features.size(); ++i) features.data()[i] = rng.normal();

    // Inner repeats keep each measurement well above timer resolution.
    const int kd_inner = static_cast<int>(std::max<std::int64_t>(1, (1 << 21) / n));
    const int fps_inner = static_cast<int>(std::max<std::int64_t>(1, (1 << 24) / (n * n / 4)));

    volatile double sink = 0.0;
    const double kd_time = time_median(
        [&] {
          const auto tree = cloud::build_kdtree(cloud);
          const auto pooled = cloud::pool(tree, features, cloud.pts, 2);
          sink += pooled.features(0, 0);
        },
        kd_inner, reps);
    const double fps_time = time_median(
        [&] {
          const auto pooled = cloud::fps_voronoi_pool(cloud, features, n / 4);
          sink += pooled.features(0, 0);
        },
        fps_inner, reps);

    result.rows.push_back({n, kd_time, fps_time});
    kd_log.emplace_back(std::log(static_cast<double>(n)), std::log(kd_time));
    fps_log.emplace_back(std::log(static_cast<double>(n)), std::log(fps_time));
  }

  result.kd_slope = fit_slope(kd_log);
  result.fps_slope = fit_slope(fps_log);
  return result;
}

}  // namespace sphnet::train

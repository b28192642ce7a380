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

#include <filesystem>

#include "sphnet/train/audit.hpp"
#include "sphnet/train/bench.hpp"
#include "sphnet/train/trainer.hpp"
#include "sphnet/util/kv.hpp"

using namespace sphnet;
using namespace sphnet::train;

namespace {

namespace fs = std::filesystem;

std::string temp_dir(const std::string& tag) {
  const auto dir = fs::temp_directory_path() / ("sphnet_train_" + tag);
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir.string();
}

ExperimentConfig tiny_classify(const std::string& tag) {
  ExperimentConfig cfg;
  cfg.task = "classify";
  cfg.variant = "sphnet";
  cfg.dataset_kind = "shapes";
  cfg.per_class = 24;
  cfg.test_per_class = 8;
  cfg.dataset_points = 256;
  cfg.lr = 2e-3;
  cfg.batch = 8;
  cfg.epochs = 3;
  cfg.seed = 11;
  cfg.out_dir = temp_dir(tag);
  cfg.classifier.n_points = 128;
  cfg.classifier.channels = {12, 24, 32};
  cfg.classifier.pool_factors = {4, 4};
  cfg.classifier.fc = {24, 16};
  cfg.classifier.k = 12;
  cfg.classifier.classes = 5;
  cfg.classifier.dropout = 0.2;
  return cfg;
}

ExperimentConfig tiny_segment(const std::string& tag) {
  ExperimentConfig cfg;
  cfg.task = "segment";
  cfg.variant = "sphnet";
  cfg.dataset_kind = "dumbbell";
  cfg.seg_train = 8;
  cfg.seg_test = 4;
  cfg.dataset_points = 128;
  cfg.batch = 4;
  cfg.epochs = 2;
  cfg.seed = 13;
  cfg.out_dir = temp_dir(tag);
  cfg.segmenter.n_points = 128;
  cfg.segmenter.encoder_channels = {6, 8, 10};
  cfg.segmenter.pool_factors = {4, 4, 8};
  cfg.segmenter.k = 8;
  cfg.segmenter.labels = 3;
  return cfg;
}

}  // namespace

TEST_CASE("experiment configs round-trip and hash deterministically") {
  ExperimentConfig cfg = tiny_classify("roundtrip");
  cfg.protocol = "A/O";
  const std::string text = cfg.serialize();
  const ExperimentConfig back = ExperimentConfig::parse(text);
  CHECK(back.serialize() == text);
  CHECK(back.config_hash() == cfg.config_hash());

  // Variant twins differ only in that one key.
  ExperimentConfig base = cfg;
  base.variant = "sphbase";
  const util::KvDoc a = util::KvDoc::parse(cfg.serialize());
  const util::KvDoc b = util::KvDoc::parse(base.serialize());
  int differing = 0;
  for (const auto& [k, v] : a.items())
    if (b.get(k) != v) ++differing;
  CHECK(differing == 1);
  CHECK(b.get("variant") == "sphbase");

  CHECK_THROWS_AS(ExperimentConfig::parse("task = fly\n"), std::invalid_argument);
}

TEST_CASE("later keys win, enabling config-file overlays") {
  ExperimentConfig cfg = tiny_classify("overlay");
  const std::string overlay = cfg.serialize() + "epochs = 7\nvariant = sphbase\n";
  const ExperimentConfig merged = ExperimentConfig::parse(overlay);
  CHECK(merged.epochs == 7);
  CHECK(merged.variant == "sphbase");
  CHECK(merged.per_class == cfg.per_class);
}

TEST_CASE("run reports round-trip through CSV") {
  RunReport report;
  report.config_hash = "00ff00ff00ff00ff";
  report.environment = "threads=2 precision=single";
  report.epochs = {{0, 1.5, 0.3, 2.25}, {1, 1.2, 0.5, 2.5}};
  report.finals = {{"metric_O/O", 0.5}};
  const auto csv = report.to_csv();
  const RunReport back = RunReport::from_csv(util::CsvTable::parse(csv.format()));
  CHECK(back.config_hash == report.config_hash);
  CHECK(back.environment == report.environment);
  REQUIRE(back.epochs.size() == 2);
  CHECK(back.epochs[1].train_loss == 1.2);
  CHECK(back.epochs[1].seconds == 2.5);
  REQUIRE(back.finals.size() == 1);
  CHECK(back.finals[0].first == "metric_O/O");
  CHECK(back.finals[0].second == 0.5);
}

TEST_CASE("smoke training run: loss decreases, artifacts land on disk") {
  const ExperimentConfig cfg = tiny_classify("smoke");
  const TrainOutcome outcome = run_training(cfg);
  REQUIRE(outcome.report.epochs.size() == 3);
  CHECK(outcome.report.epochs[1].train_loss < outcome.report.epochs[0].train_loss);
  CHECK(outcome.report.epochs[2].train_loss < outcome.report.epochs[1].train_loss);
  CHECK(fs::exists(outcome.checkpoint_path));
  CHECK(fs::exists(outcome.report_path));

  const RunReport loaded = RunReport::from_csv(util::CsvTable::read(outcome.report_path));
  CHECK(loaded.config_hash == cfg.config_hash());
  CHECK(loaded.epochs.size() == 3);

  // The final validation metric is reproducible from the checkpoint.
  const double again = evaluate_checkpoint(outcome.checkpoint_path, data::Aug::kOriginal);
  CHECK(std::abs(again - outcome.final_val_metric) < 1e-6);
}

TEST_CASE("training is deterministic from (config, seeds)") {
  ExperimentConfig cfg = tiny_classify("det1");
  cfg.epochs = 2;
  const TrainOutcome a = run_training(cfg);
  cfg.out_dir = temp_dir("det2");
  const TrainOutcome b = run_training(cfg);
  REQUIRE(a.report.epochs.size() == b.report.epochs.size());
  for (std::size_t e = 0; e < a.report.epochs.size(); ++e) {
    CHECK(a.report.epochs[e].train_loss == b.report.epochs[e].train_loss);
    CHECK(a.report.epochs[e].val_metric == b.report.epochs[e].val_metric);
  }
}

TEST_CASE("segmentation smoke run produces per-point metrics") {
  const ExperimentConfig cfg = tiny_segment("segsmoke");
  const TrainOutcome outcome = run_training(cfg);
  CHECK(outcome.final_val_metric > 0.0);
  CHECK(outcome.final_val_metric <= 1.0);
  const double again = evaluate_checkpoint(outcome.checkpoint_path, data::Aug::kOriginal);
  CHECK(std::abs(again - outcome.final_val_metric) < 1e-6);
}

TEST_CASE("eval grid reports one row per cell") {
  ExperimentConfig cfg = tiny_classify("grid");
  cfg.epochs = 1;
  const TrainOutcome outcome = run_training(cfg);
  const auto grid = eval_grid({outcome.checkpoint_path});
  REQUIRE(grid.rows.size() == 2);  // O-trained: O/O and O/A
  CHECK(grid.rows[0][0] == "O/O");
  CHECK(grid.rows[1][0] == "O/A");
  // Round-trips through its own reader.
  const auto parsed = util::CsvTable::parse(grid.format());
  CHECK(parsed.format() == grid.format());
}

TEST_CASE("pool benchmark emits monotone timings and a parseable table") {
  const auto result = run_pool_benchmark({256, 512, 1024}, 3, 7);
  REQUIRE(result.rows.size() == 3);
  CHECK(result.rows[0].fps_seconds < result.rows[1].fps_seconds);
  CHECK(result.rows[1].fps_seconds < result.rows[2].fps_seconds);
  CHECK(result.fps_slope > 1.0);

  const auto csv = result.to_csv();
  const auto back = PoolBenchResult::from_csv(util::CsvTable::parse(csv.format()));
  REQUIRE(back.rows.size() == 3);
  CHECK(back.rows[2].n == 1024);
  CHECK(back.kd_slope == doctest::Approx(result.kd_slope));
  CHECK(back.rows[1].kd_seconds == doctest::Approx(result.rows[1].kd_seconds));

  CHECK_THROWS_AS(run_pool_benchmark({100}, 3, 7), std::invalid_argument);
}

TEST_CASE("invariance audit separates the variants") {
  ExperimentConfig cfg = tiny_classify("audit");
  const InvarianceReport inv = run_invariance_audit(cfg, 3, 10);
  CHECK(inv.max_layer_deviation < 1e-4);
  CHECK(inv.wigner_residual < 1e-9);
  CHECK(inv.prediction_agreement >= 0.0);

  cfg.variant = "sphbase";
  const InvarianceReport base = run_invariance_audit(cfg, 3, 0);
  CHECK(base.max_layer_deviation > 1e-2);

  const auto csv = inv.to_csv();
  CHECK(util::CsvTable::parse(csv.format()).rows.size() == csv.rows.size());
}

TEST_CASE("kernel scale sweep: schema and a detuned scale underperforming") {
  ExperimentConfig cfg = tiny_classify("sweep");
  cfg.epochs = 8;
  const auto table = run_rho_sweep(cfg, {0.1, 1.0});
  REQUIRE(table.header == std::vector<std::string>{"rho", "O/O", "A/O", "O/A", "A/A"});
  REQUIRE(table.rows.size() == 2);
  const double tuned = std::stod(table.rows[0][1]);
  const double detuned = std::stod(table.rows[1][1]);
  CHECK(tuned > detuned);

  // Reproducible from seeds.
  ExperimentConfig cfg2 = cfg;
  cfg2.out_dir = temp_dir("sweep2");
  const auto again = run_rho_sweep(cfg2, {0.1});
  CHECK(again.rows[0][1] == table.rows[0][1]);
}

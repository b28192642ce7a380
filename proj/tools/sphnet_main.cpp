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

#include <CLI11.hpp>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include "sphnet/data/dataset_io.hpp"
#include "sphnet/train/audit.hpp"
#include "sphnet/train/bench.hpp"
#include "sphnet/train/trainer.hpp"
#include "sphnet/util/kv.hpp"

namespace {

using sphnet::train::ExperimentConfig;

/// Values from --config take precedence over command-line flags.
ExperimentConfig finalize_config(ExperimentConfig flags, const std::string& config_path) {
  if (config_path.empty()) {
    flags.validate();
    return flags;
  }
  std::ifstream is(config_path);
  if (!is) throw std::runtime_error("cannot open config file: " + config_path);
  std::stringstream buf;
  buf << is.rdbuf();
  // Start from the flag values, then overlay every key present in the file.
  const std::string merged = flags.serialize() + buf.str();
  return ExperimentConfig::parse(merged);
}

void add_experiment_flags(CLI::App* cmd, ExperimentConfig& cfg, std::string& config_path) {
  cmd->add_option("--config", config_path, "config file (key = value); overrides flags");
  cmd->add_option("--task", cfg.task, "classify | segment");
  cmd->add_option("--variant", cfg.variant, "sphnet | sphbase");
  cmd->add_option("--protocol", cfg.protocol, "train/test augmentation: O/O, A/O, O/A, A/A");
  cmd->add_option("--dataset", cfg.dataset_kind, "shapes | dumbbell | dir");
  cmd->add_option("--dataset-dir", cfg.dataset_dir, "dataset directory (kind = dir)");
  cmd->add_option("--per-class", cfg.per_class, "shapes: training samples per class");
  cmd->add_option("--test-per-class", cfg.test_per_class, "shapes: test samples per class");
  cmd->add_option("--seg-train", cfg.seg_train, "dumbbell: training samples");
  cmd->add_option("--seg-test", cfg.seg_test, "dumbbell: test samples");
  cmd->add_option("--dataset-points", cfg.dataset_points, "stored points per cloud");
  cmd->add_option("--jitter", cfg.jitter, "generation jitter sigma");
  cmd->add_option("--lr", cfg.lr, "Adam learning rate");
  cmd->add_option("--batch", cfg.batch, "batch size");
  cmd->add_option("--epochs", cfg.epochs, "training epochs");
  cmd->add_option("--seed", cfg.seed, "master seed");
  cmd->add_option("--precision", cfg.precision, "single | double");
  cmd->add_option("--out", cfg.out_dir, "output directory");
  cmd->add_option("--n-points", cfg.classifier.n_points, "classifier input points");
  cmd->add_option("--k", cfg.classifier.k, "classifier patch size");
  cmd->add_option("--rho", cfg.classifier.rho, "classifier first-layer kernel scale");
  cmd->add_option("--classes", cfg.classifier.classes, "classifier class count");
  cmd->add_option("--seg-n-points", cfg.segmenter.n_points, "segmenter input points");
  cmd->add_option("--seg-k", cfg.segmenter.k, "segmenter patch size");
  cmd->add_option("--seg-rho", cfg.segmenter.rho, "segmenter first-layer kernel scale");
  cmd->add_option("--labels", cfg.segmenter.labels, "segmenter label count");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"rotation-invariant point-cloud networks: training and experiments"};
  app.require_subcommand(1);

  ExperimentConfig cfg;
  // Desk-scale defaults; the reference operating point lives in the model
  // config defaults and can be restored via flags or a config file.
  cfg.classifier.classes = 5;

  std::string config_path;

  auto* train_cmd = app.add_subcommand("train", "train a model and write checkpoint + report");
  add_experiment_flags(train_cmd, cfg, config_path);

  auto* eval_cmd = app.add_subcommand("eval", "evaluate checkpoints over the protocol grid");
  std::vector<std::string> checkpoints;
  std::string eval_out = "eval_grid.csv";
  eval_cmd->add_option("checkpoints", checkpoints, "checkpoint files")->required();
  eval_cmd->add_option("--out", eval_out, "output CSV path");

  auto* inv_cmd = app.add_subcommand("invariance", "rotation-robustness audit");
  int inv_trials = 5;
  int inv_rotations = 20;
  std::string inv_out = "invariance.csv";
  add_experiment_flags(inv_cmd, cfg, config_path);
  inv_cmd->add_option("--trials", inv_trials, "shared-plan audit trials");
  inv_cmd->add_option("--rotations", inv_rotations, "rebuilt-tree agreement rotations");
  inv_cmd->add_option("--audit-out", inv_out, "output CSV path");

  auto* bench_cmd = app.add_subcommand("bench-pool", "kd pooling vs FPS/Voronoi timings");
  std::vector<std::int64_t> bench_sizes = {512, 1024, 2048, 4096, 8192, 16384};
  int bench_reps = 5;
  std::uint64_t bench_seed = 1;
  std::string bench_out = "pool_bench.csv";
  bench_cmd->add_option("--sizes", bench_sizes, "point counts (powers of two)");
  bench_cmd->add_option("--reps", bench_reps, "repetitions per size (median)");
  bench_cmd->add_option("--seed", bench_seed, "cloud seed");
  bench_cmd->add_option("--out", bench_out, "output CSV path");

  auto* sweep_cmd = app.add_subcommand("sweep-rho", "accuracy across kernel scales");
  std::vector<double> sweep_rhos = {0.05, 0.075, 0.1, 0.15, 0.2};
  std::string sweep_out = "rho_sweep.csv";
  add_experiment_flags(sweep_cmd, cfg, config_path);
  sweep_cmd->add_option("--rhos", sweep_rhos, "kernel scales to sweep");
  sweep_cmd->add_option("--sweep-out", sweep_out, "output CSV path");

  auto* gen_cmd = app.add_subcommand("gen-data", "generate a dataset in the on-disk format");
  std::string gen_kind = "shapes";
  std::string gen_dir = "data/shapes";
  int gen_train = 200, gen_test = 100, gen_points = 2048;
  double gen_jitter = 0.01;
  std::uint64_t gen_seed = 1;
  gen_cmd->add_option("--kind", gen_kind, "shapes | dumbbell");
  gen_cmd->add_option("--dir", gen_dir, "output directory");
  gen_cmd->add_option("--train-count", gen_train, "train samples (per class for shapes)");
  gen_cmd->add_option("--test-count", gen_test, "test samples (per class for shapes)");
  gen_cmd->add_option("--points", gen_points, "points per cloud");
  gen_cmd->add_option("--jitter", gen_jitter, "jitter sigma (shapes)");
  gen_cmd->add_option("--seed", gen_seed, "generation seed");

  CLI11_PARSE(app, argc, argv);

  try {
    if (train_cmd->parsed()) {
      const ExperimentConfig final_cfg = finalize_config(cfg, config_path);
      const auto outcome = sphnet::train::run_training(final_cfg);
      std::cout << "config_hash " << final_cfg.config_hash() << "\n";
      for (const auto& row : outcome.report.epochs)
        std::cout << "epoch " << row.epoch << " loss " << row.train_loss << " val "
                  << row.val_metric << " (" << row.seconds << " s)\n";
      std::cout << "checkpoint " << outcome.checkpoint_path << "\n"
                << "report " << outcome.report_path << "\n"
                << "final " << outcome.final_val_metric << "\n";
    } else if (eval_cmd->parsed()) {
      const auto grid = sphnet::train::eval_grid(checkpoints);
      grid.write(eval_out);
      std::cout << grid.format();
    } else if (inv_cmd->parsed()) {
      const ExperimentConfig final_cfg = finalize_config(cfg, config_path);
      const auto report = sphnet::train::run_invariance_audit(final_cfg, inv_trials, inv_rotations);
      report.to_csv().write(inv_out);
      std::cout << report.to_csv().format();
    } else if (bench_cmd->parsed()) {
      const auto result = sphnet::train::run_pool_benchmark(bench_sizes, bench_reps, bench_seed);
      result.to_csv().write(bench_out);
      std::cout << result.to_csv().format();
    } else if (sweep_cmd->parsed()) {
      const ExperimentConfig final_cfg = finalize_config(cfg, config_path);
      const auto table = sphnet::train::run_rho_sweep(final_cfg, sweep_rhos);
      table.write(sweep_out);
      std::cout << table.format();
    } else if (gen_cmd->parsed()) {
      namespace data = sphnet::data;
      if (gen_kind == "shapes") {
        data::write_dataset(data::make_shapes_dataset(gen_train, gen_points, gen_jitter,
                                                      sphnet::mix_seed(gen_seed, 1)),
                            gen_dir, "train");
        data::write_dataset(data::make_shapes_dataset(gen_test, gen_points, gen_jitter,
                                                      sphnet::mix_seed(gen_seed, 2)),
                            gen_dir, "test");
      } else if (gen_kind == "dumbbell") {
        data::write_dataset(data::make_dumbbell_segmentation_dataset(
                                gen_train, gen_points, sphnet::mix_seed(gen_seed, 1)),
                            gen_dir, "train");
        data::write_dataset(data::make_dumbbell_segmentation_dataset(
                                gen_test, gen_points, sphnet::mix_seed(gen_seed, 2)),
                            gen_dir, "test");
      } else {
        throw std::invalid_argument("gen-data: unknown kind " + gen_kind);
      }
      std::cout << "wrote " << gen_dir << "\n";
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}

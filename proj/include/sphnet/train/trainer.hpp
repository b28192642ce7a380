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

#include <string>
#include <vector>

#include "sphnet/data/protocol.hpp"
#include "sphnet/data/synthetic.hpp"
#include "sphnet/models/config.hpp"
#include "sphnet/util/csv.hpp"

namespace sphnet::train {

/// Everything a run needs; a run is reproducible from this plus nothing.
struct ExperimentConfig {
  std::string task = "classify";   // classify | segment
  std::string variant = "sphnet";  // sphnet | sphbase
  std::string protocol = "O/O";

  // Dataset: generated synthetic sets or a directory in the on-disk format.
  std::string dataset_kind = "shapes";  // shapes | dumbbell | dir
  std::string dataset_dir;
  int per_class = 200;        // shapes: training samples per class
  int test_per_class = 100;   // shapes: test samples per class
  int seg_train = 128;        // dumbbell: training samples
  int seg_test = 64;          // dumbbell: test samples
  int dataset_points = 2048;  // stored points per cloud
  double jitter = 0.01;

  // Optimizer.
  double lr = 1e-3;
  int batch = 16;
  int epochs = 60;

  std::uint64_t seed = 1;
  std::string precision = "single";  // single | double
  std::string out_dir = "runs/run";

  models::ClassifierConfig classifier;
  models::SegmenterConfig segmenter;

  void validate() const;
  std::string serialize() const;
  static ExperimentConfig parse(const std::string& text);
  std::string config_hash() const;  // hex FNV-1a of the serialization

  data::Protocol parsed_protocol() const { return data::Protocol::parse(protocol); }
  int model_points() const { return task == "classify" ? classifier.n_points : segmenter.n_points; }
};

struct EpochRow {
  int epoch = 0;
  double train_loss = 0.0;
  double val_metric = 0.0;
  double seconds = 0.0;
};

struct RunReport {
  std::string schema = "run_report_v1";
  std::string config_hash;
  std::string environment;
  std::vector<EpochRow> epochs;
  std::vector<std::pair<std::string, double>> finals;

  util::CsvTable to_csv() const;
  static RunReport from_csv(const util::CsvTable& table);
};

struct TrainOutcome {
  RunReport report;
  std::string checkpoint_path;
  std::string report_path;
  double final_val_metric = 0.0;
};

/// Trains per the config (dispatching on task and precision), writes the
/// checkpoint and the report CSV under out_dir, and returns both.
TrainOutcome run_training(const ExperimentConfig& config);

/// Accuracy of a stored checkpoint on its own test split under the given
/// test augmentation. The experiment config is embedded in the checkpoint.
double evaluate_checkpoint(const std::string& checkpoint_path, data::Aug test_aug);

/// The four-cell protocol grid from one or more checkpoints: each
/// checkpoint's training augmentation fills its row's O and A test cells.
util::CsvTable eval_grid(const std::vector<std::string>& checkpoint_paths);

/// The experiment config stored inside a checkpoint.
ExperimentConfig checkpoint_config(const std::string& checkpoint_path);

/// Per-sample prediction agreement of a trained classifier between a fixed
/// test input and `rotations` random rotations of it (kd-trees rebuilt per
/// rotation, the regime where axis-aligned splits may flip decisions).
double rotation_agreement(const std::string& checkpoint_path, int rotations);

/// Trains the configured model once per kernel scale under both O and A
/// training augmentation and tabulates the four protocol cells per scale
/// (columns rho, O/O, A/O, O/A, A/A).
util::CsvTable run_rho_sweep(const ExperimentConfig& base, const std::vector<double>& rhos);

}  // namespace sphnet::train

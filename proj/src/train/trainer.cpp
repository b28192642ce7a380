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

#include "sphnet/train/trainer.hpp"

#include <chrono>
#include <cstdio>
#include <filesystem>
#include <thread>

#include "sphnet/ad/adam.hpp"
#include "sphnet/ad/checkpoint.hpp"
#include "sphnet/data/dataset_io.hpp"
#include "sphnet/models/classifier.hpp"
#include "sphnet/models/segmenter.hpp"
#include "sphnet/util/kv.hpp"

namespace sphnet::train {

namespace fs = std::filesystem;
using util::KvDoc;

// ---------------------------------------------------------------------------
// ExperimentConfig
// ---------------------------------------------------------------------------

void ExperimentConfig::validate() const {
  check_arg(task == "classify" || task == "segment", "config: task must be classify or segment");
  models::parse_variant(variant);
  data::Protocol::parse(protocol);
  check_arg(dataset_kind == "shapes" || dataset_kind == "dumbbell" || dataset_kind == "dir",
            "config: dataset_kind must be shapes, dumbbell, or dir");
  check_arg(dataset_kind != "dir" || !dataset_dir.empty(), "config: dataset_dir required");
  check_arg(lr > 0.0, "config: lr must be positive");
  check_arg(batch >= 1, "config: batch must be at least 1");
  check_arg(epochs >= 1, "config: epochs must be at least 1");
  check_arg(precision == "single" || precision == "double",
            "config: precision must be single or double");
  if (task == "classify") {
    classifier.validate();
    check_arg(dataset_points >= classifier.n_points,
              "config: dataset_points must cover the classifier input size");
  } else {
    segmenter.validate();
    check_arg(dataset_points >= segmenter.n_points,
              "config: dataset_points must cover the segmenter input size");
  }
}

std::string ExperimentConfig::serialize() const {
  KvDoc doc;
  doc.set("config_version", "1");
  doc.set("task", task);
  doc.set("variant", variant);
  doc.set("protocol", protocol);
  doc.set("dataset_kind", dataset_kind);
  doc.set("dataset_dir", dataset_dir);
  doc.set_int("per_class", per_class);
  doc.set_int("test_per_class", test_per_class);
  doc.set_int("seg_train", seg_train);
  doc.set_int("seg_test", seg_test);
  doc.set_int("dataset_points", dataset_points);
  doc.set_double("jitter", jitter);
  doc.set_double("lr", lr);
  doc.set_int("batch", batch);
  doc.set_int("epochs", epochs);
  doc.set_int("seed", static_cast<std::int64_t>(seed));
  doc.set("precision", precision);
  doc.set("out_dir", out_dir);
  std::string out = doc.format();
  const KvDoc cls = KvDoc::parse(classifier.serialize());
  for (const auto& [k, v] : cls.items()) out += "classifier." + k + " = " + v + "\n";
  const KvDoc seg = KvDoc::parse(segmenter.serialize());
  for (const auto& [k, v] : seg.items()) out += "segmenter." + k + " = " + v + "\n";
  return out;
}

ExperimentConfig ExperimentConfig::parse(const std::string& text) {
  const KvDoc doc = KvDoc::parse(text);
  ExperimentConfig cfg;
  cfg.task = doc.get_or("task", cfg.task);
  cfg.variant = doc.get_or("variant", cfg.variant);
  cfg.protocol = doc.get_or("protocol", cfg.protocol);
  cfg.dataset_kind = doc.get_or("dataset_kind", cfg.dataset_kind);
  cfg.dataset_dir = doc.get_or("dataset_dir", cfg.dataset_dir);
  cfg.per_class = static_cast<int>(doc.get_int_or("per_class", cfg.per_class));
  cfg.test_per_class = static_cast<int>(doc.get_int_or("test_per_class", cfg.test_per_class));
  cfg.seg_train = static_cast<int>(doc.get_int_or("seg_train", cfg.seg_train));
  cfg.seg_test = static_cast<int>(doc.get_int_or("seg_test", cfg.seg_test));
  cfg.dataset_points = static_cast<int>(doc.get_int_or("dataset_points", cfg.dataset_points));
  cfg.jitter = doc.get_double_or("jitter", cfg.jitter);
  cfg.lr = doc.get_double_or("lr", cfg.lr);
  cfg.batch = static_cast<int>(doc.get_int_or("batch", cfg.batch));
  cfg.epochs = static_cast<int>(doc.get_int_or("epochs", cfg.epochs));
  cfg.seed = static_cast<std::uint64_t>(doc.get_int_or("seed", static_cast<std::int64_t>(cfg.seed)));
  cfg.precision = doc.get_or("precision", cfg.precision);
  cfg.out_dir = doc.get_or("out_dir", cfg.out_dir);

  KvDoc cls, seg;
  for (const auto& [k, v] : doc.items()) {
    if (k.rfind("classifier.", 0) == 0) cls.set(k.substr(11), v);
    if (k.rfind("segmenter.", 0) == 0) seg.set(k.substr(10), v);
  }
  if (!cls.items().empty()) cfg.classifier = models::ClassifierConfig::parse(cls.format());
  if (!seg.items().empty()) cfg.segmenter = models::SegmenterConfig::parse(seg.format());
  cfg.validate();
  return cfg;
}

std::string ExperimentConfig::config_hash() const {
  char buf[24];
  std::snprintf(buf, sizeof(buf), "%016llx",
                static_cast<unsigned long long>(util::fnv1a(serialize())));
  return buf;
}

// ---------------------------------------------------------------------------
// RunReport
// ---------------------------------------------------------------------------

util::CsvTable RunReport::to_csv() const {
  util::CsvTable table;
  table.comments.push_back("schema = " + schema);
  table.comments.push_back("config_hash = " + config_hash);
  table.comments.push_back("environment = " + environment);
  for (const auto& [key, value] : finals)
    table.comments.push_back("final." + key + " = " + util::format_double(value));
  table.header = {"epoch", "train_loss", "val_metric", "seconds"};
  for (const auto& row : epochs)
    table.rows.push_back({std::to_string(row.epoch), util::format_double(row.train_loss),
                          util::format_double(row.val_metric), util::format_double(row.seconds)});
  return table;
}

RunReport RunReport::from_csv(const util::CsvTable& table) {
  RunReport report;
  for (const auto& comment : table.comments) {
    const auto eq = comment.find('=');
    if (eq == std::string::npos) continue;
    auto trim = [](std::string s) {
      const auto b = s.find_first_not_of(' ');
      const auto e = s.find_last_not_of(' ');
      return b == std::string::npos ? std::string() : s.substr(b, e - b + 1);
    };
    const std::string key = trim(comment.substr(0, eq));
    const std::string value = trim(comment.substr(eq + 1));
    if (key == "schema") report.schema = value;
    else if (key == "config_hash") report.config_hash = value;
    else if (key == "environment") report.environment = value;
    else if (key.rfind("final.", 0) == 0)
      report.finals.emplace_back(key.substr(6), std::stod(value));
  }
  for (const auto& row : table.rows)
    report.epochs.push_back(
        {std::stoi(row[0]), std::stod(row[1]), std::stod(row[2]), std::stod(row[3])});
  return report;
}

// ---------------------------------------------------------------------------
// Engine
// ---------------------------------------------------------------------------

namespace {

constexpr std::uint64_t kSeedTrainSet = 0x747261696e736574ull;
constexpr std::uint64_t kSeedTestSet = 0x7465737473657421ull;
constexpr std::uint64_t kSeedModel = 0x6d6f64656c696e69ull;
constexpr std::uint64_t kSeedShuffle = 0x73687566666c6531ull;
constexpr std::uint64_t kSeedDropout = 0x64726f706f757431ull;
constexpr std::uint64_t kSeedSubTrain = 0x73756274726e3131ull;
constexpr std::uint64_t kSeedSubTest = 0x7375627465737431ull;
constexpr std::uint64_t kSeedAgree = 0x6167726565726f74ull;

struct SplitData {
  data::Dataset train;
  data::Dataset test;
};

SplitData load_data(const ExperimentConfig& cfg) {
  if (cfg.dataset_kind == "shapes")
    return {data::make_shapes_dataset(cfg.per_class, cfg.dataset_points, cfg.jitter,
                                      mix_seed(cfg.seed, kSeedTrainSet)),
            data::make_shapes_dataset(cfg.test_per_class, cfg.dataset_points, cfg.jitter,
                                      mix_seed(cfg.seed, kSeedTestSet))};
  if (cfg.dataset_kind == "dumbbell")
    return {data::make_dumbbell_segmentation_dataset(cfg.seg_train, cfg.dataset_points,
                                                     mix_seed(cfg.seed, kSeedTrainSet)),
            data::make_dumbbell_segmentation_dataset(cfg.seg_test, cfg.dataset_points,
                                                     mix_seed(cfg.seed, kSeedTestSet))};
  return {data::read_dataset(cfg.dataset_dir, "train"), data::read_dataset(cfg.dataset_dir, "test")};
}

/// Rotation first, then subsampling to the network size.
data::Sample prepare_sample(const data::Sample& sample, const Eigen::Matrix3d& rotation,
                            int n_points, std::uint64_t subsample_seed) {
  data::Sample out;
  out.label = sample.label;
  cloud::PointCloud rotated = cloud::rotate(sample.cloud, rotation);
  const std::int64_t m = rotated.size();
  if (m == n_points) {
    out.cloud = std::move(rotated);
    out.point_labels = sample.point_labels;
    return out;
  }
  check_arg(m > n_points, "prepare_sample: stored cloud smaller than the network input");
  std::vector<std::int32_t> indices(m);
  for (std::int64_t i = 0; i < m; ++i) indices[i] = static_cast<std::int32_t>(i);
  Rng rng(subsample_seed);
  for (int i = 0; i < n_points; ++i) {
    const std::int64_t j = i + rng.uniform_int(m - i);
    std::swap(indices[i], indices[j]);
  }
  cloud::Points pts(n_points, 3);
  for (int i = 0; i < n_points; ++i) pts.row(i) = rotated.pts.row(indices[i]);
  out.cloud = cloud::PointCloud{std::move(pts)};
  if (!sample.point_labels.empty()) {
    out.point_labels.resize(n_points);
    for (int i = 0; i < n_points; ++i) out.point_labels[i] = sample.point_labels[indices[i]];
  }
  return out;
}

std::string environment_string(const ExperimentConfig& cfg) {
  return "threads=" + std::to_string(std::thread::hardware_concurrency()) +
         " precision=" + cfg.precision + " eigen=" + std::to_string(EIGEN_WORLD_VERSION) + "." +
         std::to_string(EIGEN_MAJOR_VERSION);
}

template <class T>
class Engine {
 public:
  explicit Engine(const ExperimentConfig& cfg) : cfg_(cfg) {
    cfg_.validate();
    const auto variant = models::parse_variant(cfg_.variant);
    if (cfg_.task == "classify") {
      classifier_ = std::make_unique<models::Classifier<T>>(cfg_.classifier, variant,
                                                            mix_seed(cfg_.seed, kSeedModel));
      spec_ = classifier_->geometry_spec();
      n_points_ = cfg_.classifier.n_points;
    } else {
      segmenter_ = std::make_unique<models::Segmenter<T>>(cfg_.segmenter, variant,
                                                          mix_seed(cfg_.seed, kSeedModel));
      spec_ = segmenter_->geometry_spec();
      n_points_ = cfg_.segmenter.n_points;
    }
    data_ = load_data(cfg_);
  }

  std::vector<ad::NodeP<T>> params() const {
    return classifier_ ? classifier_->params() : segmenter_->params();
  }

  void save_model(ad::Checkpoint& ckpt) const {
    if (classifier_) classifier_->save(ckpt);
    else segmenter_->save(ckpt);
  }
  void load_model(const ad::Checkpoint& ckpt) {
    if (classifier_) classifier_->load(ckpt);
    else segmenter_->load(ckpt);
  }

  TrainOutcome train() {
    const data::Protocol protocol = cfg_.parsed_protocol();
    auto parameters = params();
    ad::AdamState<T> adam = ad::AdamState<T>::init(parameters);
    ad::AdamConfig adam_cfg;
    adam_cfg.lr = cfg_.lr;

    RunReport report;
    report.config_hash = cfg_.config_hash();
    report.environment = environment_string(cfg_);

    const std::int64_t train_count = static_cast<std::int64_t>(data_.train.samples.size());
    const std::int64_t steps =
        train_count >= cfg_.batch ? train_count / cfg_.batch : std::int64_t{1};

    for (int epoch = 0; epoch < cfg_.epochs; ++epoch) {
      const auto t0 = std::chrono::steady_clock::now();
      std::vector<std::int64_t> order(train_count);
      for (std::int64_t i = 0; i < train_count; ++i) order[i] = i;
      Rng shuffle_rng(mix_seed(cfg_.seed, kSeedShuffle, static_cast<std::uint64_t>(epoch)));
      for (std::int64_t i = train_count - 1; i > 0; --i)
        std::swap(order[i], order[shuffle_rng.uniform_int(i + 1)]);
      Rng dropout_rng(mix_seed(cfg_.seed, kSeedDropout, static_cast<std::uint64_t>(epoch)));

      double loss_sum = 0.0;
      for (std::int64_t step = 0; step < steps; ++step) {
        const std::int64_t begin = step * cfg_.batch;
        const std::int64_t size =
            std::min<std::int64_t>(cfg_.batch, train_count - begin);
        std::vector<data::Sample> batch(size);
        std::exception_ptr error = nullptr;
#pragma omp parallel for schedule(dynamic)
        for (std::int64_t i = 0; i < size; ++i) {
          try {
            const std::int64_t idx = order[begin + i];
            batch[i] = prepare_sample(
                data_.train.samples[idx],
                data::train_rotation(protocol.train, cfg_.seed, epoch, static_cast<int>(idx)),
                n_points_,
                mix_seed(mix_seed(cfg_.seed, kSeedSubTrain), static_cast<std::uint64_t>(epoch),
                         static_cast<std::uint64_t>(idx)));
          } catch (...) {
#pragma omp critical
            if (!error) error = std::current_exception();
          }
        }
        if (error) std::rethrow_exception(error);
        loss_sum += train_step(batch, parameters, adam, adam_cfg, dropout_rng);
      }

      const double val = evaluate(protocol.test);
      const double secs =
          std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
      report.epochs.push_back({epoch, loss_sum / static_cast<double>(steps), val, secs});
    }

    const double final_val = report.epochs.back().val_metric;
    report.finals.emplace_back("metric_" + protocol.str(), final_val);

    fs::create_directories(cfg_.out_dir);
    ad::Checkpoint ckpt;
    ckpt.metadata = cfg_.serialize();
    save_model(ckpt);
    for (std::size_t p = 0; p < parameters.size(); ++p) {
      ckpt.put("adam.m." + parameters[p]->name, adam.m[p]);
      ckpt.put("adam.v." + parameters[p]->name, adam.v[p]);
    }
    ckpt.put("adam.t", ad::Tensor<double>::scalar(static_cast<double>(adam.t)));

    TrainOutcome outcome;
    outcome.checkpoint_path = (fs::path(cfg_.out_dir) / "checkpoint.bin").string();
    outcome.report_path = (fs::path(cfg_.out_dir) / "report.csv").string();
    save_checkpoint(ckpt, outcome.checkpoint_path);
    report.to_csv().write(outcome.report_path);
    outcome.report = std::move(report);
    outcome.final_val_metric = final_val;
    return outcome;
  }

  double evaluate(data::Aug test_aug) {
    const std::int64_t count = static_cast<std::int64_t>(data_.test.samples.size());
    double correct = 0.0, total = 0.0;
    for (std::int64_t begin = 0; begin < count; begin += cfg_.batch) {
      const std::int64_t size = std::min<std::int64_t>(cfg_.batch, count - begin);
      std::vector<data::Sample> batch(size);
      std::exception_ptr error = nullptr;
#pragma omp parallel for schedule(dynamic)
      for (std::int64_t i = 0; i < size; ++i) {
        try {
          const std::int64_t idx = begin + i;
          batch[i] = prepare_sample(
              data_.test.samples[idx],
              data::test_rotation(test_aug, cfg_.seed, static_cast<int>(idx)), n_points_,
              mix_seed(mix_seed(cfg_.seed, kSeedSubTest), static_cast<std::uint64_t>(idx)));
        } catch (...) {
#pragma omp critical
          if (!error) error = std::current_exception();
        }
      }
      if (error) std::rethrow_exception(error);
      accumulate_accuracy(batch, correct, total);
    }
    return correct / total;
  }

  /// Prediction agreement between test sample 0 and `rotations` random
  /// rotations of it, with geometry rebuilt from scratch each time.
  double agreement(int rotations) {
    check_arg(classifier_ != nullptr, "agreement audit targets the classifier");
    const data::Sample base = prepare_sample(data_.test.samples[0], Eigen::Matrix3d::Identity(),
                                             n_points_, mix_seed(cfg_.seed, kSeedSubTest));
    const std::int32_t reference = predict_single(base.cloud);
    int agree = 0;
    for (int r = 0; r < rotations; ++r) {
      const Eigen::Matrix3d rot =
          cloud::random_rotation(mix_seed(cfg_.seed, kSeedAgree, static_cast<std::uint64_t>(r)));
      if (predict_single(cloud::rotate(base.cloud, rot)) == reference) ++agree;
    }
    return static_cast<double>(agree) / rotations;
  }

 private:
  double train_step(const std::vector<data::Sample>& batch,
                    const std::vector<ad::NodeP<T>>& parameters, ad::AdamState<T>& adam,
                    const ad::AdamConfig& adam_cfg, Rng& dropout_rng) {
    std::vector<cloud::PointCloud> clouds;
    clouds.reserve(batch.size());
    for (const auto& s : batch) {
      models::check_network_input(s.cloud);
      clouds.push_back(s.cloud);
    }
    std::vector<std::vector<std::int32_t>> perms;
    auto geom = models::make_batch_geometry<T>(clouds, spec_, {}, &perms);

    ad::NodeP<T> logits;
    std::vector<std::int32_t> labels;
    if (classifier_) {
      logits = classifier_->forward(geom, true, &dropout_rng);
      for (const auto& s : batch) labels.push_back(s.label);
    } else {
      logits = segmenter_->forward(geom, true, &dropout_rng);
      for (std::size_t b = 0; b < batch.size(); ++b)
        for (int i = 0; i < n_points_; ++i)
          labels.push_back(batch[b].point_labels[perms[b][i]]);
    }
    auto loss = ad::softmax_cross_entropy(logits, std::move(labels));
    ad::zero_grad(parameters);
    ad::backward(loss);
    ad::adam_step(parameters, adam, adam_cfg);
    return static_cast<double>(loss->value.v[0]);
  }

  void accumulate_accuracy(const std::vector<data::Sample>& batch, double& correct,
                           double& total) {
    std::vector<cloud::PointCloud> clouds;
    clouds.reserve(batch.size());
    for (const auto& s : batch) {
      models::check_network_input(s.cloud);
      clouds.push_back(s.cloud);
    }
    std::vector<std::vector<std::int32_t>> perms;
    auto geom = models::make_batch_geometry<T>(clouds, spec_, {}, &perms);
    if (classifier_) {
      auto logits = classifier_->forward(geom, false);
      const std::int64_t classes = logits->value.shape.back();
      for (std::size_t b = 0; b < batch.size(); ++b) {
        const T* row = logits->value.data() + b * classes;
        std::int64_t arg = 0;
        for (std::int64_t c = 1; c < classes; ++c)
          if (row[c] > row[arg]) arg = c;
        correct += arg == batch[b].label ? 1.0 : 0.0;
        total += 1.0;
      }
    } else {
      auto logits = segmenter_->forward(geom, false);
      const std::int64_t labels_dim = logits->value.shape.back();
      for (std::size_t b = 0; b < batch.size(); ++b)
        for (int i = 0; i < n_points_; ++i) {
          const T* row = logits->value.data() + (b * n_points_ + i) * labels_dim;
          std::int64_t arg = 0;
          for (std::int64_t c = 1; c < labels_dim; ++c)
            if (row[c] > row[arg]) arg = c;
          correct += arg == batch[b].point_labels[perms[b][i]] ? 1.0 : 0.0;
          total += 1.0;
        }
    }
  }

  std::int32_t predict_single(const cloud::PointCloud& cloud) {
    std::vector<cloud::PointCloud> clouds{cloud};
    auto geom = models::make_batch_geometry<T>(clouds, spec_, {});
    auto logits = classifier_->forward(geom, false);
    const std::int64_t classes = logits->value.shape.back();
    std::int64_t arg = 0;
    for (std::int64_t c = 1; c < classes; ++c)
      if (logits->value.v[c] > logits->value.v[arg]) arg = c;
    return static_cast<std::int32_t>(arg);
  }

  ExperimentConfig cfg_;
  std::unique_ptr<models::Classifier<T>> classifier_;
  std::unique_ptr<models::Segmenter<T>> segmenter_;
  models::GeometrySpec spec_;
  int n_points_ = 0;
  SplitData data_;
};

template <class F>
auto dispatch_precision(const std::string& precision, F&& f) {
  if (precision == "double") return f(double{});
  return f(float{});
}

}  // namespace

TrainOutcome run_training(const ExperimentConfig& config) {
  return dispatch_precision(config.precision, [&](auto tag) {
    Engine<decltype(tag)> engine(config);
    return engine.train();
  });
}

ExperimentConfig checkpoint_config(const std::string& checkpoint_path) {
  return ExperimentConfig::parse(ad::load_checkpoint(checkpoint_path).metadata);
}

double evaluate_checkpoint(const std::string& checkpoint_path, data::Aug test_aug) {
  const ad::Checkpoint ckpt = ad::load_checkpoint(checkpoint_path);
  const ExperimentConfig cfg = ExperimentConfig::parse(ckpt.metadata);
  return dispatch_precision(cfg.precision, [&](auto tag) {
    Engine<decltype(tag)> engine(cfg);
    engine.load_model(ckpt);
    return engine.evaluate(test_aug);
  });
}

util::CsvTable eval_grid(const std::vector<std::string>& checkpoint_paths) {
  util::CsvTable table;
  table.header = {"cell", "metric", "checkpoint"};
  for (const auto& path : checkpoint_paths) {
    const ExperimentConfig cfg = checkpoint_config(path);
    const char train_tag = cfg.parsed_protocol().train == data::Aug::kOriginal ? 'O' : 'A';
    for (data::Aug aug : {data::Aug::kOriginal, data::Aug::kAugmented}) {
      const double metric = evaluate_checkpoint(path, aug);
      std::string cell{train_tag};
      cell += '/';
      cell += aug == data::Aug::kOriginal ? 'O' : 'A';
      table.rows.push_back({cell, util::format_double(metric), path});
    }
  }
  return table;
}

double rotation_agreement(const std::string& checkpoint_path, int rotations) {
  const ad::Checkpoint ckpt = ad::load_checkpoint(checkpoint_path);
  const ExperimentConfig cfg = ExperimentConfig::parse(ckpt.metadata);
  return dispatch_precision(cfg.precision, [&](auto tag) {
    Engine<decltype(tag)> engine(cfg);
    engine.load_model(ckpt);
    return engine.agreement(rotations);
  });
}

util::CsvTable run_rho_sweep(const ExperimentConfig& base, const std::vector<double>& rhos) {
  check_arg(!rhos.empty(), "rho sweep: need at least one scale");
  util::CsvTable table;
  table.comments.push_back("schema = rho_sweep_v1");
  table.header = {"rho", "O/O", "A/O", "O/A", "A/A"};

  for (double rho : rhos) {
    std::vector<std::string> cells(4);
    for (const char train_tag : {'O', 'A'}) {
      ExperimentConfig cfg = base;
      if (cfg.task == "classify") cfg.classifier.rho = rho;
      else cfg.segmenter.rho = rho;
      cfg.protocol = std::string{train_tag} + "/O";
      cfg.out_dir = base.out_dir + "/rho_" + util::format_double(rho) + "_" + train_tag;
      const TrainOutcome outcome = run_training(cfg);
      const double on_o = outcome.final_val_metric;  // X/O cell
      const double on_a = evaluate_checkpoint(outcome.checkpoint_path, data::Aug::kAugmented);
      if (train_tag == 'O') {
        cells[0] = util::format_double(on_o);
        cells[2] = util::format_double(on_a);
      } else {
        cells[1] = util::format_double(on_o);
        cells[3] = util::format_double(on_a);
      }
    }
    table.rows.push_back(
        {util::format_double(rho), cells[0], cells[1], cells[2], cells[3]});
  }
  return table;
}

}  // namespace sphnet::train

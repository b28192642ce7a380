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

#include "sphnet/train/audit.hpp"

#include "sphnet/models/classifier.hpp"
#include "sphnet/models/segmenter.hpp"
#include "sphnet/sph/wigner.hpp"

namespace sphnet::train {

namespace {

constexpr std::uint64_t kSeedAuditCloud = 0x617564697463ull;
constexpr std::uint64_t kSeedAuditRot = 0x61756469747200ull;

cloud::PointCloud random_cloud(Rng& rng, std::int64_t n) {
  cloud::Points pts(n, 3);
  for (std::int64_t i = 0; i < n; ++i)
    pts.row(i) = Eigen::RowVector3d(rng.normal(), rng.normal(), rng.normal());
  return cloud::normalize(cloud::PointCloud{std::move(pts)});
}

double max_rel_dev(const std::vector<double>& a, const std::vector<double>& b) {
  double scale = 0.0;
  for (double x : b) scale = std::max(scale, std::abs(x));
  double dev = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) dev = std::max(dev, std::abs(a[i] - b[i]));
  return scale > 0.0 ? dev / scale : dev;
}

template <class T>
std::vector<double> to_doubles(const ad::Tensor<T>& t) {
  return std::vector<double>(t.v.begin(), t.v.end());
}

template <class T, class Model>
void shared_plan_deviation(Model& model, const ExperimentConfig& cfg, int trials,
                           InvarianceReport& report) {
  const auto spec = model.geometry_spec();
  const int n = cfg.model_points();
  std::map<std::string, double> worst;

  for (int trial = 0; trial < trials; ++trial) {
    Rng rng(mix_seed(cfg.seed, kSeedAuditCloud, static_cast<std::uint64_t>(trial)));
    const cloud::PointCloud x = random_cloud(rng, n);
    const models::SamplePlan plan = models::make_sample_plan(x, spec);
    const models::SamplePlan* plan_ptr[] = {&plan};

    const Eigen::Matrix3d rot =
        cloud::random_rotation(mix_seed(cfg.seed, kSeedAuditRot, static_cast<std::uint64_t>(trial)));
    const cloud::PointCloud rx = cloud::rotate(x, rot);

    std::vector<cloud::PointCloud> base{x}, rotated{rx};
    auto geom_x = models::make_batch_geometry<T>(base, spec, plan_ptr);
    auto geom_rx = models::make_batch_geometry<T>(rotated, spec, plan_ptr);

    models::ActivationLog<T> log_x, log_rx;
    (void)model.forward(geom_x, false, nullptr, &log_x);
    (void)model.forward(geom_rx, false, nullptr, &log_rx);
    for (std::size_t l = 0; l < log_x.size(); ++l) {
      const double dev =
          max_rel_dev(to_doubles(log_rx[l].second->value), to_doubles(log_x[l].second->value));
      auto [it, inserted] = worst.emplace(log_x[l].first, dev);
      if (!inserted) it->second = std::max(it->second, dev);
    }
  }
  for (const auto& [name, dev] : worst) {
    report.layer_deviation.emplace_back(name, dev);
    report.max_layer_deviation = std::max(report.max_layer_deviation, dev);
  }
}

/// First-layer raw features against the Wigner prediction, double precision.
double wigner_residual(const ExperimentConfig& cfg) {
  const auto variant = models::parse_variant(cfg.variant);
  ExperimentConfig dbl = cfg;
  dbl.precision = "double";

  double residual = 0.0;
  const int trials = 3;
  for (int trial = 0; trial < trials; ++trial) {
    Rng rng(mix_seed(dbl.seed, kSeedAuditCloud, 1000 + static_cast<std::uint64_t>(trial)));
    const int n = dbl.model_points();
    const cloud::PointCloud x = random_cloud(rng, n);
    const Eigen::Matrix3d rot = cloud::random_rotation(
        mix_seed(dbl.seed, kSeedAuditRot, 1000 + static_cast<std::uint64_t>(trial)));
    const cloud::PointCloud rx = cloud::rotate(x, rot);

    models::ActivationLog<double> raw_x, raw_rx;
    if (dbl.task == "classify") {
      models::Classifier<double> model(dbl.classifier, variant, mix_seed(dbl.seed, 7));
      const auto spec = model.geometry_spec();
      const models::SamplePlan plan = models::make_sample_plan(x, spec);
      const models::SamplePlan* plan_ptr[] = {&plan};
      std::vector<cloud::PointCloud> base{x}, rotated{rx};
      auto geom_x = models::make_batch_geometry<double>(base, spec, plan_ptr);
      auto geom_rx = models::make_batch_geometry<double>(rotated, spec, plan_ptr);
      (void)model.forward(geom_x, false, nullptr, nullptr, &raw_x);
      (void)model.forward(geom_rx, false, nullptr, nullptr, &raw_rx);
    } else {
      models::Segmenter<double> model(dbl.segmenter, variant, mix_seed(dbl.seed, 7));
      const auto spec = model.geometry_spec();
      const models::SamplePlan plan = models::make_sample_plan(x, spec);
      const models::SamplePlan* plan_ptr[] = {&plan};
      std::vector<cloud::PointCloud> base{x}, rotated{rx};
      auto geom_x = models::make_batch_geometry<double>(base, spec, plan_ptr);
      auto geom_rx = models::make_batch_geometry<double>(rotated, spec, plan_ptr);
      (void)model.forward(geom_x, false, nullptr, nullptr, &raw_x);
      (void)model.forward(geom_rx, false, nullptr, nullptr, &raw_rx);
    }

    // Layer 0 raw tensor: [1, N, J, n_R * angular], f constant, so the
    // rotated raw must equal the block-rotated original.
    const auto& a = raw_x[0].second->value;   // original
    const auto& b = raw_rx[0].second->value;  // rotated
    const int n_degrees = dbl.task == "classify" ? dbl.classifier.n_degrees : dbl.segmenter.n_degrees;
    const int n_radial = dbl.task == "classify" ? dbl.classifier.n_radial : dbl.segmenter.n_radial;
    const std::int64_t angular = static_cast<std::int64_t>(n_degrees) * n_degrees;
    const std::int64_t rows = a.numel() / (n_radial * angular);

    std::vector<Eigen::MatrixXd> blocks;
    for (int l = 0; l < n_degrees; ++l) blocks.push_back(sph::wigner_d(l, rot).D);

    for (std::int64_t row = 0; row < rows; ++row)
      for (int r = 0; r < n_radial; ++r) {
        const double* pa = a.data() + (row * n_radial + r) * angular;
        const double* pb = b.data() + (row * n_radial + r) * angular;
        for (int l = 0; l < n_degrees; ++l) {
          const int d = 2 * l + 1;
          Eigen::Map<const Eigen::VectorXd> va(pa + l * l, d);
          Eigen::Map<const Eigen::VectorXd> vb(pb + l * l, d);
          residual = std::max(residual, (vb - blocks[l] * va).cwiseAbs().maxCoeff());
        }
      }
  }
  return residual;
}

template <class T>
InvarianceReport run_audit(const ExperimentConfig& cfg, int trials, int agreement_rotations) {
  InvarianceReport report;
  const auto variant = models::parse_variant(cfg.variant);

  if (cfg.task == "classify") {
    models::Classifier<T> model(cfg.classifier, variant, mix_seed(cfg.seed, 7));
    shared_plan_deviation<T>(model, cfg, trials, report);

    // (b) end-to-end agreement with rebuilt trees.
    Rng rng(mix_seed(cfg.seed, kSeedAuditCloud, 99));
    const cloud::PointCloud base = random_cloud(rng, cfg.classifier.n_points);
    const auto spec = model.geometry_spec();
    auto predict = [&](const cloud::PointCloud& c) {
      std::vector<cloud::PointCloud> clouds{c};
      auto geom = models::make_batch_geometry<T>(clouds, spec);
      auto logits = model.forward(geom, false);
      std::int64_t arg = 0;
      for (std::int64_t i = 1; i < logits->value.numel(); ++i)
        if (logits->value.v[i] > logits->value.v[arg]) arg = i;
      return arg;
    };
    const std::int64_t reference = predict(base);
    int agree = 0;
    for (int r = 0; r < agreement_rotations; ++r) {
      const Eigen::Matrix3d rot = cloud::random_rotation(
          mix_seed(cfg.seed, kSeedAuditRot, 5000 + static_cast<std::uint64_t>(r)));
      if (predict(cloud::rotate(base, rot)) == reference) ++agree;
    }
    report.prediction_agreement =
        agreement_rotations > 0 ? static_cast<double>(agree) / agreement_rotations : 1.0;
  } else {
    models::Segmenter<T> model(cfg.segmenter, variant, mix_seed(cfg.seed, 7));
    shared_plan_deviation<T>(model, cfg, trials, report);
    report.prediction_agreement = 1.0;
  }

  report.wigner_residual = wigner_residual(cfg);
  return report;
}

}  // namespace

util::CsvTable InvarianceReport::to_csv() const {
  util::CsvTable table;
  table.comments.push_back("schema = invariance_report_v1");
  table.header = {"measure", "value"};
  for (const auto& [name, dev] : layer_deviation)
    table.rows.push_back({"layer_dev." + name, util::format_double(dev)});
  table.rows.push_back({"max_layer_deviation", util::format_double(max_layer_deviation)});
  table.rows.push_back({"prediction_agreement", util::format_double(prediction_agreement)});
  table.rows.push_back({"wigner_residual", util::format_double(wigner_residual)});
  return table;
}

InvarianceReport run_invariance_audit(const ExperimentConfig& config, int trials,
                                      int agreement_rotations) {
  config.validate();
  if (config.precision == "double")
    return run_audit<double>(config, trials, agreement_rotations);
  return run_audit<float>(config, trials, agreement_rotations);
}

}  // namespace sphnet::train

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

#include "sphnet/ad/ops.hpp"
#include "sphnet/cloud/rotation.hpp"
#include "sphnet/models/classifier.hpp"
#include "sphnet/models/segmenter.hpp"

using namespace sphnet;
using namespace sphnet::models;

namespace {

cloud::PointCloud random_cloud(Rng& rng, std::int64_t n) {
  cloud::Points pts(n, 3);
  for (std::int64_t i = 0; i < n; ++i)
    pts.row(i) = Eigen::RowVector3d(rng.normal(), rng.normal(), rng.normal());
  return cloud::normalize(cloud::PointCloud{std::move(pts)});
}

ClassifierConfig small_classifier() {
  ClassifierConfig cfg;
  cfg.n_points = 128;
  cfg.channels = {8, 16, 24};
  cfg.pool_factors = {4, 4};
  cfg.fc = {16, 8};
  cfg.k = 12;
  cfg.classes = 5;
  return cfg;
}

SegmenterConfig small_segmenter() {
  SegmenterConfig cfg;
  cfg.n_points = 256;
  cfg.encoder_channels = {8, 12, 16};
  cfg.pool_factors = {4, 4, 8};
  cfg.k = 10;
  cfg.labels = 3;
  return cfg;
}

}  // namespace

TEST_CASE("classifier geometry spec mirrors the pooling schedule") {
  ClassifierConfig cfg;  // reference defaults: 1024 points, pools 4 and 4
  const Classifier<float> model(cfg, Variant::kSphNet, 1);
  const auto spec = model.geometry_spec();
  CHECK(spec.level_sizes == std::vector<std::int64_t>{1024, 256, 64});
  CHECK(spec.level_k == std::vector<int>{64, 64, 64});

  ClassifierConfig tiny = small_classifier();
  const Classifier<float> small(tiny, Variant::kSphNet, 1);
  CHECK(small.geometry_spec().level_sizes == std::vector<std::int64_t>{128, 32, 8});
  CHECK(small.geometry_spec().level_k == std::vector<int>{12, 12, 8});  // clamped at depth
}

TEST_CASE("classifier probabilities sum to one and are seed-deterministic") {
  const ClassifierConfig cfg = small_classifier();
  Classifier<float> model(cfg, Variant::kSphNet, 42);
  Rng rng(7);
  std::vector<cloud::PointCloud> clouds{random_cloud(rng, cfg.n_points),
                                        random_cloud(rng, cfg.n_points)};
  auto geom = make_batch_geometry<float>(clouds, model.geometry_spec());
  auto logits = model.forward(geom, false);
  CHECK(logits->value.shape == ad::Shape{2, 5});
  auto probs = ad::softmax_last(logits);
  for (int b = 0; b < 2; ++b) {
    float sum = 0.f;
    for (int c = 0; c < 5; ++c) sum += probs->value.v[b * 5 + c];
    CHECK(sum == doctest::Approx(1.0f).epsilon(1e-6));
  }

  // A fresh model with the same seed reproduces the logits bit for bit.
  Classifier<float> twin(cfg, Variant::kSphNet, 42);
  auto geom2 = make_batch_geometry<float>(clouds, twin.geometry_spec());
  auto logits2 = twin.forward(geom2, false);
  for (std::size_t i = 0; i < logits->value.v.size(); ++i)
    CHECK(logits->value.v[i] == logits2->value.v[i]);
}

TEST_CASE("forward rejects wrong point counts and unnormalized input") {
  const ClassifierConfig cfg = small_classifier();
  Classifier<float> model(cfg, Variant::kSphNet, 1);
  Rng rng(11);
  std::vector<cloud::PointCloud> wrong{random_cloud(rng, 64)};
  CHECK_THROWS_AS(make_batch_geometry<float>(wrong, model.geometry_spec()),
                  std::invalid_argument);

  cloud::PointCloud big = random_cloud(rng, cfg.n_points);
  big.pts *= 50.0;  // unnormalized
  CHECK_THROWS_AS(check_network_input(big), std::invalid_argument);
}

TEST_CASE("classifier is rotation invariant in shared-plan mode") {
  const ClassifierConfig cfg = small_classifier();
  Classifier<float> model(cfg, Variant::kSphNet, 3);
  Rng rng(13);
  const auto spec = model.geometry_spec();

  const cloud::PointCloud x = random_cloud(rng, cfg.n_points);
  const SamplePlan plan = make_sample_plan(x, spec);
  const SamplePlan* plans[] = {&plan};

  const Eigen::Matrix3d rot = cloud::random_rotation(rng);
  std::vector<cloud::PointCloud> cx{x}, crx{cloud::rotate(x, rot)};
  auto gx = make_batch_geometry<float>(cx, spec, plans);
  auto grx = make_batch_geometry<float>(crx, spec, plans);

  ActivationLog<float> log_x, log_rx;
  auto lx = model.forward(gx, false, nullptr, &log_x);
  auto lrx = model.forward(grx, false, nullptr, &log_rx);

  // Logits within 1e-3 relative in single precision.
  float scale = 0.f, dev = 0.f;
  for (std::size_t i = 0; i < lx->value.v.size(); ++i) {
    scale = std::max(scale, std::abs(lx->value.v[i]));
    dev = std::max(dev, std::abs(lx->value.v[i] - lrx->value.v[i]));
  }
  CHECK(dev / scale < 1e-3);

  // Every intermediate activation is invariant at single-precision tolerance.
  REQUIRE(log_x.size() == log_rx.size());
  for (std::size_t l = 0; l < log_x.size(); ++l) {
    float lscale = 0.f, ldev = 0.f;
    const auto& a = log_x[l].second->value.v;
    const auto& b = log_rx[l].second->value.v;
    for (std::size_t i = 0; i < a.size(); ++i) {
      lscale = std::max(lscale, std::abs(a[i]));
      ldev = std::max(ldev, std::abs(a[i] - b[i]));
    }
    CHECK(ldev / lscale < 1e-4);
  }
}

TEST_CASE("ablation classifier is not rotation invariant") {
  const ClassifierConfig cfg = small_classifier();
  Classifier<float> model(cfg, Variant::kSphBase, 3);
  Rng rng(17);
  const auto spec = model.geometry_spec();
  const cloud::PointCloud x = random_cloud(rng, cfg.n_points);
  const SamplePlan plan = make_sample_plan(x, spec);
  const SamplePlan* plans[] = {&plan};
  const Eigen::Matrix3d rot = cloud::random_rotation(rng);
  std::vector<cloud::PointCloud> cx{x}, crx{cloud::rotate(x, rot)};
  auto gx = make_batch_geometry<float>(cx, spec, plans);
  auto grx = make_batch_geometry<float>(crx, spec, plans);
  ActivationLog<float> log_x, log_rx;
  (void)model.forward(gx, false, nullptr, &log_x);
  (void)model.forward(grx, false, nullptr, &log_rx);
  float scale = 0.f, dev = 0.f;
  const auto& a = log_x[0].second->value.v;
  const auto& b = log_rx[0].second->value.v;
  for (std::size_t i = 0; i < a.size(); ++i) {
    scale = std::max(scale, std::abs(a[i]));
    dev = std::max(dev, std::abs(a[i] - b[i]));
  }
  CHECK(dev / scale > 1e-2);
}

TEST_CASE("segmenter emits per-point distributions at input resolution") {
  const SegmenterConfig cfg = small_segmenter();
  Segmenter<float> model(cfg, Variant::kSphNet, 5);
  Rng rng(19);
  std::vector<cloud::PointCloud> clouds{random_cloud(rng, cfg.n_points)};
  auto geom = make_batch_geometry<float>(clouds, model.geometry_spec());
  auto logits = model.forward(geom, false);
  CHECK(logits->value.shape == ad::Shape{1, cfg.n_points, cfg.labels});
  auto probs = ad::softmax_last(logits);
  for (int i = 0; i < cfg.n_points; ++i) {
    float sum = 0.f;
    for (int c = 0; c < cfg.labels; ++c) sum += probs->value.v[i * cfg.labels + c];
    CHECK(sum == doctest::Approx(1.0f).epsilon(1e-6));
  }
}

TEST_CASE("segmenter decoder inputs concatenate upsampled features with skips") {
  const SegmenterConfig cfg = small_segmenter();
  Segmenter<float> model(cfg, Variant::kSphNet, 7);
  Rng rng(23);
  std::vector<cloud::PointCloud> clouds{random_cloud(rng, cfg.n_points)};
  auto geom = make_batch_geometry<float>(clouds, model.geometry_spec());
  ActivationLog<float> log;
  (void)model.forward(geom, false, nullptr, &log);

  auto find = [&](const std::string& name) -> ad::NodeP<float> {
    for (const auto& [n, node] : log)
      if (n == name) return node;
    REQUIRE(false);
    return nullptr;
  };

  const auto enc2 = find("enc2");
  const auto bottleneck = find("bottleneck");
  const auto dec0_input = find("dec0.input");
  auto expected =
      ad::concat<float>({layers::upsample_repeat(ad::make_const(bottleneck->value),
                                                 cfg.pool_factors[2]),
                         ad::make_const(enc2->value)},
                        2);
  REQUIRE(expected->value.shape == dec0_input->value.shape);
  for (std::size_t i = 0; i < expected->value.v.size(); ++i)
    CHECK(expected->value.v[i] == dec0_input->value.v[i]);
}

TEST_CASE("segmenter per-point predictions agree across rotations") {
  const SegmenterConfig cfg = small_segmenter();
  Segmenter<float> model(cfg, Variant::kSphNet, 9);
  Rng rng(29);
  const auto spec = model.geometry_spec();
  const cloud::PointCloud x = random_cloud(rng, cfg.n_points);

  auto predict = [&](const cloud::PointCloud& c) {
    std::vector<cloud::PointCloud> clouds{c};
    std::vector<std::vector<std::int32_t>> perms;
    auto geom = make_batch_geometry<float>(clouds, spec, {}, &perms);
    auto logits = model.forward(geom, false);
    // Labels in original point order: undo the kd leaf permutation.
    std::vector<int> labels(cfg.n_points);
    for (int i = 0; i < cfg.n_points; ++i) {
      const float* row = logits->value.data() + i * cfg.labels;
      int arg = 0;
      for (int c2 = 1; c2 < cfg.labels; ++c2)
        if (row[c2] > row[arg]) arg = c2;
      labels[perms[0][i]] = arg;
    }
    return labels;
  };

  const auto base = predict(x);
  double agree_sum = 0.0;
  const int rotations = 20;
  for (int r = 0; r < rotations; ++r) {
    const auto rotated = predict(cloud::rotate(x, cloud::random_rotation(rng)));
    int agree = 0;
    for (int i = 0; i < cfg.n_points; ++i) agree += rotated[i] == base[i];
    agree_sum += static_cast<double>(agree) / cfg.n_points;
  }
  CHECK(agree_sum / rotations >= 0.90);
}

TEST_CASE("parameter counts: closed-form arithmetic matches instantiations") {
  CHECK(conv_param_count(64, 1, 2, 4, true) == 576);
  CHECK(conv_param_count(64, 1, 2, 4, false) == 2112);
  CHECK(conv_param_count(128, 1, 2, 4, true) == 2 * conv_param_count(64, 1, 2, 4, true));

  const ClassifierConfig cls = small_classifier();
  for (Variant v : {Variant::kSphNet, Variant::kSphBase}) {
    const Classifier<float> model(cls, v, 1);
    CHECK(model.param_count() == count_params(cls, v));
  }
  const SegmenterConfig seg = small_segmenter();
  for (Variant v : {Variant::kSphNet, Variant::kSphBase}) {
    const Segmenter<float> model(seg, v, 1);
    CHECK(model.param_count() == count_params(seg, v));
  }

  // Reference operating point, for the record.
  ClassifierConfig paper;
  paper.classes = 40;
  CHECK(count_params(paper, Variant::kSphNet) ==
        Classifier<float>(paper, Variant::kSphNet, 1).param_count());
}

TEST_CASE("model configs round-trip through their serialization") {
  ClassifierConfig cls = small_classifier();
  cls.rho = 0.125;
  const auto cls2 = ClassifierConfig::parse(cls.serialize());
  CHECK(cls2.serialize() == cls.serialize());

  SegmenterConfig seg = small_segmenter();
  seg.k = 20;
  const auto seg2 = SegmenterConfig::parse(seg.serialize());
  CHECK(seg2.serialize() == seg.serialize());

  CHECK_THROWS_AS(ClassifierConfig::parse("model = segmenter\n"), std::invalid_argument);
}

TEST_CASE("checkpoint save/load restores a model exactly; mismatches are rejected") {
  const ClassifierConfig cfg = small_classifier();
  Classifier<float> model(cfg, Variant::kSphNet, 77);
  ad::Checkpoint ckpt;
  model.save(ckpt);

  Classifier<float> other(cfg, Variant::kSphNet, 78);
  other.load(ckpt);
  Rng rng(31);
  std::vector<cloud::PointCloud> clouds{random_cloud(rng, cfg.n_points)};
  auto ga = make_batch_geometry<float>(clouds, model.geometry_spec());
  auto gb = make_batch_geometry<float>(clouds, other.geometry_spec());
  auto la = model.forward(ga, false);
  auto lb = other.forward(gb, false);
  for (std::size_t i = 0; i < la->value.v.size(); ++i) CHECK(la->value.v[i] == lb->value.v[i]);

  ClassifierConfig bigger = cfg;
  bigger.channels = {16, 16, 16};
  Classifier<float> mismatched(bigger, Variant::kSphNet, 1);
  CHECK_THROWS_AS(mismatched.load(ckpt), std::invalid_argument);
}

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

#include <cstdio>
#include <filesystem>

#include "sphnet/ad/adam.hpp"
#include "sphnet/ad/checkpoint.hpp"
#include "sphnet/ad/gradcheck.hpp"
#include "sphnet/ad/ops.hpp"

using namespace sphnet;
using namespace sphnet::ad;

namespace {

Tensor<double> random_tensor(Rng& rng, Shape shape, double scale = 1.0) {
  Tensor<double> t = Tensor<double>::zeros(std::move(shape));
  for (auto& x : t.v) x = scale * rng.normal();
  return t;
}

void require_finite(const Tensor<double>& t) {
  for (double x : t.v) REQUIRE(std::isfinite(x));
}

}  // namespace

TEST_CASE("relu gradient routes only through positive entries") {
  auto x = make_param(Tensor<double>({2}, {-1.0, 2.0}));
  auto loss = sum_all(relu(x));
  backward(loss);
  CHECK(x->grad.v[0] == 0.0);
  CHECK(x->grad.v[1] == 1.0);
}

TEST_CASE("guarded L2 norm value and gradient") {
  auto x = make_param(Tensor<double>({2}, {3.0, 4.0}));
  auto n = l2_norm(x, 0);
  CHECK(n->value.v[0] == doctest::Approx(5.0).epsilon(1e-12));
  backward(n);
  CHECK(x->grad.v[0] == doctest::Approx(0.6).epsilon(1e-9));
  CHECK(x->grad.v[1] == doctest::Approx(0.8).epsilon(1e-9));
}

TEST_CASE("linear graph is exact under finite differences") {
  Rng rng(3);
  auto x = make_param(random_tensor(rng, {4, 3}));
  auto w = make_param(random_tensor(rng, {3, 2}));
  auto build = [&] { return sum_all(matmul(x, w)); };
  const NodeP<double> leaves[] = {x, w};
  // Linearity makes central differences exact; a large step sidesteps the
  // cancellation roundoff a tiny step would introduce.
  const auto report = grad_check(build, leaves, 1e-10, rng, 40, /*h=*/1e-2);
  CHECK(report.pass);
  CHECK(report.max_rel_err < 1e-10);
}

TEST_CASE("random composite graph passes finite differences at 1e-6") {
  Rng rng(5);
  auto x = make_param(random_tensor(rng, {3, 4}, 0.8));
  auto y = make_param(random_tensor(rng, {3, 4}, 0.8));
  auto w = make_param(random_tensor(rng, {4, 5}, 0.5));
  auto build = [&] {
    auto h = mul(relu(x), add(y, y));
    auto z = matmul(h, w);
    auto e = exp(scale(z, 0.3));
    return sum_all(l2_norm(e, 1));
  };
  const NodeP<double> leaves[] = {x, y, w};
  const auto report = grad_check(build, leaves, 1e-6, rng);
  CHECK(report.pass);
}

TEST_CASE("every op passes gradient checks on randomized shapes") {
  Rng rng(7);

  SUBCASE("add/mul/scale/sub") {
    auto a = make_param(random_tensor(rng, {2, 3, 2}));
    auto b = make_param(random_tensor(rng, {2, 3, 2}));
    auto build = [&] { return sum_all(mul(sub(add(a, b), scale(b, 0.5)), b)); };
    const NodeP<double> leaves[] = {a, b};
    CHECK(grad_check(build, leaves, 1e-5, rng).pass);
  }

  SUBCASE("matmul") {
    auto a = make_param(random_tensor(rng, {5, 4}));
    auto b = make_param(random_tensor(rng, {4, 6}));
    auto build = [&] { return sum_all(matmul(a, b)); };
    const NodeP<double> leaves[] = {a, b};
    CHECK(grad_check(build, leaves, 1e-5, rng).pass);
  }

  SUBCASE("reshape + broadcast") {
    auto a = make_param(random_tensor(rng, {6}));
    auto bias = make_param(random_tensor(rng, {3}));
    auto build = [&] {
      auto m = reshape(a, {2, 1, 3});
      auto wide = broadcast_to(m, {2, 4, 3});
      return sum_all(mul(wide, broadcast_to(bias, {2, 4, 3})));
    };
    const NodeP<double> leaves[] = {a, bias};
    CHECK(grad_check(build, leaves, 1e-5, rng).pass);
  }

  SUBCASE("concat") {
    auto a = make_param(random_tensor(rng, {2, 3}));
    auto b = make_param(random_tensor(rng, {2, 5}));
    auto build = [&] {
      auto c = concat<double>({a, b}, 1);
      return sum_all(mul(c, c));
    };
    const NodeP<double> leaves[] = {a, b};
    CHECK(grad_check(build, leaves, 1e-5, rng).pass);
  }

  SUBCASE("gather/scatter-add") {
    auto a = make_param(random_tensor(rng, {5, 3}));
    auto build = [&] {
      auto g = gather_rows(a, {4, 0, 0, 2});
      auto s = scatter_add_rows(g, {1, 1, 0, 2}, 3);
      return sum_all(mul(s, s));
    };
    CHECK(grad_check(build, a, 1e-5, rng).pass);
  }

  SUBCASE("reductions") {
    auto a = make_param(random_tensor(rng, {3, 4, 2}));
    auto build_sum = [&] { return sum_all(reduce_sum(a, 1)); };
    CHECK(grad_check(build_sum, a, 1e-5, rng).pass);
    auto build_max = [&] { return sum_all(mul(reduce_max(a, 1), reduce_max(a, 1))); };
    CHECK(grad_check(build_max, a, 1e-5, rng).pass);
    auto build_norm = [&] { return sum_all(l2_norm(a, 2)); };
    CHECK(grad_check(build_norm, a, 1e-5, rng).pass);
  }

  SUBCASE("segment norm") {
    auto a = make_param(random_tensor(rng, {3, 2, 9}));
    auto build = [&] {
      auto n = segment_l2_norm_last(a, {0, 1, 4, 9});
      return sum_all(mul(n, n));
    };
    CHECK(grad_check(build, a, 1e-5, rng).pass);
  }

  SUBCASE("softmax and fused cross-entropy") {
    auto a = make_param(random_tensor(rng, {4, 5}));
    auto build_sm = [&] {
      auto p = softmax_last(a);
      return sum_all(mul(p, p));
    };
    CHECK(grad_check(build_sm, a, 1e-5, rng).pass);
    std::vector<std::int32_t> labels{1, 0, 4, 2};
    auto build_ce = [&] { return softmax_cross_entropy(a, labels); };
    CHECK(grad_check(build_ce, a, 1e-6, rng).pass);
  }

  SUBCASE("dropout with a fixed mask") {
    auto a = make_param(random_tensor(rng, {4, 4}));
    auto mask = std::make_shared<Tensor<double>>(Tensor<double>::zeros(Shape{4, 4}));
    for (auto& m : mask->v) m = rng.uniform() < 0.5 ? 0.0 : 1.0;
    auto build = [&] { return sum_all(mul(dropout(a, mask, 0.5), a)); };
    CHECK(grad_check(build, a, 1e-5, rng).pass);
  }

  SUBCASE("batchnorm training mode") {
    auto x = make_param(random_tensor(rng, {6, 3}));
    auto gamma = make_param(random_tensor(rng, {3}, 0.5));
    auto beta = make_param(random_tensor(rng, {3}, 0.5));
    auto probe = make_const(random_tensor(rng, {6, 3}));
    auto build = [&] {
      auto y = batchnorm<double>(x, gamma, beta, nullptr, /*training=*/true);
      return sum_all(mul(y, probe));
    };
    const NodeP<double> leaves[] = {x, gamma, beta};
    CHECK(grad_check(build, leaves, 1e-5, rng).pass);
  }

  SUBCASE("batchnorm inference mode") {
    auto x = make_param(random_tensor(rng, {6, 3}));
    auto gamma = make_param(random_tensor(rng, {3}, 0.5));
    auto beta = make_param(random_tensor(rng, {3}, 0.5));
    BnStats<double> stats = BnStats<double>::init(3);
    for (auto& m : stats.mean.v) m = 0.3 * rng.normal();
    for (auto& v : stats.var.v) v = 1.0 + 0.2 * rng.uniform();
    auto build = [&] {
      auto y = batchnorm<double>(x, gamma, beta, &stats, /*training=*/false);
      return sum_all(mul(y, y));
    };
    const NodeP<double> leaves[] = {x, gamma, beta};
    CHECK(grad_check(build, leaves, 1e-5, rng).pass);
  }

  SUBCASE("patch conv") {
    const std::int64_t b = 2, n = 5, j = 3, q = 4;
    const int k = 2;
    auto patches = std::make_shared<BatchPatches>();
    patches->batch = b;
    patches->n = n;
    patches->k = k;
    patches->idx.resize(b * n * k);
    for (std::int64_t bi = 0; bi < b; ++bi)
      for (std::int64_t pt = 0; pt < n; ++pt) {
        patches->idx[(bi * n + pt) * k + 0] = static_cast<std::int32_t>(pt);
        patches->idx[(bi * n + pt) * k + 1] = static_cast<std::int32_t>((pt + 1) % n);
      }
    patches->inv_offsets.assign(b * n + 1, 0);
    for (std::int64_t bi = 0; bi < b; ++bi)
      for (std::int64_t pt = 0; pt < n; ++pt)
        for (int s = 0; s < k; ++s)
          ++patches->inv_offsets[bi * n + patches->idx[(bi * n + pt) * k + s] + 1];
    for (std::size_t i = 1; i < patches->inv_offsets.size(); ++i)
      patches->inv_offsets[i] += patches->inv_offsets[i - 1];
    patches->inv_entries.resize(b * n * k);
    {
      std::vector<std::int64_t> cur(patches->inv_offsets.begin(), patches->inv_offsets.end() - 1);
      for (std::int64_t bi = 0; bi < b; ++bi)
        for (std::int64_t pt = 0; pt < n; ++pt)
          for (int s = 0; s < k; ++s) {
            const std::int32_t tgt = patches->idx[(bi * n + pt) * k + s];
            patches->inv_entries[cur[bi * n + tgt]++] = {static_cast<std::int32_t>(pt),
                                                         static_cast<std::int32_t>(s)};
          }
    }
    auto kernel =
        std::make_shared<Tensor<double>>(random_tensor(rng, {b, n, k, q}, 0.7));
    auto f = make_param(random_tensor(rng, {b, n, j}));
    auto build = [&] {
      auto raw = patch_conv(f, kernel, patches);
      return sum_all(mul(raw, raw));
    };
    CHECK(grad_check(build, f, 1e-5, rng).pass);
  }
}

TEST_CASE("max reduction ties route to the lowest index") {
  auto x = make_param(Tensor<double>({3}, {1.0, 5.0, 5.0}));
  auto m = reduce_max(x, 0);
  backward(m);
  CHECK(x->grad.v[0] == 0.0);
  CHECK(x->grad.v[1] == 1.0);
  CHECK(x->grad.v[2] == 0.0);
}

TEST_CASE("batchnorm train and inference agree when statistics coincide") {
  Rng rng(11);
  auto x = make_param(random_tensor(rng, {8, 2}));
  auto gamma = make_param(Tensor<double>({2}, {1.3, 0.7}));
  auto beta = make_param(Tensor<double>({2}, {0.1, -0.2}));

  // Set the running statistics to exactly the batch statistics.
  BnStats<double> stats = BnStats<double>::init(2);
  for (int ch = 0; ch < 2; ++ch) {
    double mu = 0.0;
    for (int r = 0; r < 8; ++r) mu += x->value.v[r * 2 + ch];
    mu /= 8.0;
    double var = 0.0;
    for (int r = 0; r < 8; ++r) {
      const double d = x->value.v[r * 2 + ch] - mu;
      var += d * d;
    }
    stats.mean.v[ch] = mu;
    stats.var.v[ch] = var / 8.0;
  }

  auto train_out = batchnorm<double>(x, gamma, beta, nullptr, true);
  auto infer_out = batchnorm<double>(x, gamma, beta, &stats, false);
  for (std::size_t i = 0; i < train_out->value.v.size(); ++i)
    CHECK(train_out->value.v[i] == doctest::Approx(infer_out->value.v[i]).epsilon(1e-12));
  require_finite(train_out->value);
}

TEST_CASE("batchnorm updates running statistics with momentum") {
  auto x = make_param(Tensor<double>({4, 1}, {1.0, 2.0, 3.0, 4.0}));
  auto gamma = make_param(Tensor<double>({1}, {1.0}));
  auto beta = make_param(Tensor<double>({1}, {0.0}));
  BnStats<double> stats = BnStats<double>::init(1);
  batchnorm<double>(x, gamma, beta, &stats, true, 0.9);
  CHECK(stats.mean.v[0] == doctest::Approx(0.9 * 0.0 + 0.1 * 2.5));
  CHECK(stats.var.v[0] == doctest::Approx(0.9 * 1.0 + 0.1 * 1.25));
}

TEST_CASE("adam leaves parameters alone under zero gradients from a fresh state") {
  auto p = make_param(Tensor<double>({3}, {1.0, -2.0, 0.5}));
  const std::vector<NodeP<double>> params{p};
  AdamState<double> state = AdamState<double>::init(params);
  p->ensure_grad();  // all zeros
  adam_step(params, state, {});
  CHECK(p->value.v[0] == 1.0);
  CHECK(p->value.v[1] == -2.0);
  CHECK(p->value.v[2] == 0.5);
  CHECK(state.t == 1);
}

TEST_CASE("first adam step moves opposite the gradient sign") {
  auto p = make_param(Tensor<double>({2}, {0.0, 0.0}));
  const std::vector<NodeP<double>> params{p};
  AdamState<double> state = AdamState<double>::init(params);
  p->ensure_grad();
  p->grad.v = {0.4, -2.0};
  AdamConfig cfg;
  cfg.lr = 0.01;
  adam_step(params, state, cfg);
  // At t=1 the bias-corrected update is lr * g / (|g| + eps), a signed step.
  CHECK(p->value.v[0] == doctest::Approx(-0.01).epsilon(1e-6));
  CHECK(p->value.v[1] == doctest::Approx(0.01).epsilon(1e-6));
}

TEST_CASE("adam drives a quadratic bowl close to zero") {
  Rng rng(13);
  auto p = make_param(Tensor<double>::zeros({6}));
  Tensor<double> target = random_tensor(rng, {6}, 0.4);
  auto target_node = make_const(target);
  const std::vector<NodeP<double>> params{p};
  AdamState<double> state = AdamState<double>::init(params);
  AdamConfig cfg;
  cfg.lr = 0.01;

  std::vector<double> losses;
  for (int step = 0; step < 200; ++step) {
    zero_grad(params);
    auto diff = sub(p, target_node);
    auto loss = sum_all(mul(diff, diff));
    losses.push_back(loss->value.v[0]);
    backward(loss);
    adam_step(params, state, cfg);
  }
  // Monotone decrease after warm-up until the loss crosses 1e-3 of its
  // starting value (Adam dithers once essentially converged).
  const double threshold = 1e-3 * losses.front();
  std::size_t crossing = losses.size();
  for (std::size_t i = 0; i < losses.size(); ++i)
    if (losses[i] < threshold) {
      crossing = i;
      break;
    }
  REQUIRE(crossing < losses.size());
  for (std::size_t i = 20; i + 1 < crossing; ++i) CHECK(losses[i + 1] < losses[i]);
  CHECK(losses.back() < threshold);
}

TEST_CASE("shape mismatches are rejected") {
  auto a = make_param(Tensor<double>::zeros({2, 3}));
  auto b = make_param(Tensor<double>::zeros({3, 2}));
  CHECK_THROWS_AS(add(a, b), std::invalid_argument);
  CHECK_THROWS_AS(matmul(a, a), std::invalid_argument);
  CHECK_THROWS_AS(reshape(a, {7}), std::invalid_argument);
  CHECK_THROWS_AS(broadcast_to(a, {2, 4}), std::invalid_argument);
}

TEST_CASE("checkpoint container round-trips tensors and metadata") {
  Rng rng(17);
  Checkpoint out;
  out.metadata = "kind = test\nversion = 1\n";
  Tensor<double> a = random_tensor(rng, {3, 2});
  Tensor<float> b = random_tensor(rng, {4}).cast<float>();
  out.put("layer.weight", a);
  out.put("layer.bias", b);

  const std::string path =
      (std::filesystem::temp_directory_path() / "sphnet_ckpt_test.bin").string();
  save_checkpoint(out, path);
  const Checkpoint in = load_checkpoint(path);
  CHECK(in.metadata == out.metadata);
  REQUIRE(in.contains("layer.weight"));
  REQUIRE(in.contains("layer.bias"));
  const auto a2 = in.get<double>("layer.weight");
  CHECK(a2.shape == a.shape);
  for (std::size_t i = 0; i < a.v.size(); ++i) CHECK(a2.v[i] == a.v[i]);
  const auto b2 = in.get<float>("layer.bias");
  for (std::size_t i = 0; i < b.v.size(); ++i) CHECK(b2.v[i] == b.v[i]);
  // Cross-precision fetch converts.
  const auto b_as_double = in.get<double>("layer.bias");
  CHECK(b_as_double.v[0] == doctest::Approx(static_cast<double>(b.v[0])));
  std::filesystem::remove(path);

  CHECK_THROWS_AS(load_checkpoint("/nonexistent/sphnet.bin"), std::runtime_error);
}

TEST_CASE("float tensors drive the same graph machinery") {
  auto x = make_param(Tensor<float>({2, 2}, {1.f, -2.f, 3.f, 0.5f}));
  auto loss = sum_all(relu(x));
  backward(loss);
  CHECK(x->grad.v[0] == 1.f);
  CHECK(x->grad.v[1] == 0.f);
  CHECK(loss->value.v[0] == doctest::Approx(4.5f));
}

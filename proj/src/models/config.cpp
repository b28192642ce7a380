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

#include "sphnet/models/config.hpp"

#include "sphnet/common.hpp"
#include "sphnet/util/kv.hpp"

namespace sphnet::models {

using util::KvDoc;

std::string variant_name(Variant v) { return v == Variant::kSphNet ? "sphnet" : "sphbase"; }

Variant parse_variant(const std::string& name) {
  if (name == "sphnet") return Variant::kSphNet;
  if (name == "sphbase") return Variant::kSphBase;
  throw std::invalid_argument("unknown model variant: " + name);
}

namespace {

bool power_of_two(std::int64_t n) { return n > 0 && (n & (n - 1)) == 0; }

}  // namespace

void ClassifierConfig::validate() const {
  check_arg(power_of_two(n_points), "classifier: n_points must be a power of two");
  check_arg(channels.size() >= 1, "classifier: need at least one conv block");
  check_arg(pool_factors.size() + 1 == channels.size(),
            "classifier: one pool factor between consecutive conv blocks");
  std::int64_t n = n_points;
  for (int f : pool_factors) {
    check_arg(f >= 2 && power_of_two(f), "classifier: pool factors must be powers of two >= 2");
    check_arg(n % f == 0, "classifier: pool factor does not divide point count");
    n /= f;
  }
  check_arg(k >= 1 && k <= n_points, "classifier: k out of range");
  check_arg(rho > 0.0, "classifier: rho must be positive");
  check_arg(n_degrees >= 1 && n_radial >= 1, "classifier: basis sizes must be positive");
  check_arg(classes >= 2, "classifier: need at least two classes");
  check_arg(dropout >= 0.0 && dropout < 1.0, "classifier: dropout must be in [0, 1)");
}

std::string ClassifierConfig::serialize() const {
  KvDoc doc;
  doc.set("model", "classifier");
  doc.set("model_version", "1");
  doc.set_int("n_points", n_points);
  doc.set("channels", util::format_int_list(channels));
  doc.set("pool_factors", util::format_int_list(pool_factors));
  doc.set("fc", util::format_int_list(fc));
  doc.set_double("dropout", dropout);
  doc.set_int("k", k);
  doc.set_double("rho", rho);
  doc.set_int("n_degrees", n_degrees);
  doc.set_int("n_radial", n_radial);
  doc.set_int("classes", classes);
  return doc.format();
}

ClassifierConfig ClassifierConfig::parse(const std::string& text) {
  const KvDoc doc = KvDoc::parse(text);
  check_arg(doc.get_or("model", "classifier") == "classifier",
            "classifier config: wrong model kind");
  ClassifierConfig cfg;
  cfg.n_points = static_cast<int>(doc.get_int_or("n_points", cfg.n_points));
  if (doc.has("channels")) cfg.channels = util::parse_int_list(doc.get("channels"));
  if (doc.has("pool_factors")) cfg.pool_factors = util::parse_int_list(doc.get("pool_factors"));
  if (doc.has("fc")) cfg.fc = util::parse_int_list(doc.get("fc"));
  cfg.dropout = doc.get_double_or("dropout", cfg.dropout);
  cfg.k = static_cast<int>(doc.get_int_or("k", cfg.k));
  cfg.rho = doc.get_double_or("rho", cfg.rho);
  cfg.n_degrees = static_cast<int>(doc.get_int_or("n_degrees", cfg.n_degrees));
  cfg.n_radial = static_cast<int>(doc.get_int_or("n_radial", cfg.n_radial));
  cfg.classes = static_cast<int>(doc.get_int_or("classes", cfg.classes));
  cfg.validate();
  return cfg;
}

void SegmenterConfig::validate() const {
  check_arg(power_of_two(n_points), "segmenter: n_points must be a power of two");
  check_arg(encoder_channels.size() == 3, "segmenter: expected three encoder blocks");
  check_arg(pool_factors.size() == 3, "segmenter: expected three pool factors");
  std::int64_t n = n_points;
  for (int f : pool_factors) {
    check_arg(f >= 2 && power_of_two(f), "segmenter: pool factors must be powers of two >= 2");
    check_arg(n % f == 0, "segmenter: pool factor does not divide point count");
    n /= f;
  }
  check_arg(n >= 1, "segmenter: pooled away all points");
  check_arg(k >= 1 && k <= n_points, "segmenter: k out of range");
  check_arg(rho > 0.0, "segmenter: rho must be positive");
  check_arg(n_degrees >= 1 && n_radial >= 1, "segmenter: basis sizes must be positive");
  check_arg(labels >= 2, "segmenter: need at least two labels");
  check_arg(dropout >= 0.0 && dropout < 1.0, "segmenter: dropout must be in [0, 1)");
}

std::string SegmenterConfig::serialize() const {
  KvDoc doc;
  doc.set("model", "segmenter");
  doc.set("model_version", "1");
  doc.set_int("n_points", n_points);
  doc.set("encoder_channels", util::format_int_list(encoder_channels));
  doc.set("pool_factors", util::format_int_list(pool_factors));
  doc.set_double("dropout", dropout);
  doc.set_int("k", k);
  doc.set_double("rho", rho);
  doc.set_int("n_degrees", n_degrees);
  doc.set_int("n_radial", n_radial);
  doc.set_int("labels", labels);
  return doc.format();
}

SegmenterConfig SegmenterConfig::parse(const std::string& text) {
  const KvDoc doc = KvDoc::parse(text);
  check_arg(doc.get_or("model", "segmenter") == "segmenter", "segmenter config: wrong model kind");
  SegmenterConfig cfg;
  cfg.n_points = static_cast<int>(doc.get_int_or("n_points", cfg.n_points));
  if (doc.has("encoder_channels"))
    cfg.encoder_channels = util::parse_int_list(doc.get("encoder_channels"));
  if (doc.has("pool_factors")) cfg.pool_factors = util::parse_int_list(doc.get("pool_factors"));
  cfg.dropout = doc.get_double_or("dropout", cfg.dropout);
  cfg.k = static_cast<int>(doc.get_int_or("k", cfg.k));
  cfg.rho = doc.get_double_or("rho", cfg.rho);
  cfg.n_degrees = static_cast<int>(doc.get_int_or("n_degrees", cfg.n_degrees));
  cfg.n_radial = static_cast<int>(doc.get_int_or("n_radial", cfg.n_radial));
  cfg.labels = static_cast<int>(doc.get_int_or("labels", cfg.labels));
  cfg.validate();
  return cfg;
}

std::int64_t conv_param_count(int out_channels, int in_channels, int n_radial, int n_degrees,
                              bool invariant) {
  const std::int64_t angular = invariant ? n_degrees : n_degrees * n_degrees;
  return static_cast<std::int64_t>(out_channels) * in_channels * n_radial * angular +
         out_channels;
}

std::int64_t count_params(const ClassifierConfig& config, Variant variant) {
  config.validate();
  const bool invariant = variant == Variant::kSphNet;
  std::int64_t total = 0;
  int in = 1;
  for (int out : config.channels) {
    total += conv_param_count(out, in, config.n_radial, config.n_degrees, invariant);
    total += 2 * out;  // batchnorm gamma + beta
    in = out;
  }
  for (int out : config.fc) {
    total += static_cast<std::int64_t>(in) * out + out;
    total += 2 * out;
    in = out;
  }
  total += static_cast<std::int64_t>(in) * config.classes + config.classes;
  return total;
}

std::int64_t count_params(const SegmenterConfig& config, Variant variant) {
  config.validate();
  const bool invariant = variant == Variant::kSphNet;
  std::int64_t total = 0;
  int in = 1;
  for (int out : config.encoder_channels) {
    total += conv_param_count(out, in, config.n_radial, config.n_degrees, invariant);
    total += 2 * out;
    in = out;
  }
  const auto dec = config.decoder_channels();
  const std::vector<int> skips = {config.encoder_channels[2], config.encoder_channels[1],
                                  config.encoder_channels[0]};
  for (std::size_t i = 0; i < dec.size(); ++i) {
    const int dec_in = in + skips[i];  // upsampled features concatenated with the skip
    total += conv_param_count(dec[i], dec_in, config.n_radial, config.n_degrees, invariant);
    total += 2 * dec[i];
    in = dec[i];
  }
  total += conv_param_count(config.labels, in, config.n_radial, config.n_degrees, invariant);
  return total;
}

}  // namespace sphnet::models

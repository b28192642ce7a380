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
#include <string>
#include <vector>

namespace sphnet::models {

enum class Variant { kSphNet, kSphBase };

std::string variant_name(Variant v);
Variant parse_variant(const std::string& name);

/// Classification network: conv blocks with pooling between them, a global
/// max pool, then fully connected blocks with dropout and a softmax head.
/// Layer i uses kernel scale rho * 2^i. Defaults follow the reference
/// operating point (1024 points, 64/256/1024 channels, k = 64, rho = 0.1,
/// n_degrees = 4, n_radial = 2).
struct ClassifierConfig {
  int n_points = 1024;
  std::vector<int> channels = {64, 256, 1024};
  std::vector<int> pool_factors = {4, 4};  // between consecutive conv blocks
  std::vector<int> fc = {512, 256};
  double dropout = 0.5;
  int k = 64;
  double rho = 0.1;
  int n_degrees = 4;
  int n_radial = 2;
  int classes = 40;

  void validate() const;
  std::string serialize() const;
  static ClassifierConfig parse(const std::string& text);
};

/// U-shaped segmentation network: three encoder conv blocks with pooling
/// ratios (4, 4, 8), a mirrored decoder whose blocks consume the upsampled
/// features concatenated with the matching encoder skip, dropout on the last
/// two decoder blocks, and a final per-point conv head. Encoder scales are
/// (rho, 2 rho, 4 rho); the decoder reverses them and the head uses rho.
struct SegmenterConfig {
  int n_points = 2048;
  std::vector<int> encoder_channels = {64, 128, 256};
  std::vector<int> pool_factors = {4, 4, 8};
  double dropout = 0.5;
  int k = 48;
  double rho = 0.08;
  int n_degrees = 4;
  int n_radial = 2;
  int labels = 3;

  std::vector<int> decoder_channels() const {  // mirror of the encoder
    return {encoder_channels[2], encoder_channels[1], encoder_channels[0]};
  }

  void validate() const;
  std::string serialize() const;
  static SegmenterConfig parse(const std::string& text);
};

/// Learnable parameters of one conv layer: W of shape
/// out x in x n_radial x (n_degrees for the invariant variant, n_degrees^2
/// for the ablation) plus one bias per output channel.
std::int64_t conv_param_count(int out_channels, int in_channels, int n_radial, int n_degrees,
                              bool invariant);

/// Exact learnable-parameter counts (conv + batchnorm + dense layers).
std::int64_t count_params(const ClassifierConfig& config, Variant variant);
std::int64_t count_params(const SegmenterConfig& config, Variant variant);

}  // namespace sphnet::models

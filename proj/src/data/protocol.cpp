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

#include "sphnet/data/protocol.hpp"

#include "sphnet/common.hpp"

namespace sphnet::data {

namespace {

Aug parse_aug(char c) {
  if (c == 'O' || c == 'o') return Aug::kOriginal;
  if (c == 'A' || c == 'a') return Aug::kAugmented;
  throw std::invalid_argument(std::string("protocol: unknown augmentation '") + c + "'");
}

}  // namespace

Protocol Protocol::parse(const std::string& text) {
  check_arg(text.size() == 3 && text[1] == '/', "protocol: expected the form X/Y with X,Y in {O,A}");
  return {parse_aug(text[0]), parse_aug(text[2])};
}

std::string Protocol::str() const {
  std::string out;
  out += train == Aug::kOriginal ? 'O' : 'A';
  out += '/';
  out += test == Aug::kOriginal ? 'O' : 'A';
  return out;
}

Eigen::Matrix3d train_rotation(Aug aug, std::uint64_t seed, int epoch, int sample) {
  if (aug == Aug::kOriginal) return Eigen::Matrix3d::Identity();
  return cloud::random_rotation(mix_seed(mix_seed(seed, 0x726f7461ull),
                                         static_cast<std::uint64_t>(epoch),
                                         static_cast<std::uint64_t>(sample)));
}

Eigen::Matrix3d test_rotation(Aug aug, std::uint64_t seed, int sample) {
  if (aug == Aug::kOriginal) return Eigen::Matrix3d::Identity();
  return cloud::random_rotation(
      mix_seed(mix_seed(seed, 0x74657374ull), static_cast<std::uint64_t>(sample)));
}

}  // namespace sphnet::data

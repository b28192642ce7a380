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

#include "sphnet/data/synthetic.hpp"

namespace sphnet::data {

/// On-disk dataset layout: one directory per split, one little-endian binary
/// record per sample plus a manifest. Record layout:
///   u32 magic "SPDR" (0x52445053), u32 version = 1,
///   u32 N (point count), u32 C_label (1 = one label per sample, N = per point),
///   N x 3 float32 coordinates (row-major),
///   C_label x uint16 labels.
/// The manifest is a key-value document listing class names, seeds, and the
/// record files in order.
void write_dataset(const Dataset& dataset, const std::string& dir, const std::string& split);
Dataset read_dataset(const std::string& dir, const std::string& split);

void write_sample(const Sample& sample, const std::string& path);
Sample read_sample(const std::string& path);

}  // namespace sphnet::data

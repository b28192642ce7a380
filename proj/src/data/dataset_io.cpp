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

#include "sphnet/data/dataset_io.hpp"

#include <cstdio>
#include <filesystem>
#include <fstream>

#include "sphnet/common.hpp"

namespace sphnet::data {

namespace fs = std::filesystem;

namespace {

constexpr std::uint32_t kMagic = 0x52445053;  // "SPDR"
constexpr std::uint32_t kVersion = 1;

template <class T>
void write_pod(std::ostream& os, T value) {
  os.write(reinterpret_cast<const char*>(&value), sizeof(T));
}

template <class T>
T read_pod(std::istream& is, const std::string& path) {
  T value{};
  is.read(reinterpret_cast<char*>(&value), sizeof(T));
  if (!is) throw std::runtime_error("dataset: truncated record " + path);
  return value;
}

}  // namespace

void write_sample(const Sample& sample, const std::string& path) {
  std::ofstream os(path, std::ios::binary | std::ios::trunc);
  if (!os) throw std::runtime_error("dataset: cannot open " + path + " for writing");
  const std::uint32_t n = static_cast<std::uint32_t>(sample.cloud.size());
  const bool per_point = !sample.point_labels.empty();
  check_arg(!per_point || sample.point_labels.size() == n,
            "dataset: per-point label count mismatch");
  write_pod(os, kMagic);
  write_pod(os, kVersion);
  write_pod(os, n);
  write_pod<std::uint32_t>(os, per_point ? n : 1u);
  for (std::uint32_t i = 0; i < n; ++i)
    for (int d = 0; d < 3; ++d) write_pod<float>(os, static_cast<float>(sample.cloud.pts(i, d)));
  if (per_point) {
    os.write(reinterpret_cast<const char*>(sample.point_labels.data()),
             static_cast<std::streamsize>(n * sizeof(std::uint16_t)));
  } else {
    check_arg(sample.label >= 0 && sample.label <= 0xffff, "dataset: label out of uint16 range");
    write_pod<std::uint16_t>(os, static_cast<std::uint16_t>(sample.label));
  }
  if (!os) throw std::runtime_error("dataset: write failed for " + path);
}

Sample read_sample(const std::string& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw std::runtime_error("dataset: cannot open " + path);
  if (read_pod<std::uint32_t>(is, path) != kMagic)
    throw std::runtime_error("dataset: bad magic in " + path);
  const std::uint32_t version = read_pod<std::uint32_t>(is, path);
  if (version != kVersion)
    throw std::runtime_error("dataset: unsupported record version in " + path);
  const std::uint32_t n = read_pod<std::uint32_t>(is, path);
  const std::uint32_t c_label = read_pod<std::uint32_t>(is, path);
  if (c_label != 1 && c_label != n)
    throw std::runtime_error("dataset: label count must be 1 or N in " + path);

  Sample sample;
  cloud::Points pts(n, 3);
  for (std::uint32_t i = 0; i < n; ++i)
    for (int d = 0; d < 3; ++d) pts(i, d) = static_cast<double>(read_pod<float>(is, path));
  sample.cloud = cloud::PointCloud{std::move(pts)};
  if (c_label == 1) {
    sample.label = read_pod<std::uint16_t>(is, path);
  } else {
    sample.point_labels.resize(c_label);
    is.read(reinterpret_cast<char*>(sample.point_labels.data()),
            static_cast<std::streamsize>(c_label * sizeof(std::uint16_t)));
    if (!is) throw std::runtime_error("dataset: truncated labels in " + path);
  }
  return sample;
}

void write_dataset(const Dataset& dataset, const std::string& dir, const std::string& split) {
  const fs::path split_dir = fs::path(dir) / split;
  fs::create_directories(split_dir);

  util::KvDoc manifest;
  manifest.set("dataset_version", "1");
  for (const auto& [k, v] : dataset.metadata.items()) manifest.set(k, v);
  std::string names;
  for (std::size_t i = 0; i < dataset.class_names.size(); ++i)
    names += (i ? "," : "") + dataset.class_names[i];
  manifest.set("class_names", names);
  manifest.set_int("count", static_cast<std::int64_t>(dataset.samples.size()));

  char name[64];
  for (std::size_t i = 0; i < dataset.samples.size(); ++i) {
    std::snprintf(name, sizeof(name), "sample_%05zu.bin", i);
    write_sample(dataset.samples[i], (split_dir / name).string());
    std::snprintf(name, sizeof(name), "file.%05zu", i);
    char fname[64];
    std::snprintf(fname, sizeof(fname), "sample_%05zu.bin", i);
    manifest.set(name, fname);
  }

  std::ofstream os(split_dir / "manifest.txt", std::ios::trunc);
  if (!os) throw std::runtime_error("dataset: cannot write manifest in " + split_dir.string());
  os << manifest.format();
}

Dataset read_dataset(const std::string& dir, const std::string& split) {
  const fs::path split_dir = fs::path(dir) / split;
  std::ifstream is(split_dir / "manifest.txt");
  if (!is) throw std::runtime_error("dataset: missing manifest in " + split_dir.string());
  std::stringstream buf;
  buf << is.rdbuf();
  const util::KvDoc manifest = util::KvDoc::parse(buf.str());

  Dataset dataset;
  dataset.metadata = manifest;
  {
    std::string names = manifest.get_or("class_names", "");
    std::string cur;
    for (char c : names) {
      if (c == ',') {
        dataset.class_names.push_back(cur);
        cur.clear();
      } else {
        cur += c;
      }
    }
    if (!cur.empty()) dataset.class_names.push_back(cur);
  }
  const std::int64_t count = manifest.get_int("count");
  char key[64];
  for (std::int64_t i = 0; i < count; ++i) {
    std::snprintf(key, sizeof(key), "file.%05lld", static_cast<long long>(i));
    const std::string file = manifest.get(key);
    dataset.samples.push_back(read_sample((split_dir / file).string()));
  }
  return dataset;
}

}  // namespace sphnet::data

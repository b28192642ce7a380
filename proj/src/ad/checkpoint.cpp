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

#include "sphnet/ad/checkpoint.hpp"

#include <cstring>
#include <fstream>
#include <stdexcept>

namespace sphnet::ad {

namespace {

constexpr std::uint32_t kMagic = 0x43485053;  // "SPHC"
constexpr std::uint32_t kVersion = 1;

template <class T>
void write_pod(std::ostream& os, T value) {
  os.write(reinterpret_cast<const char*>(&value), sizeof(T));
}

template <class T>
T read_pod(std::istream& is) {
  T value{};
  is.read(reinterpret_cast<char*>(&value), sizeof(T));
  if (!is) throw std::runtime_error("checkpoint: truncated file");
  return value;
}

template <class T>
void write_tensor_body(std::ostream& os, const Tensor<T>& t, std::uint8_t dtype) {
  write_pod<std::uint8_t>(os, dtype);
  write_pod<std::uint8_t>(os, static_cast<std::uint8_t>(t.rank()));
  for (std::int64_t d : t.shape) write_pod<std::uint64_t>(os, static_cast<std::uint64_t>(d));
  os.write(reinterpret_cast<const char*>(t.data()),
           static_cast<std::streamsize>(t.v.size() * sizeof(T)));
}

template <class T>
Tensor<T> read_tensor_body(std::istream& is) {
  const int rank = read_pod<std::uint8_t>(is);
  Shape shape(rank);
  for (int d = 0; d < rank; ++d) shape[d] = static_cast<std::int64_t>(read_pod<std::uint64_t>(is));
  Tensor<T> t = Tensor<T>::zeros(shape);
  is.read(reinterpret_cast<char*>(t.data()),
          static_cast<std::streamsize>(t.v.size() * sizeof(T)));
  if (!is) throw std::runtime_error("checkpoint: truncated tensor payload");
  return t;
}

}  // namespace

void save_checkpoint(const Checkpoint& ckpt, const std::string& path) {
  std::ofstream os(path, std::ios::binary | std::ios::trunc);
  if (!os) throw std::runtime_error("checkpoint: cannot open " + path + " for writing");
  write_pod(os, kMagic);
  write_pod(os, kVersion);
  write_pod<std::uint64_t>(os, ckpt.metadata.size());
  os.write(ckpt.metadata.data(), static_cast<std::streamsize>(ckpt.metadata.size()));
  write_pod<std::uint64_t>(os, ckpt.entries.size());
  for (const auto& [name, any] : ckpt.entries) {
    write_pod<std::uint32_t>(os, static_cast<std::uint32_t>(name.size()));
    os.write(name.data(), static_cast<std::streamsize>(name.size()));
    if (std::holds_alternative<Tensor<float>>(any))
      write_tensor_body(os, std::get<Tensor<float>>(any), 0);
    else
      write_tensor_body(os, std::get<Tensor<double>>(any), 1);
  }
  if (!os) throw std::runtime_error("checkpoint: write failed for " + path);
}

Checkpoint load_checkpoint(const std::string& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw std::runtime_error("checkpoint: cannot open " + path);
  if (read_pod<std::uint32_t>(is) != kMagic)
    throw std::runtime_error("checkpoint: bad magic in " + path);
  const std::uint32_t version = read_pod<std::uint32_t>(is);
  if (version != kVersion)
    throw std::runtime_error("checkpoint: unsupported version " + std::to_string(version));

  Checkpoint ckpt;
  const std::uint64_t meta_len = read_pod<std::uint64_t>(is);
  ckpt.metadata.resize(meta_len);
  is.read(ckpt.metadata.data(), static_cast<std::streamsize>(meta_len));
  const std::uint64_t count = read_pod<std::uint64_t>(is);
  for (std::uint64_t e = 0; e < count; ++e) {
    const std::uint32_t name_len = read_pod<std::uint32_t>(is);
    std::string name(name_len, '\0');
    is.read(name.data(), name_len);
    if (!is) throw std::runtime_error("checkpoint: truncated entry name");
    const std::uint8_t dtype = read_pod<std::uint8_t>(is);
    if (dtype == 0)
      ckpt.entries.emplace(std::move(name), read_tensor_body<float>(is));
    else if (dtype == 1)
      ckpt.entries.emplace(std::move(name), read_tensor_body<double>(is));
    else
      throw std::runtime_error("checkpoint: unknown dtype tag");
  }
  return ckpt;
}

}  // namespace sphnet::ad

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
#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace sphnet::util {

/// Ordered "key = value" document with '#' comments. The interchange format
/// for configs and manifests: human-readable and trivially parseable.
class KvDoc {
 public:
  void set(const std::string& key, const std::string& value);
  void set_int(const std::string& key, std::int64_t value);
  void set_double(const std::string& key, double value);

  bool has(const std::string& key) const;
  std::optional<std::string> find(const std::string& key) const;
  std::string get(const std::string& key) const;  // throws std::out_of_range
  std::string get_or(const std::string& key, const std::string& fallback) const;
  std::int64_t get_int(const std::string& key) const;
  std::int64_t get_int_or(const std::string& key, std::int64_t fallback) const;
  double get_double(const std::string& key) const;
  double get_double_or(const std::string& key, double fallback) const;

  const std::vector<std::pair<std::string, std::string>>& items() const { return items_; }

  std::string format() const;
  static KvDoc parse(const std::string& text);  // throws std::runtime_error on bad lines

 private:
  std::vector<std::pair<std::string, std::string>> items_;
};

/// Lists like "64,256,1024".
std::vector<int> parse_int_list(const std::string& text);
std::string format_int_list(const std::vector<int>& values);
std::vector<double> parse_double_list(const std::string& text);
std::string format_double_list(const std::vector<double>& values);

/// Shortest round-trip decimal form of a double.
std::string format_double(double value);

/// FNV-1a hash of a string; stamps reports with their config.
std::uint64_t fnv1a(const std::string& text);

}  // namespace sphnet::util

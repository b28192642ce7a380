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
#include <vector>

namespace sphnet::util {

/// Minimal CSV table: '#' comment lines before the header carry metadata
/// (e.g. the config hash), the first data line is the header. Fields are
/// written verbatim; commas/quotes/newlines in fields are quoted.
struct CsvTable {
  std::vector<std::string> comments;  // without the leading '#'
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;

  std::string format() const;
  static CsvTable parse(const std::string& text);  // throws std::runtime_error

  void write(const std::string& path) const;
  static CsvTable read(const std::string& path);

  int column(const std::string& name) const;  // -1 if absent
};

}  // namespace sphnet::util

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

#include <Eigen/Core>
#include <array>
#include <stdexcept>
#include <string>
#include <vector>

namespace sphnet::data {

struct Mesh {
  std::vector<Eigen::Vector3d> vertices;
  std::vector<std::array<int, 3>> faces;

  bool operator==(const Mesh& other) const;
};

/// Parse failure with the 1-based line number it was detected on.
class ParseError : public std::runtime_error {
 public:
  ParseError(int line, const std::string& message)
      : std::runtime_error("line " + std::to_string(line) + ": " + message), line_(line) {}
  int line() const { return line_; }

 private:
  int line_;
};

/// Parses OFF text: optional "OFF" header line, a "V F E" counts line, V
/// vertex lines, F polygon lines (quads and larger fans triangulated).
/// '#' comments and blank lines are skipped. Triangles with repeated vertex
/// indices are dropped. Throws ParseError with a line number on malformed
/// counts, out-of-range indices, non-numeric tokens, or truncation.
Mesh parse_off(const std::string& text);

Mesh read_off_file(const std::string& path);

/// Canonical OFF serialization; parse(write(mesh)) == mesh exactly.
std::string write_off(const Mesh& mesh);

}  // namespace sphnet::data

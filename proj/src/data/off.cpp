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

#include "sphnet/data/off.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>

namespace sphnet::data {

bool Mesh::operator==(const Mesh& other) const {
  if (vertices.size() != other.vertices.size() || faces.size() != other.faces.size()) return false;
  for (std::size_t i = 0; i < vertices.size(); ++i)
    if (vertices[i] != other.vertices[i]) return false;
  return faces == other.faces;
}

namespace {

struct LineReader {
  std::istringstream in;
  int line_no = 0;

  explicit LineReader(const std::string& text) : in(text) {}

  /// Next line with comments stripped and non-blank content, or false at EOF.
  bool next(std::string& out) {
    std::string line;
    while (std::getline(in, line)) {
      ++line_no;
      const auto hash = line.find('#');
      if (hash != std::string::npos) line = line.substr(0, hash);
      if (line.find_first_not_of(" \t\r") != std::string::npos) {
        out = line;
        return true;
      }
    }
    return false;
  }
};

std::vector<std::string> tokenize(const std::string& line) {
  std::vector<std::string> tokens;
  std::istringstream in(line);
  std::string t;
  while (in >> t) tokens.push_back(t);
  return tokens;
}

double parse_real(const std::string& token, int line_no) {
  std::size_t used = 0;
  double value = 0.0;
  try {
    value = std::stod(token, &used);
  } catch (const std::exception&) {
    throw ParseError(line_no, "expected a number, got '" + token + "'");
  }
  if (used != token.size()) throw ParseError(line_no, "expected a number, got '" + token + "'");
  return value;
}

long parse_integer(const std::string& token, int line_no) {
  std::size_t used = 0;
  long value = 0;
  try {
    value = std::stol(token, &used);
  } catch (const std::exception&) {
    throw ParseError(line_no, "expected an integer, got '" + token + "'");
  }
  if (used != token.size())
    throw ParseError(line_no, "expected an integer, got '" + token + "'");
  return value;
}

}  // namespace

Mesh parse_off(const std::string& text) {
  LineReader reader(text);
  std::string line;

  if (!reader.next(line)) throw ParseError(reader.line_no, "empty file");
  auto tokens = tokenize(line);
  if (tokens.size() == 1 && tokens[0] == "OFF") {
    if (!reader.next(line)) throw ParseError(reader.line_no, "truncated file: missing counts line");
    tokens = tokenize(line);
  }

  if (tokens.size() != 3)
    throw ParseError(reader.line_no, "malformed counts line: expected 'V F E'");
  const long v_count = parse_integer(tokens[0], reader.line_no);
  const long f_count = parse_integer(tokens[1], reader.line_no);
  parse_integer(tokens[2], reader.line_no);  // edge count, unused
  if (v_count < 0 || f_count < 0)
    throw ParseError(reader.line_no, "malformed counts line: negative count");

  Mesh mesh;
  mesh.vertices.reserve(static_cast<std::size_t>(v_count));
  for (long i = 0; i < v_count; ++i) {
    if (!reader.next(line))
      throw ParseError(reader.line_no, "truncated file: expected " + std::to_string(v_count) +
                                           " vertices, got " + std::to_string(i));
    tokens = tokenize(line);
    if (tokens.size() < 3)
      throw ParseError(reader.line_no, "vertex line needs 3 coordinates");
    mesh.vertices.emplace_back(parse_real(tokens[0], reader.line_no),
                               parse_real(tokens[1], reader.line_no),
                               parse_real(tokens[2], reader.line_no));
  }

  for (long f = 0; f < f_count; ++f) {
    if (!reader.next(line))
      throw ParseError(reader.line_no, "truncated file: expected " + std::to_string(f_count) +
                                           " faces, got " + std::to_string(f));
    tokens = tokenize(line);
    if (tokens.empty()) throw ParseError(reader.line_no, "empty face line");
    const long arity = parse_integer(tokens[0], reader.line_no);
    if (arity < 3) throw ParseError(reader.line_no, "face needs at least 3 vertices");
    if (static_cast<long>(tokens.size()) < arity + 1)
      throw ParseError(reader.line_no, "face lists fewer indices than declared");
    std::vector<int> poly(static_cast<std::size_t>(arity));
    for (long i = 0; i < arity; ++i) {
      const long idx = parse_integer(tokens[static_cast<std::size_t>(i + 1)], reader.line_no);
      if (idx < 0 || idx >= v_count)
        throw ParseError(reader.line_no,
                         "vertex index " + std::to_string(idx) + " out of range [0, " +
                             std::to_string(v_count) + ")");
      poly[static_cast<std::size_t>(i)] = static_cast<int>(idx);
    }
    for (long i = 1; i + 1 < arity; ++i) {  // fan triangulation
      const std::array<int, 3> tri{poly[0], poly[static_cast<std::size_t>(i)],
                                   poly[static_cast<std::size_t>(i + 1)]};
      if (tri[0] == tri[1] || tri[1] == tri[2] || tri[0] == tri[2]) continue;  // degenerate
      mesh.faces.push_back(tri);
    }
  }
  return mesh;
}

Mesh read_off_file(const std::string& path) {
  std::ifstream is(path);
  if (!is) throw std::runtime_error("cannot open OFF file: " + path);
  std::stringstream buf;
  buf << is.rdbuf();
  return parse_off(buf.str());
}

std::string write_off(const Mesh& mesh) {
  std::string out = "OFF\n";
  out += std::to_string(mesh.vertices.size()) + " " + std::to_string(mesh.faces.size()) + " 0\n";
  char buf[96];
  for (const auto& v : mesh.vertices) {
    std::snprintf(buf, sizeof(buf), "%.17g %.17g %.17g\n", v.x(), v.y(), v.z());
    out += buf;
  }
  for (const auto& f : mesh.faces) {
    std::snprintf(buf, sizeof(buf), "3 %d %d %d\n", f[0], f[1], f[2]);
    out += buf;
  }
  return out;
}

}  // namespace sphnet::data

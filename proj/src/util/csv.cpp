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

#include "sphnet/util/csv.hpp"

#include <fstream>
#include <sstream>
#include <stdexcept>

namespace sphnet::util {

namespace {

bool needs_quoting(const std::string& field) {
  return field.find_first_of(",\"\n\r") != std::string::npos;
}

std::string encode_field(const std::string& field) {
  if (!needs_quoting(field)) return field;
  std::string out = "\"";
  for (char c : field) {
    if (c == '"') out += '"';
    out += c;
  }
  out += '"';
  return out;
}

std::vector<std::string> split_line(const std::string& line, int line_no) {
  std::vector<std::string> fields;
  std::string cur;
  bool quoted = false;
  for (std::size_t i = 0; i < line.size(); ++i) {
    const char c = line[i];
    if (quoted) {
      if (c == '"') {
        if (i + 1 < line.size() && line[i + 1] == '"') {
          cur += '"';
          ++i;
        } else {
          quoted = false;
        }
      } else {
        cur += c;
      }
    } else if (c == '"') {
      if (!cur.empty())
        throw std::runtime_error("csv parse: stray quote on line " + std::to_string(line_no));
      quoted = true;
    } else if (c == ',') {
      fields.push_back(cur);
      cur.clear();
    } else {
      cur += c;
    }
  }
  if (quoted) throw std::runtime_error("csv parse: unterminated quote on line " + std::to_string(line_no));
  fields.push_back(cur);
  return fields;
}

std::string join(const std::vector<std::string>& fields) {
  std::string out;
  for (std::size_t i = 0; i < fields.size(); ++i) out += (i ? "," : "") + encode_field(fields[i]);
  return out;
}

}  // namespace

std::string CsvTable::format() const {
  std::string out;
  for (const auto& c : comments) out += "# " + c + "\n";
  out += join(header) + "\n";
  for (const auto& row : rows) out += join(row) + "\n";
  return out;
}

CsvTable CsvTable::parse(const std::string& text) {
  CsvTable table;
  std::istringstream in(text);
  std::string line;
  int line_no = 0;
  bool have_header = false;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    if (line[0] == '#') {
      std::string c = line.substr(1);
      if (!c.empty() && c[0] == ' ') c = c.substr(1);
      table.comments.push_back(c);
      continue;
    }
    auto fields = split_line(line, line_no);
    if (!have_header) {
      table.header = std::move(fields);
      have_header = true;
    } else {
      if (fields.size() != table.header.size())
        throw std::runtime_error("csv parse: field count mismatch on line " +
                                 std::to_string(line_no));
      table.rows.push_back(std::move(fields));
    }
  }
  if (!have_header) throw std::runtime_error("csv parse: missing header");
  return table;
}

void CsvTable::write(const std::string& path) const {
  std::ofstream os(path, std::ios::trunc);
  if (!os) throw std::runtime_error("csv: cannot open " + path + " for writing");
  os << format();
  if (!os) throw std::runtime_error("csv: write failed for " + path);
}

CsvTable CsvTable::read(const std::string& path) {
  std::ifstream is(path);
  if (!is) throw std::runtime_error("csv: cannot open " + path);
  std::stringstream buf;
  buf << is.rdbuf();
  return parse(buf.str());
}

int CsvTable::column(const std::string& name) const {
  for (std::size_t i = 0; i < header.size(); ++i)
    if (header[i] == name) return static_cast<int>(i);
  return -1;
}

}  // namespace sphnet::util

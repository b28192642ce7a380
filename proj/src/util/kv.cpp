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

#include "sphnet/util/kv.hpp"

#include <charconv>
#include <cstdio>
#include <sstream>
#include <stdexcept>

namespace sphnet::util {

namespace {

std::string trim(const std::string& s) {
  const auto begin = s.find_first_not_of(" \t\r");
  if (begin == std::string::npos) return "";
  const auto end = s.find_last_not_of(" \t\r");
  return s.substr(begin, end - begin + 1);
}

}  // namespace

void KvDoc::set(const std::string& key, const std::string& value) {
  for (auto& [k, v] : items_)
    if (k == key) {
      v = value;
      return;
    }
  items_.emplace_back(key, value);
}

void KvDoc::set_int(const std::string& key, std::int64_t value) { set(key, std::to_string(value)); }
void KvDoc::set_double(const std::string& key, double value) { set(key, format_double(value)); }

bool KvDoc::has(const std::string& key) const { return find(key).has_value(); }

std::optional<std::string> KvDoc::find(const std::string& key) const {
  for (const auto& [k, v] : items_)
    if (k == key) return v;
  return std::nullopt;
}

std::string KvDoc::get(const std::string& key) const {
  auto v = find(key);
  if (!v) throw std::out_of_range("missing key: " + key);
  return *v;
}

std::string KvDoc::get_or(const std::string& key, const std::string& fallback) const {
  return find(key).value_or(fallback);
}

std::int64_t KvDoc::get_int(const std::string& key) const { return std::stoll(get(key)); }

std::int64_t KvDoc::get_int_or(const std::string& key, std::int64_t fallback) const {
  auto v = find(key);
  return v ? std::stoll(*v) : fallback;
}

double KvDoc::get_double(const std::string& key) const { return std::stod(get(key)); }

double KvDoc::get_double_or(const std::string& key, double fallback) const {
  auto v = find(key);
  return v ? std::stod(*v) : fallback;
}

std::string KvDoc::format() const {
  std::string out;
  for (const auto& [k, v] : items_) out += k + " = " + v + "\n";
  return out;
}

KvDoc KvDoc::parse(const std::string& text) {
  KvDoc doc;
  std::istringstream in(text);
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line = line.substr(0, hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos)
      throw std::runtime_error("kv parse: missing '=' on line " + std::to_string(line_no));
    const std::string key = trim(line.substr(0, eq));
    if (key.empty())
      throw std::runtime_error("kv parse: empty key on line " + std::to_string(line_no));
    doc.set(key, trim(line.substr(eq + 1)));  // duplicate keys: last one wins
  }
  return doc;
}

std::vector<int> parse_int_list(const std::string& text) {
  std::vector<int> out;
  std::istringstream in(text);
  std::string token;
  while (std::getline(in, token, ',')) {
    const std::string t = trim(token);
    if (!t.empty()) out.push_back(std::stoi(t));
  }
  return out;
}

std::string format_int_list(const std::vector<int>& values) {
  std::string out;
  for (std::size_t i = 0; i < values.size(); ++i)
    out += (i ? "," : "") + std::to_string(values[i]);
  return out;
}

std::vector<double> parse_double_list(const std::string& text) {
  std::vector<double> out;
  std::istringstream in(text);
  std::string token;
  while (std::getline(in, token, ',')) {
    const std::string t = trim(token);
    if (!t.empty()) out.push_back(std::stod(t));
  }
  return out;
}

std::string format_double_list(const std::vector<double>& values) {
  std::string out;
  for (std::size_t i = 0; i < values.size(); ++i) out += (i ? "," : "") + format_double(values[i]);
  return out;
}

std::string format_double(double value) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.17g", value);
  // Prefer the shortest representation that round-trips.
  for (int prec = 1; prec <= 16; ++prec) {
    char cand[64];
    std::snprintf(cand, sizeof(cand), "%.*g", prec, value);
    if (std::stod(cand) == value) return cand;
  }
  return buf;
}

std::uint64_t fnv1a(const std::string& text) {
  std::uint64_t h = 0xcbf29ce484222325ull;
  for (unsigned char c : text) {
    h ^= c;
    h *= 0x100000001b3ull;
  }
  return h;
}

}  // namespace sphnet::util

// Copyright 2026 The poisoncert Authors
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

// File ingestion and report serialization.

#ifndef POISONCERT_IO_HPP_
#define POISONCERT_IO_HPP_

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

#include "poisoncert/core.hpp"
#include "poisoncert/hash_bagging.hpp"

namespace poisoncert::io {

// Lines of a text file without their line terminators ("\n" or "\r\n").
inline std::vector<std::string> read_lines(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw InputError("cannot open " + path);
  std::vector<std::string> lines;
  std::string line;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    lines.push_back(std::move(line));
  }
  return lines;
}

inline std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw InputError("cannot open " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

inline void write_file(const std::string& path, std::string_view content) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw InputError("cannot write " + path);
  out << content;
}

inline bool is_blank(std::string_view s) {
  return std::all_of(s.begin(), s.end(), [](unsigned char c) { return std::isspace(c); });
}

// Integers separated by commas and/or whitespace.
inline std::vector<int> parse_int_row(std::string_view line, std::size_t line_no) {
  std::vector<int> out;
  std::size_t pos = 0;
  while (pos < line.size()) {
    while (pos < line.size() && (line[pos] == ',' || std::isspace(static_cast<unsigned char>(line[pos])))) ++pos;
    if (pos >= line.size()) break;
    int v = 0;
    const auto [ptr, ec] = std::from_chars(line.data() + pos, line.data() + line.size(), v);
    if (ec != std::errc() || (ptr != line.data() + line.size() && *ptr != ',' &&
                              !std::isspace(static_cast<unsigned char>(*ptr)))) {
      throw InputError("line " + std::to_string(line_no) + ": expected an integer near '" +
                       std::string(line.substr(pos, 16)) + "'");
    }
    out.push_back(v);
    pos = static_cast<std::size_t>(ptr - line.data());
  }
  return out;
}

inline std::vector<std::vector<int>> read_int_table(const std::string& path, bool header) {
  const auto lines = read_lines(path);
  std::vector<std::vector<int>> rows;
  for (std::size_t i = header ? 1 : 0; i < lines.size(); ++i) {
    if (is_blank(lines[i])) continue;
    rows.push_back(parse_int_row(lines[i], i + 1));
  }
  return rows;
}

// Votes CSV: M rows of G class indices. With num_classes <= 0 the class count
// is max(vote) + 1, at least 2.
inline VoteMatrix read_votes(const std::string& path, bool header = false, int num_classes = 0) {
  const auto rows = read_int_table(path, header);
  if (num_classes <= 0) {
    int max_vote = 0;
    for (const auto& r : rows) {
      for (int v : r) {
        if (v < 0) throw InputError(path + ": negative class index " + std::to_string(v));
        max_vote = std::max(max_vote, v);
      }
    }
    num_classes = std::max(max_vote + 1, 2);
  }
  return VoteMatrix(rows, num_classes);
}

// Labels CSV: one integer per line (a single comma-separated row also works).
inline std::vector<int> read_labels(const std::string& path, bool header = false) {
  std::vector<int> labels;
  for (const auto& r : read_int_table(path, header)) labels.insert(labels.end(), r.begin(), r.end());
  for (int y : labels) {
    if (y < 0) throw InputError(path + ": negative label " + std::to_string(y));
  }
  return labels;
}

inline Membership read_membership(const std::string& path) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(read_file(path));
  } catch (const nlohmann::json::parse_error& e) {
    throw InputError(path + ": " + e.what());
  }
  return membership_from_json(j);
}

inline nlohmann::json to_json(const Budget& b) {
  return {{"r_ins", b.r_ins}, {"r_del", b.r_del}, {"r_mod", b.r_mod},
          {"per_pair_cap", b.per_pair_cap()}};
}

inline nlohmann::json to_json(const Certificate& c) {
  nlohmann::json j;
  j["method"] = std::string(to_string(c.method));
  j["status"] = std::string(to_string(c.status));
  j["num_samples"] = c.num_samples;
  j["collective_robustness_lb"] = c.collective_robustness_lb;
  j["attacked_ub"] = c.attacked_ub;
  j["attacked_incumbent"] = c.attacked_incumbent;
  j["gap"] = c.gap();
  j["omega_size"] = c.omega_size;
  if (c.certified_accuracy) {
    j["certified_accuracy"] = *c.certified_accuracy;
    j["num_correct"] = *c.num_correct;
    j["accuracy_attacked_ub"] = *c.accuracy_attacked_ub;
  } else {
    j["certified_accuracy"] = nullptr;
  }
  j["budget"] = to_json(c.budget);
  j["solve_seconds"] = c.solve_seconds;
  auto groups = nlohmann::json::array();
  for (const auto& g : c.groups) {
    groups.push_back({{"size", g.size},
                      {"attacked_incumbent", g.attacked_incumbent},
                      {"attacked_ub", g.attacked_ub},
                      {"optimal", g.optimal},
                      {"seconds", g.seconds}});
  }
  j["groups"] = groups;
  return j;
}

inline std::string format_ratio(double x) {
  if (std::isnan(x)) return "NaN";
  std::ostringstream ss;
  ss.precision(6);
  ss << x;
  return ss.str();
}

}  // namespace poisoncert::io

#endif  // POISONCERT_IO_HPP_

// Copyright 2026 The RGM Toolkit Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     https://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.
//
// LibSVM / svmlight text format:
//
//   <label> <index>:<value> <index>:<value> ...
//
// with 1-based strictly ascending indices. Blank lines and lines starting
// with '#' are skipped; a trailing '# ...' comment on a data line is ignored.
// Storage is dense: d is the largest index seen.
#pragma once

#include <Eigen/Dense>
#include <charconv>
#include <cstdio>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>
#include <string>
#include <string_view>
#include <system_error>
#include <utility>
#include <vector>

#include "rgm/errors.hpp"
#include "rgm/quadratic.hpp"

namespace rgm {

namespace detail {

inline std::string_view Trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

inline double ParseReal(std::string_view tok, std::size_t line,
                        const char* what) {
  // std::from_chars for double is available in libstdc++ 11.
  double v = 0;
  const auto* first = tok.data();
  const auto* last = tok.data() + tok.size();
  if (!tok.empty() && *first == '+') ++first;
  const auto [ptr, ec] = std::from_chars(first, last, v);
  if (ec != std::errc() || ptr != last || tok.empty()) {
    throw ParseError(line, std::string("malformed ") + what + " '" +
                               std::string(tok) + "'");
  }
  return v;
}

}  // namespace detail

inline FeatureDataset ParseLibsvm(std::istream& in) {
  struct Row {
    double label;
    std::vector<std::pair<long, double>> entries;
  };
  std::vector<Row> rows;
  long max_index = 0;
  std::string raw;
  std::size_t line_no = 0;
  while (std::getline(in, raw)) {
    ++line_no;
    std::string_view line = raw;
    if (const auto hash = line.find('#'); hash != std::string_view::npos) {
      line = line.substr(0, hash);
    }
    line = detail::Trim(line);
    if (line.empty()) continue;

    std::istringstream tokens{std::string(line)};
    std::string tok;
    tokens >> tok;
    Row row{detail::ParseReal(tok, line_no, "label"), {}};
    long prev = 0;
    while (tokens >> tok) {
      const auto colon = tok.find(':');
      if (colon == std::string::npos || colon == 0) {
        throw ParseError(line_no, "expected <index>:<value>, got '" + tok + "'");
      }
      const std::string_view idx_sv(tok.data(), colon);
      long idx = 0;
      const auto [p, ec] =
          std::from_chars(idx_sv.data(), idx_sv.data() + idx_sv.size(), idx);
      if (ec != std::errc() || p != idx_sv.data() + idx_sv.size() || idx < 1) {
        throw ParseError(line_no, "malformed index '" + std::string(idx_sv) + "'");
      }
      if (idx <= prev) {
        throw ParseError(line_no, "indices must be strictly ascending (" +
                                      std::to_string(prev) + " then " +
                                      std::to_string(idx) + ")");
      }
      prev = idx;
      const double v = detail::ParseReal(
          std::string_view(tok).substr(colon + 1), line_no, "value");
      row.entries.emplace_back(idx, v);
      max_index = std::max(max_index, idx);
    }
    rows.push_back(std::move(row));
  }

  FeatureDataset data;
  data.x = Eigen::MatrixXd::Zero(max_index, static_cast<Eigen::Index>(rows.size()));
  data.y.resize(static_cast<Eigen::Index>(rows.size()));
  for (std::size_t i = 0; i < rows.size(); ++i) {
    const auto col = static_cast<Eigen::Index>(i);
    data.y[col] = rows[i].label;
    for (const auto& [idx, v] : rows[i].entries) data.x(idx - 1, col) = v;
  }
  return data;
}

inline FeatureDataset ParseLibsvmFile(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open '" + path + "'");
  return ParseLibsvm(in);
}

/// Writes with %.17g so that parsing reproduces every double exactly.
/// Zero entries are omitted.
inline void WriteLibsvm(std::ostream& out, const FeatureDataset& data) {
  char buf[64];
  for (Eigen::Index i = 0; i < data.size(); ++i) {
    std::snprintf(buf, sizeof buf, "%.17g", data.y[i]);
    out << buf;
    for (Eigen::Index k = 0; k < data.dim(); ++k) {
      const double v = data.x(k, i);
      if (v == 0) continue;
      std::snprintf(buf, sizeof buf, " %ld:%.17g", static_cast<long>(k + 1), v);
      out << buf;
    }
    out << '\n';
  }
}

}  // namespace rgm

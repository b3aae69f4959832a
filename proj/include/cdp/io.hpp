/*
 * Copyright 2026 The cdp Authors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#ifndef CDP_IO_HPP_
#define CDP_IO_HPP_

#include <charconv>
#include <fstream>
#include <istream>
#include <map>
#include <optional>
#include <ostream>
#include <sstream>
#include <string>
#include <string_view>
#include <system_error>
#include <tuple>
#include <vector>

#include "cdp/core.hpp"
#include "cdp/graph_core.hpp"

namespace cdp {

/// Shortest decimal representation that round-trips to the same double.
inline std::string format_double(double x) {
  char buf[64];
  const auto [end, ec] = std::to_chars(buf, buf + sizeof(buf), x);
  if (ec != std::errc{}) throw Error("format_double: conversion failed");
  return std::string(buf, end);
}

namespace detail {

inline std::string_view trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return s.substr(first, last - first + 1);
}

template <typename T>
T parse_number(std::string_view token, int line, std::string_view what) {
  T value{};
  const auto [ptr, ec] = std::from_chars(token.data(), token.data() + token.size(), value);
  if (ec != std::errc{} || ptr != token.data() + token.size()) {
    throw FormatError("line " + std::to_string(line) + ": invalid " + std::string(what) + " '" +
                      std::string(token) + "'");
  }
  return value;
}

/// Reads "key=value" pairs from a header comment such as "# n=300 T=30".
inline void parse_header(std::string_view body, std::optional<Index>& n, std::optional<int>& T) {
  std::istringstream in{std::string(body)};
  std::string tok;
  while (in >> tok) {
    const auto eq = tok.find('=');
    if (eq == std::string::npos) continue;
    const std::string key = tok.substr(0, eq);
    const std::string val = tok.substr(eq + 1);
    long long parsed = 0;
    const auto [ptr, ec] = std::from_chars(val.data(), val.data() + val.size(), parsed);
    if (ec != std::errc{} || ptr != val.data() + val.size()) continue;
    if (key == "n") n = static_cast<Index>(parsed);
    if (key == "T") T = static_cast<int>(parsed);
  }
}

}  // namespace detail

/**
 * Parses the whitespace-separated edge-list format "t i j weight" (1-based t,
 * 0-based vertices, '#' comments). Each edge is mirrored; repeating an edge
 * (in either orientation) with the same weight is accepted, a different
 * weight is a FormatError.
 *
 * Vertex count: `n` if given, else a "# n=.." header, else 1 + max index.
 * Snapshots: t = 1..T when a "# T=.." header is present (missing instants are
 * empty), else one snapshot per distinct time index.
 */
inline std::vector<SnapshotMatrix> parse_sequence(std::istream& in, std::optional<Index> n = std::nullopt) {
  using Key = std::tuple<int, Index, Index>;
  std::map<Key, double> edges;
  std::optional<Index> header_n;
  std::optional<int> header_T;
  Index max_index = -1;

  std::string raw;
  int line_no = 0;
  while (std::getline(in, raw)) {
    ++line_no;
    std::string_view line = detail::trim(raw);
    if (line.empty()) continue;
    if (line.front() == '#') {
      detail::parse_header(line.substr(1), header_n, header_T);
      continue;
    }
    std::istringstream fields{std::string(line)};
    std::string ts, is, js, ws, extra;
    if (!(fields >> ts >> is >> js >> ws) || (fields >> extra)) {
      throw FormatError("line " + std::to_string(line_no) + ": expected 't i j weight'");
    }
    const int t = detail::parse_number<int>(ts, line_no, "time index");
    const auto i = detail::parse_number<long long>(is, line_no, "vertex index");
    const auto j = detail::parse_number<long long>(js, line_no, "vertex index");
    const double w = detail::parse_number<double>(ws, line_no, "weight");
    if (t < 1) throw FormatError("line " + std::to_string(line_no) + ": time index must be >= 1");
    if (i < 0 || j < 0) throw FormatError("line " + std::to_string(line_no) + ": negative vertex index");
    if (!std::isfinite(w) || w < 0.0) {
      throw FormatError("line " + std::to_string(line_no) + ": weight must be finite and >= 0");
    }
    const Key key{t, std::min<Index>(i, j), std::max<Index>(i, j)};
    if (auto [it, inserted] = edges.emplace(key, w); !inserted && it->second != w) {
      throw FormatError("line " + std::to_string(line_no) + ": conflicting weight for edge (" +
                        std::to_string(i) + "," + std::to_string(j) + ") at t=" + std::to_string(t));
    }
    max_index = std::max<Index>(max_index, std::max<Index>(i, j));
  }

  const Index count = n ? *n : header_n ? *header_n : max_index + 1;
  if (count < 2) throw FormatError("sequence needs at least 2 vertices");
  if (max_index >= count) {
    throw FormatError("vertex index " + std::to_string(max_index) + " exceeds n=" + std::to_string(count));
  }

  std::vector<int> times;
  if (header_T) {
    for (int t = 1; t <= *header_T; ++t) times.push_back(t);
    for (const auto& [key, w] : edges) {
      if (std::get<0>(key) > *header_T) throw FormatError("time index exceeds header T");
    }
  } else {
    for (const auto& [key, w] : edges) {
      if (times.empty() || times.back() != std::get<0>(key)) times.push_back(std::get<0>(key));
    }
  }

  std::map<int, Matrix> dense;
  for (int t : times) dense.emplace(t, Matrix::Zero(count, count));
  for (const auto& [key, w] : edges) {
    const auto& [t, i, j] = key;
    Matrix& m = dense.at(t);
    m(i, j) = w;
    m(j, i) = w;
  }
  std::vector<SnapshotMatrix> out;
  out.reserve(dense.size());
  for (auto& [t, m] : dense) out.emplace_back(std::move(m), t);
  return out;
}

inline std::vector<SnapshotMatrix> ingest_sequence(const std::string& path, std::optional<Index> n = std::nullopt) {
  std::ifstream in(path);
  if (!in) throw FormatError("cannot open '" + path + "'");
  return parse_sequence(in, n);
}

/// Writes the upper triangle (i <= j) of every nonzero entry plus a header.
inline void write_sequence(std::ostream& out, const std::vector<SnapshotMatrix>& snapshots) {
  if (snapshots.empty()) throw InvalidArgument("write_sequence: no snapshots");
  int t_max = 0;
  for (const SnapshotMatrix& s : snapshots) t_max = std::max(t_max, s.t());
  out << "# t i j weight\n";
  out << "# n=" << snapshots.front().n() << " T=" << t_max << "\n";
  for (const SnapshotMatrix& s : snapshots) {
    const Matrix& w = s.weights();
    for (Index i = 0; i < w.rows(); ++i) {
      for (Index j = i; j < w.cols(); ++j) {
        if (w(i, j) != 0.0) out << s.t() << ' ' << i << ' ' << j << ' ' << format_double(w(i, j)) << '\n';
      }
    }
  }
}

inline void write_sequence(const std::string& path, const std::vector<SnapshotMatrix>& snapshots) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot write '" + path + "'");
  write_sequence(out, snapshots);
}

/// Minimal CSV writer: header on construction, one row per call.
class CsvWriter {
 public:
  CsvWriter(const std::string& path, const std::vector<std::string>& header)
      : out_(path, std::ios::binary) {
    if (!out_) throw Error("cannot write '" + path + "'");
    row(header);
  }

  template <typename... Fields>
  void write(const Fields&... fields) {
    bool first = true;
    ((out_ << (first ? "" : ",") << to_field(fields), first = false), ...);
    out_ << '\n';
  }

  void row(const std::vector<std::string>& fields) {
    for (std::size_t i = 0; i < fields.size(); ++i) out_ << (i ? "," : "") << fields[i];
    out_ << '\n';
  }

 private:
  static std::string to_field(double v) { return format_double(v); }
  static std::string to_field(const std::string& s) { return s; }
  static std::string to_field(std::string_view s) { return std::string(s); }
  static std::string to_field(const char* s) { return s; }
  static std::string to_field(bool b) { return b ? "1" : "0"; }
  template <typename T>
    requires std::is_integral_v<T>
  static std::string to_field(T v) {
    return std::to_string(v);
  }

  std::ofstream out_;
};

}  // namespace cdp

#endif  // CDP_IO_HPP_

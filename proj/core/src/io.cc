// Copyright 2026 The planted Authors
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

#include "planted/io.h"

#include <charconv>
#include <cmath>
#include <fstream>
#include <istream>
#include <limits>
#include <ostream>
#include <sstream>
#include <string>
#include <system_error>
#include <utility>
#include <vector>

#include <nlohmann/json.hpp>

#include "planted/error.h"

namespace planted {
namespace {

using nlohmann::json;

[[noreturn]] void parse_error(const std::string& what) {
  throw Error(ErrorCode::kParse, what);
}

// Reads one whitespace-delimited integer, rejecting anything else.
std::int64_t read_int(std::istream& in, const char* what) {
  std::string token;
  if (!(in >> token)) parse_error(std::string("missing ") + what);
  std::int64_t value = 0;
  const auto* end = token.data() + token.size();
  const auto [ptr, ec] = std::from_chars(token.data(), end, value);
  if (ec != std::errc() || ptr != end) parse_error(std::string("bad ") + what + ": '" + token + "'");
  return value;
}

double read_real(std::istream& in, const char* what) {
  std::string token;
  if (!(in >> token)) parse_error(std::string("missing ") + what);
  if (token == "inf") return std::numeric_limits<double>::infinity();
  if (token == "-inf") return -std::numeric_limits<double>::infinity();
  if (token == "nan") return std::numeric_limits<double>::quiet_NaN();
  double value = 0.0;
  const auto* end = token.data() + token.size();
  const auto [ptr, ec] = std::from_chars(token.data(), end, value);
  if (ec != std::errc() || ptr != end) parse_error(std::string("bad ") + what + ": '" + token + "'");
  return value;
}

void expect_end(std::istream& in, const char* what) {
  std::string extra;
  if (in >> extra) parse_error(std::string("trailing data after ") + what);
}

std::ifstream open_in(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::kIo, "cannot open " + path.string());
  return in;
}

std::ofstream open_out(const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(ErrorCode::kIo, "cannot write " + path.string());
  return out;
}

void finish(std::ofstream& out, const std::filesystem::path& path) {
  out.flush();
  if (!out) throw Error(ErrorCode::kIo, "write failed: " + path.string());
}

json vertex_array(const VertexSet& set) {
  json a = json::array();
  for (Vertex v : set) a.push_back(v);
  return a;
}

VertexSet parse_vertex_array(const json& a) {
  if (!a.is_array()) parse_error("expected an array of vertex ids");
  VertexSet out;
  out.reserve(a.size());
  for (const auto& v : a) {
    if (!v.is_number_integer()) parse_error("vertex id must be an integer");
    out.push_back(v.get<Vertex>());
  }
  return out;
}

}  // namespace

std::string format_double(double value) {
  if (std::isnan(value)) return "nan";
  if (std::isinf(value)) return value > 0 ? "inf" : "-inf";
  char buf[32];
  const auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), value);
  check_invariant(ec == std::errc(), "to_chars failed");
  return std::string(buf, ptr);
}

void write_graph(std::ostream& out, const Graph& g) {
  const auto edges = g.edges();
  out << g.n() << ' ' << edges.size() << '\n';
  for (const auto& [u, v] : edges) out << u << ' ' << v << '\n';
}

Graph read_graph(std::istream& in) {
  const std::int64_t n = read_int(in, "vertex count");
  const std::int64_t m = read_int(in, "edge count");
  if (n < 0 || m < 0) parse_error("negative graph header");
  if (n > 0 && m > n * (n - 1) / 2) parse_error("more edges than vertex pairs");
  Graph g(n);
  for (std::int64_t e = 0; e < m; ++e) {
    const Vertex u = read_int(in, "edge endpoint");
    const Vertex v = read_int(in, "edge endpoint");
    if (u < 0 || v >= n || u >= v) {
      parse_error("edge " + std::to_string(e) + " must satisfy 0 <= u < v < n");
    }
    if (g.has_edge(u, v)) parse_error("duplicate edge " + std::to_string(u) + " " + std::to_string(v));
    g.add_edge(u, v);
  }
  expect_end(in, "edge list");
  return g;
}

void write_partition(std::ostream& out, const PlantedPartition& part) {
  const auto& a = part.assignment();
  for (std::size_t i = 0; i < a.size(); ++i) {
    if (i > 0) out << ' ';
    out << a[i];
  }
  out << '\n';
}

PlantedPartition read_partition(std::istream& in) {
  std::vector<std::int64_t> ids;
  std::string token;
  while (in >> token) {
    std::int64_t value = 0;
    const auto* end = token.data() + token.size();
    const auto [ptr, ec] = std::from_chars(token.data(), end, value);
    if (ec != std::errc() || ptr != end) parse_error("bad cluster id '" + token + "'");
    ids.push_back(value);
  }
  if (ids.empty()) parse_error("empty partition");
  try {
    return PlantedPartition(std::move(ids));
  } catch (const Error& e) {
    parse_error(std::string("invalid partition: ") + e.what());
  }
}

void write_matrix(std::ostream& out, const SymMatrix& a) {
  const Eigen::Index m = a.dim();
  out << m << '\n';
  for (Eigen::Index i = 0; i < m; ++i) {
    for (Eigen::Index j = 0; j < m; ++j) {
      if (j > 0) out << ' ';
      out << format_double(a(i, j));
    }
    out << '\n';
  }
}

SymMatrix read_matrix(std::istream& in) {
  const std::int64_t m = read_int(in, "matrix dimension");
  if (m < 0) parse_error("negative matrix dimension");
  Eigen::MatrixXd data(m, m);
  for (Eigen::Index i = 0; i < m; ++i) {
    for (Eigen::Index j = 0; j < m; ++j) data(i, j) = read_real(in, "matrix entry");
  }
  expect_end(in, "matrix");
  if (data != data.transpose()) {
    parse_error("matrix is not symmetric");
  }
  return SymMatrix(data);
}

Graph load_graph(const std::filesystem::path& path) {
  auto in = open_in(path);
  return read_graph(in);
}

void save_graph(const std::filesystem::path& path, const Graph& g) {
  auto out = open_out(path);
  write_graph(out, g);
  finish(out, path);
}

PlantedPartition load_partition(const std::filesystem::path& path) {
  auto in = open_in(path);
  return read_partition(in);
}

void save_partition(const std::filesystem::path& path, const PlantedPartition& part) {
  auto out = open_out(path);
  write_partition(out, part);
  finish(out, path);
}

std::string recovery_result_json(const RecoveryResult& result, std::optional<bool> exact_match) {
  json j;
  j["s"] = result.s;
  j["clusters"] = json::array();
  for (const auto& c : result.clusters) j["clusters"].push_back(vertex_array(c));
  j["leftover"] = vertex_array(result.leftover);
  if (exact_match) j["exact_match"] = *exact_match;
  return j.dump();
}

RecoveryResult parse_recovery_result_json(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::exception& e) {
    parse_error(std::string("recovery result: ") + e.what());
  }
  if (!j.is_object() || !j.contains("s") || !j.contains("clusters") || !j.contains("leftover")) {
    parse_error("recovery result needs s, clusters and leftover");
  }
  if (!j["s"].is_number_integer()) parse_error("s must be an integer");
  if (!j["clusters"].is_array()) parse_error("clusters must be an array");
  RecoveryResult out;
  out.s = j["s"].get<std::int64_t>();
  for (const auto& c : j["clusters"]) out.clusters.push_back(parse_vertex_array(c));
  out.leftover = parse_vertex_array(j["leftover"]);
  return out;
}

void write_bound_report_header(std::ostream& out) {
  out << "name,lhs,rhs,satisfied,n,k,s,p,q,seed,J_or_S\n";
}

void write_bound_report_row(std::ostream& out, const BoundReport& r) {
  const auto& c = r.context;
  out << r.name << ',' << format_double(r.lhs) << ',' << format_double(r.rhs) << ','
      << (r.satisfied ? "true" : "false") << ',' << c.n << ',' << c.k << ',' << c.s << ','
      << format_double(c.p) << ',' << format_double(c.q) << ',';
  if (c.seed) out << *c.seed;
  out << ',' << c.subset << '\n';
}

void write_bound_reports(std::ostream& out, std::span<const BoundReport> reports) {
  write_bound_report_header(out);
  for (const auto& r : reports) write_bound_report_row(out, r);
}

}  // namespace planted

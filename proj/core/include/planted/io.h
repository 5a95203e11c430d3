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

#ifndef PLANTED_IO_H_
#define PLANTED_IO_H_

#include <filesystem>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>

#include "planted/graphgen.h"
#include "planted/lemmas.h"
#include "planted/recovery.h"
#include "planted/spectral.h"

namespace planted {

// Shortest decimal text that parses back to exactly `value`; "inf", "-inf"
// and "nan" for non-finite values.
std::string format_double(double value);

// Graph text format: a header line "n m", then m lines "u v" with
// 0 <= u < v < n, LF line endings.
void write_graph(std::ostream& out, const Graph& g);
Graph read_graph(std::istream& in);

// Partition text format: one line of n space-separated cluster ids.
void write_partition(std::ostream& out, const PlantedPartition& part);
PlantedPartition read_partition(std::istream& in);

// Matrix dump: a header line "m", then m lines of m decimal values.
void write_matrix(std::ostream& out, const SymMatrix& a);
SymMatrix read_matrix(std::istream& in);

// File wrappers; failures to open raise kIo, malformed content kParse.
Graph load_graph(const std::filesystem::path& path);
void save_graph(const std::filesystem::path& path, const Graph& g);
PlantedPartition load_partition(const std::filesystem::path& path);
void save_partition(const std::filesystem::path& path, const PlantedPartition& part);

// {"s": int, "clusters": [[int...]...], "leftover": [int...]}, plus
// "exact_match" when a verdict is supplied.
std::string recovery_result_json(const RecoveryResult& result,
                                 std::optional<bool> exact_match = std::nullopt);
RecoveryResult parse_recovery_result_json(const std::string& text);

// Bound-report CSV: name,lhs,rhs,satisfied,n,k,s,p,q,seed,J_or_S
void write_bound_report_header(std::ostream& out);
void write_bound_report_row(std::ostream& out, const BoundReport& report);
void write_bound_reports(std::ostream& out, std::span<const BoundReport> reports);

}  // namespace planted

#endif  // PLANTED_IO_H_

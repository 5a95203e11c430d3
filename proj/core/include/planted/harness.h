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

#ifndef PLANTED_HARNESS_H_
#define PLANTED_HARNESS_H_

#include <atomic>
#include <cstdint>
#include <filesystem>
#include <functional>
#include <map>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "planted/baseline.h"
#include "planted/graphgen.h"
#include "planted/lemmas.h"
#include "planted/recovery.h"

namespace planted {

// Names accepted in a check list.
inline constexpr std::string_view kCheckNorm = "norm";        // norm deviation + Weyl + row sum
inline constexpr std::string_view kCheckSeparation = "sep";   // eigenvalue separation
inline constexpr std::string_view kCheckProjector = "proj";   // projector deviation
inline constexpr std::string_view kCheckConcentration = "conc";
inline constexpr std::string_view kCheckFk = "fk";            // submatrix norms over cluster unions
inline constexpr std::string_view kCheckGoodColumn = "goodcol";  // good column + purity

// Parses "norm,proj,..." into a validated set. Throws kInvalidConfig on an
// unknown name.
std::set<std::string> parse_checks(std::string_view list);
std::set<std::string> default_checks();

struct CellSpec {
  std::int64_t n = 0;
  std::int64_t s = 0;
  double p = 0.0;
  double q = 0.0;

  std::int64_t k() const { return s == 0 ? 0 : n / s; }
};

struct TrialOptions {
  std::set<std::string> checks = default_checks();
  // Epsilon for the neighbourhood checks. nullopt measures it per instance
  // as ||P̂ - H/s||_2.
  std::optional<double> epsilon;
  // Cluster-size constant for the theorem regime; when set, epsilon-driven
  // checks are repeated with 8 / ((p - q) c - 8) under an "@theorem" suffix.
  std::optional<double> theorem_c;
  bool baseline = true;
  bool shuffle = true;
  bool record_timing = false;
  // Also list every individual concentration violation among the bounds.
  bool record_violations = false;
};

struct TrialReport {
  std::int64_t cell = 0;
  CellSpec spec;
  std::int64_t trial = 0;
  std::uint64_t seed = 0;
  bool recovered_exactly = false;
  std::optional<bool> baseline_recovered_exactly;
  std::vector<double> pivot_masses;       // one per recursion level
  std::vector<double> level_deviations;   // ||P̂ - H_J/s||_2 while levels stay on true unions
  double projector_deviation = 0.0;       // level_deviations[0]
  std::int64_t concentration_violations = -1;  // -1 when not checked
  std::vector<BoundReport> bounds;
  std::vector<std::string> notes;
  std::optional<double> wall_time_ms;
};

struct Instance {
  PlantedPartition truth;
  Graph graph;
};

// The planted partition of `spec` (relabelled by a seed-derived random
// permutation when `shuffle` is set) and a graph sampled from it.
Instance make_instance(const CellSpec& spec, std::uint64_t seed, bool shuffle = true);

// Recovers `g`, compares with `truth` and runs the requested checks on the
// chain of vertex sets the recursion visits while they remain unions of
// planted clusters. params.seed seeds the cluster-union sample of the fk
// check and is recorded in every report context.
TrialReport evaluate_instance(const Graph& g, const PlantedPartition& truth,
                              const ModelParams& params, const TrialOptions& options);

// Builds the instance for one seed (shuffled planted partition, sampled
// graph), recovers it, compares with the truth and runs the requested
// checks. Deterministic in (spec, seed, options) apart from wall time.
TrialReport run_trial(const CellSpec& spec, std::uint64_t seed, const TrialOptions& options,
                      std::int64_t cell_index = 0, std::int64_t trial_index = 0);

struct ExperimentConfig {
  std::vector<std::int64_t> n;
  std::vector<std::int64_t> s;  // either s or k lists a cell's cluster size
  std::vector<std::int64_t> k;
  std::vector<double> p;
  std::vector<double> q;
  std::int64_t trials = 1;
  std::uint64_t seed0 = 0;
  TrialOptions trial;
  bool emit_plot_data = false;
  std::optional<std::filesystem::path> out_dir;

  // Throws kInvalidConfig (kParse for malformed JSON).
  static ExperimentConfig from_json(std::string_view text);
  static ExperimentConfig load(const std::filesystem::path& path);

  // Cartesian product n x (s|k) x p x q in that nesting order. Throws
  // kInvalidConfig if any cell is invalid, so a grid is either run whole or
  // not at all.
  std::vector<CellSpec> cells() const;
};

struct BoundTally {
  std::int64_t reports = 0;
  std::int64_t satisfied = 0;
};

struct CellSummary {
  std::int64_t cell = 0;
  CellSpec spec;
  std::int64_t trials = 0;
  std::int64_t exact = 0;
  std::int64_t baseline_trials = 0;
  std::int64_t baseline_exact = 0;
  double mean_projector_deviation = 0.0;
  double median_projector_deviation = 0.0;
  double admissible_c = 0.0;
  bool below_theorem_constants = false;  // s < admissible_c * sqrt(n)
  std::map<std::string, BoundTally> bounds;
};

// Folds trial reports into per-cell aggregates. Depends only on the
// reports, never on their order.
std::vector<CellSummary> summarize(std::span<const CellSpec> cells,
                                   std::span<const TrialReport> trials);

std::string trial_report_json(const TrialReport& report);
TrialReport parse_trial_report_json(std::string_view line);

void write_summary_csv(std::ostream& out, std::span<const CellSummary> cells);
void write_bounds_csv(std::ostream& out, std::span<const CellSummary> cells);
void write_plot_data_csv(std::ostream& out, std::span<const TrialReport> trials);

struct GridOptions {
  int jobs = 1;
  std::filesystem::path out_dir;
  // Polled between trials; once true no new trial starts and completed
  // ones are flushed.
  const std::atomic<bool>* stop = nullptr;
  std::function<void(const TrialReport&)> on_trial;
};

struct GridResult {
  std::vector<CellSpec> cells;
  std::vector<TrialReport> trials;  // (cell, trial) order
  std::vector<CellSummary> summaries;
  bool interrupted = false;
};

// Runs every cell x trial, writes trials.jsonl, summary.csv, bounds.csv,
// bound_reports.csv (and plot_data.csv when requested) into out_dir. Output bytes depend only
// on the config.
GridResult run_grid(const ExperimentConfig& config, const GridOptions& options);

inline constexpr const char* kTrialsFile = "trials.jsonl";
inline constexpr const char* kSummaryFile = "summary.csv";
inline constexpr const char* kBoundsFile = "bounds.csv";
inline constexpr const char* kBoundReportsFile = "bound_reports.csv";
inline constexpr const char* kPlotDataFile = "plot_data.csv";

}  // namespace planted

#endif  // PLANTED_HARNESS_H_

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

#include "planted/harness.h"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <condition_variable>
#include <exception>
#include <fstream>
#include <limits>
#include <mutex>
#include <ostream>
#include <sstream>
#include <string>
#include <thread>
#include <utility>

#include <nlohmann/json.hpp>

#include "planted/error.h"
#include "planted/io.h"
#include "planted/random.h"

namespace planted {
namespace {

using nlohmann::json;

[[noreturn]] void invalid(const std::string& what) {
  throw Error(ErrorCode::kInvalidConfig, what);
}

const std::set<std::string>& known_checks() {
  static const std::set<std::string> names = {
      std::string(kCheckNorm),          std::string(kCheckSeparation),
      std::string(kCheckProjector),     std::string(kCheckConcentration),
      std::string(kCheckFk),            std::string(kCheckGoodColumn)};
  return names;
}

// Non-finite doubles have no JSON literal; they travel as strings.
json encode_double(double x) {
  if (std::isfinite(x)) return x;
  return format_double(x);
}

double decode_double(const json& j) {
  if (j.is_number()) return j.get<double>();
  if (j.is_string()) {
    const auto& s = j.get_ref<const std::string&>();
    if (s == "inf") return std::numeric_limits<double>::infinity();
    if (s == "-inf") return -std::numeric_limits<double>::infinity();
    if (s == "nan") return std::numeric_limits<double>::quiet_NaN();
  }
  throw Error(ErrorCode::kParse, "expected a number");
}

json encode_doubles(const std::vector<double>& xs) {
  json a = json::array();
  for (double x : xs) a.push_back(encode_double(x));
  return a;
}

std::vector<double> decode_doubles(const json& a) {
  std::vector<double> out;
  for (const auto& x : a) out.push_back(decode_double(x));
  return out;
}

template <typename T>
std::vector<T> scalar_or_list(const json& j, const char* key) {
  std::vector<T> out;
  auto one = [&](const json& x) {
    if constexpr (std::is_integral_v<T>) {
      if (!x.is_number_integer()) invalid(std::string(key) + " must be an integer");
    } else {
      if (!x.is_number()) invalid(std::string(key) + " must be a number");
    }
    out.push_back(x.get<T>());
  };
  if (j.is_array()) {
    for (const auto& x : j) one(x);
  } else {
    one(j);
  }
  if (out.empty()) invalid(std::string(key) + " must not be empty");
  return out;
}

bool get_bool(const json& j, const char* key) {
  if (!j.is_boolean()) invalid(std::string(key) + " must be a boolean");
  return j.get<bool>();
}

void validate_cell(const CellSpec& c) {
  if (c.n < 1) invalid("n must be positive");
  if (c.s < 1) invalid("s must be positive");
  if (c.n % c.s != 0) {
    invalid("s=" + std::to_string(c.s) + " does not divide n=" + std::to_string(c.n));
  }
  if (!(c.q >= 0.0 && c.q < c.p && c.p <= 1.0)) {
    invalid("need 0 <= q < p <= 1, got p=" + format_double(c.p) + " q=" + format_double(c.q));
  }
}

// Membership test for "the current vertex set is a union of planted
// clusters"; returns the clusters involved when it is.
std::optional<std::vector<std::int64_t>> cluster_union(std::span<const Vertex> vertices,
                                                       const PlantedPartition& part) {
  std::vector<std::int64_t> count(static_cast<std::size_t>(part.k()), 0);
  for (const Vertex v : vertices) ++count[static_cast<std::size_t>(part.cluster_of(v))];
  std::vector<std::int64_t> clusters;
  for (std::int64_t i = 0; i < part.k(); ++i) {
    const auto c = count[static_cast<std::size_t>(i)];
    if (c == 0) continue;
    if (c != part.s()) return std::nullopt;
    clusters.push_back(i);
  }
  return clusters;
}

void append(std::vector<BoundReport>& out, BoundReport r, const std::string& suffix = {}) {
  r.name += suffix;
  out.push_back(std::move(r));
}

constexpr const char* kTheoremSuffix = "@theorem";

double median(std::vector<double> xs) {
  if (xs.empty()) return std::numeric_limits<double>::quiet_NaN();
  std::sort(xs.begin(), xs.end());
  const std::size_t mid = xs.size() / 2;
  return xs.size() % 2 == 1 ? xs[mid] : 0.5 * (xs[mid - 1] + xs[mid]);
}

}  // namespace

std::set<std::string> parse_checks(std::string_view list) {
  std::set<std::string> out;
  std::size_t start = 0;
  while (start <= list.size()) {
    const std::size_t comma = std::min(list.find(',', start), list.size());
    std::string name(list.substr(start, comma - start));
    name.erase(0, name.find_first_not_of(" \t"));
    name.erase(name.find_last_not_of(" \t") + 1);
    if (!name.empty()) {
      if (!known_checks().contains(name)) invalid("unknown check '" + name + "'");
      out.insert(std::move(name));
    }
    start = comma + 1;
  }
  return out;
}

std::set<std::string> default_checks() {
  return {std::string(kCheckNorm), std::string(kCheckProjector),
          std::string(kCheckConcentration)};
}

Instance make_instance(const CellSpec& spec, std::uint64_t seed, bool shuffle) {
  validate_cell(spec);
  PlantedPartition truth = make_partition(spec.n, spec.s);
  if (shuffle) truth = truth.permuted(random_permutation(spec.n, mix64(seed ^ 0x5bd1e995ULL)));
  Graph graph = sample_graph(truth, ModelParams{spec.p, spec.q, seed});
  return Instance{std::move(truth), std::move(graph)};
}

TrialReport run_trial(const CellSpec& spec, std::uint64_t seed, const TrialOptions& options,
                      std::int64_t cell_index, std::int64_t trial_index) {
  const auto started = std::chrono::steady_clock::now();
  const Instance instance = make_instance(spec, seed, options.shuffle);
  TrialReport report =
      evaluate_instance(instance.graph, instance.truth, ModelParams{spec.p, spec.q, seed}, options);
  report.cell = cell_index;
  report.trial = trial_index;
  if (options.record_timing) {
    report.wall_time_ms = std::chrono::duration<double, std::milli>(
                              std::chrono::steady_clock::now() - started)
                              .count();
  }
  return report;
}

TrialReport evaluate_instance(const Graph& g, const PlantedPartition& truth,
                              const ModelParams& params, const TrialOptions& options) {
  params.validate();
  if (g.n() != truth.n()) throw Error(ErrorCode::kDimensionMismatch, "graph and partition sizes");
  const CellSpec spec{truth.n(), truth.s(), params.p, params.q};
  const std::uint64_t seed = params.seed;
  const auto has = [&](std::string_view name) { return options.checks.contains(std::string(name)); };

  std::optional<Constants> theorem;
  if (options.theorem_c) theorem = Constants::from_c(spec.p, spec.q, *options.theorem_c);
  const double c_prime = theorem ? theorem->c_prime : Constants::admissible(spec.p, spec.q).c_prime;

  TrialReport report;
  report.spec = spec;
  report.seed = seed;

  BoundContext base;
  base.n = spec.n;
  base.k = spec.k();
  base.s = spec.s;
  base.p = spec.p;
  base.q = spec.q;
  base.seed = seed;

  bool on_truth = true;
  std::vector<double> deviations;
  RecoveryOptions ropts;
  ropts.observer = [&](const LevelView& view) {
    if (!on_truth) return;
    const auto clusters = cluster_union(view.vertices, truth);
    if (!clusters) {
      on_truth = false;
      return;
    }
    const PlantedPartition part_j = truth.restricted(view.vertices);
    const std::int64_t l = part_j.k();
    check_invariant(l == view.k, "cluster union has unexpected size");
    const SymMatrix h_j = true_cluster_matrix(part_j);
    const double eps_hat = empirical_epsilon(view.projector->to_dense(), h_j, spec.s);
    deviations.push_back(eps_hat);

    BoundContext ctx = base;
    ctx.subset = ClusterMask::of(truth.k(), *clusters).to_hex();
    const bool need_matrices = has(kCheckNorm) || has(kCheckSeparation) || has(kCheckProjector);
    if (need_matrices) {
      const SymMatrix g_hat_j = view.graph->to_matrix();
      const SymMatrix g_j = expectation_matrix(part_j, params);
      if (has(kCheckNorm)) {
        append(report.bounds, check_norm_deviation(g_hat_j, g_j, ctx));
        append(report.bounds, check_weyl(g_hat_j, g_j, ctx));
        append(report.bounds, check_row_sum_bound(g_hat_j, ctx));
      }
      if (has(kCheckSeparation)) {
        auto sep = check_separation(g_hat_j, g_j, l, c_prime, ctx);
        append(report.bounds, std::move(sep.top_lower));
        append(report.bounds, std::move(sep.top_upper));
        append(report.bounds, std::move(sep.rest));
      }
      if (has(kCheckProjector)) {
        auto dev = check_projector_deviation(g_hat_j, g_j, l, ctx);
        append(report.bounds, std::move(dev.spectral_instance));
        append(report.bounds, std::move(dev.spectral_trivial));
        append(report.bounds, std::move(dev.frobenius_rank));
        if (theorem) {
          append(report.bounds, check_projector_deviation_theorem(dev.spectral, *theorem, ctx));
        }
      }
    }
    if (has(kCheckGoodColumn)) {
      const auto& w_local = view.candidates[static_cast<std::size_t>(view.pivot)].members;
      const auto run = [&](double eps, const std::string& suffix, const char* label) {
        if (!(eps > 0.0 && eps <= 0.1)) {
          report.notes.push_back("goodcol" + suffix + " skipped at J=" + ctx.subset + ": " + label +
                                 " epsilon " + format_double(eps) + " outside (0, 0.1]");
          return;
        }
        append(report.bounds, check_good_column(view.candidates, spec.s, eps, ctx), suffix);
        append(report.bounds, check_purity(w_local, part_j, eps, ctx), suffix);
      };
      run(options.epsilon.value_or(eps_hat), "", options.epsilon ? "configured" : "measured");
      if (theorem) run(theorem->epsilon, kTheoremSuffix, "theorem");
    }
  };

  const RecoveryResult result = identify_clusters(g, spec.s, ropts);
  report.recovered_exactly = same_partition(result, truth);
  for (const auto& level : result.levels) report.pivot_masses.push_back(level.pivot_mass);
  report.level_deviations = deviations;
  report.projector_deviation =
      deviations.empty() ? std::numeric_limits<double>::quiet_NaN() : deviations.front();

  if (has(kCheckConcentration)) {
    const auto run = [&](double eps, const std::string& suffix, const char* label) {
      if (!(eps > 0.0)) {
        report.notes.push_back("conc" + suffix + " skipped: " + label + " epsilon " +
                               format_double(eps) + " is not positive");
        return;
      }
      auto conc = check_concentration(g, truth, params, eps, base,
                                      options.record_violations ? kMaxViolationRecords : 0);
      if (suffix.empty()) report.concentration_violations = conc.violation_count;
      if (options.record_violations && conc.overflow) {
        report.notes.push_back("conc" + suffix + " violation list truncated at " +
                               std::to_string(kMaxViolationRecords));
      }
      for (auto& v : conc.violations) append(report.bounds, std::move(v), suffix);
      append(report.bounds, std::move(conc.in_cluster), suffix);
      append(report.bounds, std::move(conc.out_cluster), suffix);
      append(report.bounds, std::move(conc.separation), suffix);
    };
    run(options.epsilon.value_or(report.projector_deviation), "",
        options.epsilon ? "configured" : "measured");
    if (theorem) run(theorem->epsilon, kTheoremSuffix, "theorem");
  }

  if (has(kCheckFk)) {
    const SymMatrix x = noise_matrix(g, truth, params);
    const auto family = cluster_union_family(truth.k(), mix64(seed ^ 0x9e3779b97f4a7c15ULL));
    for (auto& r : check_fk_submatrices(x, truth, family, noise_sigma(spec.p, spec.q), 1.0, base)) {
      append(report.bounds, std::move(r));
    }
  }

  if (options.baseline) {
    report.baseline_recovered_exactly = same_partition(baseline_common_neighbors(g, spec.s), truth);
  }
  return report;
}

ExperimentConfig ExperimentConfig::from_json(std::string_view text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::exception& e) {
    throw Error(ErrorCode::kParse, std::string("config: ") + e.what());
  }
  if (!j.is_object()) invalid("config must be a JSON object");

  static const std::set<std::string> keys = {
      "n",        "s",     "k",        "p",        "q",     "trials",        "seed0",
      "checks",   "epsilon", "c",      "baseline", "shuffle", "record_timing", "emit_plot_data",
      "out"};
  for (const auto& [key, value] : j.items()) {
    if (!keys.contains(key)) invalid("unknown config key '" + key + "'");
  }
  for (const char* key : {"n", "p", "q"}) {
    if (!j.contains(key)) invalid(std::string("missing config key '") + key + "'");
  }
  if (j.contains("s") == j.contains("k")) invalid("config needs exactly one of 's' and 'k'");

  ExperimentConfig cfg;
  cfg.n = scalar_or_list<std::int64_t>(j["n"], "n");
  if (j.contains("s")) cfg.s = scalar_or_list<std::int64_t>(j["s"], "s");
  if (j.contains("k")) cfg.k = scalar_or_list<std::int64_t>(j["k"], "k");
  cfg.p = scalar_or_list<double>(j["p"], "p");
  cfg.q = scalar_or_list<double>(j["q"], "q");
  if (j.contains("trials")) {
    if (!j["trials"].is_number_integer()) invalid("trials must be an integer");
    cfg.trials = j["trials"].get<std::int64_t>();
  }
  if (cfg.trials < 1) invalid("trials must be at least 1");
  if (j.contains("seed0")) {
    if (!j["seed0"].is_number_unsigned() && !(j["seed0"].is_number_integer() && j["seed0"].get<std::int64_t>() >= 0)) {
      invalid("seed0 must be a non-negative integer");
    }
    cfg.seed0 = j["seed0"].get<std::uint64_t>();
  }
  if (j.contains("checks")) {
    const auto& c = j["checks"];
    if (c.is_string()) {
      cfg.trial.checks = parse_checks(c.get<std::string>());
    } else if (c.is_array()) {
      std::string joined;
      for (const auto& x : c) {
        if (!x.is_string()) invalid("checks must be strings");
        joined += x.get<std::string>() + ",";
      }
      cfg.trial.checks = parse_checks(joined);
    } else {
      invalid("checks must be a list or a comma-separated string");
    }
  }
  if (j.contains("epsilon")) {
    const auto& e = j["epsilon"];
    if (e.is_string() && e.get<std::string>() == "auto") {
      cfg.trial.epsilon.reset();
    } else if (e.is_number()) {
      cfg.trial.epsilon = e.get<double>();
      if (!(*cfg.trial.epsilon > 0.0)) invalid("epsilon must be positive");
    } else {
      invalid("epsilon must be a positive number or \"auto\"");
    }
  }
  if (j.contains("c")) {
    if (!j["c"].is_number()) invalid("c must be a number");
    cfg.trial.theorem_c = j["c"].get<double>();
  }
  if (j.contains("baseline")) cfg.trial.baseline = get_bool(j["baseline"], "baseline");
  if (j.contains("shuffle")) cfg.trial.shuffle = get_bool(j["shuffle"], "shuffle");
  if (j.contains("record_timing")) {
    cfg.trial.record_timing = get_bool(j["record_timing"], "record_timing");
  }
  if (j.contains("emit_plot_data")) cfg.emit_plot_data = get_bool(j["emit_plot_data"], "emit_plot_data");
  if (j.contains("out")) {
    if (!j["out"].is_string()) invalid("out must be a path string");
    cfg.out_dir = j["out"].get<std::string>();
  }
  (void)cfg.cells();
  return cfg;
}

ExperimentConfig ExperimentConfig::load(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::kIo, "cannot open " + path.string());
  std::ostringstream text;
  text << in.rdbuf();
  return from_json(text.str());
}

std::vector<CellSpec> ExperimentConfig::cells() const {
  if (trials < 1) invalid("trials must be at least 1");
  if (s.empty() == k.empty()) invalid("config needs exactly one of 's' and 'k'");
  const auto& sizes = s.empty() ? k : s;
  std::vector<CellSpec> out;
  for (const auto n_value : n) {
    for (const auto size : sizes) {
      CellSpec cell;
      cell.n = n_value;
      if (s.empty()) {
        if (size < 1) invalid("k must be positive");
        if (n_value % size != 0) {
          invalid("k=" + std::to_string(size) + " does not divide n=" + std::to_string(n_value));
        }
        cell.s = n_value / size;
      } else {
        cell.s = size;
      }
      for (const double p_value : p) {
        for (const double q_value : q) {
          cell.p = p_value;
          cell.q = q_value;
          validate_cell(cell);
          if (trial.theorem_c) {
            const double c_prime = (p_value - q_value) * *trial.theorem_c;
            if (!(c_prime > 16.0)) {
              invalid("c=" + format_double(*trial.theorem_c) + " gives (p-q)c <= 16 at p=" +
                      format_double(p_value) + " q=" + format_double(q_value));
            }
          }
          out.push_back(cell);
        }
      }
    }
  }
  return out;
}

std::vector<CellSummary> summarize(std::span<const CellSpec> cells,
                                   std::span<const TrialReport> trials) {
  std::vector<CellSummary> out(cells.size());
  std::vector<std::vector<double>> deviations(cells.size());
  for (std::size_t i = 0; i < cells.size(); ++i) {
    out[i].cell = static_cast<std::int64_t>(i);
    out[i].spec = cells[i];
    out[i].admissible_c = admissible_c(cells[i].p, cells[i].q);
    out[i].below_theorem_constants =
        static_cast<double>(cells[i].s) < out[i].admissible_c * std::sqrt(static_cast<double>(cells[i].n));
  }
  for (const auto& t : trials) {
    if (t.cell < 0 || static_cast<std::size_t>(t.cell) >= cells.size()) {
      throw Error(ErrorCode::kInvariant, "trial refers to an unknown cell");
    }
    auto& c = out[static_cast<std::size_t>(t.cell)];
    ++c.trials;
    if (t.recovered_exactly) ++c.exact;
    if (t.baseline_recovered_exactly) {
      ++c.baseline_trials;
      if (*t.baseline_recovered_exactly) ++c.baseline_exact;
    }
    if (std::isfinite(t.projector_deviation)) {
      deviations[static_cast<std::size_t>(t.cell)].push_back(t.projector_deviation);
    }
    for (const auto& b : t.bounds) {
      auto& tally = c.bounds[b.name];
      ++tally.reports;
      if (b.satisfied) ++tally.satisfied;
    }
  }
  for (std::size_t i = 0; i < cells.size(); ++i) {
    auto& d = deviations[i];
    if (d.empty()) {
      out[i].mean_projector_deviation = std::numeric_limits<double>::quiet_NaN();
      out[i].median_projector_deviation = std::numeric_limits<double>::quiet_NaN();
      continue;
    }
    // Sorted before summing so the mean does not depend on trial order.
    std::sort(d.begin(), d.end());
    double sum = 0.0;
    for (double x : d) sum += x;
    out[i].mean_projector_deviation = sum / static_cast<double>(d.size());
    out[i].median_projector_deviation = median(d);
  }
  return out;
}

std::string trial_report_json(const TrialReport& r) {
  json j;
  j["cell"] = r.cell;
  j["n"] = r.spec.n;
  j["k"] = r.spec.k();
  j["s"] = r.spec.s;
  j["p"] = r.spec.p;
  j["q"] = r.spec.q;
  j["trial"] = r.trial;
  j["seed"] = r.seed;
  j["recovered_exactly"] = r.recovered_exactly;
  j["baseline_recovered_exactly"] =
      r.baseline_recovered_exactly ? json(*r.baseline_recovered_exactly) : json(nullptr);
  j["pivot_masses"] = encode_doubles(r.pivot_masses);
  j["level_deviations"] = encode_doubles(r.level_deviations);
  j["projector_deviation"] = encode_double(r.projector_deviation);
  j["concentration_violations"] = r.concentration_violations;
  json bounds = json::array();
  for (const auto& b : r.bounds) {
    json e;
    e["name"] = b.name;
    e["lhs"] = encode_double(b.lhs);
    e["rhs"] = encode_double(b.rhs);
    e["relation"] = b.relation == Relation::kAtMost ? "<=" : ">=";
    e["tolerance"] = encode_double(b.tolerance);
    e["satisfied"] = b.satisfied;
    e["subset"] = b.context.subset;
    bounds.push_back(std::move(e));
  }
  j["bounds"] = std::move(bounds);
  j["notes"] = r.notes;
  if (r.wall_time_ms) j["wall_time_ms"] = *r.wall_time_ms;
  return j.dump();
}

TrialReport parse_trial_report_json(std::string_view line) {
  TrialReport r;
  try {
    const json j = json::parse(line);
    r.cell = j.at("cell").get<std::int64_t>();
    r.spec.n = j.at("n").get<std::int64_t>();
    r.spec.s = j.at("s").get<std::int64_t>();
    r.spec.p = j.at("p").get<double>();
    r.spec.q = j.at("q").get<double>();
    r.trial = j.at("trial").get<std::int64_t>();
    r.seed = j.at("seed").get<std::uint64_t>();
    r.recovered_exactly = j.at("recovered_exactly").get<bool>();
    if (!j.at("baseline_recovered_exactly").is_null()) {
      r.baseline_recovered_exactly = j["baseline_recovered_exactly"].get<bool>();
    }
    r.pivot_masses = decode_doubles(j.at("pivot_masses"));
    r.level_deviations = decode_doubles(j.at("level_deviations"));
    r.projector_deviation = decode_double(j.at("projector_deviation"));
    r.concentration_violations = j.at("concentration_violations").get<std::int64_t>();
    BoundContext ctx;
    ctx.n = r.spec.n;
    ctx.k = r.spec.k();
    ctx.s = r.spec.s;
    ctx.p = r.spec.p;
    ctx.q = r.spec.q;
    ctx.seed = r.seed;
    for (const auto& e : j.at("bounds")) {
      BoundReport b;
      b.name = e.at("name").get<std::string>();
      b.lhs = decode_double(e.at("lhs"));
      b.rhs = decode_double(e.at("rhs"));
      const auto rel = e.at("relation").get<std::string>();
      if (rel != "<=" && rel != ">=") throw Error(ErrorCode::kParse, "bad relation '" + rel + "'");
      b.relation = rel == "<=" ? Relation::kAtMost : Relation::kAtLeast;
      b.tolerance = decode_double(e.at("tolerance"));
      b.satisfied = e.at("satisfied").get<bool>();
      b.context = ctx;
      b.context.subset = e.at("subset").get<std::string>();
      r.bounds.push_back(std::move(b));
    }
    r.notes = j.at("notes").get<std::vector<std::string>>();
    if (j.contains("wall_time_ms")) r.wall_time_ms = j["wall_time_ms"].get<double>();
  } catch (const json::exception& e) {
    throw Error(ErrorCode::kParse, std::string("trial report: ") + e.what());
  }
  return r;
}

void write_summary_csv(std::ostream& out, std::span<const CellSummary> cells) {
  out << "cell,n,k,s,p,q,trials,success_rate,baseline_success_rate,mean_projector_deviation,"
         "median_projector_deviation,admissible_c,below_theorem_constants\n";
  for (const auto& c : cells) {
    out << c.cell << ',' << c.spec.n << ',' << c.spec.k() << ',' << c.spec.s << ','
        << format_double(c.spec.p) << ',' << format_double(c.spec.q) << ',' << c.trials << ',';
    if (c.trials > 0) {
      out << format_double(static_cast<double>(c.exact) / static_cast<double>(c.trials));
    }
    out << ',';
    if (c.baseline_trials > 0) {
      out << format_double(static_cast<double>(c.baseline_exact) /
                           static_cast<double>(c.baseline_trials));
    }
    out << ',' << format_double(c.mean_projector_deviation) << ','
        << format_double(c.median_projector_deviation) << ',' << format_double(c.admissible_c)
        << ',' << (c.below_theorem_constants ? "true" : "false") << '\n';
  }
}

void write_bounds_csv(std::ostream& out, std::span<const CellSummary> cells) {
  out << "cell,n,k,s,p,q,name,reports,satisfied,satisfaction_rate\n";
  for (const auto& c : cells) {
    for (const auto& [name, tally] : c.bounds) {
      out << c.cell << ',' << c.spec.n << ',' << c.spec.k() << ',' << c.spec.s << ','
          << format_double(c.spec.p) << ',' << format_double(c.spec.q) << ',' << name << ','
          << tally.reports << ',' << tally.satisfied << ','
          << format_double(static_cast<double>(tally.satisfied) / static_cast<double>(tally.reports))
          << '\n';
    }
  }
}

void write_plot_data_csv(std::ostream& out, std::span<const TrialReport> trials) {
  out << "cell,n,k,s,p,q,trial,seed,metric,level,value\n";
  for (const auto& t : trials) {
    const auto row = [&](const char* metric, std::int64_t level, double value) {
      out << t.cell << ',' << t.spec.n << ',' << t.spec.k() << ',' << t.spec.s << ','
          << format_double(t.spec.p) << ',' << format_double(t.spec.q) << ',' << t.trial << ','
          << t.seed << ',' << metric << ',';
      if (level >= 0) out << level;
      out << ',' << format_double(value) << '\n';
    };
    row("recovered_exactly", -1, t.recovered_exactly ? 1.0 : 0.0);
    if (t.baseline_recovered_exactly) {
      row("baseline_recovered_exactly", -1, *t.baseline_recovered_exactly ? 1.0 : 0.0);
    }
    for (std::size_t i = 0; i < t.pivot_masses.size(); ++i) {
      row("pivot_mass", static_cast<std::int64_t>(i), t.pivot_masses[i]);
    }
    for (std::size_t i = 0; i < t.level_deviations.size(); ++i) {
      row("projector_deviation", static_cast<std::int64_t>(i), t.level_deviations[i]);
    }
  }
}

GridResult run_grid(const ExperimentConfig& config, const GridOptions& options) {
  GridResult result;
  result.cells = config.cells();
  const std::size_t per_cell = static_cast<std::size_t>(config.trials);
  const std::size_t total = result.cells.size() * per_cell;

  std::error_code ec;
  std::filesystem::create_directories(options.out_dir, ec);
  if (ec) throw Error(ErrorCode::kIo, "cannot create " + options.out_dir.string() + ": " + ec.message());
  const auto open = [&](const char* name) {
    std::ofstream out(options.out_dir / name, std::ios::binary | std::ios::trunc);
    if (!out) throw Error(ErrorCode::kIo, "cannot write " + (options.out_dir / name).string());
    return out;
  };
  std::ofstream trials_out = open(kTrialsFile);

  std::vector<std::optional<TrialReport>> slots(total);
  std::mutex mu;
  std::condition_variable ready;
  std::size_t next_task = 0;
  std::size_t finished = 0;
  std::exception_ptr failure;
  bool abort = false;

  const auto stop_requested = [&] {
    return options.stop != nullptr && options.stop->load(std::memory_order_relaxed);
  };

  const auto worker = [&] {
    for (;;) {
      std::size_t task;
      {
        std::lock_guard lock(mu);
        if (abort || next_task >= total || stop_requested()) {
          return;
        }
        task = next_task++;
      }
      const std::size_t cell = task / per_cell;
      const std::size_t trial = task % per_cell;
      const CellSpec& spec = result.cells[cell];
      std::optional<TrialReport> report;
      try {
        report = run_trial(spec, trial_seed(config.seed0, cell, trial), config.trial,
                           static_cast<std::int64_t>(cell), static_cast<std::int64_t>(trial));
      } catch (const Error& e) {
        std::lock_guard lock(mu);
        if (!failure) {
          failure = std::make_exception_ptr(
              Error(e.code(), "cell " + std::to_string(cell) + " (n=" + std::to_string(spec.n) +
                                  " s=" + std::to_string(spec.s) + " p=" + format_double(spec.p) +
                                  " q=" + format_double(spec.q) + ") trial " +
                                  std::to_string(trial) + ": " + e.what()));
        }
        abort = true;
      } catch (...) {
        std::lock_guard lock(mu);
        if (!failure) failure = std::current_exception();
        abort = true;
      }
      {
        std::lock_guard lock(mu);
        if (report) slots[task] = std::move(report);
        ++finished;
      }
      ready.notify_all();
    }
  };

  const int jobs = std::max(1, options.jobs);
  std::vector<std::thread> threads;
  threads.reserve(static_cast<std::size_t>(jobs));
  for (int i = 0; i < jobs; ++i) threads.emplace_back(worker);

  // Writes the completed prefix as it grows so an interrupted run keeps
  // everything finished before the interruption.
  std::size_t written = 0;
  const auto flush_prefix = [&](std::unique_lock<std::mutex>& lock) {
    while (written < total && slots[written]) {
      const TrialReport& t = *slots[written];
      lock.unlock();
      trials_out << trial_report_json(t) << '\n';
      if (options.on_trial) options.on_trial(t);
      lock.lock();
      ++written;
    }
    trials_out.flush();
  };
  {
    std::unique_lock lock(mu);
    for (;;) {
      flush_prefix(lock);
      const bool stopping = abort || stop_requested();
      if (written == total || (stopping && finished == next_task)) break;
      ready.wait_for(lock, std::chrono::milliseconds(100));
    }
  }
  for (auto& t : threads) t.join();
  if (failure) std::rethrow_exception(failure);

  // A stop can leave gaps; later completed trials are still written, in order.
  for (std::size_t i = written; i < total; ++i) {
    if (!slots[i]) continue;
    trials_out << trial_report_json(*slots[i]) << '\n';
    if (options.on_trial) options.on_trial(*slots[i]);
  }
  trials_out.flush();
  if (!trials_out) throw Error(ErrorCode::kIo, "write failed: " + (options.out_dir / kTrialsFile).string());

  for (auto& s : slots) {
    if (s) result.trials.push_back(std::move(*s));
  }
  result.interrupted = result.trials.size() < total;
  result.summaries = summarize(result.cells, result.trials);

  std::ofstream summary_out = open(kSummaryFile);
  write_summary_csv(summary_out, result.summaries);
  std::ofstream bounds_out = open(kBoundsFile);
  write_bounds_csv(bounds_out, result.summaries);
  std::ofstream reports_out = open(kBoundReportsFile);
  write_bound_report_header(reports_out);
  for (const auto& t : result.trials) {
    for (const auto& b : t.bounds) write_bound_report_row(reports_out, b);
  }
  if (config.emit_plot_data) {
    std::ofstream plot_out = open(kPlotDataFile);
    write_plot_data_csv(plot_out, result.trials);
    if (!plot_out.flush()) throw Error(ErrorCode::kIo, "write failed: plot data");
  }
  if (!summary_out.flush() || !bounds_out.flush() || !reports_out.flush()) {
    throw Error(ErrorCode::kIo, "write failed in " + options.out_dir.string());
  }
  return result;
}

}  // namespace planted

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

#include "cli.h"

#include <cmath>
#include <exception>
#include <fstream>
#include <optional>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "planted/harness.h"
#include "planted/io.h"
#include "planted/lemmas.h"
#include "planted/recovery.h"

namespace planted::cli {
namespace {

struct GenerateArgs {
  std::int64_t n = 0;
  std::int64_t s = 0;
  double p = 0.0;
  double q = 0.0;
  std::uint64_t seed = 0;
  std::string out;
  std::string truth;
  bool no_shuffle = false;
};

struct RecoverArgs {
  std::string graph;
  std::int64_t s = 0;
  std::string truth;
};

struct VerifyArgs {
  std::string graph;
  std::string truth;
  std::string checks = "norm,proj,conc";
  std::string epsilon = "auto";
  std::optional<double> p;
  std::optional<double> q;
  std::optional<std::uint64_t> seed;
  std::optional<double> c;
  std::string out;
};

struct ExperimentArgs {
  std::string config;
  int jobs = 1;
  std::string out;
};

struct ConstantsArgs {
  double p = 0.0;
  double q = 0.0;
  std::optional<double> c;
};

int do_generate(const GenerateArgs& a, std::ostream& out) {
  const Instance inst = make_instance(CellSpec{a.n, a.s, a.p, a.q}, a.seed, !a.no_shuffle);
  save_graph(a.out, inst.graph);
  save_partition(a.truth, inst.truth);
  out << "wrote " << a.out << " (n=" << inst.graph.n() << ", m=" << inst.graph.edge_count()
      << ") and " << a.truth << '\n';
  return kExitOk;
}

int do_recover(const RecoverArgs& a, std::ostream& out) {
  const Graph g = load_graph(a.graph);
  const RecoveryResult result = identify_clusters(g, a.s);
  std::optional<bool> exact;
  if (!a.truth.empty()) {
    const PlantedPartition truth = load_partition(a.truth);
    if (truth.n() != g.n()) {
      throw Error(ErrorCode::kInvalidConfig, "truth has " + std::to_string(truth.n()) +
                                                 " vertices, graph has " + std::to_string(g.n()));
    }
    exact = same_partition(result, truth);
  }
  out << recovery_result_json(result, exact) << '\n';
  return kExitOk;
}

// Maximum-likelihood densities of the planted model given the truth.
std::pair<double, double> estimate_densities(const Graph& g, const PlantedPartition& truth) {
  std::int64_t twice_inside = 0;
  for (std::int64_t i = 0; i < truth.k(); ++i) {
    const auto mask = g.make_mask(truth.members(i));
    for (const Vertex v : truth.members(i)) twice_inside += g.neighbors_in(v, mask);
  }
  const std::int64_t inside = twice_inside / 2;
  const std::int64_t across = g.edge_count() - inside;
  const double n = static_cast<double>(truth.n());
  const double s = static_cast<double>(truth.s());
  const double inside_pairs = static_cast<double>(truth.k()) * s * (s - 1.0) / 2.0;
  const double across_pairs = n * (n - 1.0) / 2.0 - inside_pairs;
  if (inside_pairs <= 0.0 || across_pairs <= 0.0) {
    throw Error(ErrorCode::kInvalidConfig, "cannot estimate p and q for this partition; pass --p and --q");
  }
  return {static_cast<double>(inside) / inside_pairs, static_cast<double>(across) / across_pairs};
}

int do_verify(const VerifyArgs& a, std::ostream& out, std::ostream& err) {
  const Graph g = load_graph(a.graph);
  const PlantedPartition truth = load_partition(a.truth);
  if (truth.n() != g.n()) {
    throw Error(ErrorCode::kInvalidConfig, "truth has " + std::to_string(truth.n()) +
                                               " vertices, graph has " + std::to_string(g.n()));
  }
  ModelParams params;
  if (a.p && a.q) {
    params.p = *a.p;
    params.q = *a.q;
  } else if (a.p || a.q) {
    throw Error(ErrorCode::kInvalidConfig, "--p and --q must be given together");
  } else {
    std::tie(params.p, params.q) = estimate_densities(g, truth);
    err << "estimated p=" << format_double(params.p) << " q=" << format_double(params.q) << '\n';
  }
  params.seed = a.seed.value_or(0);
  try {
    params.validate();
  } catch (const Error& e) {
    throw Error(ErrorCode::kInvalidConfig, e.what());
  }

  TrialOptions options;
  options.checks = parse_checks(a.checks);
  if (a.epsilon != "auto") {
    double eps = 0.0;
    std::istringstream in(a.epsilon);
    if (!(in >> eps) || !in.eof() || !(eps > 0.0)) {
      throw Error(ErrorCode::kInvalidConfig, "--epsilon must be a positive number or 'auto'");
    }
    options.epsilon = eps;
  }
  if (a.c) {
    if (!((params.p - params.q) * *a.c > 16.0)) {
      throw Error(ErrorCode::kInvalidConfig, "--c must satisfy (p - q) c > 16");
    }
    options.theorem_c = a.c;
  }
  options.baseline = false;
  options.record_violations = true;

  TrialReport report = evaluate_instance(g, truth, params, options);
  if (!a.seed) {
    for (auto& b : report.bounds) b.context.seed.reset();
  }
  for (const auto& note : report.notes) err << "note: " << note << '\n';
  err << "recovered exactly: " << (report.recovered_exactly ? "yes" : "no") << '\n';

  if (a.out.empty()) {
    write_bound_reports(out, report.bounds);
  } else {
    std::ofstream file(a.out, std::ios::binary | std::ios::trunc);
    if (!file) throw Error(ErrorCode::kIo, "cannot write " + a.out);
    write_bound_reports(file, report.bounds);
    if (!file.flush()) throw Error(ErrorCode::kIo, "write failed: " + a.out);
  }
  return kExitOk;
}

int do_experiment(const ExperimentArgs& a, std::ostream& out, std::ostream& err,
                  const std::atomic<bool>* stop) {
  const ExperimentConfig cfg = ExperimentConfig::load(a.config);
  GridOptions options;
  options.jobs = a.jobs;
  if (!a.out.empty()) {
    options.out_dir = a.out;
  } else if (cfg.out_dir) {
    options.out_dir = *cfg.out_dir;
  } else {
    throw Error(ErrorCode::kInvalidConfig, "no output directory: pass --out or set \"out\"");
  }
  options.stop = stop;
  const GridResult result = run_grid(cfg, options);
  write_summary_csv(out, result.summaries);
  if (result.interrupted) {
    err << "interrupted: " << result.trials.size() << " trial(s) written to "
        << options.out_dir.string() << '\n';
    return kExitInterrupted;
  }
  return kExitOk;
}

int do_constants(const ConstantsArgs& a, std::ostream& out) {
  const double c_min = admissible_c(a.p, a.q);
  const double c = a.c.value_or(c_min);
  if (!(c > 0.0) || !std::isfinite(c)) throw Error(ErrorCode::kInvalidConfig, "--c must be positive");
  Constants k;
  try {
    k = Constants::from_c(a.p, a.q, c);
  } catch (const Error& e) {
    throw Error(ErrorCode::kInvalidConfig, e.what());
  }
  out << "p " << format_double(a.p) << '\n'
      << "q " << format_double(a.q) << '\n'
      << "admissible_c " << format_double(c_min) << '\n'
      << "c " << format_double(k.c) << '\n'
      << "c_prime " << format_double(k.c_prime) << '\n'
      << "epsilon " << format_double(k.epsilon) << '\n'
      << "sigma " << format_double(k.sigma) << '\n'
      << "K " << format_double(k.K) << '\n';
  if (c < c_min) out << "note c is below admissible_c\n";
  return kExitOk;
}

}  // namespace

int exit_code_for(ErrorCode code) {
  switch (code) {
    case ErrorCode::kIo:
    case ErrorCode::kParse:
      return kExitIo;
    case ErrorCode::kInvariant:
    case ErrorCode::kNonFinite:
    case ErrorCode::kDimensionMismatch:
      return kExitInternal;
    default:
      return kExitInvalidConfig;
  }
}

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err,
        const std::atomic<bool>* stop) {
  CLI::App app{"Spectral recovery of planted partitions", "planted"};
  app.require_subcommand(1);

  GenerateArgs gen;
  auto* generate = app.add_subcommand("generate", "Sample a planted-partition graph");
  generate->add_option("--n", gen.n, "Vertex count")->required();
  generate->add_option("--s", gen.s, "Cluster size")->required();
  generate->add_option("--p", gen.p, "Intra-cluster edge probability")->required();
  generate->add_option("--q", gen.q, "Inter-cluster edge probability")->required();
  generate->add_option("--seed", gen.seed, "Random seed")->required();
  generate->add_option("--out", gen.out, "Graph file to write")->required();
  generate->add_option("--truth", gen.truth, "Partition file to write")->required();
  generate->add_flag("--no-shuffle", gen.no_shuffle, "Keep clusters contiguous (vertex v in cluster v/s)");

  RecoverArgs rec;
  auto* recover = app.add_subcommand("recover", "Recover the clusters of a graph");
  recover->add_option("--graph", rec.graph, "Graph file")->required();
  recover->add_option("--s", rec.s, "Cluster size")->required();
  recover->add_option("--truth", rec.truth, "Partition file to compare against");

  VerifyArgs ver;
  auto* verify = app.add_subcommand("verify", "Evaluate the bound checks on a graph");
  verify->add_option("--graph", ver.graph, "Graph file")->required();
  verify->add_option("--truth", ver.truth, "Partition file")->required();
  verify->add_option("--checks", ver.checks, "Comma list of norm,sep,proj,conc,fk,goodcol")
      ->capture_default_str();
  verify->add_option("--epsilon", ver.epsilon, "Epsilon, or 'auto' for ||P̂ - H/s||_2")
      ->capture_default_str();
  verify->add_option("--p", ver.p, "Intra-cluster probability (estimated when omitted)");
  verify->add_option("--q", ver.q, "Inter-cluster probability (estimated when omitted)");
  verify->add_option("--seed", ver.seed, "Seed recorded in the reports");
  verify->add_option("--c", ver.c, "Cluster-size constant for theorem-regime checks");
  verify->add_option("--out", ver.out, "CSV file (default: stdout)");

  ExperimentArgs exp;
  auto* experiment = app.add_subcommand("experiment", "Run a Monte Carlo grid");
  experiment->add_option("--config", exp.config, "JSON config")->required();
  experiment->add_option("--jobs", exp.jobs, "Concurrent trials")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
  experiment->add_option("--out", exp.out, "Output directory (overrides the config)");

  ConstantsArgs con;
  auto* constants = app.add_subcommand("constants", "Print the theorem constants");
  constants->add_option("--p", con.p, "Intra-cluster probability")->required();
  constants->add_option("--q", con.q, "Inter-cluster probability")->required();
  constants->add_option("--c", con.c, "Cluster-size constant (default: admissible_c)");

  try {
    std::vector<std::string> rest(args.rbegin(), args.rend());
    if (!rest.empty()) rest.pop_back();
    app.parse(std::move(rest));
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e, out, err);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e, out, err);
  } catch (const CLI::ParseError& e) {
    app.exit(e, out, err);
    return kExitInvalidConfig;
  }

  try {
    if (*generate) return do_generate(gen, out);
    if (*recover) return do_recover(rec, out);
    if (*verify) return do_verify(ver, out, err);
    if (*experiment) return do_experiment(exp, out, err, stop);
    if (*constants) return do_constants(con, out);
  } catch (const Error& e) {
    err << "error: " << e.what() << '\n';
    return exit_code_for(e.code());
  } catch (const std::exception& e) {
    err << "internal error: " << e.what() << '\n';
    return kExitInternal;
  }
  return kExitInvalidConfig;
}

}  // namespace planted::cli

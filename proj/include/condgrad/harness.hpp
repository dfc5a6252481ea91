// Copyright 2026 The CondGrad Authors. All Rights Reserved.
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//     http://www.apache.org/licenses/LICENSE-2.0
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.

#pragma once

#include <iosfwd>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "condgrad/data_io.hpp"
#include "condgrad/solvers.hpp"
#include "condgrad/types.hpp"

namespace condgrad {

/// Section/key/value config text: '#' and ';' start comments, sections in
/// [brackets], one key = value per line.
struct IniFile {
  std::map<std::string, std::map<std::string, std::string>> sections;

  static IniFile parse(std::istream& in);
  std::optional<std::string> find(const std::string& section, const std::string& key) const;
};

enum class TaskKind { Quadratic, Logistic, Completion };

std::string task_name(TaskKind task);

/// Parsed and validated experiment description. Solver/constraint
/// compatibility (projected baselines need an exact projection) and
/// task/constraint pairing are enforced at load time.
struct ExperimentConfig {
  TaskKind task = TaskKind::Quadratic;
  std::vector<SolverKind> solvers;
  int iterations = 1;
  std::uint64_t seed = 0;
  std::string output_dir;
  std::optional<double> stop_epsilon;
  bool sequential = false;
  std::string x0_policy = "default";  // default | zero | vertex

  std::string constraint_type;        // l2 | l1 | simplex | nsupport | nuclear
  std::optional<double> radius;
  std::optional<double> radius_scale; // x ground-truth nuclear norm (synthetic completion)
  Index nsupport_n = 0;

  struct DataSpec {
    std::string source;               // synth | file
    std::string path;
    std::string format;               // libsvm | movielens
    std::optional<double> positive_class;
    bool normalize = false;
    std::optional<double> test_fraction;
    std::optional<Index> dim_override;
    Index rows = 0, cols = 0;
    Index n_samples = 0, dim = 0;
    double sparsity = 0.1;
    double margin = 3.0;
    Index rank = 0;
    double density = 0.1;
    double noise = 0.0;
  } data;

  Index quad_dim = 0;
  double quad_center_first = 0.0;
  std::vector<double> quad_center;    // full vector, overrides the two above

  std::optional<double> lipschitz_override;
  Index rank_stride = 0;              // 0: numerical rank only on the last row
  double rank_tol = 1e-8;

  static ExperimentConfig load(const std::string& path);
  static ExperimentConfig parse(std::istream& in, const std::string& origin = "<stream>");
};

struct TraceRow {
  int k = 0;
  double f = 0.0;
  double optimality = 0.0;
  double certificate = 0.0;           // NaN renders as an empty cell
  std::optional<Index> nnz;
  std::optional<Index> atoms;
  std::optional<Index> rank;
  std::optional<double> test_accuracy;
};

struct Trace {
  std::string solver;
  std::vector<TraceRow> rows;
  long fo_calls = 0;
  long lmo_calls = 0;
  long probe_fo_calls = 0;
  std::optional<int> stopped_at;
  double wall_seconds = 0.0;
};

struct ExperimentResult {
  std::vector<Trace> traces;
  double f_ref = 0.0;
  std::string f_ref_source;           // analytic | best_found
  std::vector<std::string> trace_paths;
  std::string summary_path;
};

/// Runs every configured solver (concurrently unless cfg.sequential), writes
/// one CSV per solver plus summary.json under cfg.output_dir. Identical
/// (config, seed) pairs produce byte-identical CSVs; wall-clock timing is
/// reported only in the summary.
ExperimentResult run_experiment(const ExperimentConfig& cfg);

/// Entries with magnitude above tol (default guards against baseline
/// round-off; FW-family iterates carry exact zeros).
Index sparsity(const Eigen::Ref<const Eigen::VectorXd>& x, double tol = 1e-12);

/// Singular values of the factored iterate above tol * sigma_1, computed
/// exactly from the rank x rank core of stacked QR factors; the dense matrix
/// is never formed.
Index numerical_rank(const AtomCombination& x, Index rows, Index cols, double tol = 1e-8);

/// Fraction of test rows with sign(<a_i, x>) == b_i, sign(0) counting as +1.
double test_accuracy(const Dataset& ds, const Eigen::Ref<const Eigen::VectorXd>& x);

struct SlopeFit {
  double slope = 0.0;
  bool clipped = false;  // some optimality values were at or below the 1e-16 floor
};

/// Least-squares slope of log(optimality) against log(k) over k in
/// [k_from, k_to]; non-positive values clip to 1e-16 and set the flag.
SlopeFit slope_fit(const std::vector<std::pair<int, double>>& series, int k_from, int k_to);
SlopeFit slope_fit(const Trace& trace, int k_from, int k_to);

/// (k, optimality) pairs from a written trace CSV.
std::vector<std::pair<int, double>> read_trace_optimality(const std::string& path);

}  // namespace condgrad

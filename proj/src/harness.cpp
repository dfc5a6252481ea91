// Copyright 2026 The CondGrad Authors. All Rights Reserved.
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//     http://www.apache.org/licenses/LICENSE-2.0
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.

#include "condgrad/harness.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <future>
#include <memory>
#include <set>
#include <sstream>

#include <Eigen/QR>
#include <Eigen/SVD>

#include <json.hpp>

#include "condgrad/oracles.hpp"

namespace condgrad {
namespace {

std::string trim(std::string_view s) {
  size_t b = 0;
  size_t e = s.size();
  while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
  while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
  return std::string(s.substr(b, e - b));
}

double to_double(const std::string& value, const std::string& what) {
  double out = 0.0;
  const char* end = value.data() + value.size();
  const auto [ptr, ec] = std::from_chars(value.data(), end, out);
  if (ec != std::errc{} || ptr != end) {
    if (value == "inf") return std::numeric_limits<double>::infinity();
    throw ConfigError(what + ": expected a number, got '" + value + "'");
  }
  return out;
}

long to_long(const std::string& value, const std::string& what) {
  long out = 0;
  const char* end = value.data() + value.size();
  const auto [ptr, ec] = std::from_chars(value.data(), end, out);
  if (ec != std::errc{} || ptr != end)
    throw ConfigError(what + ": expected an integer, got '" + value + "'");
  return out;
}

bool to_bool(const std::string& value, const std::string& what) {
  if (value == "true" || value == "1" || value == "yes") return true;
  if (value == "false" || value == "0" || value == "no") return false;
  throw ConfigError(what + ": expected a boolean, got '" + value + "'");
}

std::string format_cell(double v) {
  if (std::isnan(v)) return "";
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

}  // namespace

IniFile IniFile::parse(std::istream& in) {
  IniFile file;
  std::string current;
  std::string line;
  long line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    std::string_view view(line);
    if (const size_t pos = view.find_first_of("#;"); pos != std::string_view::npos)
      view = view.substr(0, pos);
    const std::string text = trim(view);
    if (text.empty()) continue;
    if (text.front() == '[') {
      if (text.back() != ']') throw ConfigError("unterminated section header at line " +
                                                std::to_string(line_no));
      current = trim(std::string_view(text).substr(1, text.size() - 2));
      file.sections[current];
      continue;
    }
    const size_t eq = text.find('=');
    if (eq == std::string::npos)
      throw ConfigError("expected key = value at line " + std::to_string(line_no));
    const std::string key = trim(std::string_view(text).substr(0, eq));
    const std::string value = trim(std::string_view(text).substr(eq + 1));
    if (key.empty()) throw ConfigError("empty key at line " + std::to_string(line_no));
    file.sections[current][key] = value;
  }
  return file;
}

std::optional<std::string> IniFile::find(const std::string& section, const std::string& key) const {
  const auto sec = sections.find(section);
  if (sec == sections.end()) return std::nullopt;
  const auto kv = sec->second.find(key);
  if (kv == sec->second.end()) return std::nullopt;
  return kv->second;
}

std::string task_name(TaskKind task) {
  switch (task) {
    case TaskKind::Quadratic: return "quadratic";
    case TaskKind::Logistic: return "logistic";
    case TaskKind::Completion: return "completion";
  }
  return "unknown";
}

namespace {

const std::map<std::string, std::set<std::string>> kAllowedKeys = {
    {"experiment", {"task", "solvers", "iterations", "seed", "output", "epsilon", "sequential", "x0"}},
    {"constraint", {"type", "radius", "radius_scale", "n"}},
    {"data",
     {"source", "path", "format", "positive_class", "normalize", "test_fraction", "dim", "rows",
      "cols", "samples", "sparsity", "margin", "rank", "density", "noise"}},
    {"quadratic", {"dim", "center_first", "center"}},
    {"metrics", {"rank_stride", "rank_tol"}},
    {"baselines", {"lipschitz"}},
};

void check_known_keys(const IniFile& ini) {
  for (const auto& [section, kvs] : ini.sections) {
    const auto allowed = kAllowedKeys.find(section);
    if (allowed == kAllowedKeys.end()) throw ConfigError("unknown section [" + section + "]");
    for (const auto& [key, value] : kvs)
      if (!allowed->second.count(key))
        throw ConfigError("unknown key '" + key + "' in section [" + section + "]");
  }
}

std::vector<std::string> split_list(const std::string& text) {
  std::vector<std::string> out;
  std::string item;
  for (const char c : text) {
    if (c == ',' || c == ' ' || c == '\t') {
      if (!item.empty()) out.push_back(item);
      item.clear();
    } else {
      item.push_back(c);
    }
  }
  if (!item.empty()) out.push_back(item);
  return out;
}

bool vector_constraint(const std::string& type) {
  return type == "l2" || type == "l1" || type == "simplex" || type == "nsupport";
}

}  // namespace

ExperimentConfig ExperimentConfig::load(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file: " + path);
  return parse(in, path);
}

ExperimentConfig ExperimentConfig::parse(std::istream& in, const std::string& origin) {
  const IniFile ini = IniFile::parse(in);
  check_known_keys(ini);
  ExperimentConfig cfg;

  const auto require = [&](const std::string& section, const std::string& key) -> std::string {
    const auto v = ini.find(section, key);
    if (!v) throw ConfigError(origin + ": missing required key '" + key + "' in [" + section + "]");
    return *v;
  };

  const std::string task = require("experiment", "task");
  if (task == "quadratic") cfg.task = TaskKind::Quadratic;
  else if (task == "logistic") cfg.task = TaskKind::Logistic;
  else if (task == "completion") cfg.task = TaskKind::Completion;
  else throw ConfigError("unknown task '" + task + "'");

  for (const std::string& name : split_list(require("experiment", "solvers"))) {
    const auto kind = solver_from_name(name);
    if (!kind) throw ConfigError("unknown solver '" + name + "'");
    cfg.solvers.push_back(*kind);
  }
  if (cfg.solvers.empty()) throw ConfigError("solver list is empty");

  cfg.iterations = static_cast<int>(to_long(require("experiment", "iterations"), "iterations"));
  if (cfg.iterations < 1) throw ConfigError("iterations must be at least 1");
  if (const auto v = ini.find("experiment", "seed"))
    cfg.seed = static_cast<std::uint64_t>(to_long(*v, "seed"));
  cfg.output_dir = require("experiment", "output");
  if (const auto v = ini.find("experiment", "epsilon")) {
    cfg.stop_epsilon = to_double(*v, "epsilon");
    if (!(*cfg.stop_epsilon > 0.0)) throw ConfigError("epsilon must be positive");
  }
  if (const auto v = ini.find("experiment", "sequential")) cfg.sequential = to_bool(*v, "sequential");
  if (const auto v = ini.find("experiment", "x0")) cfg.x0_policy = *v;
  if (cfg.x0_policy != "default" && cfg.x0_policy != "zero" && cfg.x0_policy != "vertex")
    throw ConfigError("x0 must be default, zero or vertex");

  cfg.constraint_type = require("constraint", "type");
  if (!vector_constraint(cfg.constraint_type) && cfg.constraint_type != "nuclear")
    throw ConfigError("unknown constraint type '" + cfg.constraint_type + "'");
  if (const auto v = ini.find("constraint", "radius")) cfg.radius = to_double(*v, "radius");
  if (const auto v = ini.find("constraint", "radius_scale"))
    cfg.radius_scale = to_double(*v, "radius_scale");
  if (const auto v = ini.find("constraint", "n"))
    cfg.nsupport_n = static_cast<Index>(to_long(*v, "n"));

  if (cfg.radius && cfg.radius_scale)
    throw ConfigError("give either radius or radius_scale, not both");
  if (!cfg.radius && !cfg.radius_scale) throw ConfigError("constraint needs radius or radius_scale");
  if (cfg.radius && !(*cfg.radius > 0.0)) throw ConfigError("radius must be positive");
  if (cfg.radius_scale && !(*cfg.radius_scale > 0.0))
    throw ConfigError("radius_scale must be positive");
  if (cfg.constraint_type == "nsupport" && cfg.nsupport_n < 1)
    throw ConfigError("nsupport constraint needs n >= 1");

  if (cfg.task == TaskKind::Completion) {
    if (cfg.constraint_type != "nuclear")
      throw ConfigError("completion task requires the nuclear constraint");
  } else if (cfg.constraint_type == "nuclear") {
    throw ConfigError("nuclear constraint requires the completion task");
  }

  for (const SolverKind kind : cfg.solvers) {
    if ((kind == SolverKind::Gd || kind == SolverKind::Nag) &&
        !(cfg.constraint_type == "l2" || cfg.constraint_type == "l1" ||
          cfg.constraint_type == "simplex"))
      throw ConfigError("gd/nag need an exact projection; unsupported on " + cfg.constraint_type);
  }

  if (cfg.task == TaskKind::Quadratic) {
    if (const auto v = ini.find("quadratic", "center")) {
      for (const std::string& c : split_list(*v)) cfg.quad_center.push_back(to_double(c, "center"));
      if (cfg.quad_center.empty()) throw ConfigError("quadratic center list is empty");
    } else {
      cfg.quad_dim = static_cast<Index>(to_long(require("quadratic", "dim"), "dim"));
      if (cfg.quad_dim < 1) throw ConfigError("quadratic dim must be at least 1");
      cfg.quad_center_first = to_double(require("quadratic", "center_first"), "center_first");
    }
  }

  if (cfg.task == TaskKind::Logistic || cfg.task == TaskKind::Completion) {
    cfg.data.source = require("data", "source");
    if (cfg.data.source != "synth" && cfg.data.source != "file")
      throw ConfigError("data source must be synth or file");
    if (cfg.data.source == "file") {
      cfg.data.path = require("data", "path");
      cfg.data.format = require("data", "format");
    }
    if (const auto v = ini.find("data", "positive_class"))
      cfg.data.positive_class = to_double(*v, "positive_class");
    if (const auto v = ini.find("data", "normalize")) cfg.data.normalize = to_bool(*v, "normalize");
    if (const auto v = ini.find("data", "test_fraction")) {
      cfg.data.test_fraction = to_double(*v, "test_fraction");
      if (!(*cfg.data.test_fraction > 0.0) || !(*cfg.data.test_fraction < 1.0))
        throw ConfigError("test_fraction must be in (0, 1)");
    }
    if (const auto v = ini.find("data", "dim"))
      cfg.data.dim_override = static_cast<Index>(to_long(*v, "dim"));
    if (const auto v = ini.find("data", "rows")) cfg.data.rows = static_cast<Index>(to_long(*v, "rows"));
    if (const auto v = ini.find("data", "cols")) cfg.data.cols = static_cast<Index>(to_long(*v, "cols"));
    if (const auto v = ini.find("data", "samples"))
      cfg.data.n_samples = static_cast<Index>(to_long(*v, "samples"));
    if (const auto v = ini.find("data", "sparsity")) cfg.data.sparsity = to_double(*v, "sparsity");
    if (const auto v = ini.find("data", "margin")) cfg.data.margin = to_double(*v, "margin");
    if (const auto v = ini.find("data", "rank")) cfg.data.rank = static_cast<Index>(to_long(*v, "rank"));
    if (const auto v = ini.find("data", "density")) cfg.data.density = to_double(*v, "density");
    if (const auto v = ini.find("data", "noise")) cfg.data.noise = to_double(*v, "noise");
  }

  if (cfg.task == TaskKind::Logistic && cfg.data.source == "synth") {
    if (cfg.data.n_samples < 1 || !cfg.data.dim_override || *cfg.data.dim_override < 1)
      throw ConfigError("synthetic logistic data needs samples >= 1 and dim >= 1");
    cfg.data.dim = *cfg.data.dim_override;
  }
  if (cfg.task == TaskKind::Completion) {
    if (cfg.data.rows < 1 || cfg.data.cols < 1)
      throw ConfigError("completion data needs rows and cols");
    if (cfg.data.source == "synth" && cfg.data.rank < 1)
      throw ConfigError("synthetic completion data needs rank >= 1");
    if (cfg.data.source == "file" && cfg.data.format != "movielens")
      throw ConfigError("completion files must use the movielens format");
    if (cfg.data.source == "file" && cfg.radius_scale)
      throw ConfigError("radius_scale needs a synthetic ground truth; give radius");
    if (cfg.x0_policy == "vertex") throw ConfigError("completion runs start from zero");
  } else if (cfg.radius_scale) {
    throw ConfigError("radius_scale applies to synthetic completion only");
  }
  if (cfg.x0_policy == "zero" && cfg.constraint_type == "simplex")
    throw ConfigError("zero start is infeasible on the simplex");

  if (const auto v = ini.find("baselines", "lipschitz")) {
    cfg.lipschitz_override = to_double(*v, "lipschitz");
    if (!(*cfg.lipschitz_override > 0.0)) throw ConfigError("lipschitz must be positive");
  }
  if (const auto v = ini.find("metrics", "rank_stride"))
    cfg.rank_stride = static_cast<Index>(to_long(*v, "rank_stride"));
  if (const auto v = ini.find("metrics", "rank_tol")) cfg.rank_tol = to_double(*v, "rank_tol");

  return cfg;
}

Index sparsity(const Eigen::Ref<const Eigen::VectorXd>& x, double tol) {
  Index count = 0;
  for (Index i = 0; i < x.size(); ++i)
    if (std::abs(x[i]) > tol) ++count;
  return count;
}

Index numerical_rank(const AtomCombination& x, Index rows, Index cols, double tol) {
  const Index a = static_cast<Index>(x.atoms.size());
  if (a == 0) return 0;
  Eigen::MatrixXd left(rows, a);
  Eigen::MatrixXd right(cols, a);
  Eigen::VectorXd coeff(a);
  for (Index i = 0; i < a; ++i) {
    const WeightedAtom& wa = x.atoms[static_cast<size_t>(i)];
    left.col(i) = wa.factor.left;
    right.col(i) = wa.factor.right;
    coeff[i] = wa.weight * wa.factor.scale;
  }
  const Index pa = std::min(rows, a);
  const Index qa = std::min(cols, a);
  const Eigen::HouseholderQR<Eigen::MatrixXd> qr_left(left);
  const Eigen::HouseholderQR<Eigen::MatrixXd> qr_right(right);
  const Eigen::MatrixXd r_left =
      qr_left.matrixQR().topRows(pa).triangularView<Eigen::Upper>();
  const Eigen::MatrixXd r_right =
      qr_right.matrixQR().topRows(qa).triangularView<Eigen::Upper>();
  const Eigen::MatrixXd core = r_left * coeff.asDiagonal() * r_right.transpose();
  const Eigen::JacobiSVD<Eigen::MatrixXd> svd(core);
  const auto& sigma = svd.singularValues();
  if (sigma.size() == 0 || sigma[0] <= 0.0) return 0;
  Index rank = 0;
  for (Index i = 0; i < sigma.size(); ++i)
    if (sigma[i] > tol * sigma[0]) ++rank;
  return rank;
}

double test_accuracy(const Dataset& ds, const Eigen::Ref<const Eigen::VectorXd>& x) {
  if (ds.test_indices.empty()) throw Error("test_accuracy: empty test split");
  const Eigen::VectorXd margins = ds.features * x;
  long hits = 0;
  for (const Index i : ds.test_indices) {
    const double predicted = margins[i] >= 0.0 ? 1.0 : -1.0;
    if (predicted == ds.labels[i]) ++hits;
  }
  return static_cast<double>(hits) / static_cast<double>(ds.test_indices.size());
}

SlopeFit slope_fit(const std::vector<std::pair<int, double>>& series, int k_from, int k_to) {
  SlopeFit fit;
  std::vector<double> xs;
  std::vector<double> ys;
  for (const auto& [k, v] : series) {
    if (k < k_from || k > k_to || k < 1) continue;
    double value = v;
    if (value <= 1e-16) {
      value = 1e-16;
      fit.clipped = true;
    }
    xs.push_back(std::log(static_cast<double>(k)));
    ys.push_back(std::log(value));
  }
  if (xs.size() < 2) throw Error("slope_fit: need at least two points in range");
  const double n = static_cast<double>(xs.size());
  double mx = 0.0, my = 0.0;
  for (size_t i = 0; i < xs.size(); ++i) {
    mx += xs[i];
    my += ys[i];
  }
  mx /= n;
  my /= n;
  double sxx = 0.0, sxy = 0.0;
  for (size_t i = 0; i < xs.size(); ++i) {
    sxx += (xs[i] - mx) * (xs[i] - mx);
    sxy += (xs[i] - mx) * (ys[i] - my);
  }
  fit.slope = sxy / sxx;
  return fit;
}

SlopeFit slope_fit(const Trace& trace, int k_from, int k_to) {
  std::vector<std::pair<int, double>> series;
  series.reserve(trace.rows.size());
  for (const TraceRow& row : trace.rows) series.emplace_back(row.k, row.optimality);
  return slope_fit(series, k_from, k_to);
}

std::vector<std::pair<int, double>> read_trace_optimality(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open trace file: " + path);
  std::string line;
  if (!std::getline(in, line)) throw ParseError("empty trace file");
  std::vector<std::string> header;
  {
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) header.push_back(cell);
  }
  long k_col = -1, opt_col = -1;
  for (size_t i = 0; i < header.size(); ++i) {
    if (header[i] == "k") k_col = static_cast<long>(i);
    if (header[i] == "optimality") opt_col = static_cast<long>(i);
  }
  if (k_col < 0 || opt_col < 0) throw ParseError("trace file lacks k/optimality columns");
  std::vector<std::pair<int, double>> out;
  long line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (trim(line).empty()) continue;
    std::vector<std::string> cells;
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) cells.push_back(cell);
    if (static_cast<long>(cells.size()) <= std::max(k_col, opt_col))
      throw ParseError("short row in trace file", line_no);
    out.emplace_back(static_cast<int>(to_long(cells[static_cast<size_t>(k_col)], "k")),
                     to_double(cells[static_cast<size_t>(opt_col)], "optimality"));
  }
  return out;
}

namespace {

std::string resolve_data_path(const std::string& path) {
  namespace fs = std::filesystem;
  if (fs::path(path).is_absolute()) return path;
  if (const char* root = std::getenv("CONDGRAD_DATA_ROOT")) return (fs::path(root) / path).string();
  return path;
}

SparseMatrix select_rows(const SparseMatrix& m, const std::vector<Index>& rows) {
  std::vector<Eigen::Triplet<double>> triplets;
  for (size_t r = 0; r < rows.size(); ++r)
    for (SparseMatrix::InnerIterator it(m, rows[r]); it; ++it)
      triplets.emplace_back(static_cast<Index>(r), it.col(), it.value());
  SparseMatrix out(static_cast<Index>(rows.size()), m.cols());
  out.setFromTriplets(triplets.begin(), triplets.end());
  return out;
}

Eigen::VectorXd select(const Eigen::VectorXd& v, const std::vector<Index>& idx) {
  Eigen::VectorXd out(static_cast<Index>(idx.size()));
  for (size_t i = 0; i < idx.size(); ++i) out[static_cast<Index>(i)] = v[idx[i]];
  return out;
}

ConstraintSet build_vector_constraint(const ExperimentConfig& cfg, Index dim) {
  const double radius = *cfg.radius;
  if (cfg.constraint_type == "l2") return ConstraintSet(L2Ball{radius});
  if (cfg.constraint_type == "l1") return ConstraintSet(L1Ball{radius});
  if (cfg.constraint_type == "simplex") return ConstraintSet(Simplex{radius});
  if (cfg.constraint_type == "nsupport") {
    if (cfg.nsupport_n > dim) throw ConfigError("nsupport n exceeds the problem dimension");
    return ConstraintSet(NSupportBall{cfg.nsupport_n, radius});
  }
  throw ConfigError("not a vector constraint: " + cfg.constraint_type);
}

Eigen::VectorXd choose_x0(const ExperimentConfig& cfg, const ConstraintSet& c, Index dim) {
  const std::string& policy = cfg.x0_policy;
  const auto vertex = [&] {
    Eigen::VectorXd x = Eigen::VectorXd::Zero(dim);
    x[0] = c.radius();
    return x;
  };
  if (policy == "vertex") return vertex();
  if (policy == "zero") return Eigen::VectorXd::Zero(dim);
  // default: zero wherever feasible, first vertex on the simplex
  if (c.is<Simplex>()) return vertex();
  return Eigen::VectorXd::Zero(dim);
}

struct VectorTask {
  std::unique_ptr<VectorObjective> objective;  // trained objective
  std::optional<Dataset> dataset;              // full data incl. any split
  std::optional<double> analytic_f_ref;
  Index dim = 0;
};

VectorTask build_quadratic_task(const ExperimentConfig& cfg) {
  Eigen::VectorXd center;
  if (!cfg.quad_center.empty()) {
    center = Eigen::Map<const Eigen::VectorXd>(cfg.quad_center.data(),
                                               static_cast<Index>(cfg.quad_center.size()));
  } else {
    center = Eigen::VectorXd::Zero(cfg.quad_dim);
    center[0] = cfg.quad_center_first;
  }
  VectorTask task;
  task.dim = center.size();
  auto problem = std::make_unique<QuadraticProblem>(std::move(center));
  if (cfg.constraint_type == "l2") {
    const double radius = *cfg.radius;
    task.analytic_f_ref =
        problem->center().norm() > radius ? problem->argmin_l2(radius).value : 0.0;
  }
  task.objective = std::move(problem);
  return task;
}

VectorTask build_logistic_task(const ExperimentConfig& cfg) {
  Dataset ds;
  if (cfg.data.source == "synth") {
    ds = synth_logistic(cfg.seed, cfg.data.n_samples, cfg.data.dim, cfg.data.sparsity,
                        cfg.data.margin)
             .data;
  } else {
    const std::string path = resolve_data_path(cfg.data.path);
    std::ifstream in(path);
    if (!in) throw DataError("cannot open data file: " + path);
    if (cfg.data.format != "libsvm") throw ConfigError("logistic files must use the libsvm format");
    ds = parse_libsvm(in, cfg.data.dim_override);
    if (cfg.data.positive_class) ds = map_labels(std::move(ds), *cfg.data.positive_class);
  }
  if (cfg.data.normalize) ds = normalize_columns_maxabs(std::move(ds));
  if (cfg.data.test_fraction) ds = train_test_split(std::move(ds), 1.0 - *cfg.data.test_fraction, cfg.seed);

  VectorTask task;
  task.dim = ds.features.cols();
  if (!ds.train_indices.empty()) {
    task.objective = std::make_unique<LogisticProblem>(select_rows(ds.features, ds.train_indices),
                                                       select(ds.labels, ds.train_indices));
  } else {
    task.objective = std::make_unique<LogisticProblem>(ds.features, ds.labels);
  }
  task.dataset = std::move(ds);
  return task;
}

Trace merge_rows(const std::string& solver, std::vector<TraceRow> rows,
                 const std::vector<IterationRow>& iters) {
  Trace trace;
  trace.solver = solver;
  for (size_t i = 0; i < iters.size(); ++i) {
    rows[i].k = iters[i].k;
    rows[i].f = iters[i].f;
    rows[i].certificate = iters[i].certificate;
  }
  trace.rows = std::move(rows);
  return trace;
}

Trace run_vector_solver(SolverKind kind, const VectorTask& task, const ConstraintSet& constraint,
                        const ExperimentConfig& cfg, double lipschitz) {
  VectorSpace space(*task.objective, constraint);
  RunOptions opt;
  opt.iterations = cfg.iterations;
  opt.stop_epsilon = cfg.stop_epsilon;
  opt.lipschitz = lipschitz;
  const bool with_accuracy = task.dataset && !task.dataset->test_indices.empty();

  std::vector<TraceRow> rows;
  rows.reserve(static_cast<size_t>(cfg.iterations) + 1);
  const auto started = std::chrono::steady_clock::now();
  auto result = run(kind, space, choose_x0(cfg, constraint, task.dim), opt,
                    [&](int k, const Eigen::VectorXd& x) {
                      TraceRow row;
                      row.k = k;
                      row.nnz = sparsity(x);
                      if (with_accuracy) row.test_accuracy = test_accuracy(*task.dataset, x);
                      rows.push_back(row);
                    });
  const std::chrono::duration<double> elapsed = std::chrono::steady_clock::now() - started;

  Trace trace = merge_rows(solver_name(kind), std::move(rows), result.rows);
  trace.fo_calls = result.fo_calls;
  trace.lmo_calls = result.lmo_calls;
  trace.probe_fo_calls = result.probe_fo_calls;
  trace.stopped_at = result.stopped_at;
  trace.wall_seconds = elapsed.count();
  return trace;
}

Trace run_completion_solver(SolverKind kind, const CompletionProblem& problem, double radius,
                            const ExperimentConfig& cfg) {
  NuclearSpace space(problem, radius);
  RunOptions opt;
  opt.iterations = cfg.iterations;
  opt.stop_epsilon = cfg.stop_epsilon;
  const Index rows_m = problem.observed().rows();
  const Index cols_n = problem.observed().cols();

  std::vector<TraceRow> rows;
  rows.reserve(static_cast<size_t>(cfg.iterations) + 1);
  const auto started = std::chrono::steady_clock::now();
  auto result = run(kind, space, space.zero_point(), opt, [&](int k, const AtomCombination& x) {
    TraceRow row;
    row.k = k;
    row.atoms = static_cast<Index>(x.atoms.size());
    if (cfg.rank_stride > 0 && k % cfg.rank_stride == 0)
      row.rank = numerical_rank(x, rows_m, cols_n, cfg.rank_tol);
    rows.push_back(row);
  });
  const std::chrono::duration<double> elapsed = std::chrono::steady_clock::now() - started;

  if (!rows.empty() && !rows.back().rank)
    rows.back().rank = numerical_rank(result.final_point, rows_m, cols_n, cfg.rank_tol);

  Trace trace = merge_rows(solver_name(kind), std::move(rows), result.rows);
  trace.fo_calls = result.fo_calls;
  trace.lmo_calls = result.lmo_calls;
  trace.probe_fo_calls = result.probe_fo_calls;
  trace.stopped_at = result.stopped_at;
  trace.wall_seconds = elapsed.count();
  return trace;
}

void write_trace_csv(const std::string& path, const Trace& trace, TaskKind task) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot write trace file: " + path);
  const bool completion = task == TaskKind::Completion;
  out << (completion ? "k,f,optimality,certificate,atoms,rank\n"
                     : "k,f,optimality,certificate,nnz,test_accuracy\n");
  for (const TraceRow& row : trace.rows) {
    out << row.k << ',' << format_cell(row.f) << ',' << format_cell(row.optimality) << ','
        << format_cell(row.certificate) << ',';
    if (completion) {
      if (row.atoms) out << *row.atoms;
      out << ',';
      if (row.rank) out << *row.rank;
    } else {
      if (row.nnz) out << *row.nnz;
      out << ',';
      if (row.test_accuracy) out << format_cell(*row.test_accuracy);
    }
    out << '\n';
  }
}

}  // namespace

ExperimentResult run_experiment(const ExperimentConfig& cfg) {
  namespace fs = std::filesystem;
  ExperimentResult result;

  std::optional<VectorTask> vector_task;
  std::optional<ConstraintSet> constraint;
  std::optional<CompletionProblem> completion;
  double nuclear_radius = 0.0;

  if (cfg.task == TaskKind::Quadratic) {
    vector_task = build_quadratic_task(cfg);
  } else if (cfg.task == TaskKind::Logistic) {
    vector_task = build_logistic_task(cfg);
  } else {
    if (cfg.data.source == "synth") {
      SyntheticLowRank synth = synth_lowrank(cfg.seed, cfg.data.rows, cfg.data.cols, cfg.data.rank,
                                             cfg.data.density, cfg.data.noise);
      nuclear_radius = cfg.radius ? *cfg.radius : *cfg.radius_scale * synth.nuclear_norm;
      completion.emplace(std::move(synth.observed));
    } else {
      const std::string path = resolve_data_path(cfg.data.path);
      std::ifstream in(path);
      if (!in) throw DataError("cannot open data file: " + path);
      completion.emplace(parse_movielens(in, cfg.data.rows, cfg.data.cols));
      nuclear_radius = *cfg.radius;
    }
  }

  if (vector_task) constraint = build_vector_constraint(cfg, vector_task->dim);

  double lipschitz = 0.0;
  const bool needs_baseline =
      std::any_of(cfg.solvers.begin(), cfg.solvers.end(), [](SolverKind kind) {
        return kind == SolverKind::Gd || kind == SolverKind::Nag;
      });
  if (needs_baseline) {
    if (cfg.lipschitz_override) {
      lipschitz = *cfg.lipschitz_override;
    } else if (const auto known = vector_task->objective->lipschitz()) {
      lipschitz = *known;
    } else if (const auto* logistic =
                   dynamic_cast<const LogisticProblem*>(vector_task->objective.get())) {
      lipschitz = logistic->estimate_lipschitz();
    }
    if (!(lipschitz > 0.0))
      throw DataError("gd/nag need a positive Lipschitz estimate; none available");
  }

  const auto run_one = [&](SolverKind kind) -> Trace {
    if (cfg.task == TaskKind::Completion)
      return run_completion_solver(kind, *completion, nuclear_radius, cfg);
    return run_vector_solver(kind, *vector_task, *constraint, cfg, lipschitz);
  };

  if (cfg.sequential) {
    for (const SolverKind kind : cfg.solvers) result.traces.push_back(run_one(kind));
  } else {
    std::vector<std::future<Trace>> futures;
    futures.reserve(cfg.solvers.size());
    for (const SolverKind kind : cfg.solvers)
      futures.push_back(std::async(std::launch::async, run_one, kind));
    for (auto& f : futures) result.traces.push_back(f.get());
  }

  if (vector_task && vector_task->analytic_f_ref) {
    result.f_ref = *vector_task->analytic_f_ref;
    result.f_ref_source = "analytic";
  } else {
    double best = std::numeric_limits<double>::infinity();
    for (const Trace& trace : result.traces)
      for (const TraceRow& row : trace.rows) best = std::min(best, row.f);
    result.f_ref = best;
    result.f_ref_source = "best_found";
  }
  for (Trace& trace : result.traces)
    for (TraceRow& row : trace.rows) row.optimality = row.f - result.f_ref;

  fs::create_directories(cfg.output_dir);
  nlohmann::json summary;
  summary["task"] = task_name(cfg.task);
  summary["constraint"] = {{"type", cfg.constraint_type}};
  if (cfg.task == TaskKind::Completion) summary["constraint"]["radius"] = nuclear_radius;
  else summary["constraint"]["radius"] = *cfg.radius;
  if (cfg.constraint_type == "nsupport") summary["constraint"]["n"] = cfg.nsupport_n;
  summary["iterations"] = cfg.iterations;
  summary["seed"] = cfg.seed;
  summary["f_ref"] = result.f_ref;
  summary["f_ref_source"] = result.f_ref_source;
  if (needs_baseline) summary["lipschitz"] = lipschitz;

  for (const Trace& trace : result.traces) {
    const std::string path = (fs::path(cfg.output_dir) / (trace.solver + ".csv")).string();
    write_trace_csv(path, trace, cfg.task);
    result.trace_paths.push_back(path);

    nlohmann::json entry;
    const TraceRow& last = trace.rows.back();
    entry["final_k"] = last.k;
    entry["final_f"] = last.f;
    entry["final_optimality"] = last.optimality;
    entry["fo_calls"] = trace.fo_calls;
    entry["lmo_calls"] = trace.lmo_calls;
    entry["probe_fo_calls"] = trace.probe_fo_calls;
    entry["wall_seconds"] = trace.wall_seconds;
    // The per-iteration bound is not monotone; report its running minimum,
    // and warn when the optimality column would clip in a log-log fit.
    double min_cert = std::numeric_limits<double>::infinity();
    bool nonpositive = false;
    for (const TraceRow& row : trace.rows) {
      if (std::isfinite(row.certificate)) min_cert = std::min(min_cert, row.certificate);
      if (row.optimality <= 1e-16) nonpositive = true;
    }
    if (std::isfinite(min_cert)) entry["min_certificate"] = min_cert;
    entry["has_nonpositive_optimality"] = nonpositive;
    if (trace.stopped_at) entry["stopped_at"] = *trace.stopped_at;
    if (last.nnz) entry["final_nnz"] = *last.nnz;
    if (last.atoms) entry["final_atoms"] = *last.atoms;
    if (last.rank) entry["final_rank"] = *last.rank;
    if (last.test_accuracy) entry["final_test_accuracy"] = *last.test_accuracy;
    summary["solvers"][trace.solver] = std::move(entry);
  }

  result.summary_path = (fs::path(cfg.output_dir) / "summary.json").string();
  std::ofstream out(result.summary_path, std::ios::binary);
  if (!out) throw Error("cannot write summary: " + result.summary_path);
  out << summary.dump(2) << '\n';
  return result;
}

}  // namespace condgrad

// Copyright 2026 The CondGrad Authors. All Rights Reserved.
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//     http://www.apache.org/licenses/LICENSE-2.0
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.

// End-to-end acceptance checks. Each criterion prints one PASS/FAIL line;
// the exit code is the number of failed criteria.

#include <chrono>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include <Eigen/SVD>

#include "condgrad/data_io.hpp"
#include "condgrad/harness.hpp"
#include "condgrad/solvers.hpp"
#include "testutil.hpp"

using namespace condgrad;

namespace {

int failures = 0;

void report(const std::string& name, bool pass, const std::string& detail) {
  std::printf("%s %s: %s\n", pass ? "PASS" : "FAIL", name.c_str(), detail.c_str());
  if (!pass) ++failures;
}

std::string fmt(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.4g", v);
  return buf;
}

double seconds_since(const std::chrono::steady_clock::time_point& t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

struct QuadraticRuns {
  double f_star = 0.0;
  double wall_seconds = 0.0;
  std::vector<std::pair<SolverKind, RunResult<VectorSpace>>> results;
};

// Criteria 1-3 share these runs: d = 50 quadratic centered at 2 e1 over the
// unit l2 ball, solved for 2000 iterations from the default zero start.
QuadraticRuns quadratic_rate_runs() {
  QuadraticRuns out;
  Eigen::VectorXd center = Eigen::VectorXd::Zero(50);
  center[0] = 2.0;
  const QuadraticProblem objective(center);
  out.f_star = objective.argmin_l2(1.0).value;
  const auto t0 = std::chrono::steady_clock::now();
  for (const SolverKind kind : {SolverKind::Fw, SolverKind::Afw, SolverKind::ExtraFw}) {
    const VectorSpace space(objective, ConstraintSet(L2Ball{1.0}));
    RunOptions opt;
    opt.iterations = 2000;
    out.results.emplace_back(kind, run(kind, space, Eigen::VectorXd::Zero(50), opt));
  }
  out.wall_seconds = seconds_since(t0);
  return out;
}

std::vector<std::pair<int, double>> optimality_series(const RunResult<VectorSpace>& result,
                                                      double f_ref) {
  std::vector<std::pair<int, double>> series;
  series.reserve(result.rows.size());
  for (const IterationRow& row : result.rows) series.emplace_back(row.k, row.f - f_ref);
  return series;
}

void criterion_1_rate_separation(const QuadraticRuns& runs) {
  std::string detail;
  bool pass = true;
  for (const auto& [kind, result] : runs.results) {
    const SlopeFit fit = slope_fit(optimality_series(result, runs.f_star), 200, 2000);
    bool ok = true;
    switch (kind) {
      case SolverKind::ExtraFw: ok = fit.slope <= -1.7; break;
      case SolverKind::Afw: ok = fit.slope <= -1.5; break;
      case SolverKind::Fw: ok = fit.slope >= -1.3 && fit.slope <= -0.7; break;
      default: break;
    }
    pass = pass && ok;
    detail += solver_name(kind) + " slope " + fmt(fit.slope) +
              (fit.clipped ? " (clipped)" : "") + (ok ? "" : " [out of range]") + "; ";
  }
  const bool timely = runs.wall_seconds < 10.0;
  pass = pass && timely;
  detail += "runtime " + fmt(runs.wall_seconds) + "s";
  report("criterion-1 rate-separation", pass, detail);
}

void criterion_2_certificate_soundness(const QuadraticRuns& runs) {
  bool pass = true;
  std::string detail;
  for (const auto& [kind, result] : runs.results) {
    long violations = 0;
    for (const IterationRow& row : result.rows) {
      if (row.k < 1) continue;
      if (row.certificate < row.f - runs.f_star - 1e-9) ++violations;
    }
    const IterationRow& last = result.rows.back();
    const double true_gap = last.f - runs.f_star;
    const bool tail_ok = last.certificate <= 1e3 * true_gap + 1e-15;
    pass = pass && violations == 0 && tail_ok;
    detail += solver_name(kind) + " viol=" + std::to_string(violations) + " cert@2000=" +
              fmt(last.certificate) + " gap=" + fmt(true_gap) + "; ";
  }
  report("criterion-2 certificate-soundness", pass, detail);
}

void criterion_3_slack_sandwich() {
  Eigen::VectorXd center = Eigen::VectorXd::Zero(50);
  center[0] = 2.0;
  const QuadraticProblem objective(center);
  const VectorSpace space(objective, ConstraintSet(L2Ball{1.0}));
  auto state = init_momentum_state(space, Eigen::VectorXd::Zero(50));
  Certificate cert = cert_init(objective.eval(Eigen::VectorXd::Zero(50)).value);
  XiRecursion xi;
  long violations = 0;
  double worst = 0.0;
  for (int k = 0; k < 500; ++k) {
    const StepStats stats = extrafw_step(space, state);
    cert_update(cert, stats.delta, stats.anchor_value, stats.anchor_grad_dot, stats.g_dot_v);
    xi.update(stats.delta, 1.0, 2.0);
    const double f_x = objective.eval(state.x).value;
    const double slack = f_x - cert.phi_star - xi.value;
    worst = std::max(worst, slack);
    if (slack > 1e-9) ++violations;
  }
  report("criterion-3 slack-sandwich", violations == 0,
         "violations=" + std::to_string(violations) + " worst slack " + fmt(worst));
}

void criterion_4_lmo_exactness() {
  const auto t0 = std::chrono::steady_clock::now();
  Rng rng(424242);
  long mismatches = 0;
  for (int t = 0; t < 10000; ++t) {
    const Index d = 1 + static_cast<Index>(rng.below(20));
    const Eigen::VectorXd g = testutil::random_vector(rng, d, -4.0, 4.0);
    const double radius = rng.uniform(0.5, 3.0);
    const auto v1 = lmo_l1(g, radius);
    if (v1 && g.dot(*v1) != g.dot(lmo_bruteforce(g, ConstraintSet(L1Ball{radius})))) ++mismatches;
    if (g.dot(lmo_simplex(g, radius)) != g.dot(lmo_bruteforce(g, ConstraintSet(Simplex{radius}))))
      ++mismatches;
  }

  long svd_misses = 0;
  double worst_rel = 0.0;
  for (int t = 0; t < 1000; ++t) {
    const Index m = 1 + static_cast<Index>(rng.below(12));
    const Index n = 1 + static_cast<Index>(rng.below(12));
    Eigen::MatrixXd dense(m, n);
    for (Index i = 0; i < m; ++i)
      for (Index j = 0; j < n; ++j) dense(i, j) = rng.uniform() < 0.6 ? 0.0 : rng.normal();
    if (dense.cwiseAbs().maxCoeff() == 0.0) dense(0, 0) = 1.0;
    std::vector<Eigen::Triplet<double>> trip;
    for (Index i = 0; i < m; ++i)
      for (Index j = 0; j < n; ++j)
        if (dense(i, j) != 0.0) trip.emplace_back(i, j, dense(i, j));
    SparseMatrix sparse(m, n);
    sparse.setFromTriplets(trip.begin(), trip.end());
    const double radius = rng.uniform(0.5, 2.0);
    const auto atom = lmo_nuclear(sparse, radius, solver_power_options());
    const Eigen::JacobiSVD<Eigen::MatrixXd> svd(dense);
    const double expected = -radius * svd.singularValues()[0];
    const double got = atom->scale * atom->left.dot(dense * atom->right);
    const double rel = std::abs(got - expected) / std::abs(expected);
    worst_rel = std::max(worst_rel, rel);
    if (rel > 1e-6) ++svd_misses;
  }
  const double elapsed = seconds_since(t0);
  const bool pass = mismatches == 0 && svd_misses == 0 && elapsed < 30.0;
  report("criterion-4 lmo-exactness", pass,
         "vertex mismatches=" + std::to_string(mismatches) + " svd misses=" +
             std::to_string(svd_misses) + " worst rel " + fmt(worst_rel) + " runtime " +
             fmt(elapsed) + "s");
}

void criterion_5_sparsity_and_rank() {
  bool pass = true;
  std::string detail;

  const SyntheticLogistic synth = synth_logistic(33, 300, 40, 0.2, 3.0);
  const LogisticProblem objective(synth.data.features, synth.data.labels);
  for (const SolverKind kind : {SolverKind::Fw, SolverKind::Afw, SolverKind::ExtraFw}) {
    const VectorSpace space(objective, ConstraintSet(L1Ball{5.0}));
    RunOptions opt;
    opt.iterations = 250;
    long violations = 0;
    run(kind, space, Eigen::VectorXd::Zero(40), opt, [&](int k, const Eigen::VectorXd& x) {
      Index nnz = 0;
      for (Index i = 0; i < x.size(); ++i)
        if (x[i] != 0.0) ++nnz;
      if (nnz > k) ++violations;
    });
    pass = pass && violations == 0;
    detail += "l1-" + solver_name(kind) + " viol=" + std::to_string(violations) + "; ";
  }

  const SyntheticLowRank lowrank = synth_lowrank(9, 40, 30, 3, 0.3, 0.01);
  const CompletionProblem completion(lowrank.observed);
  for (const SolverKind kind : {SolverKind::Fw, SolverKind::Afw, SolverKind::ExtraFw}) {
    const NuclearSpace space(completion, 1.2 * lowrank.nuclear_norm);
    RunOptions opt;
    opt.iterations = 120;
    long violations = 0;
    run(kind, space, space.zero_point(), opt, [&](int k, const AtomCombination& x) {
      if (static_cast<int>(x.atoms.size()) > k + 1) ++violations;
    });
    pass = pass && violations == 0;
    detail += "atoms-" + solver_name(kind) + " viol=" + std::to_string(violations) + "; ";
  }
  report("criterion-5 sparsity-and-rank", pass, detail);
}

void criterion_6_solver_ordering() {
  const SyntheticLogistic synth = synth_logistic(1, 2000, 100, 0.18, 3.0);
  const LogisticProblem objective(synth.data.features, synth.data.labels);
  double final_f[3] = {0, 0, 0};
  double best = std::numeric_limits<double>::infinity();
  int i = 0;
  for (const SolverKind kind : {SolverKind::Fw, SolverKind::Afw, SolverKind::ExtraFw}) {
    const VectorSpace space(objective, ConstraintSet(L2Ball{70.0}));
    RunOptions opt;
    opt.iterations = 1000;
    const auto result = run(kind, space, Eigen::VectorXd::Zero(100), opt);
    final_f[i++] = result.rows.back().f;
    for (const IterationRow& row : result.rows) best = std::min(best, row.f);
  }
  const double fw = final_f[0] - best;
  const double afw = final_f[1] - best;
  const double extra = final_f[2] - best;
  const bool ordered = extra <= afw + 1e-12 && afw <= fw + 1e-12;
  const bool separated = extra <= 0.2 * fw;
  report("criterion-6 solver-ordering", ordered && separated,
         "optimality@1000 fw=" + fmt(fw) + " afw=" + fmt(afw) + " extrafw=" + fmt(extra) +
             (ordered ? "" : " [order violated]") + (separated ? "" : " [factor > 0.2]"));
}

void criterion_7_completion_improvement() {
  const SyntheticLowRank lowrank = synth_lowrank(21, 200, 200, 5, 0.1, 0.01);
  const CompletionProblem completion(lowrank.observed);
  const double radius = 1.2 * lowrank.nuclear_norm;
  double final_f[3] = {0, 0, 0};
  long atoms[3] = {0, 0, 0};
  double best = std::numeric_limits<double>::infinity();
  int i = 0;
  for (const SolverKind kind : {SolverKind::Fw, SolverKind::Afw, SolverKind::ExtraFw}) {
    const NuclearSpace space(completion, radius);
    RunOptions opt;
    opt.iterations = 500;
    const auto result = run(kind, space, space.zero_point(), opt);
    final_f[i] = result.rows.back().f;
    atoms[i] = static_cast<long>(result.final_point.atoms.size());
    ++i;
    for (const IterationRow& row : result.rows) best = std::min(best, row.f);
  }
  const double fw = final_f[0] - best;
  const double extra = final_f[2] - best;
  const bool halved = extra <= 0.5 * fw;
  const bool fewer_atoms = atoms[2] <= atoms[0];
  report("criterion-7 completion-improvement", halved && fewer_atoms,
         "optimality@500 fw=" + fmt(fw) + " extrafw=" + fmt(extra) + " atoms fw=" +
             std::to_string(atoms[0]) + " extrafw=" + std::to_string(atoms[2]));
}

void criterion_8_gradient_checks() {
  Rng rng(314159);
  long bad = 0;

  const SyntheticLogistic synth = synth_logistic(8, 30, 7, 0.5, 2.0);
  const LogisticProblem logistic(synth.data.features, synth.data.labels);
  for (int t = 0; t < 100; ++t) {
    const Eigen::VectorXd x = testutil::random_vector(rng, 7, -2.0, 2.0);
    if (!testutil::gradients_close(
            logistic.eval(x).gradient,
            testutil::fd_gradient([&](const Eigen::VectorXd& p) { return logistic.eval(p).value; },
                                  x)))
      ++bad;
  }

  const QuadraticProblem quadratic(testutil::random_vector(rng, 7));
  for (int t = 0; t < 100; ++t) {
    const Eigen::VectorXd x = testutil::random_vector(rng, 7, -2.0, 2.0);
    if (!testutil::gradients_close(
            quadratic.eval(x).gradient,
            testutil::fd_gradient(
                [&](const Eigen::VectorXd& p) { return quadratic.eval(p).value; }, x)))
      ++bad;
  }

  const SyntheticLowRank lowrank = synth_lowrank(4, 8, 6, 2, 0.5, 0.05);
  const CompletionProblem completion(lowrank.observed);
  const Index support = completion.observed().count();
  for (int t = 0; t < 100; ++t) {
    const Eigen::VectorXd values = testutil::random_vector(rng, support, -2.0, 2.0);
    if (!testutil::gradients_close(
            completion.eval_values(values).gradient,
            testutil::fd_gradient(
                [&](const Eigen::VectorXd& p) { return completion.eval_values(p).value; },
                values)))
      ++bad;
  }
  report("criterion-8 gradient-checks", bad == 0,
         "mismatched points=" + std::to_string(bad) + " of 300");
}

void criterion_9_lambda_closed_form() {
  Certificate cert = cert_init(0.0);
  long violations = 0;
  double worst = 0.0;
  for (int k = 0; k < 10000; ++k) {
    cert_update(cert, momentum_delta(k), 0.0, 0.0, 0.0);
    const double closed = 2.0 / (static_cast<double>(k + 2) * static_cast<double>(k + 3));
    const double err = std::abs(cert.lambda - closed) / cert.lambda;
    worst = std::max(worst, err);
    if (err > 1e-12) ++violations;
  }
  report("criterion-9 lambda-closed-form", violations == 0,
         "worst relative error " + fmt(worst));
}

void criterion_10_determinism() {
  const std::string config_path = std::string(CONDGRAD_CONFIG_DIR) + "/quadratic_l2_rates.cfg";
  ExperimentConfig cfg = ExperimentConfig::load(config_path);
  namespace fs = std::filesystem;
  const fs::path dir_a = fs::temp_directory_path() / "condgrad_acc_det_a";
  const fs::path dir_b = fs::temp_directory_path() / "condgrad_acc_det_b";
  fs::remove_all(dir_a);
  fs::remove_all(dir_b);

  cfg.output_dir = dir_a.string();
  run_experiment(cfg);
  cfg.output_dir = dir_b.string();
  run_experiment(cfg);

  const auto read = [](const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::ostringstream out;
    out << in.rdbuf();
    return out.str();
  };
  long mismatched = 0;
  long compared = 0;
  for (const auto& entry : fs::directory_iterator(dir_a)) {
    if (entry.path().extension() != ".csv") continue;
    ++compared;
    if (read(entry.path()) != read(dir_b / entry.path().filename())) ++mismatched;
  }
  fs::remove_all(dir_a);
  fs::remove_all(dir_b);
  report("criterion-10 determinism", compared > 0 && mismatched == 0,
         std::to_string(compared) + " trace files compared, " + std::to_string(mismatched) +
             " differ");
}

}  // namespace

int main() {
  const QuadraticRuns runs = quadratic_rate_runs();
  criterion_1_rate_separation(runs);
  criterion_2_certificate_soundness(runs);
  criterion_3_slack_sandwich();
  criterion_4_lmo_exactness();
  criterion_5_sparsity_and_rank();
  criterion_6_solver_ordering();
  criterion_7_completion_improvement();
  criterion_8_gradient_checks();
  criterion_9_lambda_closed_form();
  criterion_10_determinism();
  if (failures > 0) std::printf("%d criterion(s) failed\n", failures);
  return failures;
}

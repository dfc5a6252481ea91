// Copyright 2026 The CondGrad Authors. All Rights Reserved.
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//     http://www.apache.org/licenses/LICENSE-2.0
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.

#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include "condgrad/harness.hpp"
#include "testutil.hpp"

using namespace condgrad;

namespace {

ExperimentConfig config_from(const std::string& text) {
  std::istringstream in(text);
  return ExperimentConfig::parse(in);
}

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  REQUIRE(in);
  std::ostringstream out;
  out << in.rdbuf();
  return out.str();
}

std::filesystem::path fresh_dir(const std::string& tag) {
  const auto dir = std::filesystem::temp_directory_path() / ("condgrad_test_" + tag);
  std::filesystem::remove_all(dir);
  return dir;
}

constexpr const char* kQuadraticConfig = R"(
[experiment]
task = quadratic
solvers = fw, afw, extrafw, gd, nag
iterations = 60
seed = 3
output = {OUT}

[constraint]
type = l2
radius = 1.0

[quadratic]
dim = 5
center_first = 2.0
)";

std::string with_output(std::string text, const std::string& out_dir) {
  const std::string needle = "{OUT}";
  text.replace(text.find(needle), needle.size(), out_dir);
  return text;
}

}  // namespace

TEST_CASE("ini parsing") {
  std::istringstream in(R"(
# comment
[experiment]
task = quadratic   ; trailing comment
iterations = 9

[constraint]
type = l2
)");
  const IniFile ini = IniFile::parse(in);
  CHECK(ini.find("experiment", "task") == "quadratic");
  CHECK(ini.find("experiment", "iterations") == "9");
  CHECK(ini.find("constraint", "type") == "l2");
  CHECK_FALSE(ini.find("constraint", "radius").has_value());

  std::istringstream bad("[unterminated\n");
  CHECK_THROWS_AS(IniFile::parse(bad), ConfigError);
  std::istringstream nokey("[a]\nvalue\n");
  CHECK_THROWS_AS(IniFile::parse(nokey), ConfigError);
}

TEST_CASE("config validation rejects inconsistent experiments") {
  const std::string base = with_output(kQuadraticConfig, "out");
  CHECK(config_from(base).solvers.size() == 5);

  auto swap = [&](const std::string& from, const std::string& to) {
    std::string text = base;
    text.replace(text.find(from), from.size(), to);
    return text;
  };

  CHECK_THROWS_AS(config_from(swap("task = quadratic", "task = juggling")), ConfigError);
  CHECK_THROWS_AS(config_from(swap("solvers = fw, afw, extrafw, gd, nag", "solvers = warp")),
                  ConfigError);
  CHECK_THROWS_AS(config_from(swap("iterations = 60", "iterations = 0")), ConfigError);
  CHECK_THROWS_AS(config_from(swap("type = l2", "type = moebius")), ConfigError);
  CHECK_THROWS_AS(config_from(swap("radius = 1.0", "radius = -2")), ConfigError);
  // Projected baselines need an exact projection.
  CHECK_THROWS_AS(config_from(swap("type = l2", "type = nsupport\nn = 2")), ConfigError);
  // Nuclear pairs with the completion task only.
  CHECK_THROWS_AS(config_from(swap("type = l2", "type = nuclear")), ConfigError);
  // Unknown keys are typos, not extensions.
  CHECK_THROWS_AS(config_from(base + "\n[experiment]\nturbo = yes\n"), ConfigError);
  CHECK_THROWS_AS(config_from(base + "\n[warp]\nspeed = 9\n"), ConfigError);
}

TEST_CASE("sparsity counts entries above the tolerance") {
  Eigen::VectorXd x(3);
  x << 0.0, 2.0, 0.0;
  CHECK(sparsity(x) == 1);
  Eigen::VectorXd tiny(2);
  tiny << 1e-15, 1.0;
  CHECK(sparsity(tiny) == 1);
  CHECK(sparsity(tiny, 1e-16) == 2);
  CHECK(sparsity(Eigen::VectorXd::Zero(4)) == 0);
}

TEST_CASE("numerical rank of factored combinations") {
  Rng rng(12);
  const auto unit = [&](Index d) { return testutil::random_unit(rng, d); };

  AtomCombination x;
  x.support_values = Eigen::VectorXd::Zero(1);
  CHECK(numerical_rank(x, 6, 5, 1e-8) == 0);

  const Eigen::VectorXd p = unit(6);
  const Eigen::VectorXd q = unit(5);
  x.atoms.push_back({0.5, RankOneAtom{-2.0, p, q}});
  CHECK(numerical_rank(x, 6, 5, 1e-8) == 1);

  // A second copy of the same atom keeps the combination rank one.
  x.atoms.push_back({0.5, RankOneAtom{-2.0, p, q}});
  CHECK(numerical_rank(x, 6, 5, 1e-8) == 1);

  x.atoms.push_back({0.25, RankOneAtom{-2.0, unit(6), unit(5)}});
  CHECK(numerical_rank(x, 6, 5, 1e-8) == 2);

  // Cross-check against a dense SVD of the materialized matrix.
  Eigen::MatrixXd dense = Eigen::MatrixXd::Zero(6, 5);
  for (const WeightedAtom& wa : x.atoms)
    dense += wa.weight * wa.factor.scale * wa.factor.left * wa.factor.right.transpose();
  const Eigen::JacobiSVD<Eigen::MatrixXd> svd(dense);
  Index reference = 0;
  for (Index i = 0; i < svd.singularValues().size(); ++i)
    if (svd.singularValues()[i] > 1e-8 * svd.singularValues()[0]) ++reference;
  CHECK(numerical_rank(x, 6, 5, 1e-8) == reference);
}

TEST_CASE("test accuracy with the sign convention") {
  SyntheticLogistic synth =
      synth_logistic(5, 60, 12, 0.4, std::numeric_limits<double>::infinity());
  Dataset ds = train_test_split(std::move(synth.data), 0.7, 9);
  CHECK(test_accuracy(ds, synth.planted) == 1.0);  // planted model separates

  // x = 0: every margin is 0, predicted +1 by convention.
  double positives = 0.0;
  for (const Index i : ds.test_indices)
    if (ds.labels[i] == 1.0) ++positives;
  CHECK(test_accuracy(ds, Eigen::VectorXd::Zero(12)) ==
        doctest::Approx(positives / static_cast<double>(ds.test_indices.size())));

  Rng rng(5);
  const Eigen::VectorXd arbitrary = testutil::random_vector(rng, 12);
  const double acc = test_accuracy(ds, arbitrary);
  CHECK(acc >= 0.0);
  CHECK(acc <= 1.0);

  Dataset unsplit;
  unsplit.features = ds.features;
  unsplit.labels = ds.labels;
  CHECK_THROWS_AS(test_accuracy(unsplit, arbitrary), Error);
}

TEST_CASE("slope fitting on synthetic decay sequences") {
  std::vector<std::pair<int, double>> inverse, square, constant, zeros;
  for (int k = 1; k <= 400; ++k) {
    inverse.emplace_back(k, 3.0 / k);
    square.emplace_back(k, 0.7 / (static_cast<double>(k) * k));
    constant.emplace_back(k, 2.5);
    zeros.emplace_back(k, k < 200 ? 1.0 / k : 0.0);
  }
  CHECK(slope_fit(inverse, 10, 400).slope == doctest::Approx(-1.0).epsilon(1e-6));
  CHECK(slope_fit(square, 10, 400).slope == doctest::Approx(-2.0).epsilon(1e-6));
  CHECK(slope_fit(constant, 10, 400).slope == doctest::Approx(0.0));
  CHECK_FALSE(slope_fit(inverse, 10, 400).clipped);

  const SlopeFit clipped = slope_fit(zeros, 10, 400);
  CHECK(clipped.clipped);

  CHECK_THROWS_AS(slope_fit(inverse, 390, 390).slope, Error);  // single point
}

TEST_CASE("quadratic experiment end to end") {
  const auto dir = fresh_dir("quad");
  const ExperimentConfig cfg = config_from(with_output(kQuadraticConfig, dir.string()));
  const ExperimentResult result = run_experiment(cfg);

  CHECK(result.f_ref == doctest::Approx(0.5));
  CHECK(result.f_ref_source == "analytic");
  REQUIRE(result.traces.size() == 5);
  for (const Trace& trace : result.traces) {
    CHECK(trace.rows.size() == 61);
    for (const TraceRow& row : trace.rows) CHECK(row.optimality >= -1e-9);
  }

  // Call accounting mirrors each algorithm's structure.
  for (const Trace& trace : result.traces) {
    if (trace.solver == "fw" || trace.solver == "afw") {
      CHECK(trace.fo_calls == 60);
      CHECK(trace.lmo_calls == 60);
    } else if (trace.solver == "extrafw") {
      CHECK(trace.fo_calls == 120);
      CHECK(trace.lmo_calls == 120);
    }
  }

  for (const std::string& path : result.trace_paths) CHECK(std::filesystem::exists(path));
  CHECK(std::filesystem::exists(result.summary_path));
  const std::string summary = read_file(result.summary_path);
  CHECK(summary.find("\"f_ref_source\": \"analytic\"") != std::string::npos);
  CHECK(summary.find("\"min_certificate\"") != std::string::npos);
  CHECK(summary.find("\"has_nonpositive_optimality\"") != std::string::npos);

  // The CSV round-trips through the slope reader.
  const auto series = read_trace_optimality((dir / "extrafw.csv").string());
  CHECK(series.size() == 61);
  CHECK(series.front().first == 0);
  CHECK(series.back().first == 60);
  std::filesystem::remove_all(dir);
}

TEST_CASE("identical configs produce byte-identical traces") {
  const auto dir_a = fresh_dir("det_a");
  const auto dir_b = fresh_dir("det_b");
  const std::string base = R"(
[experiment]
task = logistic
solvers = fw, extrafw
iterations = 40
seed = 12
output = {OUT}

[constraint]
type = l1
radius = 4.0

[data]
source = synth
samples = 80
dim = 25
sparsity = 0.2
margin = 3.0
test_fraction = 0.25
)";
  run_experiment(config_from(with_output(base, dir_a.string())));
  run_experiment(config_from(with_output(base, dir_b.string())));
  for (const std::string solver : {"fw", "extrafw"}) {
    const std::string a = read_file((dir_a / (solver + ".csv")).string());
    const std::string b = read_file((dir_b / (solver + ".csv")).string());
    CHECK(a == b);
    CHECK(a.find("k,f,optimality,certificate,nnz,test_accuracy") == 0);
  }
  std::filesystem::remove_all(dir_a);
  std::filesystem::remove_all(dir_b);
}

TEST_CASE("completion experiment writes atoms and rank columns") {
  const auto dir = fresh_dir("mc");
  const std::string text = R"(
[experiment]
task = completion
solvers = fw, extrafw
iterations = 25
seed = 4
output = {OUT}

[constraint]
type = nuclear
radius_scale = 1.2

[data]
source = synth
rows = 12
cols = 10
rank = 2
density = 0.5
noise = 0.01

[metrics]
rank_stride = 5
)";
  const ExperimentResult result = run_experiment(config_from(with_output(text, dir.string())));
  CHECK(result.f_ref_source == "best_found");
  for (const Trace& trace : result.traces) {
    CHECK(trace.rows.size() == 26);
    for (const TraceRow& row : trace.rows) {
      REQUIRE(row.atoms.has_value());
      CHECK(*row.atoms <= row.k + 1);
      if (row.k % 5 == 0) {
        REQUIRE(row.rank.has_value());
        CHECK(*row.rank <= *row.atoms);
      }
    }
    CHECK(trace.rows.back().rank.has_value());
  }
  const std::string csv = read_file((dir / "fw.csv").string());
  CHECK(csv.find("k,f,optimality,certificate,atoms,rank") == 0);
  std::filesystem::remove_all(dir);
}

TEST_CASE("early stopping on the certificate is recorded") {
  const auto dir = fresh_dir("stop");
  std::string text = with_output(kQuadraticConfig, dir.string());
  text.replace(text.find("iterations = 60"), 15, "iterations = 900");
  text.replace(text.find("solvers = fw, afw, extrafw, gd, nag"), 35, "solvers = extrafw");
  text += "\n[experiment]\nepsilon = 1e-4\n";
  const ExperimentResult result = run_experiment(config_from(text));
  REQUIRE(result.traces.size() == 1);
  REQUIRE(result.traces[0].stopped_at.has_value());
  CHECK(*result.traces[0].stopped_at < 900);
  CHECK(result.traces[0].rows.size() < 901);
  std::filesystem::remove_all(dir);
}

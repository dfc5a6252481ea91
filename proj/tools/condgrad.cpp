// Copyright 2026 The CondGrad Authors. All Rights Reserved.
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//     http://www.apache.org/licenses/LICENSE-2.0
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.

#include <cstdio>
#include <exception>
#include <string>

#include <CLI11.hpp>

#include "condgrad/harness.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitConfigError = 2;
constexpr int kExitDataError = 3;

int run_command(const std::string& config_path, bool force_sequential) {
  condgrad::ExperimentConfig cfg = condgrad::ExperimentConfig::load(config_path);
  if (force_sequential) cfg.sequential = true;
  const condgrad::ExperimentResult result = condgrad::run_experiment(cfg);
  for (const std::string& path : result.trace_paths) std::printf("wrote %s\n", path.c_str());
  std::printf("wrote %s\n", result.summary_path.c_str());
  std::printf("f_ref = %.17g (%s)\n", result.f_ref, result.f_ref_source.c_str());
  for (const auto& trace : result.traces) {
    const auto& last = trace.rows.back();
    std::printf("%-8s k=%-6d f=%.10g optimality=%.4g fo=%ld lmo=%ld\n", trace.solver.c_str(),
                last.k, last.f, last.optimality, trace.fo_calls, trace.lmo_calls);
  }
  return kExitOk;
}

int validate_command(const std::string& config_path) {
  const condgrad::ExperimentConfig cfg = condgrad::ExperimentConfig::load(config_path);
  std::printf("ok: %s (task=%s, %zu solvers, K=%d)\n", config_path.c_str(),
              condgrad::task_name(cfg.task).c_str(), cfg.solvers.size(), cfg.iterations);
  return kExitOk;
}

int slopes_command(const std::string& trace_path, int from, int to) {
  const auto series = condgrad::read_trace_optimality(trace_path);
  const condgrad::SlopeFit fit = condgrad::slope_fit(series, from, to);
  std::printf("%s: slope %.6f over k in [%d, %d]%s\n", trace_path.c_str(), fit.slope, from, to,
              fit.clipped ? " (some values clipped at 1e-16)" : "");
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Projection-free convex optimization experiment harness"};
  app.require_subcommand(1);

  std::string config_path;
  bool force_sequential = false;
  auto* run_cmd = app.add_subcommand("run", "Run every solver in a config and write traces");
  run_cmd->add_option("config", config_path, "Experiment config file")->required();
  run_cmd->add_flag("--sequential", force_sequential,
                    "Run solvers one at a time (for timing studies)");

  std::string validate_path;
  auto* validate_cmd = app.add_subcommand("validate", "Parse and validate a config");
  validate_cmd->add_option("config", validate_path, "Experiment config file")->required();

  std::string trace_path;
  int from = 1;
  int to = 1 << 30;
  auto* slopes_cmd = app.add_subcommand("slopes", "Log-log slope of a trace's optimality column");
  slopes_cmd->add_option("trace", trace_path, "Trace CSV file")->required();
  slopes_cmd->add_option("--from", from, "First iteration of the fit range");
  slopes_cmd->add_option("--to", to, "Last iteration of the fit range");

  CLI11_PARSE(app, argc, argv);

  try {
    if (run_cmd->parsed()) return run_command(config_path, force_sequential);
    if (validate_cmd->parsed()) return validate_command(validate_path);
    if (slopes_cmd->parsed()) return slopes_command(trace_path, from, to);
  } catch (const condgrad::ConfigError& e) {
    std::fprintf(stderr, "config error: %s\n", e.what());
    return kExitConfigError;
  } catch (const condgrad::ParseError& e) {
    std::fprintf(stderr, "data error: %s\n", e.what());
    return kExitDataError;
  } catch (const condgrad::DataError& e) {
    std::fprintf(stderr, "data error: %s\n", e.what());
    return kExitDataError;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 1;
  }
  return kExitOk;
}

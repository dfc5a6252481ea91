// Copyright 2026 The CondGrad Authors. All Rights Reserved.
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//     http://www.apache.org/licenses/LICENSE-2.0
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.

#include "condgrad/solvers.hpp"

namespace condgrad {

std::string solver_name(SolverKind kind) {
  switch (kind) {
    case SolverKind::Fw: return "fw";
    case SolverKind::Afw: return "afw";
    case SolverKind::ExtraFw: return "extrafw";
    case SolverKind::Gd: return "gd";
    case SolverKind::Nag: return "nag";
  }
  return "unknown";
}

std::optional<SolverKind> solver_from_name(const std::string& name) {
  if (name == "fw") return SolverKind::Fw;
  if (name == "afw") return SolverKind::Afw;
  if (name == "extrafw") return SolverKind::ExtraFw;
  if (name == "gd") return SolverKind::Gd;
  if (name == "nag") return SolverKind::Nag;
  return std::nullopt;
}

namespace {

void check_projected_baseline(const VectorSpace& sp, double lipschitz) {
  if (!projection_supported(sp.constraint()))
    throw UnsupportedConstraintError("projected baseline: no exact projection for " +
                                     sp.constraint().name());
  if (!(lipschitz > 0.0)) throw Error("projected baseline: need a positive Lipschitz constant");
}

}  // namespace

StepStats gd_step(const VectorSpace& sp, GdState& s, double lipschitz) {
  check_projected_baseline(sp, lipschitz);
  StepStats stats;
  const SpaceEval at_x = sp.fo_at(s.x);
  stats.f_start = at_x.value;
  s.x = project(sp.constraint(), s.x - at_x.gradient / lipschitz);
  ++s.k;
  return stats;
}

StepStats nag_step(const VectorSpace& sp, NagState& s, double lipschitz) {
  check_projected_baseline(sp, lipschitz);
  StepStats stats;
  const double momentum =
      s.k == 0 ? 0.0 : static_cast<double>(s.k - 1) / static_cast<double>(s.k + 2);
  const Eigen::VectorXd z = s.x + momentum * (s.x - s.x_prev);
  const SpaceEval at_z = sp.fo_at(z);
  s.x_prev = s.x;
  s.x = project(sp.constraint(), z - at_z.gradient / lipschitz);
  ++s.k;
  return stats;
}

}  // namespace condgrad

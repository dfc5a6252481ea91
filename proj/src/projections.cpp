// Copyright 2026 The CondGrad Authors. All Rights Reserved.
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//     http://www.apache.org/licenses/LICENSE-2.0
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.

#include "condgrad/projections.hpp"

#include <algorithm>
#include <vector>

namespace condgrad {

Eigen::VectorXd project_l2(const Eigen::Ref<const Eigen::VectorXd>& x, double radius) {
  const double norm = x.norm();
  if (norm <= radius) return x;
  return (radius / norm) * x;
}

Eigen::VectorXd project_simplex(const Eigen::Ref<const Eigen::VectorXd>& x, double mass) {
  const Index d = x.size();
  std::vector<double> u(x.data(), x.data() + d);
  std::sort(u.begin(), u.end(), std::greater<double>());
  double cumsum = 0.0;
  double tau = 0.0;
  for (Index j = 0; j < d; ++j) {
    cumsum += u[static_cast<size_t>(j)];
    const double cand = (cumsum - mass) / static_cast<double>(j + 1);
    if (u[static_cast<size_t>(j)] - cand > 0.0) tau = cand;
  }
  return x.unaryExpr([tau](double v) { return std::max(v - tau, 0.0); });
}

Eigen::VectorXd project_l1(const Eigen::Ref<const Eigen::VectorXd>& x, double radius) {
  if (x.lpNorm<1>() <= radius) return x;
  const Eigen::VectorXd mags = project_simplex(x.cwiseAbs(), radius);
  Eigen::VectorXd out(x.size());
  for (Index i = 0; i < x.size(); ++i) out[i] = x[i] < 0.0 ? -mags[i] : mags[i];
  return out;
}

Eigen::VectorXd project(const ConstraintSet& c, const Eigen::Ref<const Eigen::VectorXd>& x) {
  switch (c.kind()) {
    case ConstraintKind::L2Ball: return project_l2(x, c.as<L2Ball>().radius);
    case ConstraintKind::L1Ball: return project_l1(x, c.as<L1Ball>().radius);
    case ConstraintKind::Simplex: return project_simplex(x, c.as<Simplex>().mass);
    default:
      throw UnsupportedConstraintError("project: no exact projection for " + c.name());
  }
}

bool projection_supported(const ConstraintSet& c) {
  switch (c.kind()) {
    case ConstraintKind::L2Ball:
    case ConstraintKind::L1Ball:
    case ConstraintKind::Simplex: return true;
    default: return false;
  }
}

}  // namespace condgrad

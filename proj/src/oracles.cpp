// Copyright 2026 The CondGrad Authors. All Rights Reserved.
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//     http://www.apache.org/licenses/LICENSE-2.0
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.

#include "condgrad/oracles.hpp"

namespace condgrad {

LogisticProblem::LogisticProblem(SparseMatrix features, Eigen::VectorXd labels)
    : features_(std::move(features)), labels_(std::move(labels)) {
  if (features_.rows() < 1) throw Error("LogisticProblem: need at least one sample");
  if (features_.rows() != labels_.size())
    throw DimensionError("LogisticProblem: label count mismatch");
  for (Index i = 0; i < labels_.size(); ++i)
    if (labels_[i] != 1.0 && labels_[i] != -1.0)
      throw Error("LogisticProblem: labels must be exactly +1 or -1");
}

Eval LogisticProblem::eval(const Eigen::VectorXd& x) const {
  if (x.size() != features_.cols()) throw DimensionError("logistic eval: dimension mismatch");
  const Index n = features_.rows();
  const Eigen::VectorXd margins = features_ * x;
  const double inv_n = 1.0 / static_cast<double>(n);
  double value = 0.0;
  Eigen::VectorXd coeffs(n);
  for (Index i = 0; i < n; ++i) {
    const double t = -labels_[i] * margins[i];
    value += softplus(t);
    coeffs[i] = -labels_[i] * sigmoid(t) * inv_n;
  }
  return Eval{value * inv_n, features_.transpose() * coeffs};
}

double LogisticProblem::estimate_lipschitz(const PowerIterOptions& opts) const {
  double max_abs = 0.0;
  for (Index i = 0; i < features_.nonZeros(); ++i)
    max_abs = std::max(max_abs, std::abs(features_.valuePtr()[i]));
  if (max_abs == 0.0) return 0.0;
  const double sigma = power_iteration_top_pair(features_, opts).value;
  return sigma * sigma / (4.0 * static_cast<double>(features_.rows()));
}

QuadraticProblem::QuadraticProblem(Eigen::VectorXd center) : center_(std::move(center)) {
  require_finite(center_, "QuadraticProblem center");
}

Eval QuadraticProblem::eval(const Eigen::VectorXd& x) const {
  if (x.size() != center_.size()) throw DimensionError("quadratic eval: dimension mismatch");
  Eigen::VectorXd diff = x - center_;
  return Eval{0.5 * diff.squaredNorm(), std::move(diff)};
}

QuadraticProblem::ConstrainedMin QuadraticProblem::argmin_l2(double radius) const {
  const double norm = center_.norm();
  if (norm < radius)
    throw InactiveConstraintError("argmin_l2: the center is interior, constraint inactive");
  const double gap = norm - radius;
  return ConstrainedMin{(radius / norm) * center_, 0.5 * gap * gap};
}

CompletionProblem::CompletionProblem(ObservedEntries observed)
    : observed_(std::move(observed)), target_(observed_.values()) {
  if (observed_.count() < 1) throw Error("CompletionProblem: need at least one observed entry");
}

Eval CompletionProblem::eval_values(const Eigen::VectorXd& values_on_support) const {
  if (values_on_support.size() != target_.size())
    throw DimensionError("completion eval: support size mismatch");
  Eigen::VectorXd diff = values_on_support - target_;
  return Eval{0.5 * diff.squaredNorm(), std::move(diff)};
}

}  // namespace condgrad

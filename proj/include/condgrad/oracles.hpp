// Copyright 2026 The CondGrad Authors. All Rights Reserved.
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//     http://www.apache.org/licenses/LICENSE-2.0
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.

#pragma once

#include <cmath>
#include <optional>

#include <Eigen/Dense>

#include "condgrad/lmo.hpp"
#include "condgrad/types.hpp"

namespace condgrad {

/// First-order oracle output at a query point.
struct Eval {
  double value;
  Eigen::VectorXd gradient;
};

/// Stable ln(1 + e^t); never overflows and keeps sub-eps tails exact.
inline double softplus(double t) {
  return t > 30.0 ? t + std::log1p(std::exp(-t)) : std::log1p(std::exp(t));
}

inline double sigmoid(double t) {
  if (t >= 0.0) return 1.0 / (1.0 + std::exp(-t));
  const double e = std::exp(t);
  return e / (1.0 + e);
}

/// First-order oracle over dense decision vectors.
class VectorObjective {
 public:
  virtual ~VectorObjective() = default;
  virtual Index dim() const = 0;
  virtual Eval eval(const Eigen::VectorXd& x) const = 0;
  /// Gradient Lipschitz constant when known in closed form.
  virtual std::optional<double> lipschitz() const { return std::nullopt; }
};

/// Averaged logistic loss (1/N) sum_i ln(1 + exp(-b_i <a_i, x>)) over a
/// sparse feature matrix with labels in {-1, +1}.
class LogisticProblem : public VectorObjective {
 public:
  LogisticProblem(SparseMatrix features, Eigen::VectorXd labels);

  Index dim() const override { return features_.cols(); }
  Index num_samples() const { return features_.rows(); }
  const SparseMatrix& features() const { return features_; }
  const Eigen::VectorXd& labels() const { return labels_; }

  Eval eval(const Eigen::VectorXd& x) const override;

  /// Global Hessian bound sigma_1(A)^2 / (4N); 0 for an all-zero matrix.
  double estimate_lipschitz(const PowerIterOptions& opts = {}) const;

 private:
  SparseMatrix features_;
  Eigen::VectorXd labels_;
};

/// f(x) = 0.5 ||x - c||_2^2 with analytically known constrained minimizer.
class QuadraticProblem : public VectorObjective {
 public:
  explicit QuadraticProblem(Eigen::VectorXd center);

  Index dim() const override { return center_.size(); }
  const Eigen::VectorXd& center() const { return center_; }

  Eval eval(const Eigen::VectorXd& x) const override;
  std::optional<double> lipschitz() const override { return 1.0; }

  struct ConstrainedMin {
    Eigen::VectorXd x;
    double value;
  };

  /// Minimizer over the l2 ball of the given radius; requires the constraint
  /// to be active (||c|| > radius), else throws InactiveConstraintError.
  ConstrainedMin argmin_l2(double radius) const;

 private:
  Eigen::VectorXd center_;
};

/// 0.5 sum_{(i,j) observed} (X_ij - A_ij)^2, evaluated on the iterate's
/// cached values over the observation support. The gradient is supported on
/// the observed positions only and is returned in the same storage order.
class CompletionProblem {
 public:
  explicit CompletionProblem(ObservedEntries observed);

  const ObservedEntries& observed() const { return observed_; }
  const Eigen::VectorXd& target() const { return target_; }

  Eval eval_values(const Eigen::VectorXd& values_on_support) const;

 private:
  ObservedEntries observed_;
  Eigen::VectorXd target_;
};

}  // namespace condgrad

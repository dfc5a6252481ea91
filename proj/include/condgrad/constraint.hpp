// Copyright 2026 The CondGrad Authors. All Rights Reserved.
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//     http://www.apache.org/licenses/LICENSE-2.0
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.

#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>
#include <variant>

#include <Eigen/Dense>

#include "condgrad/types.hpp"

namespace condgrad {

inline constexpr double kFeasibilityTol = 1e-9;

struct L2Ball {
  double radius;
};

struct L1Ball {
  double radius;
};

/// {x >= 0, sum(x) = mass}.
struct Simplex {
  double mass;
};

/// conv{x : nnz(x) <= n, ||x||_2 <= radius}.
struct NSupportBall {
  Index n;
  double radius;
};

struct NuclearBall {
  Index rows;
  Index cols;
  double radius;
};

enum class ConstraintKind { L2Ball, L1Ball, Simplex, NSupportBall, NuclearBall };

/// Tagged union of the supported compact feasible sets.
class ConstraintSet {
 public:
  ConstraintSet(L2Ball b) : set_(check(b)) {}                   // NOLINT(google-explicit-constructor)
  ConstraintSet(L1Ball b) : set_(check(b)) {}                   // NOLINT
  ConstraintSet(Simplex s) : set_(check(s)) {}                  // NOLINT
  ConstraintSet(NSupportBall b) : set_(check(b)) {}             // NOLINT
  ConstraintSet(NuclearBall b) : set_(check(b)) {}              // NOLINT

  ConstraintKind kind() const { return static_cast<ConstraintKind>(set_.index()); }

  template <class T>
  const T& as() const {
    return std::get<T>(set_);
  }

  template <class T>
  bool is() const {
    return std::holds_alternative<T>(set_);
  }

  double radius() const;
  std::string name() const;

 private:
  static L2Ball check(L2Ball b);
  static L1Ball check(L1Ball b);
  static Simplex check(Simplex s);
  static NSupportBall check(NSupportBall b);
  static NuclearBall check(NuclearBall b);

  std::variant<L2Ball, L1Ball, Simplex, NSupportBall, NuclearBall> set_;
};

/// Euclidean diameter of the set (Frobenius for the nuclear ball, where 2R
/// upper-bounds the Frobenius distance of any feasible pair).
double diameter(const ConstraintSet& c);

/// n-support norm of x via the sorted-magnitude characterization: with
/// z = |x| sorted descending, find the unique r in {0,...,n-1} with
///   z[n-r-2] > (sum of the d-n+r+1 smallest z) / (r+1) >= z[n-r-1]
/// (z[-1] := +inf); the squared norm is the head sum of squares plus the
/// averaged tail term.
double nsupport_norm(const Eigen::Ref<const Eigen::VectorXd>& x, Index n);

namespace detail {
bool contains_vector(const ConstraintSet& c, const Eigen::Ref<const Eigen::VectorXd>& x,
                     double tol);
bool contains_nuclear(const ConstraintSet& c, const Eigen::Ref<const Eigen::MatrixXd>& x,
                      double tol);
}  // namespace detail

/// Membership within an additive tolerance on the defining norm/affine
/// conditions. Vector sets take single-column arguments; the nuclear ball
/// takes a dense matrix (SVD-based check).
template <typename Derived>
bool contains(const ConstraintSet& c, const Eigen::MatrixBase<Derived>& x,
              double tol = kFeasibilityTol) {
  if (c.kind() == ConstraintKind::NuclearBall) {
    const Eigen::MatrixXd dense = x;
    return detail::contains_nuclear(c, dense, tol);
  }
  if (x.cols() != 1) throw DimensionError("contains: vector sets take a single column");
  const Eigen::VectorXd column = x.derived().reshaped();
  return detail::contains_vector(c, column, tol);
}

}  // namespace condgrad

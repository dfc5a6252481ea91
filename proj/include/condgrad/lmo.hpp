// Copyright 2026 The CondGrad Authors. All Rights Reserved.
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//     http://www.apache.org/licenses/LICENSE-2.0
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.

#pragma once

#include <optional>

#include <Eigen/Dense>

#include "condgrad/constraint.hpp"
#include "condgrad/rng.hpp"
#include "condgrad/types.hpp"

namespace condgrad {

/// Gradient magnitudes below this are treated as the zero-gradient signal:
/// the LMO returns nullopt and the solver applies its documented fallback.
inline constexpr double kZeroGradientTol = 1e-15;

struct PowerIterOptions {
  double tol = 1e-10;        // relative change of the Rayleigh quotient
  int max_iters = 500;
  std::uint64_t seed = 0x5DEECE66Dull;  // start-vector seed
  // Return the pair held at the iteration cap instead of throwing. With a
  // closely spaced top of the spectrum the quotient creeps for ~1/gap
  // iterations, yet any vector inside the cluster is a near-optimal atom.
  bool accept_after_cap = false;
};

struct SingularPair {
  double value;
  Eigen::VectorXd left;
  Eigen::VectorXd right;
  int iters;
};

/// Dominant singular triple of A by power iteration on A^T A. The sign is
/// normalized so the first nonzero entry of the right vector is positive.
/// Throws NoConvergenceError when the Rayleigh quotient has not stabilized
/// within max_iters.
template <class Mat>
SingularPair power_iteration_top_pair(const Mat& a, const PowerIterOptions& opts = {}) {
  const Index n = a.cols();
  Rng rng(opts.seed);
  Eigen::VectorXd q(n);
  const auto randomize = [&] {
    for (Index i = 0; i < n; ++i) q[i] = rng.uniform(-1.0, 1.0);
    const double nq = q.norm();
    q /= (nq > 0.0 ? nq : 1.0);
  };
  randomize();

  double rho = 0.0;
  double rho_prev = -1.0;
  int restarts = 0;
  Eigen::VectorXd aq;
  const auto finish = [&](int iters) {
    const double sigma = std::sqrt(rho);
    Eigen::VectorXd p = aq / sigma;
    for (Index i = 0; i < n; ++i) {
      if (q[i] != 0.0) {
        if (q[i] < 0.0) {
          q = -q;
          p = -p;
        }
        break;
      }
    }
    return SingularPair{sigma, std::move(p), std::move(q), iters};
  };
  for (int t = 0; t < opts.max_iters; ++t) {
    aq = a * q;
    rho = aq.squaredNorm();
    if (rho < 1e-300) {
      if (++restarts > 5) throw NoConvergenceError("power iteration: degenerate start vectors");
      randomize();
      rho_prev = -1.0;
      continue;
    }
    if (rho_prev >= 0.0 && std::abs(rho - rho_prev) <= opts.tol * rho) return finish(t + 1);
    rho_prev = rho;
    Eigen::VectorXd z = a.transpose() * aq;
    q = z / z.norm();
  }
  if (opts.accept_after_cap) {
    aq = a * q;  // the loop advanced q since rho was last computed
    rho = aq.squaredNorm();
    if (rho >= 1e-300) return finish(opts.max_iters);
  }
  throw NoConvergenceError("power iteration: Rayleigh quotient did not stabilize");
}

/// Rank-1 matrix atom scale * left * right^T with unit factors.
struct RankOneAtom {
  double scale;
  Eigen::VectorXd left;
  Eigen::VectorXd right;

  Eigen::MatrixXd materialize() const { return scale * left * right.transpose(); }
};

// Each lmo_* returns the exact minimizer of <g, x> over the named set, or
// nullopt on the zero-gradient signal. Ties break toward the lowest index.

std::optional<Eigen::VectorXd> lmo_l2(const Eigen::Ref<const Eigen::VectorXd>& g, double radius);

std::optional<Eigen::VectorXd> lmo_l1(const Eigen::Ref<const Eigen::VectorXd>& g, double radius);

Eigen::VectorXd lmo_simplex(const Eigen::Ref<const Eigen::VectorXd>& g, double mass);

std::optional<Eigen::VectorXd> lmo_nsupport(const Eigen::Ref<const Eigen::VectorXd>& g, Index n,
                                            double radius);

std::optional<RankOneAtom> lmo_nuclear(const SparseMatrix& g, double radius,
                                       const PowerIterOptions& opts = {});

/// Dispatch over the vector-valued constraint kinds.
std::optional<Eigen::VectorXd> lmo_vector(const Eigen::Ref<const Eigen::VectorXd>& g,
                                          const ConstraintSet& c);

/// Exhaustive vertex enumeration for l1 balls and simplices (test oracle,
/// dim <= 20). Applies the same sign and lowest-index tie conventions.
Eigen::VectorXd lmo_bruteforce(const Eigen::Ref<const Eigen::VectorXd>& g, const ConstraintSet& c);

}  // namespace condgrad

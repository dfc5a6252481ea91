// Copyright 2026 The CondGrad Authors. All Rights Reserved.
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//     http://www.apache.org/licenses/LICENSE-2.0
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.

#pragma once

#include <limits>

#include <Eigen/Dense>

namespace condgrad {

// Estimate-sequence bookkeeping for the momentum Frank-Wolfe variants run
// with delta_k = 2/(k+3). The tracked surrogate minimum phi_star yields a
// computable upper bound on f(x_k) - f(x*) once lambda drops below 1.
//
// The update consumes, per iteration, the value and gradient of f at the
// hyperplane anchor (the freshly corrected iterate for the
// prediction-correction solver; the momentum point for the averaged-gradient
// solver) together with <g_{k+1}, v_{k+1}>; the anchor must be the point
// whose gradients accumulate into the g that selected v_{k+1}, otherwise
// phi_star is not the surrogate minimum and the bound loses validity.
struct Certificate {
  double lambda = 1.0;
  double V = 0.0;
  double phi_star = 0.0;
  double f0 = 0.0;
};

inline Certificate cert_init(double f0) { return Certificate{1.0, f0, f0, f0}; }

/// Scalar form: anchor_value = f(anchor), anchor_grad_dot = <grad(anchor), anchor>,
/// g_dot_v = <g_{k+1}, v_{k+1}>.
inline void cert_update(Certificate& cert, double delta, double anchor_value,
                        double anchor_grad_dot, double g_dot_v) {
  cert.V = (1.0 - delta) * cert.V + delta * (anchor_value - anchor_grad_dot);
  cert.lambda = (1.0 - delta) * cert.lambda;
  cert.phi_star = cert.V + g_dot_v;
}

inline void cert_update(Certificate& cert, double delta, double f_x,
                        const Eigen::Ref<const Eigen::VectorXd>& grad_x,
                        const Eigen::Ref<const Eigen::VectorXd>& x,
                        const Eigen::Ref<const Eigen::VectorXd>& g,
                        const Eigen::Ref<const Eigen::VectorXd>& v) {
  cert_update(cert, delta, f_x, grad_x.dot(x), g.dot(v));
}

/// Computable optimality bound: (f(x_k) - phi_star - lambda [f(x_k) - f(x_0)]) / (1 - lambda).
/// Undefined (+inf) before the first update while lambda = 1.
inline double gap_bound(const Certificate& cert, double f_x) {
  if (cert.lambda >= 1.0) return std::numeric_limits<double>::infinity();
  return (f_x - cert.phi_star - cert.lambda * (f_x - cert.f0)) / (1.0 - cert.lambda);
}

/// Classical Frank-Wolfe gap <grad, x - v> with v the LMO output at grad;
/// upper-bounds f(x) - f(x*) by convexity.
inline double fw_duality_gap(const Eigen::Ref<const Eigen::VectorXd>& grad,
                             const Eigen::Ref<const Eigen::VectorXd>& x,
                             const Eigen::Ref<const Eigen::VectorXd>& v) {
  return grad.dot(x - v);
}

/// Diagnostic slack recursion xi_{k+1} = (1 - delta_k) xi_k + (3 L D^2 / 2) delta_k^2
/// with xi_0 = 0; f(x_k) <= phi_star_k + xi_k holds along prediction-correction runs.
struct XiRecursion {
  double value = 0.0;

  void update(double delta, double lipschitz, double diam) {
    value = (1.0 - delta) * value + 1.5 * lipschitz * diam * diam * delta * delta;
  }
};

}  // namespace condgrad

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
#include <string>
#include <type_traits>
#include <vector>

#include <Eigen/Dense>

#include "condgrad/certificates.hpp"
#include "condgrad/constraint.hpp"
#include "condgrad/lmo.hpp"
#include "condgrad/oracles.hpp"
#include "condgrad/projections.hpp"
#include "condgrad/types.hpp"

namespace condgrad {

enum class SolverKind { Fw, Afw, ExtraFw, Gd, Nag };

std::string solver_name(SolverKind kind);
std::optional<SolverKind> solver_from_name(const std::string& name);

/// Classic schedule 2/(k+2); the first step replaces the start point.
inline double fw_delta(int k) { return 2.0 / static_cast<double>(k + 2); }

/// Momentum schedule 2/(k+3) shared by the averaged-gradient solvers.
inline double momentum_delta(int k) { return 2.0 / static_cast<double>(k + 3); }

/// First-order oracle answer augmented with <gradient, query point>, which
/// spaces can compute even when the query point is never materialized.
struct SpaceEval {
  double value;
  Eigen::VectorXd gradient;
  double grad_dot_point;
};

/// Dense decision vectors over one of the vector-valued constraint sets.
/// A space instance belongs to a single run (it carries oracle-call counters).
class VectorSpace {
 public:
  using Point = Eigen::VectorXd;
  using Atom = Eigen::VectorXd;

  VectorSpace(const VectorObjective& objective, ConstraintSet constraint)
      : objective_(&objective), constraint_(std::move(constraint)) {}

  SpaceEval fo_at(const Point& x) const {
    ++fo_calls_;
    return probe(x);
  }

  SpaceEval fo_at_mix(const Point& x, const Atom& v, double delta) const {
    ++fo_calls_;
    return probe((1.0 - delta) * x + delta * v);
  }

  /// Uncounted oracle query for metrics and certificates outside the solver.
  SpaceEval probe(const Point& x) const {
    Eval e = objective_->eval(x);
    require_finite(e.gradient, "gradient");
    if (!std::isfinite(e.value)) throw NumericalError("objective value is non-finite");
    const double dot = e.gradient.dot(x);
    return SpaceEval{e.value, std::move(e.gradient), dot};
  }

  std::optional<Atom> lmo(const Eigen::VectorXd& g) const {
    ++lmo_calls_;
    return lmo_vector(g, constraint_);
  }

  std::optional<Atom> lmo_probe(const Eigen::VectorXd& g) const { return lmo_vector(g, constraint_); }

  static void advance(Point& x, const Atom& v, double delta) {
    x = (1.0 - delta) * x + delta * v;
  }

  static double dot_point(const Eigen::VectorXd& g, const Point& x) { return g.dot(x); }
  static double dot_atom(const Eigen::VectorXd& g, const Atom& v) { return g.dot(v); }
  static Atom start_atom(const Point& x0) { return x0; }

  Index grad_dim() const { return objective_->dim(); }
  const ConstraintSet& constraint() const { return constraint_; }
  const VectorObjective& objective() const { return *objective_; }
  long fo_calls() const { return fo_calls_; }
  long lmo_calls() const { return lmo_calls_; }

 private:
  const VectorObjective* objective_;
  ConstraintSet constraint_;
  mutable long fo_calls_ = 0;
  mutable long lmo_calls_ = 0;
};

/// Rank-1 update direction together with its values on the observation
/// support. scale == 0 encodes the all-zero start atom.
struct NuclearAtom {
  RankOneAtom factor{0.0, {}, {}};
  Eigen::VectorXd support_values;

  bool is_zero() const { return factor.scale == 0.0; }
};

struct WeightedAtom {
  double weight;
  RankOneAtom factor;
};

/// Nuclear-ball iterate: convex combination of rank-1 atoms, kept factored,
/// plus the cached values on the observation support. The dense matrix is
/// never formed; weights decay multiplicatively and new atoms append, so the
/// atom count grows by at most one per step.
struct AtomCombination {
  std::vector<WeightedAtom> atoms;
  Eigen::VectorXd support_values;
};

/// Power-iteration budget for solver runs. Residual matrices along a
/// completion trajectory develop closely spaced top singular values; the
/// quotient then creeps for ~1/gap iterations while any vector in the top
/// cluster is already a near-optimal atom, so runs accept the capped pair.
inline PowerIterOptions solver_power_options() {
  PowerIterOptions opts;
  opts.max_iters = 2000;
  opts.accept_after_cap = true;
  return opts;
}

/// Matrix-completion decision space over a nuclear-norm ball.
class NuclearSpace {
 public:
  using Point = AtomCombination;
  using Atom = NuclearAtom;

  NuclearSpace(const CompletionProblem& problem, double radius,
               PowerIterOptions opts = solver_power_options())
      : problem_(&problem),
        radius_(radius),
        power_opts_(opts),
        grad_buffer_(problem.observed().to_sparse()) {}

  Point zero_point() const {
    return Point{{}, Eigen::VectorXd::Zero(problem_->observed().count())};
  }

  SpaceEval fo_at(const Point& x) const {
    ++fo_calls_;
    return eval_values(x.support_values);
  }

  SpaceEval fo_at_mix(const Point& x, const Atom& v, double delta) const {
    ++fo_calls_;
    Eigen::VectorXd y = (1.0 - delta) * x.support_values;
    if (!v.is_zero()) y += delta * v.support_values;
    return eval_values(y);
  }

  SpaceEval probe(const Point& x) const { return eval_values(x.support_values); }

  std::optional<Atom> lmo(const Eigen::VectorXd& g) const {
    ++lmo_calls_;
    return lmo_probe(g);
  }

  std::optional<Atom> lmo_probe(const Eigen::VectorXd& g) const {
    if (g.size() != grad_buffer_.nonZeros())
      throw DimensionError("nuclear lmo: support size mismatch");
    std::copy(g.data(), g.data() + g.size(), grad_buffer_.valuePtr());
    std::optional<RankOneAtom> atom = lmo_nuclear(grad_buffer_, radius_, power_opts_);
    if (!atom) return std::nullopt;
    const auto& entries = problem_->observed().entries();
    Eigen::VectorXd values(static_cast<Index>(entries.size()));
    for (size_t i = 0; i < entries.size(); ++i)
      values[static_cast<Index>(i)] =
          atom->scale * atom->left[entries[i].row] * atom->right[entries[i].col];
    return NuclearAtom{std::move(*atom), std::move(values)};
  }

  static void advance(Point& x, const Atom& v, double delta) {
    for (WeightedAtom& wa : x.atoms) wa.weight *= (1.0 - delta);
    std::erase_if(x.atoms, [](const WeightedAtom& wa) { return wa.weight == 0.0; });
    if (delta > 0.0 && !v.is_zero()) x.atoms.push_back(WeightedAtom{delta, v.factor});
    x.support_values *= (1.0 - delta);
    if (!v.is_zero()) x.support_values += delta * v.support_values;
  }

  static double dot_point(const Eigen::VectorXd& g, const Point& x) {
    return g.dot(x.support_values);
  }

  static double dot_atom(const Eigen::VectorXd& g, const Atom& v) {
    return v.is_zero() ? 0.0 : g.dot(v.support_values);
  }

  static Atom start_atom(const Point& x0) {
    if (!x0.atoms.empty() || x0.support_values.norm() != 0.0)
      throw Error("nuclear runs must start from the zero matrix");
    Atom zero;
    zero.support_values = Eigen::VectorXd::Zero(x0.support_values.size());
    return zero;
  }

  Index grad_dim() const { return problem_->observed().count(); }
  double radius() const { return radius_; }
  const CompletionProblem& problem() const { return *problem_; }
  long fo_calls() const { return fo_calls_; }
  long lmo_calls() const { return lmo_calls_; }

 private:
  SpaceEval eval_values(const Eigen::VectorXd& values) const {
    Eval e = problem_->eval_values(values);
    const double dot = e.gradient.dot(values);
    return SpaceEval{e.value, std::move(e.gradient), dot};
  }

  const CompletionProblem* problem_;
  double radius_;
  PowerIterOptions power_opts_;
  mutable SparseMatrix grad_buffer_;
  mutable long fo_calls_ = 0;
  mutable long lmo_calls_ = 0;
};

template <class Space>
struct FwState {
  int k = 0;
  typename Space::Point x;
};

/// Carried state of the averaged-gradient solvers: (x_k, g_k, v_k).
/// The momentum point and the predicted quantities are step-local.
template <class Space>
struct MomentumState {
  int k = 0;
  typename Space::Point x;
  Eigen::VectorXd g;
  typename Space::Atom v;
};

template <class Space>
MomentumState<Space> init_momentum_state(const Space& sp, typename Space::Point x0) {
  MomentumState<Space> st;
  st.v = Space::start_atom(x0);
  st.x = std::move(x0);
  st.g = Eigen::VectorXd::Zero(sp.grad_dim());
  return st;
}

/// Scalars a step hands back for certificates and traces. Fields that a
/// given solver does not produce stay NaN.
struct StepStats {
  double delta = std::numeric_limits<double>::quiet_NaN();
  double f_start = std::numeric_limits<double>::quiet_NaN();   // f(x_k) if evaluated
  double anchor_value = std::numeric_limits<double>::quiet_NaN();
  double anchor_grad_dot = std::numeric_limits<double>::quiet_NaN();
  double g_dot_v = std::numeric_limits<double>::quiet_NaN();
  double fw_gap = std::numeric_limits<double>::quiet_NaN();
};

/// One classic step: v = lmo(grad f(x_k)), convex step with 2/(k+2).
/// A zero gradient keeps the iterate in place (any feasible point minimizes
/// a zero linear objective).
template <class Space>
StepStats fw_step(const Space& sp, FwState<Space>& s) {
  StepStats stats;
  const double delta = fw_delta(s.k);
  stats.delta = delta;
  const SpaceEval at_x = sp.fo_at(s.x);
  stats.f_start = at_x.value;
  const auto v = sp.lmo(at_x.gradient);
  if (v) {
    stats.fw_gap = at_x.grad_dot_point - Space::dot_atom(at_x.gradient, *v);
    Space::advance(s.x, *v, delta);
  } else {
    stats.fw_gap = 0.0;
  }
  ++s.k;
  return stats;
}

/// Averaged-gradient step: momentum point y_k, gradient average update,
/// single FW subproblem. Zero averaged gradient reuses the previous atom.
template <class Space>
StepStats afw_step(const Space& sp, MomentumState<Space>& s) {
  StepStats stats;
  const double delta = momentum_delta(s.k);
  stats.delta = delta;
  const SpaceEval at_y = sp.fo_at_mix(s.x, s.v, delta);
  s.g = (1.0 - delta) * s.g + delta * at_y.gradient;
  auto v = sp.lmo(s.g);
  if (v) s.v = std::move(*v);
  Space::advance(s.x, s.v, delta);
  stats.anchor_value = at_y.value;
  stats.anchor_grad_dot = at_y.grad_dot_point;
  stats.g_dot_v = Space::dot_atom(s.g, s.v);
  ++s.k;
  return stats;
}

/// Prediction-correction step: the first gradient (at y_k) drives an interim
/// FW subproblem and the iterate update; the second gradient (at x_{k+1})
/// corrects the average and drives the extra subproblem. Exactly two oracle
/// and two subproblem calls. Zero-gradient fallbacks: the prediction reuses
/// v_k, the correction reuses the predicted atom.
template <class Space>
StepStats extrafw_step(const Space& sp, MomentumState<Space>& s) {
  StepStats stats;
  const double delta = momentum_delta(s.k);
  stats.delta = delta;

  const SpaceEval at_y = sp.fo_at_mix(s.x, s.v, delta);
  const Eigen::VectorXd g_hat = (1.0 - delta) * s.g + delta * at_y.gradient;
  auto v_hat = sp.lmo(g_hat);
  if (!v_hat) v_hat = s.v;
  Space::advance(s.x, *v_hat, delta);

  const SpaceEval at_x = sp.fo_at(s.x);
  s.g = (1.0 - delta) * s.g + delta * at_x.gradient;
  auto v = sp.lmo(s.g);
  s.v = v ? std::move(*v) : std::move(*v_hat);

  stats.anchor_value = at_x.value;
  stats.anchor_grad_dot = at_x.grad_dot_point;
  stats.g_dot_v = Space::dot_atom(s.g, s.v);
  ++s.k;
  return stats;
}

struct GdState {
  int k = 0;
  Eigen::VectorXd x;
};

struct NagState {
  int k = 0;
  Eigen::VectorXd x;
  Eigen::VectorXd x_prev;
};

/// Projected gradient step with fixed step size 1/L.
StepStats gd_step(const VectorSpace& sp, GdState& s, double lipschitz);

/// Projected accelerated step: momentum weight (k-1)/(k+2), clamped to 0 at
/// k = 0, gradient step 1/L at the extrapolated point.
StepStats nag_step(const VectorSpace& sp, NagState& s, double lipschitz);

struct IterationRow {
  int k;
  double f;
  double certificate;  // optimality bound (momentum solvers), duality gap (classic), NaN otherwise
};

template <class Space>
struct RunResult {
  std::vector<IterationRow> rows;
  typename Space::Point final_point;
  long fo_calls = 0;
  long lmo_calls = 0;
  long probe_fo_calls = 0;
  std::optional<int> stopped_at;
};

struct RunOptions {
  int iterations = 1;
  std::optional<double> stop_epsilon;  // stop once the certificate falls below
  double lipschitz = 0.0;              // projected baselines only
};

namespace detail {

struct NullPointCallback {
  template <class Point>
  void operator()(int, const Point&) const {}
};

}  // namespace detail

/// Drives a solver for opt.iterations steps, recording one row per visited
/// iterate (including the start, so rows.size() == iterations + 1 without
/// early stopping). on_point(k, point) runs before each step so metrics see
/// the untouched iterate. Certificate bookkeeping and per-row objective
/// values use uncounted probe queries; the counted FO/LMO totals reflect the
/// algorithm alone.
template <class Space, class PointCallback = detail::NullPointCallback>
RunResult<Space> run(SolverKind kind, const Space& sp, typename Space::Point x0,
                     const RunOptions& opt, PointCallback&& on_point = {}) {
  constexpr bool is_vector_space = std::is_same_v<Space, VectorSpace>;
  if constexpr (!is_vector_space) {
    if (kind == SolverKind::Gd || kind == SolverKind::Nag)
      throw UnsupportedConstraintError("projected baselines need a vector constraint");
  }
  if (opt.iterations < 0) throw Error("run: iteration budget must be nonnegative");

  RunResult<Space> out;
  Certificate cert = cert_init(0.0);
  const bool momentum = kind == SolverKind::Afw || kind == SolverKind::ExtraFw;

  FwState<Space> fw_state;
  MomentumState<Space> mom_state;
  GdState gd_state;
  NagState nag_state;

  const auto current_point = [&]() -> const typename Space::Point& {
    switch (kind) {
      case SolverKind::Fw: return fw_state.x;
      case SolverKind::Afw:
      case SolverKind::ExtraFw: return mom_state.x;
      default: break;
    }
    if constexpr (is_vector_space) {
      return kind == SolverKind::Gd ? gd_state.x : nag_state.x;
    } else {
      return fw_state.x;  // unreachable
    }
  };

  switch (kind) {
    case SolverKind::Fw:
      fw_state.x = std::move(x0);
      break;
    case SolverKind::Afw:
    case SolverKind::ExtraFw:
      mom_state = init_momentum_state(sp, std::move(x0));
      break;
    case SolverKind::Gd:
      if constexpr (is_vector_space) gd_state.x = std::move(x0);
      break;
    case SolverKind::Nag:
      if constexpr (is_vector_space) {
        nag_state.x = std::move(x0);
        nag_state.x_prev = nag_state.x;
      }
      break;
  }

  for (int k = 0;; ++k) {
    const typename Space::Point& x = current_point();
    const SpaceEval at_x = sp.probe(x);
    ++out.probe_fo_calls;
    if (k == 0) cert = cert_init(at_x.value);

    double cert_col = std::numeric_limits<double>::quiet_NaN();
    if (momentum) {
      cert_col = gap_bound(cert, at_x.value);
    } else if (kind == SolverKind::Fw) {
      const auto v = sp.lmo_probe(at_x.gradient);
      cert_col = v ? at_x.grad_dot_point - Space::dot_atom(at_x.gradient, *v) : 0.0;
    }

    on_point(k, x);
    out.rows.push_back(IterationRow{k, at_x.value, cert_col});

    if (k == opt.iterations) break;
    if (opt.stop_epsilon && std::isfinite(cert_col) && cert_col <= *opt.stop_epsilon) {
      out.stopped_at = k;
      break;
    }

    StepStats stats;
    switch (kind) {
      case SolverKind::Fw:
        stats = fw_step(sp, fw_state);
        break;
      case SolverKind::Afw:
        stats = afw_step(sp, mom_state);
        break;
      case SolverKind::ExtraFw:
        stats = extrafw_step(sp, mom_state);
        break;
      case SolverKind::Gd:
        if constexpr (is_vector_space) stats = gd_step(sp, gd_state, opt.lipschitz);
        break;
      case SolverKind::Nag:
        if constexpr (is_vector_space) stats = nag_step(sp, nag_state, opt.lipschitz);
        break;
    }
    if (momentum)
      cert_update(cert, stats.delta, stats.anchor_value, stats.anchor_grad_dot, stats.g_dot_v);
  }

  out.final_point = current_point();
  out.fo_calls = sp.fo_calls();
  out.lmo_calls = sp.lmo_calls();
  return out;
}

}  // namespace condgrad

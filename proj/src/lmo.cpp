// Copyright 2026 The CondGrad Authors. All Rights Reserved.
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//     http://www.apache.org/licenses/LICENSE-2.0
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.

#include "condgrad/lmo.hpp"

#include <algorithm>
#include <numeric>
#include <vector>

namespace condgrad {
namespace {

double sign_or_plus(double t) { return t < 0.0 ? -1.0 : 1.0; }

}  // namespace

std::optional<Eigen::VectorXd> lmo_l2(const Eigen::Ref<const Eigen::VectorXd>& g, double radius) {
  const double norm = g.norm();
  if (norm < kZeroGradientTol) return std::nullopt;
  return Eigen::VectorXd(-(radius / norm) * g);
}

std::optional<Eigen::VectorXd> lmo_l1(const Eigen::Ref<const Eigen::VectorXd>& g, double radius) {
  Index best = 0;
  double best_abs = -1.0;
  for (Index i = 0; i < g.size(); ++i) {
    const double a = std::abs(g[i]);
    if (a > best_abs) {
      best_abs = a;
      best = i;
    }
  }
  if (best_abs < kZeroGradientTol) return std::nullopt;
  Eigen::VectorXd v = Eigen::VectorXd::Zero(g.size());
  v[best] = -sign_or_plus(g[best]) * radius;
  return v;
}

Eigen::VectorXd lmo_simplex(const Eigen::Ref<const Eigen::VectorXd>& g, double mass) {
  Index best = 0;
  for (Index i = 1; i < g.size(); ++i)
    if (g[i] < g[best]) best = i;
  Eigen::VectorXd v = Eigen::VectorXd::Zero(g.size());
  v[best] = mass;
  return v;
}

std::optional<Eigen::VectorXd> lmo_nsupport(const Eigen::Ref<const Eigen::VectorXd>& g, Index n,
                                            double radius) {
  const Index d = g.size();
  if (n < 1 || n > d) throw DimensionError("lmo_nsupport: need 1 <= n <= dim");
  if (n == d) return lmo_l2(g, radius);  // shared path: truncation is the identity

  std::vector<Index> idx(static_cast<size_t>(d));
  std::iota(idx.begin(), idx.end(), Index{0});
  std::partial_sort(idx.begin(), idx.begin() + n, idx.end(), [&](Index a, Index b) {
    const double fa = std::abs(g[a]);
    const double fb = std::abs(g[b]);
    return fa != fb ? fa > fb : a < b;
  });

  double sq = 0.0;
  for (Index j = 0; j < n; ++j) sq += g[idx[static_cast<size_t>(j)]] * g[idx[static_cast<size_t>(j)]];
  const double norm = std::sqrt(sq);
  if (norm < kZeroGradientTol) return std::nullopt;
  Eigen::VectorXd v = Eigen::VectorXd::Zero(d);
  for (Index j = 0; j < n; ++j) {
    const Index i = idx[static_cast<size_t>(j)];
    v[i] = -(radius / norm) * g[i];
  }
  return v;
}

std::optional<RankOneAtom> lmo_nuclear(const SparseMatrix& g, double radius,
                                       const PowerIterOptions& opts) {
  double max_abs = 0.0;
  for (Index i = 0; i < g.nonZeros(); ++i)
    max_abs = std::max(max_abs, std::abs(g.valuePtr()[i]));
  if (max_abs < kZeroGradientTol) return std::nullopt;
  SingularPair top = power_iteration_top_pair(g, opts);
  return RankOneAtom{-radius, std::move(top.left), std::move(top.right)};
}

std::optional<Eigen::VectorXd> lmo_vector(const Eigen::Ref<const Eigen::VectorXd>& g,
                                          const ConstraintSet& c) {
  switch (c.kind()) {
    case ConstraintKind::L2Ball: return lmo_l2(g, c.as<L2Ball>().radius);
    case ConstraintKind::L1Ball: return lmo_l1(g, c.as<L1Ball>().radius);
    case ConstraintKind::Simplex: return lmo_simplex(g, c.as<Simplex>().mass);
    case ConstraintKind::NSupportBall: {
      const auto& b = c.as<NSupportBall>();
      return lmo_nsupport(g, b.n, b.radius);
    }
    case ConstraintKind::NuclearBall:
      throw UnsupportedConstraintError("lmo_vector: nuclear ball needs the matrix oracle");
  }
  return std::nullopt;
}

Eigen::VectorXd lmo_bruteforce(const Eigen::Ref<const Eigen::VectorXd>& g, const ConstraintSet& c) {
  const Index d = g.size();
  if (d > 20) throw Error("lmo_bruteforce: dimension capped at 20");
  Eigen::VectorXd best = Eigen::VectorXd::Zero(d);
  double best_val = std::numeric_limits<double>::infinity();
  const auto consider = [&](Index i, double coord) {
    const double val = g[i] * coord;
    if (val < best_val) {
      best_val = val;
      best.setZero();
      best[i] = coord;
    }
  };
  switch (c.kind()) {
    case ConstraintKind::L1Ball: {
      const double r = c.as<L1Ball>().radius;
      for (Index i = 0; i < d; ++i) consider(i, -sign_or_plus(g[i]) * r);
      for (Index i = 0; i < d; ++i) consider(i, sign_or_plus(g[i]) * r);
      return best;
    }
    case ConstraintKind::Simplex: {
      const double r = c.as<Simplex>().mass;
      for (Index i = 0; i < d; ++i) consider(i, r);
      return best;
    }
    default:
      throw UnsupportedConstraintError("lmo_bruteforce: only l1 balls and simplices");
  }
}

}  // namespace condgrad

// Copyright 2026 The CondGrad Authors. All Rights Reserved.
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//     http://www.apache.org/licenses/LICENSE-2.0
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.

#include "condgrad/constraint.hpp"

#include <Eigen/SVD>

#include <numeric>

namespace condgrad {
namespace {

void check_radius(double r, const char* what) {
  if (!(r > 0.0) || !std::isfinite(r)) throw Error(std::string(what) + ": radius must be positive");
}

}  // namespace

L2Ball ConstraintSet::check(L2Ball b) {
  check_radius(b.radius, "L2Ball");
  return b;
}

L1Ball ConstraintSet::check(L1Ball b) {
  check_radius(b.radius, "L1Ball");
  return b;
}

Simplex ConstraintSet::check(Simplex s) {
  check_radius(s.mass, "Simplex");
  return s;
}

NSupportBall ConstraintSet::check(NSupportBall b) {
  check_radius(b.radius, "NSupportBall");
  if (b.n < 1) throw Error("NSupportBall: n must be at least 1");
  return b;
}

NuclearBall ConstraintSet::check(NuclearBall b) {
  check_radius(b.radius, "NuclearBall");
  if (b.rows < 1 || b.cols < 1) throw Error("NuclearBall: shape must be positive");
  return b;
}

double ConstraintSet::radius() const {
  return std::visit(
      [](const auto& s) -> double {
        using T = std::decay_t<decltype(s)>;
        if constexpr (std::is_same_v<T, Simplex>) {
          return s.mass;
        } else {
          return s.radius;
        }
      },
      set_);
}

std::string ConstraintSet::name() const {
  switch (kind()) {
    case ConstraintKind::L2Ball: return "l2";
    case ConstraintKind::L1Ball: return "l1";
    case ConstraintKind::Simplex: return "simplex";
    case ConstraintKind::NSupportBall: return "nsupport";
    case ConstraintKind::NuclearBall: return "nuclear";
  }
  return "unknown";
}

double diameter(const ConstraintSet& c) {
  switch (c.kind()) {
    case ConstraintKind::L2Ball: return 2.0 * c.as<L2Ball>().radius;
    case ConstraintKind::L1Ball: return 2.0 * c.as<L1Ball>().radius;
    case ConstraintKind::Simplex: return c.as<Simplex>().mass * std::sqrt(2.0);
    case ConstraintKind::NSupportBall: return 2.0 * c.as<NSupportBall>().radius;
    case ConstraintKind::NuclearBall: return 2.0 * c.as<NuclearBall>().radius;
  }
  return 0.0;
}

double nsupport_norm(const Eigen::Ref<const Eigen::VectorXd>& x, Index n) {
  const Index d = x.size();
  if (n < 1 || n > d) throw DimensionError("nsupport_norm: need 1 <= n <= dim");
  std::vector<double> z(static_cast<size_t>(d));
  for (Index i = 0; i < d; ++i) z[static_cast<size_t>(i)] = std::abs(x[i]);
  std::sort(z.begin(), z.end(), std::greater<double>());

  // Suffix sums: tail[j] = z[j] + ... + z[d-1].
  std::vector<double> tail(static_cast<size_t>(d) + 1, 0.0);
  for (Index j = d - 1; j >= 0; --j)
    tail[static_cast<size_t>(j)] = tail[static_cast<size_t>(j) + 1] + z[static_cast<size_t>(j)];

  Index chosen = n - 1;
  for (Index r = 0; r < n; ++r) {
    const double head = (n - r - 2 >= 0) ? z[static_cast<size_t>(n - r - 2)]
                                         : std::numeric_limits<double>::infinity();
    const double avg = tail[static_cast<size_t>(n - r - 1)] / static_cast<double>(r + 1);
    if (head > avg && avg >= z[static_cast<size_t>(n - r - 1)]) {
      chosen = r;
      break;
    }
  }
  double sq = 0.0;
  for (Index j = 0; j + chosen + 1 < n; ++j) sq += z[static_cast<size_t>(j)] * z[static_cast<size_t>(j)];
  const double t = tail[static_cast<size_t>(n - chosen - 1)];
  sq += t * t / static_cast<double>(chosen + 1);
  return std::sqrt(sq);
}

namespace detail {

bool contains_vector(const ConstraintSet& c, const Eigen::Ref<const Eigen::VectorXd>& x,
                     double tol) {
  switch (c.kind()) {
    case ConstraintKind::L2Ball:
      return x.norm() <= c.as<L2Ball>().radius + tol;
    case ConstraintKind::L1Ball:
      return x.lpNorm<1>() <= c.as<L1Ball>().radius + tol;
    case ConstraintKind::Simplex: {
      const auto& s = c.as<Simplex>();
      return x.minCoeff() >= -tol && std::abs(x.sum() - s.mass) <= tol;
    }
    case ConstraintKind::NSupportBall: {
      const auto& b = c.as<NSupportBall>();
      if (b.n > x.size()) throw DimensionError("contains: n exceeds dimension");
      return nsupport_norm(x, b.n) <= b.radius + tol;
    }
    case ConstraintKind::NuclearBall:
      throw DimensionError("contains: nuclear ball takes a matrix argument");
  }
  return false;
}


bool contains_nuclear(const ConstraintSet& c, const Eigen::Ref<const Eigen::MatrixXd>& x,
                      double tol) {
  const auto& b = c.as<NuclearBall>();
  if (x.rows() != b.rows || x.cols() != b.cols) throw DimensionError("contains: shape mismatch");
  const Eigen::JacobiSVD<Eigen::MatrixXd> svd(x);
  return svd.singularValues().sum() <= b.radius + tol;
}

}  // namespace detail

ObservedEntries::ObservedEntries(Index rows, Index cols, std::vector<Entry> entries)
    : rows_(rows), cols_(cols), entries_(std::move(entries)) {
  if (rows_ < 1 || cols_ < 1) throw Error("ObservedEntries: shape must be positive");
  for (const Entry& e : entries_) {
    if (e.row < 0 || e.row >= rows_ || e.col < 0 || e.col >= cols_)
      throw Error("ObservedEntries: entry out of range");
  }
  std::sort(entries_.begin(), entries_.end(), [](const Entry& a, const Entry& b) {
    return a.row != b.row ? a.row < b.row : a.col < b.col;
  });
  for (size_t i = 1; i < entries_.size(); ++i) {
    if (entries_[i].row == entries_[i - 1].row && entries_[i].col == entries_[i - 1].col)
      throw Error("ObservedEntries: duplicate position");
  }
}

Eigen::VectorXd ObservedEntries::values() const {
  Eigen::VectorXd v(count());
  for (Index i = 0; i < count(); ++i) v[i] = entries_[static_cast<size_t>(i)].value;
  return v;
}

SparseMatrix ObservedEntries::to_sparse(const Eigen::Ref<const Eigen::VectorXd>& values) const {
  if (values.size() != count()) throw DimensionError("ObservedEntries: value count mismatch");
  SparseMatrix m(rows_, cols_);
  std::vector<Eigen::Triplet<double>> trip;
  trip.reserve(entries_.size());
  for (size_t i = 0; i < entries_.size(); ++i)
    trip.emplace_back(entries_[i].row, entries_[i].col, values[static_cast<Index>(i)]);
  m.setFromTriplets(trip.begin(), trip.end());
  return m;
}

}  // namespace condgrad

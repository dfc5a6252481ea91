// Copyright 2026 The CondGrad Authors. All Rights Reserved.
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//     http://www.apache.org/licenses/LICENSE-2.0
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.

#pragma once

#include <Eigen/Dense>
#include <Eigen/SparseCore>

#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

namespace condgrad {

using Index = Eigen::Index;
using SparseMatrix = Eigen::SparseMatrix<double, Eigen::RowMajor>;

/// Base class of all toolkit errors.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class DimensionError : public Error {
 public:
  using Error::Error;
};

/// Power iteration failed to stabilize within its iteration cap.
class NoConvergenceError : public Error {
 public:
  using Error::Error;
};

/// Requested analytic minimizer lies strictly inside the feasible set.
class InactiveConstraintError : public Error {
 public:
  using Error::Error;
};

/// Solver/constraint pairing without an exact projection.
class UnsupportedConstraintError : public Error {
 public:
  using Error::Error;
};

class NumericalError : public Error {
 public:
  using Error::Error;
};

/// Structured input-format failure; carries the 1-based source line.
class ParseError : public Error {
 public:
  ParseError(std::string message, long line)
      : Error(std::move(message) + " (line " + std::to_string(line) + ")"), line_(line) {}
  explicit ParseError(std::string message) : Error(std::move(message)), line_(0) {}
  long line() const { return line_; }

 private:
  long line_;
};

class ConfigError : public Error {
 public:
  using Error::Error;
};

/// Dataset-level failure after parsing (degenerate labels, bad dimensions).
class DataError : public Error {
 public:
  using Error::Error;
};

inline void require_finite(const Eigen::Ref<const Eigen::VectorXd>& x, const char* what) {
  if (!x.allFinite()) throw NumericalError(std::string(what) + ": non-finite entries");
}

/// Known values A_ij of a partially observed rows x cols matrix.
/// Entries are kept sorted row-major and duplicate positions are rejected.
class ObservedEntries {
 public:
  struct Entry {
    Index row;
    Index col;
    double value;
  };

  ObservedEntries(Index rows, Index cols, std::vector<Entry> entries);

  Index rows() const { return rows_; }
  Index cols() const { return cols_; }
  Index count() const { return static_cast<Index>(entries_.size()); }
  const std::vector<Entry>& entries() const { return entries_; }

  /// Observed values as a dense vector in storage (row-major) order.
  Eigen::VectorXd values() const;

  /// Sparse matrix with the observation pattern and the given per-entry
  /// values (storage order matches entries()).
  SparseMatrix to_sparse(const Eigen::Ref<const Eigen::VectorXd>& values) const;

  /// Sparse matrix holding the observed values themselves.
  SparseMatrix to_sparse() const { return to_sparse(values()); }

 private:
  Index rows_;
  Index cols_;
  std::vector<Entry> entries_;
};

}  // namespace condgrad

// Copyright 2026 The CondGrad Authors. All Rights Reserved.
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//     http://www.apache.org/licenses/LICENSE-2.0
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.

#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "condgrad/types.hpp"

namespace condgrad {

struct Dataset {
  SparseMatrix features;            // N x d, row-compressed
  Eigen::VectorXd labels;           // raw until map_labels
  std::vector<Index> train_indices; // empty until a split is made
  std::vector<Index> test_indices;
};

/// Parses "<label> <idx>:<val> ..." lines with ascending 1-based indices.
/// Blank lines and '#' trailing comments are skipped; explicit zero values
/// are not stored. The feature dimension is the largest index seen unless
/// overridden. Malformed fields raise ParseError with the 1-based line.
Dataset parse_libsvm(std::istream& in, std::optional<Index> dim_override = {});

/// Inverse of parse_libsvm over the stored entries.
std::string to_libsvm(const Dataset& ds);

/// Maps label == positive_class to +1 and everything else to -1; rejects
/// datasets whose mapped labels are all identical.
Dataset map_labels(Dataset ds, double positive_class);

/// Per-column max-abs scaling of the stored feature values.
Dataset normalize_columns_maxabs(Dataset ds);

/// Parses tab-separated "user item rating timestamp" lines with 1-based
/// user/item indices into observed entries of a rows x cols matrix.
ObservedEntries parse_movielens(std::istream& in, Index rows, Index cols);

struct SyntheticLogistic {
  Dataset data;
  Eigen::VectorXd planted;  // weight vector behind the labels
};

/// Sparse 0/1 presence features with labels from a planted sparse linear
/// model; larger margin means less label noise (margin = +inf is exactly
/// separable). Pure function of its arguments, bit-identical across runs.
SyntheticLogistic synth_logistic(std::uint64_t seed, Index n, Index d, double sparsity,
                                 double margin);

struct SyntheticLowRank {
  ObservedEntries observed;
  Eigen::MatrixXd left;    // ground truth A = left * right^T
  Eigen::MatrixXd right;
  double nuclear_norm;     // of the noiseless ground truth
};

/// Rank-r ground truth observed on a uniform subset of exactly
/// round(density * m * n) cells, with optional iid Gaussian noise.
SyntheticLowRank synth_lowrank(std::uint64_t seed, Index m, Index n, Index rank, double density,
                               double noise);

/// Deterministic shuffled split; fraction of rows goes to train.
Dataset train_test_split(Dataset ds, double fraction, std::uint64_t seed);

/// FNV-1a over dimensions, sparse structure, values and labels; used to
/// freeze golden synthetic datasets in the test fixtures.
std::uint64_t dataset_hash(const Dataset& ds);

}  // namespace condgrad

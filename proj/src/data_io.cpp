// Copyright 2026 The CondGrad Authors. All Rights Reserved.
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//     http://www.apache.org/licenses/LICENSE-2.0
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.

#include "condgrad/data_io.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <istream>
#include <numeric>
#include <sstream>
#include <unordered_set>

#include <Eigen/QR>
#include <Eigen/SVD>

#include "condgrad/rng.hpp"

namespace condgrad {
namespace {

bool parse_double(std::string_view token, double& out) {
  if (!token.empty() && token.front() == '+') token.remove_prefix(1);  // from_chars rejects '+'
  if (token.empty()) return false;
  const char* end = token.data() + token.size();
  const auto [ptr, ec] = std::from_chars(token.data(), end, out);
  return ec == std::errc{} && ptr == end;
}

bool parse_index(std::string_view token, long& out) {
  const char* end = token.data() + token.size();
  const auto [ptr, ec] = std::from_chars(token.data(), end, out);
  return ec == std::errc{} && ptr == end;
}

std::vector<std::string_view> split_ws(std::string_view line) {
  std::vector<std::string_view> out;
  size_t i = 0;
  while (i < line.size()) {
    while (i < line.size() && (line[i] == ' ' || line[i] == '\t' || line[i] == '\r')) ++i;
    size_t j = i;
    while (j < line.size() && line[j] != ' ' && line[j] != '\t' && line[j] != '\r') ++j;
    if (j > i) out.push_back(line.substr(i, j - i));
    i = j;
  }
  return out;
}

std::string format_double(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

void hash_bytes(std::uint64_t& h, const void* data, size_t size) {
  const auto* p = static_cast<const unsigned char*>(data);
  for (size_t i = 0; i < size; ++i) {
    h ^= p[i];
    h *= 0x100000001B3ull;
  }
}

template <class T>
void hash_value(std::uint64_t& h, T v) {
  hash_bytes(h, &v, sizeof(v));
}

}  // namespace

Dataset parse_libsvm(std::istream& in, std::optional<Index> dim_override) {
  std::vector<Eigen::Triplet<double>> triplets;
  std::vector<double> labels;
  Index max_col = -1;
  std::string line;
  long line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    std::string_view view(line);
    if (const size_t hash = view.find('#'); hash != std::string_view::npos)
      view = view.substr(0, hash);
    const std::vector<std::string_view> tokens = split_ws(view);
    if (tokens.empty()) continue;

    double label = 0.0;
    if (!parse_double(tokens[0], label)) throw ParseError("malformed label", line_no);
    const Index row = static_cast<Index>(labels.size());
    labels.push_back(label);

    long prev_idx = 0;
    for (size_t t = 1; t < tokens.size(); ++t) {
      const std::string_view tok = tokens[t];
      const size_t colon = tok.find(':');
      if (colon == std::string_view::npos) throw ParseError("missing ':' in feature", line_no);
      long idx = 0;
      double value = 0.0;
      if (!parse_index(tok.substr(0, colon), idx) || idx < 1)
        throw ParseError("malformed feature index", line_no);
      if (!parse_double(tok.substr(colon + 1), value))
        throw ParseError("malformed feature value", line_no);
      if (idx <= prev_idx) throw ParseError("feature indices must be ascending", line_no);
      prev_idx = idx;
      max_col = std::max(max_col, static_cast<Index>(idx - 1));
      if (value != 0.0) triplets.emplace_back(row, static_cast<Index>(idx - 1), value);
    }
  }

  Index dim = max_col + 1;
  if (dim_override) {
    if (*dim_override < dim) throw DataError("dimension override below largest feature index");
    dim = *dim_override;
  }
  Dataset ds;
  ds.features.resize(static_cast<Index>(labels.size()), dim);
  ds.features.setFromTriplets(triplets.begin(), triplets.end());
  ds.labels = Eigen::Map<const Eigen::VectorXd>(labels.data(), static_cast<Index>(labels.size()));
  return ds;
}

std::string to_libsvm(const Dataset& ds) {
  std::ostringstream out;
  for (Index i = 0; i < ds.features.rows(); ++i) {
    out << format_double(ds.labels[i]);
    for (SparseMatrix::InnerIterator it(ds.features, i); it; ++it)
      out << ' ' << (it.col() + 1) << ':' << format_double(it.value());
    out << '\n';
  }
  return out.str();
}

Dataset map_labels(Dataset ds, double positive_class) {
  bool any_pos = false;
  bool any_neg = false;
  for (Index i = 0; i < ds.labels.size(); ++i) {
    const bool pos = ds.labels[i] == positive_class;
    ds.labels[i] = pos ? 1.0 : -1.0;
    (pos ? any_pos : any_neg) = true;
  }
  if (!(any_pos && any_neg)) throw DataError("degenerate labels: one class after mapping");
  return ds;
}

Dataset normalize_columns_maxabs(Dataset ds) {
  Eigen::VectorXd max_abs = Eigen::VectorXd::Zero(ds.features.cols());
  for (Index i = 0; i < ds.features.nonZeros(); ++i) {
    const Index col = ds.features.innerIndexPtr()[i];
    max_abs[col] = std::max(max_abs[col], std::abs(ds.features.valuePtr()[i]));
  }
  for (Index i = 0; i < ds.features.nonZeros(); ++i) {
    const Index col = ds.features.innerIndexPtr()[i];
    if (max_abs[col] > 0.0) ds.features.valuePtr()[i] /= max_abs[col];
  }
  return ds;
}

ObservedEntries parse_movielens(std::istream& in, Index rows, Index cols) {
  std::vector<ObservedEntries::Entry> entries;
  std::unordered_set<std::uint64_t> seen;
  std::string line;
  long line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const std::vector<std::string_view> tokens = split_ws(line);
    if (tokens.empty()) continue;
    if (tokens.size() != 4) throw ParseError("expected user, item, rating, timestamp", line_no);
    long user = 0;
    long item = 0;
    double rating = 0.0;
    if (!parse_index(tokens[0], user) || !parse_index(tokens[1], item))
      throw ParseError("malformed user/item index", line_no);
    if (!parse_double(tokens[2], rating)) throw ParseError("malformed rating", line_no);
    if (user < 1 || user > rows || item < 1 || item > cols)
      throw ParseError("index out of range", line_no);
    const std::uint64_t key =
        static_cast<std::uint64_t>(user - 1) * static_cast<std::uint64_t>(cols) +
        static_cast<std::uint64_t>(item - 1);
    if (!seen.insert(key).second) throw ParseError("duplicate entry", line_no);
    entries.push_back({static_cast<Index>(user - 1), static_cast<Index>(item - 1), rating});
  }
  return ObservedEntries(rows, cols, std::move(entries));
}

SyntheticLogistic synth_logistic(std::uint64_t seed, Index n, Index d, double sparsity,
                                 double margin) {
  if (n < 1 || d < 1) throw Error("synth_logistic: need n, d >= 1");
  if (!(sparsity > 0.0) || sparsity > 1.0) throw Error("synth_logistic: sparsity in (0, 1]");
  if (!(margin > 0.0)) throw Error("synth_logistic: margin must be positive");
  Rng rng(seed);

  // Planted vector on a random support of about a tenth of the coordinates.
  const Index support = std::max<Index>(1, (d + 9) / 10);
  std::vector<Index> order(static_cast<size_t>(d));
  std::iota(order.begin(), order.end(), Index{0});
  for (Index i = 0; i < support; ++i) {
    const Index j = i + static_cast<Index>(rng.below(static_cast<std::uint64_t>(d - i)));
    std::swap(order[static_cast<size_t>(i)], order[static_cast<size_t>(j)]);
  }
  Eigen::VectorXd planted = Eigen::VectorXd::Zero(d);
  for (Index i = 0; i < support; ++i) planted[order[static_cast<size_t>(i)]] = rng.normal();

  std::vector<Eigen::Triplet<double>> triplets;
  Eigen::VectorXd labels(n);
  for (Index i = 0; i < n; ++i) {
    double score = 0.0;
    for (Index j = 0; j < d; ++j) {
      if (rng.uniform() < sparsity) {
        triplets.emplace_back(i, j, 1.0);
        score += planted[j];
      }
    }
    const double u = rng.uniform_pos();
    const double noise = std::log(u / (1.0 - u + 1e-300));
    labels[i] = (score + noise / margin) >= 0.0 ? 1.0 : -1.0;
  }

  SyntheticLogistic out;
  out.data.features.resize(n, d);
  out.data.features.setFromTriplets(triplets.begin(), triplets.end());
  out.data.labels = std::move(labels);
  out.planted = std::move(planted);
  return out;
}

SyntheticLowRank synth_lowrank(std::uint64_t seed, Index m, Index n, Index rank, double density,
                               double noise) {
  if (rank < 1 || rank > std::min(m, n)) throw Error("synth_lowrank: need 1 <= rank <= min(m, n)");
  if (!(density > 0.0) || density > 1.0) throw Error("synth_lowrank: density in (0, 1]");
  Rng rng(seed);

  Eigen::MatrixXd left(m, rank);
  Eigen::MatrixXd right(n, rank);
  for (Index i = 0; i < m; ++i)
    for (Index r = 0; r < rank; ++r) left(i, r) = rng.normal();
  for (Index j = 0; j < n; ++j)
    for (Index r = 0; r < rank; ++r) right(j, r) = rng.normal();

  const std::uint64_t total = static_cast<std::uint64_t>(m) * static_cast<std::uint64_t>(n);
  const std::uint64_t want =
      static_cast<std::uint64_t>(std::llround(density * static_cast<double>(total)));
  // Floyd's uniform subset sampling keeps memory at O(want).
  std::unordered_set<std::uint64_t> cells;
  cells.reserve(want * 2);
  for (std::uint64_t j = total - want; j < total; ++j) {
    const std::uint64_t t = rng.below(j + 1);
    if (!cells.insert(t).second) cells.insert(j);
  }
  std::vector<std::uint64_t> sorted(cells.begin(), cells.end());
  std::sort(sorted.begin(), sorted.end());

  std::vector<ObservedEntries::Entry> entries;
  entries.reserve(sorted.size());
  for (const std::uint64_t cell : sorted) {
    const Index i = static_cast<Index>(cell / static_cast<std::uint64_t>(n));
    const Index j = static_cast<Index>(cell % static_cast<std::uint64_t>(n));
    double value = left.row(i).dot(right.row(j));
    if (noise > 0.0) value += noise * rng.normal();
    entries.push_back({i, j, value});
  }

  // Nuclear norm of left * right^T from the rank x rank core of the QR factors.
  const Eigen::HouseholderQR<Eigen::MatrixXd> qr_left(left);
  const Eigen::HouseholderQR<Eigen::MatrixXd> qr_right(right);
  const Eigen::MatrixXd r_left =
      qr_left.matrixQR().topRows(rank).template triangularView<Eigen::Upper>();
  const Eigen::MatrixXd r_right =
      qr_right.matrixQR().topRows(rank).template triangularView<Eigen::Upper>();
  const Eigen::JacobiSVD<Eigen::MatrixXd> svd(r_left * r_right.transpose());

  SyntheticLowRank out{ObservedEntries(m, n, std::move(entries)), std::move(left),
                       std::move(right), svd.singularValues().sum()};
  return out;
}

Dataset train_test_split(Dataset ds, double fraction, std::uint64_t seed) {
  if (!(fraction > 0.0) || !(fraction < 1.0))
    throw Error("train_test_split: fraction must be in (0, 1)");
  const Index n = ds.features.rows();
  if (n < 2) throw DataError("train_test_split: need at least two rows");
  Rng rng(seed);
  std::vector<Index> perm(static_cast<size_t>(n));
  std::iota(perm.begin(), perm.end(), Index{0});
  for (Index i = n - 1; i > 0; --i) {
    const Index j = static_cast<Index>(rng.below(static_cast<std::uint64_t>(i + 1)));
    std::swap(perm[static_cast<size_t>(i)], perm[static_cast<size_t>(j)]);
  }
  Index n_train = static_cast<Index>(std::llround(fraction * static_cast<double>(n)));
  n_train = std::clamp<Index>(n_train, 1, n - 1);
  ds.train_indices.assign(perm.begin(), perm.begin() + n_train);
  ds.test_indices.assign(perm.begin() + n_train, perm.end());
  std::sort(ds.train_indices.begin(), ds.train_indices.end());
  std::sort(ds.test_indices.begin(), ds.test_indices.end());
  return ds;
}

std::uint64_t dataset_hash(const Dataset& ds) {
  std::uint64_t h = 0xCBF29CE484222325ull;
  hash_value(h, static_cast<std::int64_t>(ds.features.rows()));
  hash_value(h, static_cast<std::int64_t>(ds.features.cols()));
  for (Index i = 0; i < ds.features.rows(); ++i) {
    for (SparseMatrix::InnerIterator it(ds.features, i); it; ++it) {
      hash_value(h, static_cast<std::int64_t>(it.row()));
      hash_value(h, static_cast<std::int64_t>(it.col()));
      hash_value(h, it.value());
    }
  }
  for (Index i = 0; i < ds.labels.size(); ++i) hash_value(h, ds.labels[i]);
  return h;
}

}  // namespace condgrad

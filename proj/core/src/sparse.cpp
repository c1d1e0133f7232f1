/*
 * Copyright (c) 2026, The sliceig Authors.
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#include "sliceig/sparse.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

namespace sliceig {

SparseSymMatrix::SparseSymMatrix(std::size_t n, std::vector<std::size_t> row_ptr,
                                 std::vector<std::size_t> col_idx, std::vector<double> vals,
                                 double symmetry_tol)
    : n_(n), row_ptr_(std::move(row_ptr)), col_idx_(std::move(col_idx)), vals_(std::move(vals)) {
  if (row_ptr_.size() != n_ + 1 || row_ptr_.front() != 0)
    throw UsageError("CSR row_ptr must have n+1 entries starting at 0");
  if (row_ptr_.back() != col_idx_.size() || col_idx_.size() != vals_.size())
    throw UsageError("CSR arrays disagree on the number of stored entries");
  for (std::size_t i = 0; i < n_; ++i) {
    if (row_ptr_[i] > row_ptr_[i + 1]) throw UsageError("CSR row_ptr must be non-decreasing");
    for (std::size_t p = row_ptr_[i]; p < row_ptr_[i + 1]; ++p) {
      if (col_idx_[p] >= n_) throw UsageError("CSR column index out of range in row " + std::to_string(i));
      if (p > row_ptr_[i] && col_idx_[p] <= col_idx_[p - 1])
        throw UsageError("CSR columns must be sorted and unique in row " + std::to_string(i));
      if (!std::isfinite(vals_[p])) throw UsageError("non-finite matrix entry in row " + std::to_string(i));
    }
  }
  if (symmetry_defect(*this) > symmetry_tol) throw UsageError("matrix is not symmetric");
}

SparseSymMatrix SparseSymMatrix::from_triplets(std::size_t n, std::vector<Triplet> entries,
                                               double symmetry_tol) {
  for (const auto& t : entries)
    if (t.row >= n || t.col >= n) throw UsageError("triplet index out of range");
  std::sort(entries.begin(), entries.end(), [](const Triplet& a, const Triplet& b) {
    return a.row != b.row ? a.row < b.row : a.col < b.col;
  });
  std::vector<std::size_t> row_ptr(n + 1, 0);
  std::vector<std::size_t> col_idx;
  std::vector<double> vals;
  col_idx.reserve(entries.size());
  vals.reserve(entries.size());
  for (std::size_t p = 0; p < entries.size(); ++p) {
    const auto& t = entries[p];
    if (p > 0 && entries[p - 1].row == t.row && entries[p - 1].col == t.col) {
      vals.back() += t.value;
      continue;
    }
    col_idx.push_back(t.col);
    vals.push_back(t.value);
    ++row_ptr[t.row + 1];
  }
  for (std::size_t i = 0; i < n; ++i) row_ptr[i + 1] += row_ptr[i];
  return SparseSymMatrix(n, std::move(row_ptr), std::move(col_idx), std::move(vals), symmetry_tol);
}

double SparseSymMatrix::at(std::size_t i, std::size_t j) const {
  if (i >= n_ || j >= n_) throw UsageError("index out of range");
  auto first = col_idx_.begin() + static_cast<std::ptrdiff_t>(row_ptr_[i]);
  auto last = col_idx_.begin() + static_cast<std::ptrdiff_t>(row_ptr_[i + 1]);
  auto it = std::lower_bound(first, last, j);
  if (it == last || *it != j) return 0.0;
  return vals_[static_cast<std::size_t>(it - col_idx_.begin())];
}

DenseBlock SparseSymMatrix::to_dense() const {
  DenseBlock d = DenseBlock::Zero(static_cast<Eigen::Index>(n_), static_cast<Eigen::Index>(n_));
  for (std::size_t i = 0; i < n_; ++i)
    for (std::size_t p = row_ptr_[i]; p < row_ptr_[i + 1]; ++p)
      d(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(col_idx_[p])) = vals_[p];
  return d;
}

void matvec(const SparseSymMatrix& a, std::span<const double> x, std::span<double> y) {
  const std::size_t n = a.n();
  if (x.size() != n || y.size() != n)
    throw UsageError("matvec: vector length " + std::to_string(x.size()) + "/" +
                     std::to_string(y.size()) + " does not match matrix dimension " +
                     std::to_string(n));
  const std::size_t* rp = a.row_ptr().data();
  const std::size_t* ci = a.col_idx().data();
  const double* v = a.values().data();
  for (std::size_t i = 0; i < n; ++i) {
    double s = 0.0;
    for (std::size_t p = rp[i]; p < rp[i + 1]; ++p) s += v[p] * x[ci[p]];
    y[i] = s;
  }
}

Vector matvec(const SparseSymMatrix& a, const Vector& x) {
  Vector y(x.size());
  matvec(a, std::span<const double>(x.data(), static_cast<std::size_t>(x.size())),
         std::span<double>(y.data(), static_cast<std::size_t>(y.size())));
  return y;
}

double symmetry_defect(const SparseSymMatrix& a) {
  double worst = 0.0;
  const auto rp = a.row_ptr();
  const auto ci = a.col_idx();
  const auto v = a.values();
  for (std::size_t i = 0; i < a.n(); ++i) {
    for (std::size_t p = rp[i]; p < rp[i + 1]; ++p) {
      const std::size_t j = ci[p];
      if (j <= i) continue;
      const double other = a.at(j, i);
      const double scale = std::max(std::abs(v[p]), std::abs(other));
      if (scale == 0.0) continue;
      worst = std::max(worst, std::abs(v[p] - other) / scale);
    }
  }
  // Entries stored only in the lower triangle are caught from the other side.
  for (std::size_t i = 0; i < a.n(); ++i) {
    for (std::size_t p = rp[i]; p < rp[i + 1]; ++p) {
      const std::size_t j = ci[p];
      if (j >= i || v[p] == 0.0) continue;
      if (a.at(j, i) == 0.0) worst = std::max(worst, 1.0);
    }
  }
  return worst;
}

SparseSymMatrix gen_laplacian3d(std::size_t nx, std::size_t ny, std::size_t nz) {
  if (nx == 0 || ny == 0 || nz == 0) throw UsageError("gen_laplacian3d: grid dimensions must be >= 1");
  const std::size_t n = nx * ny * nz;
  std::vector<std::size_t> row_ptr(n + 1, 0);
  std::vector<std::size_t> col_idx;
  std::vector<double> vals;
  col_idx.reserve(7 * n);
  vals.reserve(7 * n);
  const std::size_t sxy = nx * ny;
  for (std::size_t k = 0; k < nz; ++k) {
    for (std::size_t j = 0; j < ny; ++j) {
      for (std::size_t i = 0; i < nx; ++i) {
        const std::size_t row = i + nx * (j + ny * k);
        // Ascending column order: -z, -y, -x, self, +x, +y, +z.
        if (k > 0) { col_idx.push_back(row - sxy); vals.push_back(-1.0); }
        if (j > 0) { col_idx.push_back(row - nx); vals.push_back(-1.0); }
        if (i > 0) { col_idx.push_back(row - 1); vals.push_back(-1.0); }
        col_idx.push_back(row); vals.push_back(6.0);
        if (i + 1 < nx) { col_idx.push_back(row + 1); vals.push_back(-1.0); }
        if (j + 1 < ny) { col_idx.push_back(row + nx); vals.push_back(-1.0); }
        if (k + 1 < nz) { col_idx.push_back(row + sxy); vals.push_back(-1.0); }
        row_ptr[row + 1] = col_idx.size();
      }
    }
  }
  return SparseSymMatrix(n, std::move(row_ptr), std::move(col_idx), std::move(vals));
}

SparseSymMatrix gen_diagonal(std::span<const double> diag) {
  const std::size_t n = diag.size();
  std::vector<std::size_t> row_ptr(n + 1);
  std::vector<std::size_t> col_idx(n);
  for (std::size_t i = 0; i <= n; ++i) row_ptr[i] = i;
  for (std::size_t i = 0; i < n; ++i) col_idx[i] = i;
  return SparseSymMatrix(n, std::move(row_ptr), std::move(col_idx),
                         std::vector<double>(diag.begin(), diag.end()));
}

namespace {
std::vector<double> dirichlet_1d(std::size_t m) {
  std::vector<double> c(m);
  for (std::size_t i = 0; i < m; ++i)
    c[i] = std::cos(static_cast<double>(i + 1) * std::numbers::pi / static_cast<double>(m + 1));
  return c;
}
}  // namespace

std::vector<double> laplacian_eigs_in(std::size_t nx, std::size_t ny, std::size_t nz, double lo,
                                      double hi) {
  if (nx == 0 || ny == 0 || nz == 0) throw UsageError("laplacian_eigs_in: grid dimensions must be >= 1");
  if (lo > hi) throw UsageError("laplacian_eigs_in: empty interval");
  const auto cx = dirichlet_1d(nx), cy = dirichlet_1d(ny), cz = dirichlet_1d(nz);
  std::vector<double> out;
  for (double a : cx)
    for (double b : cy)
      for (double c : cz) {
        const double lam = 6.0 - 2.0 * (a + b + c);
        if (lam >= lo && lam <= hi) out.push_back(lam);
      }
  std::sort(out.begin(), out.end());
  return out;
}

}  // namespace sliceig

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

#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "sliceig/types.hpp"

namespace sliceig {

struct Triplet {
  std::size_t row;
  std::size_t col;
  double value;
};

/// Real symmetric matrix in CSR form with both triangles stored.
///
/// Immutable after construction, so one instance can be shared read-only by
/// any number of solver threads. Column indices within a row are sorted and
/// unique.
class SparseSymMatrix {
 public:
  SparseSymMatrix() = default;

  /// Takes ownership of CSR arrays. Validates structure, finiteness and
  /// symmetry (relative tolerance `symmetry_tol`); throws UsageError.
  SparseSymMatrix(std::size_t n, std::vector<std::size_t> row_ptr,
                  std::vector<std::size_t> col_idx, std::vector<double> vals,
                  double symmetry_tol = 0.0);

  /// Assembles from triplets; duplicates are summed. The triplet list must
  /// already contain both triangles.
  static SparseSymMatrix from_triplets(std::size_t n, std::vector<Triplet> entries,
                                       double symmetry_tol = 0.0);

  std::size_t n() const noexcept { return n_; }
  std::size_t nnz() const noexcept { return vals_.size(); }
  std::span<const std::size_t> row_ptr() const noexcept { return row_ptr_; }
  std::span<const std::size_t> col_idx() const noexcept { return col_idx_; }
  std::span<const double> values() const noexcept { return vals_; }

  /// Value at (i, j), zero when not stored.
  double at(std::size_t i, std::size_t j) const;

  DenseBlock to_dense() const;

 private:
  std::size_t n_ = 0;
  std::vector<std::size_t> row_ptr_{0};
  std::vector<std::size_t> col_idx_;
  std::vector<double> vals_;
};

// y <- A x. Rows are summed left to right, so results are reproducible.
void matvec(const SparseSymMatrix& a, std::span<const double> x, std::span<double> y);
Vector matvec(const SparseSymMatrix& a, const Vector& x);

/// Max over stored (i, j, v) of |v - A(j, i)| relative to max(|v|, |A(j,i)|).
double symmetry_defect(const SparseSymMatrix& a);

/// 7-point negative Laplacian on an nx x ny x nz grid with homogeneous
/// Dirichlet boundaries: 6 on the diagonal, -1 to each grid neighbour, no
/// 1/h^2 scaling. Grid index is x + nx*(y + ny*z).
SparseSymMatrix gen_laplacian3d(std::size_t nx, std::size_t ny, std::size_t nz);

SparseSymMatrix gen_diagonal(std::span<const double> diag);

/// All eigenvalues 6 - 2(cos(i pi/(nx+1)) + cos(j pi/(ny+1)) + cos(k pi/(nz+1)))
/// of gen_laplacian3d(nx, ny, nz) that lie in [lo, hi], ascending, with
/// multiplicity.
std::vector<double> laplacian_eigs_in(std::size_t nx, std::size_t ny, std::size_t nz,
                                      double lo, double hi);

}  // namespace sliceig

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

#include <complex>
#include <vector>

#include "sliceig/types.hpp"

namespace sliceig {

/// Projected matrix of a thick-restarted Lanczos run:
///
///     [ diag(head)   spike          0  ]
///     [ spike^T      alpha[0]  beta[0] ]
///     [ 0            beta[0]   alpha[1] ... ]
///
/// With an empty head this is the plain Lanczos tridiagonal. `beta` holds the
/// off-diagonals of the tridiagonal tail, so beta.size() + 1 == alpha.size()
/// (or both are empty).
struct ProjectedMatrix {
  std::vector<double> head;
  std::vector<double> spike;
  std::vector<double> alpha;
  std::vector<double> beta;

  std::size_t size() const noexcept { return head.size() + alpha.size(); }
  DenseBlock to_dense() const;
};

struct SymEigen {
  std::vector<double> values;  // descending
  DenseBlock vectors;          // column i belongs to values[i]
};

struct SymEigenLastRow {
  std::vector<double> values;    // descending
  std::vector<double> last_row;  // last component of each eigenvector
};

/// Full eigendecomposition of a dense symmetric matrix (Householder
/// tridiagonalization followed by implicit-shift QL). Only the lower
/// triangle is read.
SymEigen eig_symmetric(const DenseBlock& a);

SymEigen eig_projected(const ProjectedMatrix& m);

/// Eigenvalues plus the last eigenvector components, in O(m^2) past the
/// reduction of the arrowhead block. Used for cheap Lanczos convergence
/// estimates.
SymEigenLastRow eig_projected_last_row(const ProjectedMatrix& m);

/// All eigenvalues of a general real square matrix: balancing, Householder
/// reduction to Hessenberg form, then Francis double-shift QR. Order is
/// unspecified. Throws NumericalError when QR fails to converge.
std::vector<std::complex<double>> eig_hessenberg(const DenseBlock& h);

}  // namespace sliceig

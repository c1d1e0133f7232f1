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
#include <functional>
#include <random>
#include <span>
#include <vector>

#include "sliceig/chebfilter.hpp"
#include "sliceig/eig_small.hpp"
#include "sliceig/orthogonalize.hpp"
#include "sliceig/sparse.hpp"
#include "sliceig/spectrum_bounds.hpp"

namespace sliceig {

/// out <- B in. `in` and `out` never alias.
using LinearOperator = std::function<void(const Eigen::Ref<const Vector>&, Eigen::Ref<Vector>)>;

/// Lanczos basis with thick restart and a locked (deflated) block.
///
/// Every new direction is orthogonalized against the locked vectors and the
/// whole current basis, so the effective operator is (I - U U^T) B. After a
/// thick restart the projected matrix has the arrowhead-plus-tridiagonal
/// shape described by ProjectedMatrix.
class LanczosProcess {
 public:
  LanczosProcess(Eigen::Index n, std::size_t max_basis, LinearOperator op, std::uint64_t seed);

  /// Fresh start from `q1` (orthogonalized against the locked block and
  /// normalized) or from a seeded random vector.
  void start(const Vector* q1 = nullptr);

  /// One Lanczos step from the newest basis vector. Returns false when the
  /// basis is full or the space is exhausted.
  bool step();

  /// Steps until size() == to (or step() fails). Returns the steps taken.
  std::size_t extend(std::size_t to);

  /// Restart with `vectors` (orthonormal Ritz vectors, n x l) as the leading
  /// basis, followed by the current next vector. thetas are their Ritz
  /// values and s[i] = beta_{k+1} * (last component of y_i).
  void thick_restart(const DenseBlock& vectors, std::span<const double> thetas, std::span<const double> s);

  /// Appends a converged vector to the locked block. It must be orthogonal
  /// to the current basis and next vector.
  void lock(const Eigen::Ref<const Vector>& u);

  std::size_t size() const noexcept { return k_; }
  std::size_t capacity() const noexcept { return max_basis_; }
  std::size_t locked_count() const noexcept { return lock_; }
  std::size_t tr_size() const noexcept { return l_; }
  std::size_t steps() const noexcept { return steps_; }
  std::size_t breakdowns() const noexcept { return breakdowns_; }
  bool has_next() const noexcept { return has_next_; }

  const ProjectedMatrix& projected() const noexcept { return proj_; }
  /// beta_{k+1}, the coupling of the basis to next_vector().
  double residual_beta() const noexcept { return beta_next_; }

  ConstBlockRef basis() const { return q_.leftCols(static_cast<Eigen::Index>(k_)); }
  Eigen::Ref<const Vector> next_vector() const { return q_.col(static_cast<Eigen::Index>(k_)); }
  ConstBlockRef locked() const { return u_.leftCols(static_cast<Eigen::Index>(lock_)); }

  /// max |[U Q q_next]^T [U Q q_next] - I|.
  double orthogonality_error() const;

 private:
  Eigen::Index n_;
  std::size_t max_basis_;
  LinearOperator op_;
  std::mt19937_64 rng_;
  DenseBlock q_;  // n x (max_basis + 1)
  DenseBlock u_;  // n x capacity, first lock_ columns valid
  std::size_t k_ = 0;
  std::size_t l_ = 0;
  std::size_t lock_ = 0;
  bool has_next_ = false;
  double beta_next_ = 0.0;
  ProjectedMatrix proj_;
  std::size_t steps_ = 0;
  std::size_t breakdowns_ = 0;
  Vector w_;
};

struct SolverConfig {
  /// Estimated eigenvalue count in the interval.
  std::size_t nev = 0;
  /// Max basis size; 0 means max(4 nev, nev + 40), capped at n.
  std::size_t m = 0;
  /// Budget in filtered Lanczos steps; 0 means max(16 nev, 4 m).
  std::size_t max_its = 0;
  double tol = 1e-8;
  std::size_t ncycle = 30;
  std::size_t ntest = 50;
  std::uint64_t seed = 0;
  /// Candidates whose projection onto the locked block reaches this norm are
  /// treated as already found.
  double duplicate_overlap = 0.9;
  /// Called after every thick restart with the restarted process.
  std::function<void(const LanczosProcess&)> on_restart;
};

struct EigResult {
  double lambda = 0.0;    // Rayleigh quotient u^T A u
  Vector vector;          // unit norm, largest-magnitude entry positive
  double residual = 0.0;  // ||A u - lambda u||
  double theta = 0.0;     // filtered Ritz value
  int slice_id = 0;
};

struct SolveStats {
  int degree = 0;
  std::size_t iterations = 0;       // filtered Lanczos steps (or block sweeps x columns)
  std::size_t filter_matvecs = 0;   // products with A inside the filter
  std::size_t rq_matvecs = 0;       // products with A for Rayleigh quotients / residuals
  std::size_t restarts = 0;
  std::size_t early_restarts = 0;
  double matvec_seconds = 0.0;
  double total_seconds = 0.0;
  double residual_max = 0.0;
  double residual_avg = 0.0;
};

struct IntervalSolution {
  std::vector<EigResult> pairs;  // ascending lambda
  SolveStats stats;
};

/// Iteration budget exhausted with candidates still unconverged.
class PartialResultError : public NumericalError {
 public:
  PartialResultError(IntervalSolution partial, std::size_t unconverged);
  const IntervalSolution& partial() const noexcept { return partial_; }
  std::size_t unconverged() const noexcept { return unconverged_; }

 private:
  IntervalSolution partial_;
  std::size_t unconverged_;
};

enum class Classification { locked, thick_restart, rejected };

/// Decision for one candidate Ritz vector: rejected when its Rayleigh
/// quotient falls outside [xi, eta], locked when the residual meets tol,
/// otherwise kept for the next restart. `lambda` and `residual` are filled.
Classification classify_candidate(const SparseSymMatrix& a, const Eigen::Ref<const Vector>& u, double xi,
                                  double eta, double tol, double& lambda, double& residual);

/// Filtered thick-restart Lanczos with locking: every eigenpair of A in
/// [xi, eta] with residual <= tol. Throws PartialResultError when max_its
/// runs out first.
IntervalSolution solve_interval(const SparseSymMatrix& a, const SpectralMap& map, const PolyFilter& filter,
                                double xi, double eta, const SolverConfig& config);

/// Flips the sign so the largest-magnitude entry is positive.
void normalize_sign(Eigen::Ref<Vector> v);

}  // namespace sliceig

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
#include <vector>

#include "sliceig/sparse.hpp"
#include "sliceig/spectrum_bounds.hpp"

namespace sliceig {

/// Stochastic Chebyshev (KPM) estimate of the spectral density of A, with
/// Jackson damping, expressed on the reference interval [-1, 1].
struct DOSCurve {
  SpectralMap map;
  int degree = 0;
  int nvec = 0;
  std::vector<double> moments;  // damped, scaled so that moments[0] ~ n
  std::vector<double> grid;     // reference points in [-1, 1]
  std::vector<double> density;  // clipped at 0, eigenvalues per unit of t

  /// Estimated eigenvalue count in [-1, t] (reference coordinates), from the
  /// exact antiderivative of the expansion.
  double cumulative_ref(double t) const;
  /// Same, in original coordinates.
  double cumulative(double x) const;
  /// Trapezoid integral of the clipped density on the stored grid.
  double grid_integral() const;
};

struct SlicePlan {
  std::vector<double> bounds;       // nslices + 1 ascending boundaries
  std::vector<std::size_t> counts;  // estimated count per slice
  std::size_t total_estimate = 0;

  std::size_t size() const noexcept { return counts.size(); }
  double lo(std::size_t i) const { return bounds.at(i); }
  double hi(std::size_t i) const { return bounds.at(i + 1); }
};

constexpr int kDefaultDosDegree = 80;
constexpr int kDefaultDosVectors = 30;
constexpr std::size_t kAutoSliceTarget = 250;

/// Rademacher probes, probe i seeded with derive_seed(seed, i).
/// `matvecs` (if given) receives degree * nvec.
DOSCurve kpm_dos(const SparseSymMatrix& a, const SpectralMap& map, int degree = kDefaultDosDegree,
                 int nvec = kDefaultDosVectors, std::uint64_t seed = 0, std::size_t* matvecs = nullptr);

/// Rounded estimate of the number of eigenvalues in [xi, eta].
std::size_t estimate_count(const DOSCurve& dos, double xi, double eta);

/// Splits [xi, eta] into nslices pieces of equal estimated count, locating
/// the boundaries by bisection on the cumulative count.
SlicePlan plan_slices(const DOSCurve& dos, double xi, double eta, std::size_t nslices);

/// Smallest slice count keeping the estimate per slice at or below `target`
/// (at least 1).
std::size_t auto_slice_count(const DOSCurve& dos, double xi, double eta, std::size_t target = kAutoSliceTarget);

}  // namespace sliceig

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

#include "sliceig/spectrum_bounds.hpp"

#include <algorithm>
#include <cmath>

#include "sliceig/eig_small.hpp"
#include "sliceig/orthogonalize.hpp"

namespace sliceig {

SpectralMap SpectralMap::from_bounds(double lo, double hi) {
  if (!(lo < hi) || !std::isfinite(lo) || !std::isfinite(hi))
    throw UsageError("spectral bounds must satisfy lo < hi");
  SpectralMap m;
  m.lo = lo;
  m.hi = hi;
  m.c = 0.5 * (hi + lo);
  m.d = 0.5 * (hi - lo);
  return m;
}

double map_to_reference(const SpectralMap& map, double t) noexcept { return map.to_reference(t); }

SpectralMap estimate_bounds(const SparseSymMatrix& a, std::size_t steps, std::uint64_t seed,
                            std::size_t* matvecs) {
  const std::size_t n = a.n();
  if (n == 0) throw UsageError("estimate_bounds: empty matrix");
  if (matvecs) *matvecs = 0;
  if (n == 1) {
    const double v = a.at(0, 0);
    const double pad = 1e-8 * std::max(1.0, std::abs(v));
    return SpectralMap::from_bounds(v - pad, v + pad);
  }
  if (steps < 2) throw UsageError("estimate_bounds: need at least 2 Lanczos steps");
  const auto m = static_cast<Eigen::Index>(std::min(steps, n));
  const auto nn = static_cast<Eigen::Index>(n);

  std::mt19937_64 rng(seed);
  DenseBlock q(nn, m + 1);
  const DenseBlock none(nn, 0);
  q.col(0) = *random_orthogonal_unit(nn, rng, none, none);

  ProjectedMatrix t;
  double beta = 0.0;
  Vector w(nn);
  std::size_t products = 0;
  Eigen::Index k = 0;
  for (; k < m; ++k) {
    matvec(a, std::span<const double>(q.col(k).data(), n), std::span<double>(w.data(), n));
    ++products;
    if (k > 0) w -= beta * q.col(k - 1);
    const double alpha = q.col(k).dot(w);
    w -= alpha * q.col(k);
    beta = orthogonalize(w, none, q.leftCols(k + 1));
    t.alpha.push_back(alpha);
    if (k + 1 == m) break;
    if (beta <= 1e-13 * std::max(std::abs(alpha), 1.0)) {
      // Invariant subspace found: continue in a fresh orthogonal direction.
      beta = 0.0;
      auto r = random_orthogonal_unit(nn, rng, none, q.leftCols(k + 1));
      if (!r) break;
      q.col(k + 1) = *r;
    } else {
      q.col(k + 1) = w / beta;
    }
    t.beta.push_back(beta);
  }
  if (matvecs) *matvecs = products;

  const auto eig = eig_projected_last_row(t);
  const double theta_max = eig.values.front();
  const double theta_min = eig.values.back();
  double hi = theta_max + std::abs(beta * eig.last_row.front());
  double lo = theta_min - std::abs(beta * eig.last_row.back());
  const double nudge = 1e-8 * (theta_max - theta_min);
  hi += nudge;
  lo -= nudge;
  if (hi - lo < 1e-12 * std::max(1.0, std::abs(theta_max))) {
    const double pad = 1e-10 * std::max(1.0, std::abs(theta_max));
    hi += pad;
    lo -= pad;
  }
  return SpectralMap::from_bounds(lo, hi);
}

SpectralMap estimate_bounds(const SparseSymMatrix& a, std::uint64_t seed) {
  return estimate_bounds(a, std::min<std::size_t>(60, std::max<std::size_t>(a.n(), 2)), seed);
}

}  // namespace sliceig

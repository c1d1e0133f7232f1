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

#include "sliceig/dos_slicer.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>
#include <string>

#include "sliceig/chebfilter.hpp"
#include "sliceig/orthogonalize.hpp"

namespace sliceig {

double DOSCurve::cumulative_ref(double t) const {
  t = std::clamp(t, -1.0, 1.0);
  const double th = std::acos(t);
  // Integral over [t, 1] of T_j(t') / (pi sqrt(1 - t'^2)) is sin(j th) / (j pi),
  // and pi - th for j = 0; the count in [-1, t] is the complement.
  double above = moments.empty() ? 0.0 : moments[0] * th;
  for (std::size_t j = 1; j < moments.size(); ++j) {
    const double jj = static_cast<double>(j);
    above += 2.0 * moments[j] * std::sin(jj * th) / jj;
  }
  above /= std::numbers::pi;
  const double total = moments.empty() ? 0.0 : moments[0];
  return total - above;
}

double DOSCurve::cumulative(double x) const { return cumulative_ref(map.to_reference(x)); }

double DOSCurve::grid_integral() const {
  double s = 0.0;
  for (std::size_t i = 1; i < grid.size(); ++i) s += 0.5 * (density[i] + density[i - 1]) * (grid[i] - grid[i - 1]);
  return s;
}

DOSCurve kpm_dos(const SparseSymMatrix& a, const SpectralMap& map, int degree, int nvec, std::uint64_t seed,
                 std::size_t* matvecs) {
  if (degree < 10) throw UsageError("kpm_dos: degree must be at least 10");
  if (nvec < 1) throw UsageError("kpm_dos: need at least one probe vector");
  const auto n = static_cast<Eigen::Index>(a.n());
  if (n == 0) throw UsageError("kpm_dos: empty matrix");

  std::vector<double> mu(static_cast<std::size_t>(degree) + 1, 0.0);
  Vector v(n), t0(n), t1(n), t2(n), av(n);
  const double inv_d = 1.0 / map.d;
  const auto len = static_cast<std::size_t>(n);
  auto apply_a = [&](const Vector& x) { matvec(a, {x.data(), len}, {av.data(), len}); };
  for (int p = 0; p < nvec; ++p) {
    std::mt19937_64 rng(derive_seed(seed, static_cast<std::uint64_t>(p)));
    std::bernoulli_distribution coin(0.5);
    for (Eigen::Index i = 0; i < n; ++i) v[i] = coin(rng) ? 1.0 : -1.0;
    t0 = v;
    apply_a(t0);
    t1 = (av - map.c * t0) * inv_d;
    mu[0] += v.dot(t0);
    mu[1] += v.dot(t1);
    for (int j = 2; j <= degree; ++j) {
      apply_a(t1);
      t2 = 2.0 * inv_d * (av - map.c * t1) - t0;
      mu[static_cast<std::size_t>(j)] += v.dot(t2);
      std::swap(t0, t1);
      std::swap(t1, t2);
    }
  }
  if (matvecs) *matvecs += static_cast<std::size_t>(degree) * static_cast<std::size_t>(nvec);

  const auto g = jackson_coeffs(degree);
  DOSCurve dos;
  dos.map = map;
  dos.degree = degree;
  dos.nvec = nvec;
  dos.moments.resize(mu.size());
  for (std::size_t j = 0; j < mu.size(); ++j) dos.moments[j] = g[j] * mu[j] / nvec;

  // Density on a Chebyshev-friendly grid avoiding the endpoint singularity.
  const int npts = 4 * degree + 1;
  dos.grid.resize(static_cast<std::size_t>(npts));
  dos.density.resize(static_cast<std::size_t>(npts));
  for (int i = 0; i < npts; ++i) {
    const double th = std::numbers::pi * (npts - 1 - i + 0.5) / npts;
    const double t = std::cos(th);
    double s = dos.moments[0];
    for (std::size_t j = 1; j < dos.moments.size(); ++j)
      s += 2.0 * dos.moments[j] * std::cos(static_cast<double>(j) * th);
    dos.grid[static_cast<std::size_t>(i)] = t;
    dos.density[static_cast<std::size_t>(i)] = std::max(0.0, s / (std::numbers::pi * std::sqrt(1.0 - t * t)));
  }
  return dos;
}

std::size_t estimate_count(const DOSCurve& dos, double xi, double eta) {
  if (!(xi <= eta)) throw UsageError("estimate_count: interval must satisfy xi <= eta");
  const double c = dos.cumulative(eta) - dos.cumulative(xi);
  return static_cast<std::size_t>(std::llround(std::max(0.0, c)));
}

namespace {

long rounded_cumulative(const DOSCurve& dos, double x) { return std::lround(dos.cumulative(x)); }

}  // namespace

SlicePlan plan_slices(const DOSCurve& dos, double xi, double eta, std::size_t nslices) {
  if (nslices == 0) throw UsageError("plan_slices: need at least one slice");
  if (!(xi < eta)) throw UsageError("plan_slices: interval must satisfy xi < eta");
  if (xi < dos.map.lo || eta > dos.map.hi) throw UsageError("plan_slices: interval outside the spectrum bounds");

  const double c_lo = dos.cumulative(xi);
  const double c_hi = dos.cumulative(eta);
  const double total = c_hi - c_lo;
  if (total < static_cast<double>(nslices))
    throw UsageError("estimated eigenvalue count " + std::to_string(total) + " is smaller than the " +
                     std::to_string(nslices) + " requested slices; use fewer slices");

  SlicePlan plan;
  plan.bounds.resize(nslices + 1);
  plan.bounds.front() = xi;
  plan.bounds.back() = eta;
  for (std::size_t i = 1; i < nslices; ++i) {
    const double want = c_lo + total * static_cast<double>(i) / static_cast<double>(nslices);
    double a = plan.bounds[i - 1], b = eta;
    while (b - a > 1e-10) {
      const double mid = 0.5 * (a + b);
      if (dos.cumulative(mid) < want)
        a = mid;
      else
        b = mid;
    }
    plan.bounds[i] = 0.5 * (a + b);
  }
  // Counts from rounded cumulative values telescope to the total exactly.
  std::vector<long> r(nslices + 1);
  for (std::size_t i = 0; i <= nslices; ++i) r[i] = rounded_cumulative(dos, plan.bounds[i]);
  plan.counts.resize(nslices);
  for (std::size_t i = 0; i < nslices; ++i) plan.counts[i] = static_cast<std::size_t>(std::max(1L, r[i + 1] - r[i]));
  plan.total_estimate = 0;
  for (auto c : plan.counts) plan.total_estimate += c;
  return plan;
}

std::size_t auto_slice_count(const DOSCurve& dos, double xi, double eta, std::size_t target) {
  const double total = dos.cumulative(eta) - dos.cumulative(xi);
  const auto k = static_cast<std::size_t>(std::ceil(total / static_cast<double>(std::max<std::size_t>(target, 1))));
  return std::max<std::size_t>(k, 1);
}

}  // namespace sliceig

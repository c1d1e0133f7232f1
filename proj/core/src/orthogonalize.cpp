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

#include "sliceig/orthogonalize.hpp"

#include <cmath>

namespace sliceig {

namespace {
constexpr double kDgks = 0.70710678118654752440;
}  // namespace

double orthogonalize(Eigen::Ref<Vector> w, const ConstBlockRef& u, const ConstBlockRef& q, int* passes) {
  double before = w.norm();
  double after = before;
  int count = 0;
  for (; count < 2;) {
    // Both blocks are projected with coefficients taken from the same w,
    // which is what makes this classical rather than modified Gram-Schmidt.
    Vector hu, hq;
    if (u.cols() > 0) hu = u.transpose() * w;
    if (q.cols() > 0) hq = q.transpose() * w;
    if (u.cols() > 0) w.noalias() -= u * hu;
    if (q.cols() > 0) w.noalias() -= q * hq;
    ++count;
    after = w.norm();
    if (after >= kDgks * before) break;
    before = after;
  }
  if (passes) *passes = count;
  return after;
}

std::optional<Vector> random_orthogonal_unit(Eigen::Index n, std::mt19937_64& rng, const ConstBlockRef& u,
                                             const ConstBlockRef& q) {
  if (u.cols() + q.cols() >= n) return std::nullopt;
  std::normal_distribution<double> normal(0.0, 1.0);
  for (int attempt = 0; attempt < 5; ++attempt) {
    Vector w(n);
    for (Eigen::Index i = 0; i < n; ++i) w[i] = normal(rng);
    const double start = w.norm();
    const double nrm = orthogonalize(w, u, q);
    if (nrm > 1e-8 * start) {
      w /= nrm;
      // Extra pass so the new direction is orthogonal to working precision.
      const double again = orthogonalize(w, u, q);
      return Vector(w / again);
    }
  }
  return std::nullopt;
}

int orthonormalize_columns(DenseBlock& x, const ConstBlockRef& locked, std::mt19937_64& rng) {
  int replaced = 0;
  for (Eigen::Index j = 0; j < x.cols(); ++j) {
    Eigen::Ref<Vector> col = x.col(j);
    const double start = col.norm();
    double nrm = orthogonalize(col, locked, x.leftCols(j));
    if (!(nrm > 1e-10 * start) || start == 0.0) {
      auto r = random_orthogonal_unit(x.rows(), rng, locked, x.leftCols(j));
      if (!r) throw NumericalError("orthonormalize_columns: block exceeds the available space");
      x.col(j) = *r;
      ++replaced;
      continue;
    }
    col /= nrm;
  }
  return replaced;
}

std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t stream) noexcept {
  // splitmix64 finalizer over a combined word.
  std::uint64_t z = seed + 0x9E3779B97F4A7C15ull * (stream + 1);
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
  return z ^ (z >> 31);
}

}  // namespace sliceig

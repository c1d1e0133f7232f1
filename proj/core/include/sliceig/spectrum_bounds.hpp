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

#include "sliceig/sparse.hpp"

namespace sliceig {

/// Affine map t -> (t - c) / d sending [lo, hi] onto [-1, 1].
struct SpectralMap {
  double lo = -1.0;
  double hi = 1.0;
  double c = 0.0;
  double d = 1.0;

  static SpectralMap from_bounds(double lo, double hi);

  double to_reference(double t) const noexcept { return (t - c) / d; }
  double from_reference(double s) const noexcept { return c + d * s; }
};

/// Short Lanczos run (full reorthogonalization, `steps` capped at n) whose
/// extreme Ritz values are pushed outward by their residual bound
/// |beta_{m+1} * y_last| and then by 1e-8 of the Ritz range. Deterministic
/// for a fixed seed. `matvecs`, when given, receives the number of products
/// with `a`.
SpectralMap estimate_bounds(const SparseSymMatrix& a, std::size_t steps, std::uint64_t seed,
                            std::size_t* matvecs = nullptr);

/// estimate_bounds with steps = min(60, n).
SpectralMap estimate_bounds(const SparseSymMatrix& a, std::uint64_t seed = 0);

double map_to_reference(const SpectralMap& map, double t) noexcept;

}  // namespace sliceig

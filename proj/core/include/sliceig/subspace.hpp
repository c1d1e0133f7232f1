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
#include <optional>
#include <vector>

#include "sliceig/trlanczos.hpp"

namespace sliceig {

struct SubspaceConfig {
  /// Block size; 0 means ceil(1.1 nev) + 5.
  std::size_t s = 0;
  std::size_t nev = 0;
  double tol = 1e-8;
  std::size_t max_sweeps = 200;
  std::uint64_t seed = 0;
  /// Called once per sweep with the unlocked Ritz values (descending).
  std::function<void(std::size_t sweep, const std::vector<double>& ritz)> on_sweep;
};

std::size_t default_block_size(std::size_t nev) noexcept;

/// Filtered subspace iteration with Rayleigh-Ritz on B = rho(Ahat) and
/// locking of converged columns. Candidates go through the same
/// classification as the Lanczos engine. `x0` (n x s) is an optional warm
/// start. stats.iterations counts filtered products, stats.restarts counts
/// sweeps.
IntervalSolution solve_subspace(const SparseSymMatrix& a, const SpectralMap& map, const PolyFilter& filter,
                                double xi, double eta, const SubspaceConfig& config,
                                const DenseBlock* x0 = nullptr);

}  // namespace sliceig

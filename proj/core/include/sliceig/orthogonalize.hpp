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

#include <optional>
#include <random>

#include "sliceig/types.hpp"

namespace sliceig {

using ConstBlockRef = Eigen::Ref<const DenseBlock>;

/// Classical Gram-Schmidt of `w` against the columns of `u` and then `q`
/// (either may have zero columns), with the DGKS test: a second pass runs
/// when the norm drops below 1/sqrt(2) of its value before the pass. At most
/// two passes. Returns the final norm; `passes` receives the pass count.
double orthogonalize(Eigen::Ref<Vector> w, const ConstBlockRef& u, const ConstBlockRef& q,
                     int* passes = nullptr);

/// Unit vector with N(0,1) entries, orthogonalized against `u` and `q`.
/// Empty when the columns already span the whole space.
std::optional<Vector> random_orthogonal_unit(Eigen::Index n, std::mt19937_64& rng,
                                             const ConstBlockRef& u, const ConstBlockRef& q);

/// Orthonormalizes the columns of `x` in place against `locked` and each
/// other (CGS with DGKS per column). Columns that collapse are replaced by
/// random directions. Returns the number of replaced columns.
int orthonormalize_columns(DenseBlock& x, const ConstBlockRef& locked, std::mt19937_64& rng);

/// Derives an independent seed for a sub-task from (seed, stream).
std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t stream) noexcept;

}  // namespace sliceig

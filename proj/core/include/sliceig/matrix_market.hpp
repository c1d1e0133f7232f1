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

#include <iosfwd>
#include <string>

#include "sliceig/sparse.hpp"

namespace sliceig {

/// Reads a Matrix Market coordinate file holding a real symmetric matrix.
///
/// Accepts `real symmetric` (one triangle stored, mirrored on load) and
/// `real general` with both triangles present and consistent. Indices are
/// 1-based in the file. Duplicate entries are summed. Throws ParseError with
/// the offending line for malformed input, non-square or non-real matrices,
/// and general files whose triangles differ by more than `symmetry_tol`
/// (relative).
SparseSymMatrix read_matrix_market(std::istream& in, double symmetry_tol = 1e-12);
SparseSymMatrix load_matrix_market(const std::string& path, double symmetry_tol = 1e-12);

/// Writes the lower triangle as `coordinate real symmetric`.
void write_matrix_market(std::ostream& out, const SparseSymMatrix& a);
void save_matrix_market(const std::string& path, const SparseSymMatrix& a);

}  // namespace sliceig

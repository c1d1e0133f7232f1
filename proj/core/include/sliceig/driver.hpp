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
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "sliceig/chebfilter.hpp"
#include "sliceig/dos_slicer.hpp"
#include "sliceig/subspace.hpp"
#include "sliceig/trlanczos.hpp"

namespace sliceig {

enum class Engine { lanczos, subspace };

std::string to_string(Engine e);
Engine parse_engine(const std::string& s);

struct RunConfig {
  double xi = 0.0;
  double eta = 0.0;
  /// Empty means automatic slicing (about kAutoSliceTarget per slice).
  std::optional<std::size_t> nslices;
  /// Empty means the library default (0.6 interior, 0.3 end intervals).
  std::optional<double> phi;
  Damping damping = Damping::lanczos_sigma;
  double tol = 1e-8;
  /// Basis size and step budget as multiples of the slice estimate.
  double m_factor = 4.0;
  double its_factor = 16.0;
  std::size_t threads = 1;
  std::uint64_t seed = 0;
  Engine engine = Engine::lanczos;
  int dos_degree = kDefaultDosDegree;
  int dos_vectors = kDefaultDosVectors;
  std::size_t bound_steps = 60;
  /// Skips bound estimation when set.
  std::optional<SpectralMap> bounds;
};

struct SliceRecord {
  int slice_id = 0;
  double lo = 0.0, hi = 0.0;
  std::size_t nev_estimate = 0;
  int degree = 0;
  double gamma = 0.0;
  double bar = 0.0;
  std::size_t iterations = 0;
  std::size_t matvecs = 0;
  std::size_t rq_matvecs = 0;
  std::size_t restarts = 0;
  double matvec_seconds = 0.0;
  double total_seconds = 0.0;
  double residual_max = 0.0;
  double residual_avg = 0.0;
  std::size_t count = 0;
  std::size_t unconverged = 0;
  std::string error;  // empty on success
};

struct RunReport {
  SpectralMap map;
  std::size_t bound_matvecs = 0;
  std::size_t dos_matvecs = 0;
  SlicePlan plan;
  std::vector<SliceRecord> slices;
  std::vector<EigResult> pairs;  // merged, ascending
  std::size_t duplicates_removed = 0;
  double wall_seconds = 0.0;

  bool complete() const;
  std::size_t total_matvecs() const;
  double max_residual() const;
};

/// Bounds, DOS, slice plan, then every slice solved on up to
/// config.threads workers. Slice failures are recorded per slice; the
/// remaining slices still run.
RunReport run_solve(const SparseSymMatrix& a, const RunConfig& config);

/// Drops cross-slice repeats: pairs near a shared boundary whose values and
/// vectors match. `pairs` must be sorted by lambda. Returns the count removed.
std::size_t merge_duplicates(std::vector<EigResult>& pairs, const std::vector<double>& boundaries, double d);

std::string report_json(const RunReport& report, int indent = 2);

/// `slice_id,eigenvalue,residual`, full precision.
void write_eigen_csv(std::ostream& out, const std::vector<EigResult>& pairs);

/// Binary vectors: 8-byte magic "SLICEIGV", uint64 n, uint64 count, then
/// count column-major little-endian doubles columns of length n.
void write_vectors_binary(const std::string& path, const std::vector<EigResult>& pairs, std::size_t n);
std::vector<Vector> read_vectors_binary(const std::string& path);

struct OracleDiff {
  std::vector<double> missed;                        // oracle values with no match
  std::vector<std::pair<int, double>> spurious;      // (slice, value) without a match
  std::vector<std::pair<int, double>> bad_residual;  // (slice, value) above tolerance
  bool ok() const { return missed.empty() && spurious.empty() && bad_residual.empty(); }
};

/// One-to-one matching of computed values against sorted oracle values.
OracleDiff compare_with_oracle(const std::vector<EigResult>& pairs, const std::vector<double>& oracle,
                               double value_tol, double residual_tol);

/// Filter values on `npts` evenly spaced reference points: rows of
/// (t, x, rho(t)).
void write_filter_curve(std::ostream& out, const PolyFilter& filter, const SpectralMap& map, int npts = 2001);

}  // namespace sliceig

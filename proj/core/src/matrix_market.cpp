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

#include "sliceig/matrix_market.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <istream>
#include <map>
#include <ostream>
#include <sstream>
#include <utility>

namespace sliceig {

namespace {

std::string lower(std::string s) {
  std::transform(s.begin(), s.end(), s.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  return s;
}

bool blank(const std::string& line) {
  return std::all_of(line.begin(), line.end(), [](unsigned char c) { return std::isspace(c); });
}

}  // namespace

SparseSymMatrix read_matrix_market(std::istream& in, double symmetry_tol) {
  std::string line;
  std::size_t lineno = 0;
  if (!std::getline(in, line)) throw ParseError("empty input", 0);
  ++lineno;

  std::istringstream header(line);
  std::string banner, object, format, field, symmetry;
  header >> banner >> object >> format >> field >> symmetry;
  if (banner != "%%MatrixMarket") throw ParseError("missing %%MatrixMarket banner", lineno);
  object = lower(object);
  format = lower(format);
  field = lower(field);
  symmetry = lower(symmetry);
  if (object != "matrix") throw ParseError("unsupported object '" + object + "'", lineno);
  if (format != "coordinate") throw ParseError("only coordinate format is supported", lineno);
  if (field != "real") throw ParseError("field must be real, got '" + field + "'", lineno);
  const bool symmetric = symmetry == "symmetric";
  if (!symmetric && symmetry != "general")
    throw ParseError("symmetry must be symmetric or general, got '" + symmetry + "'", lineno);

  // Skip comments to the size line.
  std::size_t rows = 0, cols = 0, nnz = 0;
  for (;;) {
    if (!std::getline(in, line)) throw ParseError("missing size line", lineno);
    ++lineno;
    if (line.empty() || line[0] == '%' || blank(line)) continue;
    std::istringstream sz(line);
    if (!(sz >> rows >> cols >> nnz)) throw ParseError("malformed size line", lineno);
    break;
  }
  if (rows != cols) throw ParseError("matrix is not square", lineno);
  const std::size_t n = rows;

  // (row, col) -> (summed value, first line it appeared on)
  std::map<std::pair<std::size_t, std::size_t>, std::pair<double, std::size_t>> entries;
  std::size_t read = 0;
  while (read < nnz) {
    if (!std::getline(in, line))
      throw ParseError("expected " + std::to_string(nnz) + " entries, found " + std::to_string(read), lineno);
    ++lineno;
    if (line.empty() || line[0] == '%' || blank(line)) continue;
    std::istringstream es(line);
    long long i = 0, j = 0;
    double v = 0.0;
    if (!(es >> i >> j >> v)) throw ParseError("malformed entry", lineno);
    if (i < 1 || j < 1 || static_cast<std::size_t>(i) > n || static_cast<std::size_t>(j) > n)
      throw ParseError("index out of range", lineno);
    if (!std::isfinite(v)) throw ParseError("non-finite value", lineno);
    const auto key = std::make_pair(static_cast<std::size_t>(i - 1), static_cast<std::size_t>(j - 1));
    auto [it, inserted] = entries.try_emplace(key, v, lineno);
    if (!inserted) it->second.first += v;
    ++read;
  }

  std::vector<Triplet> trip;
  trip.reserve(symmetric ? 2 * entries.size() : entries.size());
  for (const auto& [key, val] : entries) {
    const auto [i, j] = key;
    if (symmetric) {
      if (i < j && entries.count({j, i}))
        throw ParseError("symmetric file stores both A(" + std::to_string(i + 1) + "," +
                             std::to_string(j + 1) + ") and its mirror",
                         val.second);
      trip.push_back({i, j, val.first});
      if (i != j) trip.push_back({j, i, val.first});
      continue;
    }
    trip.push_back({i, j, val.first});
    if (i == j) continue;
    auto mirror = entries.find({j, i});
    const double other = mirror == entries.end() ? 0.0 : mirror->second.first;
    const double scale = std::max(std::abs(val.first), std::abs(other));
    if (scale > 0.0 && std::abs(val.first - other) > symmetry_tol * scale) {
      const std::size_t at = mirror == entries.end() ? val.second : std::max(val.second, mirror->second.second);
      std::ostringstream msg;
      msg << "asymmetric entry: A(" << i + 1 << "," << j + 1 << ")=" << val.first << " but A(" << j + 1
          << "," << i + 1 << ")=" << other;
      throw ParseError(msg.str(), at);
    }
  }
  return SparseSymMatrix::from_triplets(n, std::move(trip), symmetric ? 0.0 : symmetry_tol);
}

SparseSymMatrix load_matrix_market(const std::string& path, double symmetry_tol) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open '" + path + "'", 0);
  return read_matrix_market(in, symmetry_tol);
}

void write_matrix_market(std::ostream& out, const SparseSymMatrix& a) {
  const auto rp = a.row_ptr();
  const auto ci = a.col_idx();
  const auto v = a.values();
  std::size_t lower_nnz = 0;
  for (std::size_t i = 0; i < a.n(); ++i)
    for (std::size_t p = rp[i]; p < rp[i + 1]; ++p)
      if (ci[p] <= i) ++lower_nnz;
  out << "%%MatrixMarket matrix coordinate real symmetric\n";
  out << a.n() << ' ' << a.n() << ' ' << lower_nnz << '\n';
  char buf[64];
  for (std::size_t i = 0; i < a.n(); ++i)
    for (std::size_t p = rp[i]; p < rp[i + 1]; ++p)
      if (ci[p] <= i) {
        std::snprintf(buf, sizeof buf, "%.17g", v[p]);
        out << i + 1 << ' ' << ci[p] + 1 << ' ' << buf << '\n';
      }
}

void save_matrix_market(const std::string& path, const SparseSymMatrix& a) {
  std::ofstream out(path);
  if (!out) throw UsageError("cannot write '" + path + "'");
  write_matrix_market(out, a);
}

}  // namespace sliceig

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

#include <cmath>

#include "doctest.h"
#include "oracles.hpp"
#include "sliceig/subspace.hpp"

using namespace sliceig;

namespace {

struct Setup {
  SparseSymMatrix a;
  SpectralMap map;
  PolyFilter filter;
  double xi, eta;
};

Setup diagonal_setup() {
  std::vector<double> d;
  for (int i = 1; i <= 10; ++i) d.push_back(i);
  Setup s{gen_diagonal(d), {}, {}, 2.5, 4.5};
  s.map = estimate_bounds(s.a, 10, 0);
  FilterSpec spec;
  spec.xi = s.xi;
  spec.eta = s.eta;
  s.filter = select_degree(spec, s.map);
  return s;
}

}  // namespace

TEST_CASE("block size default") {
  CHECK(default_block_size(10) == 16);
  CHECK(default_block_size(100) == 116);
}

TEST_CASE("diagonal interval") {
  auto s = diagonal_setup();
  SubspaceConfig cfg;
  cfg.s = 4;
  auto sol = solve_subspace(s.a, s.map, s.filter, s.xi, s.eta, cfg);
  REQUIRE(sol.pairs.size() == 2);
  CHECK(sol.pairs[0].lambda == doctest::Approx(3.0).epsilon(1e-13));
  CHECK(sol.pairs[1].lambda == doctest::Approx(4.0).epsilon(1e-13));
  CHECK(sol.stats.filter_matvecs == sol.stats.iterations * static_cast<std::size_t>(s.filter.degree()));
}

TEST_CASE("warm start with exact eigenvectors stops after the confirming sweep") {
  auto s = diagonal_setup();
  DenseBlock x0 = DenseBlock::Zero(10, 4);
  x0(2, 0) = 1.0;
  x0(3, 1) = 1.0;
  x0(1, 2) = 1.0;
  x0(4, 3) = 1.0;
  SubspaceConfig cfg;
  cfg.s = 4;
  auto sol = solve_subspace(s.a, s.map, s.filter, s.xi, s.eta, cfg, &x0);
  CHECK(sol.pairs.size() == 2);
  CHECK(sol.stats.restarts == 2);
}

TEST_CASE("ritz values rise monotonically across sweeps") {
  auto a = gen_laplacian3d(9, 9, 9);
  auto map = estimate_bounds(a);
  FilterSpec spec;
  spec.xi = 5.2;
  spec.eta = 5.6;
  auto f = select_degree(spec, map);
  std::vector<std::vector<double>> history;
  SubspaceConfig cfg;
  cfg.s = 30;
  cfg.tol = 1e-300;  // nothing locks, so columns stay comparable
  cfg.max_sweeps = 8;
  cfg.seed = 12;
  cfg.on_sweep = [&](std::size_t, const std::vector<double>& r) { history.push_back(r); };
  CHECK_THROWS_AS(solve_subspace(a, map, f, spec.xi, spec.eta, cfg), PartialResultError);
  REQUIRE(history.size() == 8);
  for (std::size_t t = 1; t < history.size(); ++t)
    for (std::size_t j = 0; j < history[t].size(); ++j) CHECK(history[t][j] >= history[t - 1][j] - 1e-12);
}

TEST_CASE("agrees with the Lanczos engine and the oracle") {
  const int g = 15;
  auto a = gen_laplacian3d(g, g, g);
  const auto spectrum = oracle::laplacian_spectrum(g, g, g);
  const double xi = oracle::snap_to_gap(spectrum, 5.5), eta = oracle::snap_to_gap(spectrum, 5.62);
  const auto expect = oracle::in_range(spectrum, xi, eta);
  REQUIRE(expect.size() >= 30);
  REQUIRE(expect.size() <= 100);
  auto map = estimate_bounds(a);
  FilterSpec spec;
  spec.xi = xi;
  spec.eta = eta;
  auto f = select_degree(spec, map);

  SubspaceConfig bc;
  bc.s = default_block_size(expect.size());
  bc.seed = 1;
  auto sub = solve_subspace(a, map, f, xi, eta, bc);
  SolverConfig lc;
  lc.nev = expect.size();
  lc.seed = 1;
  auto lan = solve_interval(a, map, f, xi, eta, lc);
  REQUIRE(sub.pairs.size() == expect.size());
  REQUIRE(lan.pairs.size() == expect.size());
  for (std::size_t i = 0; i < expect.size(); ++i) {
    CHECK(std::abs(sub.pairs[i].lambda - lan.pairs[i].lambda) <= 1e-8);
    CHECK(std::abs(sub.pairs[i].lambda - expect[i]) <= 1e-8);
    CHECK(sub.pairs[i].residual <= 1e-8);
  }
}

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

#include <cstdio>
#include <sstream>

#include "doctest.h"
#include "json.hpp"
#include "oracles.hpp"
#include "sliceig/driver.hpp"

using namespace sliceig;

namespace {

EigResult pair(int slice, double lambda, Vector v) { return EigResult{lambda, std::move(v), 1e-12, 0.9, slice}; }

Vector unit(Eigen::Index n, Eigen::Index i) {
  Vector v = Vector::Zero(n);
  v[i] = 1.0;
  return v;
}

}  // namespace

TEST_CASE("cross-slice duplicates near a boundary are emitted once") {
  std::vector<EigResult> p = {pair(0, 1.0, unit(4, 0)), pair(0, 2.0 - 1e-12, unit(4, 1)),
                              pair(1, 2.0 + 1e-12, unit(4, 1)), pair(1, 2.0 + 2e-12, unit(4, 2)),
                              pair(1, 3.0, unit(4, 3))};
  auto removed = merge_duplicates(p, {0.0, 2.0, 4.0}, 2.0);
  CHECK(removed == 1);
  REQUIRE(p.size() == 4);
  CHECK(p[1].slice_id == 0);
  CHECK(p[2].vector[2] == 1.0);

  // Same values away from any boundary are genuine multiplicities.
  std::vector<EigResult> q = {pair(0, 1.5, unit(2, 0)), pair(1, 1.5, unit(2, 0))};
  CHECK(merge_duplicates(q, {0.0, 2.0, 4.0}, 2.0) == 0);
}

TEST_CASE("oracle comparison") {
  std::vector<EigResult> p = {pair(0, 1.0, unit(1, 0)), pair(0, 2.0 + 5e-9, unit(1, 0)), pair(1, 3.5, unit(1, 0))};
  p[1].residual = 1e-6;
  auto d = compare_with_oracle(p, {1.0, 2.0, 3.0}, 1e-8, 1e-8);
  CHECK_FALSE(d.ok());
  REQUIRE(d.missed.size() == 1);
  CHECK(d.missed[0] == 3.0);
  REQUIRE(d.spurious.size() == 1);
  CHECK(d.spurious[0].first == 1);
  REQUIRE(d.bad_residual.size() == 1);
  CHECK(compare_with_oracle({}, {}, 1e-8, 1e-8).ok());
}

TEST_CASE("csv and vector files") {
  std::vector<EigResult> p = {pair(2, 0.1, Vector::LinSpaced(3, 1, 3)), pair(3, 1.0 / 3.0, Vector::Ones(3))};
  std::ostringstream os;
  write_eigen_csv(os, p);
  CHECK(os.str() == "slice_id,eigenvalue,residual\n2,0.10000000000000001,9.9999999999999998e-13\n"
                    "3,0.33333333333333331,9.9999999999999998e-13\n");
  const std::string path = "driver_vectors_test.vec";
  write_vectors_binary(path, p, 3);
  auto back = read_vectors_binary(path);
  std::remove(path.c_str());
  REQUIRE(back.size() == 2);
  CHECK(back[0] == p[0].vector);
  CHECK(back[1] == p[1].vector);
}

TEST_CASE("diagonal run over two slices") {
  std::vector<double> d;
  for (int i = 1; i <= 100; ++i) d.push_back(i);
  auto a = gen_diagonal(d);
  RunConfig cfg;
  cfg.xi = 10.5;
  cfg.eta = 20.5;
  cfg.nslices = 2;
  auto rep = run_solve(a, cfg);
  CHECK(rep.complete());
  REQUIRE(rep.pairs.size() == 10);
  for (int i = 0; i < 10; ++i) CHECK(rep.pairs[static_cast<std::size_t>(i)].lambda == doctest::Approx(11.0 + i));
  for (const auto& r : rep.slices) {
    CHECK(r.count >= 3);
    CHECK(r.count <= 7);
    CHECK(r.matvecs == static_cast<std::size_t>(r.degree) * r.iterations);
  }
  auto j = nlohmann::json::parse(report_json(rep));
  CHECK(j["totals"]["count"] == 10);
  CHECK(j["slices"].size() == 2);
  CHECK(j["totals"]["dos_matvecs"] == rep.dos_matvecs);
}

TEST_CASE("thread count does not change results") {
  auto a = gen_laplacian3d(10, 10, 10);
  RunConfig cfg;
  const auto spectrum = oracle::laplacian_spectrum(10, 10, 10);
  cfg.xi = oracle::snap_to_gap(spectrum, 4.0);
  cfg.eta = oracle::snap_to_gap(spectrum, 5.0);
  cfg.nslices = 3;
  cfg.seed = 5;
  std::ostringstream one, four;
  cfg.threads = 1;
  auto r1 = run_solve(a, cfg);
  write_eigen_csv(one, r1.pairs);
  cfg.threads = 4;
  auto r4 = run_solve(a, cfg);
  write_eigen_csv(four, r4.pairs);
  CHECK(one.str() == four.str());
  CHECK(r1.pairs.size() == oracle::in_range(spectrum, cfg.xi, cfg.eta).size());
}

TEST_CASE("slice failures are recorded without stopping the run") {
  auto a = gen_laplacian3d(6, 6, 6);
  RunConfig cfg;
  cfg.xi = 5.0;
  cfg.eta = 5.0 + 1e-7;
  cfg.nslices = 1;
  auto rep = run_solve(a, cfg);
  CHECK_FALSE(rep.complete());
  REQUIRE(rep.slices.size() == 1);
  CHECK(rep.slices[0].error.find("degree") != std::string::npos);
}

TEST_CASE("configuration errors") {
  auto a = gen_laplacian3d(4, 4, 4);
  RunConfig cfg;
  cfg.xi = 2.0;
  cfg.eta = 1.0;
  CHECK_THROWS_AS(run_solve(a, cfg), UsageError);
  cfg.xi = -5.0;
  cfg.eta = 1.0;
  CHECK_THROWS_AS(run_solve(a, cfg), UsageError);
  CHECK(parse_engine("subspace") == Engine::subspace);
  CHECK_THROWS_AS(parse_engine("arnoldi"), UsageError);
}

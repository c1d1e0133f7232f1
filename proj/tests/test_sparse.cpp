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
#include <numbers>
#include <random>

#include "doctest.h"
#include "oracles.hpp"
#include "sliceig/sparse.hpp"

using namespace sliceig;

namespace {

SparseSymMatrix random_sparse(std::size_t n, double density, unsigned seed) {
  std::mt19937 rng(seed);
  std::uniform_real_distribution<double> u(-1.0, 1.0), p(0.0, 1.0);
  std::vector<Triplet> t;
  for (std::size_t i = 0; i < n; ++i) {
    t.push_back({i, i, u(rng)});
    for (std::size_t j = 0; j < i; ++j)
      if (p(rng) < density) {
        const double v = u(rng);
        t.push_back({i, j, v});
        t.push_back({j, i, v});
      }
  }
  return SparseSymMatrix::from_triplets(n, std::move(t));
}

}  // namespace

TEST_CASE("identity and permutation products") {
  const std::vector<double> ones(5, 1.0);
  auto id = gen_diagonal(ones);
  Vector x = Vector::LinSpaced(5, -2.0, 2.0);
  CHECK((matvec(id, x) - x).norm() == 0.0);

  auto p = SparseSymMatrix::from_triplets(2, {{0, 1, 1.0}, {1, 0, 1.0}});
  Vector e0(2);
  e0 << 1.0, 0.0;
  Vector y = matvec(p, e0);
  CHECK(y[0] == 0.0);
  CHECK(y[1] == 1.0);
}

TEST_CASE("laplacian product matches a dense multiply") {
  auto a = gen_laplacian3d(3, 3, 3);
  Vector x = Vector::Ones(27);
  Vector y = matvec(a, x);
  Vector yd = a.to_dense() * x;
  CHECK((y - yd).norm() == doctest::Approx(0.0));
  // Row sums by stencil: 6 minus the number of in-grid neighbours.
  CHECK(y[13] == 0.0);  // centre of the cube
  CHECK(y[0] == 3.0);   // corner
}

TEST_CASE("random sparse products agree with dense to 1e-13 relative") {
  for (unsigned seed = 1; seed <= 5; ++seed) {
    const std::size_t n = 40 * seed;
    auto a = random_sparse(n, 0.1, seed);
    Vector x = Vector::Random(static_cast<Eigen::Index>(n));
    Vector y = matvec(a, x);
    Vector yd = a.to_dense() * x;
    CHECK((y - yd).norm() <= 1e-13 * yd.norm());
  }
}

TEST_CASE("matvec rejects mismatched sizes") {
  auto a = gen_laplacian3d(2, 2, 2);
  CHECK_THROWS_AS(matvec(a, Vector(Vector::Ones(7))), UsageError);
}

TEST_CASE("construction validates structure and symmetry") {
  CHECK_THROWS_AS(SparseSymMatrix::from_triplets(2, {{0, 1, 1.0}, {1, 0, 2.0}}), UsageError);
  CHECK_THROWS_AS(SparseSymMatrix::from_triplets(2, {{0, 2, 1.0}}), UsageError);
  CHECK_THROWS_AS(SparseSymMatrix::from_triplets(1, {{0, 0, std::nan("")}}), UsageError);
  CHECK_THROWS_AS(SparseSymMatrix(2, {0, 1}, {0}, {1.0}), UsageError);
  auto dup = SparseSymMatrix::from_triplets(1, {{0, 0, 1.5}, {0, 0, 2.5}});
  CHECK(dup.at(0, 0) == 4.0);
}

TEST_CASE("laplacian generator") {
  CHECK_THROWS_AS(gen_laplacian3d(0, 2, 2), UsageError);
  auto one = gen_laplacian3d(1, 1, 1);
  CHECK(one.n() == 1);
  CHECK(one.at(0, 0) == 6.0);

  auto a = gen_laplacian3d(4, 3, 5);
  CHECK(symmetry_defect(a) == 0.0);
  const auto rp = a.row_ptr();
  for (std::size_t i = 0; i < a.n(); ++i) CHECK(rp[i + 1] - rp[i] <= 7);

  auto two = gen_laplacian3d(2, 1, 1);
  auto ev = oracle::jacobi_eigenvalues(two.to_dense());
  CHECK(ev[0] == doctest::Approx(5.0));
  CHECK(ev[1] == doctest::Approx(7.0));
}

TEST_CASE("closed-form spectrum matches dense eigenvalues") {
  auto a = gen_laplacian3d(3, 2, 4);
  auto dense = oracle::jacobi_eigenvalues(a.to_dense());
  auto closed = laplacian_eigs_in(3, 2, 4, -1.0, 13.0);
  REQUIRE(closed.size() == dense.size());
  for (std::size_t i = 0; i < dense.size(); ++i) CHECK(std::abs(closed[i] - dense[i]) <= 1e-12);
}

TEST_CASE("oracle counts") {
  CHECK(laplacian_eigs_in(2, 2, 2, 0.0, 100.0).size() == 8);
  CHECK(laplacian_eigs_in(5, 6, 7, -INFINITY, INFINITY).size() == 210);
  CHECK(laplacian_eigs_in(60, 60, 60, 0.60000, 0.67568).size() == 337);
  CHECK(laplacian_eigs_in(60, 60, 60, 0.6, 1.2).size() == 3406);
  const auto all = laplacian_eigs_in(60, 60, 60, -1.0, 13.0);
  const double e = 6.0 * std::cos(std::numbers::pi / 61);
  CHECK(all.front() == doctest::Approx(6.0 - e).epsilon(1e-14));
  CHECK(all.back() == doctest::Approx(6.0 + e).epsilon(1e-14));
  // Five-decimal values, truncated rather than rounded.
  CHECK(all.front() >= 0.00795);
  CHECK(all.front() < 0.00796);
  CHECK(all.back() <= 11.99205);
  CHECK(all.back() > 11.99204);
}

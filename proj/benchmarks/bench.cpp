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

#include <benchmark/benchmark.h>

#include <cmath>
#include <random>

#include "sliceig/chebfilter.hpp"
#include "sliceig/dos_slicer.hpp"
#include "sliceig/eig_small.hpp"
#include "sliceig/orthogonalize.hpp"
#include "sliceig/sparse.hpp"

using namespace sliceig;

static void BM_Matvec(benchmark::State& state) {
  const auto g = static_cast<std::size_t>(state.range(0));
  const auto a = gen_laplacian3d(g, g, g);
  Vector x = Vector::Ones(static_cast<Eigen::Index>(a.n())), y(x.size());
  for (auto _ : state) {
    matvec(a, std::span<const double>(x.data(), a.n()), std::span<double>(y.data(), a.n()));
    benchmark::DoNotOptimize(y.data());
  }
  state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(a.nnz()));
}
BENCHMARK(BM_Matvec)->Arg(20)->Arg(40)->Arg(60);

static void BM_FilterApply(benchmark::State& state) {
  const auto a = gen_laplacian3d(20, 20, 20);
  const auto map = SpectralMap::from_bounds(0.0, 12.0);
  const int k = static_cast<int>(state.range(0));
  const PolyFilter f(k, std::acos(-0.1), Damping::lanczos_sigma, -0.12, false);
  FilterOperator op(a, map, f);
  Vector x = Vector::Ones(static_cast<Eigen::Index>(a.n())), y(x.size());
  for (auto _ : state) {
    op.apply(x, y);
    benchmark::DoNotOptimize(y.data());
  }
}
BENCHMARK(BM_FilterApply)->Arg(50)->Arg(200);

static void BM_EigProjected(benchmark::State& state) {
  const auto m = static_cast<std::size_t>(state.range(0));
  std::mt19937_64 rng(1);
  std::normal_distribution<double> n01;
  ProjectedMatrix p;
  for (std::size_t i = 0; i < m / 4; ++i) {
    p.head.push_back(n01(rng));
    p.spike.push_back(n01(rng));
  }
  for (std::size_t i = m / 4; i < m; ++i) p.alpha.push_back(n01(rng));
  for (std::size_t i = 1; i < p.alpha.size(); ++i) p.beta.push_back(std::abs(n01(rng)));
  for (auto _ : state) benchmark::DoNotOptimize(eig_projected(p).values.data());
}
BENCHMARK(BM_EigProjected)->Arg(100)->Arg(400);

static void BM_Orthogonalize(benchmark::State& state) {
  const Eigen::Index n = 8000, k = state.range(0);
  std::mt19937_64 rng(2);
  DenseBlock q = DenseBlock::Random(n, k);
  orthonormalize_columns(q, DenseBlock(n, 0), rng);
  const DenseBlock none(n, 0);
  const Vector w0 = Vector::Random(n);
  for (auto _ : state) {
    Vector w = w0;
    benchmark::DoNotOptimize(orthogonalize(w, none, q));
  }
}
BENCHMARK(BM_Orthogonalize)->Arg(100)->Arg(400);

static void BM_Balance(benchmark::State& state) {
  const int k = static_cast<int>(state.range(0));
  for (auto _ : state)
    benchmark::DoNotOptimize(balance(std::acos(0.30), std::acos(0.34), k, Damping::lanczos_sigma).theta_gamma);
}
BENCHMARK(BM_Balance)->Arg(50)->Arg(300);

static void BM_KpmDos(benchmark::State& state) {
  const auto a = gen_laplacian3d(20, 20, 20);
  const auto map = SpectralMap::from_bounds(0.0, 12.0);
  for (auto _ : state) benchmark::DoNotOptimize(kpm_dos(a, map, 80, 10, 0).moments.data());
}
BENCHMARK(BM_KpmDos)->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();

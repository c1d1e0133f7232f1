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

#include "sliceig/subspace.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <random>

#include "sliceig/orthogonalize.hpp"

namespace sliceig {

std::size_t default_block_size(std::size_t nev) noexcept {
  return static_cast<std::size_t>(std::ceil(1.1 * static_cast<double>(nev))) + 5;
}

namespace {

// The top unlocked Ritz pair counts as settled when its residual with
// respect to B is this small relative to its distance from the bar.
constexpr double kSettled = 0.05;

void fill_random(Eigen::Ref<Vector> v, std::mt19937_64& rng) {
  std::normal_distribution<double> nd;
  for (Eigen::Index i = 0; i < v.size(); ++i) v[i] = nd(rng);
}

}  // namespace

IntervalSolution solve_subspace(const SparseSymMatrix& a, const SpectralMap& map, const PolyFilter& filter,
                                double xi, double eta, const SubspaceConfig& config, const DenseBlock* x0) {
  const auto t0 = std::chrono::steady_clock::now();
  const auto n = static_cast<Eigen::Index>(a.n());
  if (n == 0) throw UsageError("solve_subspace: empty matrix");
  if (!(xi <= eta)) throw UsageError("solve_subspace: interval must satisfy xi <= eta");
  if (!(config.tol > 0.0)) throw UsageError("solve_subspace: tol must be positive");

  std::size_t s = config.s ? config.s : default_block_size(std::max<std::size_t>(config.nev, 1));
  s = std::min<std::size_t>(s, static_cast<std::size_t>(n));
  const double bar = filter.bar();

  FilterOperator fop(a, map, filter);
  std::mt19937_64 rng(config.seed);

  DenseBlock locked(n, 0);
  auto lock_vector = [&locked](const Vector& u) {
    locked.conservativeResize(Eigen::NoChange, locked.cols() + 1);
    locked.col(locked.cols() - 1) = u;
  };

  DenseBlock x(n, static_cast<Eigen::Index>(s));
  if (x0) {
    if (x0->rows() != n || x0->cols() != x.cols())
      throw UsageError("solve_subspace: warm start must be n x s");
    x = *x0;
  } else {
    for (Eigen::Index j = 0; j < x.cols(); ++j) fill_random(x.col(j), rng);
  }
  orthonormalize_columns(x, locked, rng);

  IntervalSolution sol;
  auto& st = sol.stats;
  st.degree = filter.degree();
  bool done = false;
  std::size_t pending = 0;

  for (std::size_t sweep = 1; sweep <= config.max_sweeps; ++sweep) {
    const Eigen::Index active = x.cols();
    if (active == 0) {
      done = true;
      break;
    }
    DenseBlock y(n, active);
    for (Eigen::Index j = 0; j < active; ++j) fop.apply(x.col(j), y.col(j));
    st.iterations += static_cast<std::size_t>(active);
    ++st.restarts;

    DenseBlock h = x.transpose() * y;
    h = 0.5 * (h + h.transpose()).eval();
    const auto eig = eig_symmetric(h);
    DenseBlock ritz = x * eig.vectors;
    DenseBlock britz = y * eig.vectors;
    if (config.on_sweep) config.on_sweep(sweep, eig.values);

    std::vector<bool> gone(static_cast<std::size_t>(active), false);
    pending = 0;
    for (Eigen::Index j = 0; j < active; ++j) {
      const double theta = eig.values[static_cast<std::size_t>(j)];
      if (theta < bar) break;
      Vector u = ritz.col(j).normalized();
      double lambda = 0.0, res = 0.0;
      auto cls = classify_candidate(a, u, xi, eta, config.tol, lambda, res);
      ++st.rq_matvecs;
      if (res <= config.tol) {
        // Converged: lock it, and report it only when it lies in the interval.
        lock_vector(u);
        gone[static_cast<std::size_t>(j)] = true;
        if (cls == Classification::locked) {
          normalize_sign(u);
          sol.pairs.push_back(EigResult{lambda, std::move(u), res, theta, 0});
        }
      } else if (cls == Classification::thick_restart) {
        ++pending;
      }
    }

    // Stop once the best remaining direction has settled below the bar.
    Eigen::Index top = -1;
    for (Eigen::Index j = 0; j < active && top < 0; ++j)
      if (!gone[static_cast<std::size_t>(j)]) top = j;
    if (top >= 0) {
      const double theta = eig.values[static_cast<std::size_t>(top)];
      const double rb = (britz.col(top) - theta * ritz.col(top)).norm();
      if (sweep >= 2 && theta < bar && rb <= kSettled * (bar - theta)) {
        done = true;
        break;
      }
    } else if (locked.cols() >= n) {
      done = true;
      break;
    }

    const Eigen::Index width = std::min<Eigen::Index>(static_cast<Eigen::Index>(s), n - locked.cols());
    DenseBlock next(n, width);
    Eigen::Index c = 0;
    for (Eigen::Index j = 0; j < active && c < width; ++j)
      if (!gone[static_cast<std::size_t>(j)]) next.col(c++) = britz.col(j);
    for (; c < width; ++c) fill_random(next.col(c), rng);
    orthonormalize_columns(next, locked, rng);
    x = std::move(next);
  }

  std::sort(sol.pairs.begin(), sol.pairs.end(),
            [](const EigResult& p, const EigResult& q) { return p.lambda < q.lambda; });
  double mx = 0.0, sum = 0.0;
  for (const auto& p : sol.pairs) {
    mx = std::max(mx, p.residual);
    sum += p.residual;
  }
  st.residual_max = mx;
  st.residual_avg = sol.pairs.empty() ? 0.0 : sum / static_cast<double>(sol.pairs.size());
  st.filter_matvecs = fop.matvecs();
  st.matvec_seconds = fop.matvec_seconds();
  st.total_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  if (!done) throw PartialResultError(std::move(sol), std::max<std::size_t>(pending, 1));
  return sol;
}

}  // namespace sliceig

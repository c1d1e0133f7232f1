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

#include "sliceig/trlanczos.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <utility>

namespace sliceig {

namespace {

using Clock = std::chrono::steady_clock;

// Relative size below which a new Lanczos direction counts as a breakdown.
constexpr double kBreakdownRel = 1e-12;

}  // namespace

void normalize_sign(Eigen::Ref<Vector> v) {
  if (v.size() == 0) return;
  Eigen::Index imax = 0;
  v.cwiseAbs().maxCoeff(&imax);
  if (v[imax] < 0) v = -v;
}

LanczosProcess::LanczosProcess(Eigen::Index n, std::size_t max_basis, LinearOperator op, std::uint64_t seed)
    : n_(n), max_basis_(max_basis), op_(std::move(op)), rng_(seed) {
  if (n <= 0) throw UsageError("LanczosProcess: empty problem");
  if (max_basis == 0) throw UsageError("LanczosProcess: basis size must be positive");
  max_basis_ = std::min<std::size_t>(max_basis_, static_cast<std::size_t>(n));
  q_.resize(n, static_cast<Eigen::Index>(max_basis_) + 1);
  u_.resize(n, 0);
  w_.resize(n);
}

void LanczosProcess::start(const Vector* q1) {
  k_ = 0;
  l_ = 0;
  proj_ = ProjectedMatrix{};
  beta_next_ = 0.0;
  has_next_ = false;
  auto empty = q_.leftCols(0);
  if (q1) {
    if (q1->size() != n_) throw UsageError("LanczosProcess: start vector has wrong size");
    Vector v = *q1;
    double nrm = orthogonalize(v, locked(), empty);
    if (nrm > kBreakdownRel * std::max(1.0, q1->norm())) {
      q_.col(0) = v / nrm;
      has_next_ = true;
      return;
    }
  }
  if (auto r = random_orthogonal_unit(n_, rng_, locked(), empty)) {
    q_.col(0) = *r;
    has_next_ = true;
  }
}

bool LanczosProcess::step() {
  if (!has_next_ || k_ >= max_basis_) return false;
  const auto k = static_cast<Eigen::Index>(k_);
  auto q = q_.col(k);
  op_(q, w_);
  const double wnorm0 = w_.norm();

  double alpha = 0.0;
  if (l_ > 0 && proj_.alpha.empty()) {
    // First step after a thick restart: the coupling to the restarted
    // block replaces the usual beta_k q_{k-1} term.
    alpha = q.dot(w_);
    w_.noalias() -= alpha * q;
    Eigen::Map<const Vector> s(proj_.spike.data(), static_cast<Eigen::Index>(proj_.spike.size()));
    w_.noalias() -= q_.leftCols(static_cast<Eigen::Index>(l_)) * s;
  } else {
    if (!proj_.alpha.empty()) w_.noalias() -= beta_next_ * q_.col(k - 1);
    alpha = q.dot(w_);
    w_.noalias() -= alpha * q;
  }
  double beta = orthogonalize(w_, locked(), q_.leftCols(k + 1));

  if (!proj_.alpha.empty()) proj_.beta.push_back(beta_next_);
  proj_.alpha.push_back(alpha);
  ++k_;
  ++steps_;

  auto next = q_.col(k + 1);
  if (beta > kBreakdownRel * std::max(wnorm0, 1e-300) && beta > 0.0) {
    next = w_ / beta;
    has_next_ = true;
  } else {
    ++breakdowns_;
    beta = 0.0;
    auto r = random_orthogonal_unit(n_, rng_, locked(), q_.leftCols(k + 1));
    has_next_ = r.has_value();
    if (has_next_) next = *r;
  }
  beta_next_ = beta;
  return true;
}

std::size_t LanczosProcess::extend(std::size_t to) {
  std::size_t taken = 0;
  while (k_ < to && step()) ++taken;
  return taken;
}

void LanczosProcess::thick_restart(const DenseBlock& vectors, std::span<const double> thetas,
                                   std::span<const double> s) {
  const auto l = vectors.cols();
  if (vectors.rows() != n_ || thetas.size() != static_cast<std::size_t>(l) ||
      s.size() != static_cast<std::size_t>(l))
    throw UsageError("thick_restart: inconsistent restart data");
  if (static_cast<std::size_t>(l) >= max_basis_) throw UsageError("thick_restart: restart block fills the basis");

  Vector next;
  bool have = has_next_;
  if (have) next = q_.col(static_cast<Eigen::Index>(k_));
  q_.leftCols(l) = vectors;
  if (!have) {
    auto r = random_orthogonal_unit(n_, rng_, locked(), q_.leftCols(l));
    have = r.has_value();
    if (have) next = std::move(*r);
  }
  if (have) q_.col(l) = next;
  has_next_ = have;

  k_ = static_cast<std::size_t>(l);
  l_ = k_;
  proj_.head.assign(thetas.begin(), thetas.end());
  proj_.spike.assign(s.begin(), s.end());
  proj_.alpha.clear();
  proj_.beta.clear();
  beta_next_ = 0.0;
}

void LanczosProcess::lock(const Eigen::Ref<const Vector>& u) {
  if (u.size() != n_) throw UsageError("lock: vector has wrong size");
  const auto c = static_cast<Eigen::Index>(lock_);
  if (c == u_.cols()) u_.conservativeResize(Eigen::NoChange, std::max<Eigen::Index>(8, 2 * c));
  u_.col(c) = u;
  ++lock_;
}

double LanczosProcess::orthogonality_error() const {
  const auto lc = static_cast<Eigen::Index>(lock_);
  const auto kc = static_cast<Eigen::Index>(k_) + (has_next_ ? 1 : 0);
  DenseBlock all(n_, lc + kc);
  all.leftCols(lc) = locked();
  all.rightCols(kc) = q_.leftCols(kc);
  DenseBlock g = all.transpose() * all;
  g.diagonal().array() -= 1.0;
  return g.size() ? g.cwiseAbs().maxCoeff() : 0.0;
}

PartialResultError::PartialResultError(IntervalSolution partial, std::size_t unconverged)
    : NumericalError("iteration budget exhausted with " + std::to_string(unconverged) +
                     " unconverged candidate(s)"),
      partial_(std::move(partial)),
      unconverged_(unconverged) {}

Classification classify_candidate(const SparseSymMatrix& a, const Eigen::Ref<const Vector>& u, double xi,
                                  double eta, double tol, double& lambda, double& residual) {
  Vector au = matvec(a, Vector(u));
  lambda = u.dot(au);
  residual = (au - lambda * u).norm();
  if (lambda < xi || lambda > eta) return Classification::rejected;
  return residual <= tol ? Classification::locked : Classification::thick_restart;
}

namespace {

void finish_stats(IntervalSolution& sol) {
  auto& pairs = sol.pairs;
  std::sort(pairs.begin(), pairs.end(), [](const EigResult& x, const EigResult& y) { return x.lambda < y.lambda; });
  double mx = 0.0, sum = 0.0;
  for (const auto& p : pairs) {
    mx = std::max(mx, p.residual);
    sum += p.residual;
  }
  sol.stats.residual_max = mx;
  sol.stats.residual_avg = pairs.empty() ? 0.0 : sum / static_cast<double>(pairs.size());
}

}  // namespace

IntervalSolution solve_interval(const SparseSymMatrix& a, const SpectralMap& map, const PolyFilter& filter,
                                double xi, double eta, const SolverConfig& config) {
  const auto t0 = Clock::now();
  const std::size_t n = a.n();
  if (n == 0) throw UsageError("solve_interval: empty matrix");
  if (!(xi <= eta)) throw UsageError("solve_interval: interval must satisfy xi <= eta");
  if (!(config.tol > 0.0)) throw UsageError("solve_interval: tol must be positive");

  const std::size_t nev = std::max<std::size_t>(config.nev, 1);
  std::size_t m = config.m ? config.m : std::max(4 * nev, nev + 40);
  m = std::clamp<std::size_t>(m, 2, n);
  const std::size_t max_its = config.max_its ? config.max_its : std::max(16 * nev, 4 * m);
  const double bar = filter.bar();

  FilterOperator fop(a, map, filter);
  LanczosProcess lp(static_cast<Eigen::Index>(n), m,
                    [&fop](const Eigen::Ref<const Vector>& in, Eigen::Ref<Vector> out) { fop.apply(in, out); },
                    config.seed);
  lp.start();

  IntervalSolution sol;
  auto& st = sol.stats;
  st.degree = filter.degree();
  std::size_t its = 0;

  auto snapshot = [&] {
    st.iterations = its;
    st.filter_matvecs = fop.matvecs();
    st.matvec_seconds = fop.matvec_seconds();
    st.total_seconds = std::chrono::duration<double>(Clock::now() - t0).count();
  };

  for (;;) {
    const std::size_t l = lp.size();
    const std::size_t its_at_start = its;
    const std::size_t locked_at_start = lp.locked_count();
    const std::size_t target = std::min(m, n - lp.locked_count());
    bool early = false;
    while (lp.size() < target && its < max_its && lp.step()) {
      ++its;
      const std::size_t k = lp.size();
      if (its % config.ncycle == 0 && k >= l + config.ntest && k < target) {
        const auto ev = eig_projected_last_row(lp.projected());
        double tnorm = 0.0;
        for (double v : ev.values) tnorm = std::max(tnorm, std::abs(v));
        long converged = 0;
        for (std::size_t j = 0; j < ev.values.size() && ev.values[j] >= bar; ++j)
          if (std::abs(lp.residual_beta() * ev.last_row[j]) <= config.tol * tnorm) ++converged;
        const long wanted = std::max(1L, static_cast<long>(nev) - static_cast<long>(lp.locked_count()));
        // The top Ritz value settled below the bar: nothing is left above it.
        const bool exhausted =
            !ev.values.empty() && ev.values[0] + std::abs(lp.residual_beta() * ev.last_row[0]) < bar;
        if (converged >= wanted || exhausted) {
          early = true;
          break;
        }
      }
    }
    if (early) ++st.early_restarts;

    const std::size_t k = lp.size();
    if (k == 0) break;
    const auto eig = eig_projected(lp.projected());
    std::size_t nc = 0;
    while (nc < eig.values.size() && eig.values[nc] >= bar) ++nc;
    if (nc == 0) break;

    const auto kc = static_cast<Eigen::Index>(k);
    DenseBlock ritz = lp.basis() * eig.vectors.topLeftCorner(kc, static_cast<Eigen::Index>(nc));

    std::vector<Eigen::Index> keep;
    for (std::size_t j = 0; j < nc; ++j) {
      auto jc = static_cast<Eigen::Index>(j);
      Vector u = ritz.col(jc);
      u.normalize();
      if (lp.locked_count() > 0 &&
          (lp.locked().transpose() * u).norm() >= config.duplicate_overlap)
        continue;
      double lambda = 0.0, res = 0.0;
      auto cls = classify_candidate(a, u, xi, eta, config.tol, lambda, res);
      ++st.rq_matvecs;
      if (cls == Classification::locked) {
        lp.lock(u);
        normalize_sign(u);
        sol.pairs.push_back(EigResult{lambda, std::move(u), res, eig.values[j], 0});
      } else if (cls == Classification::thick_restart) {
        keep.push_back(jc);
      }
    }
    if (keep.empty()) {
      // Lanczos from a single vector sees one copy of each repeated
      // eigenvalue; a fresh start orthogonal to the locked block confirms
      // nothing is left before stopping.
      if (lp.locked_count() == locked_at_start || its >= max_its || lp.locked_count() >= n) break;
      lp.start();
      ++st.restarts;
      if (config.on_restart) config.on_restart(lp);
      continue;
    }
    const bool stalled = its == its_at_start && lp.locked_count() == locked_at_start;
    if (its >= max_its || stalled) {
      snapshot();
      finish_stats(sol);
      throw PartialResultError(std::move(sol), keep.size());
    }

    // The restart block must leave room for at least one new direction.
    const std::size_t room = std::min(m, n - lp.locked_count());
    if (room <= 1) {
      snapshot();
      finish_stats(sol);
      throw PartialResultError(std::move(sol), keep.size());
    }
    if (keep.size() > room - 1) keep.resize(room - 1);

    const auto lk = static_cast<Eigen::Index>(keep.size());
    DenseBlock vecs(static_cast<Eigen::Index>(n), lk);
    std::vector<double> thetas(keep.size()), s(keep.size());
    for (Eigen::Index i = 0; i < lk; ++i) {
      const auto j = keep[static_cast<std::size_t>(i)];
      vecs.col(i) = ritz.col(j).normalized();
      thetas[static_cast<std::size_t>(i)] = eig.values[static_cast<std::size_t>(j)];
      s[static_cast<std::size_t>(i)] = lp.residual_beta() * eig.vectors(kc - 1, j);
    }
    lp.thick_restart(vecs, thetas, s);
    ++st.restarts;
    if (config.on_restart) config.on_restart(lp);
  }

  snapshot();
  finish_stats(sol);
  return sol;
}

}  // namespace sliceig

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

// Reference computations written independently of the library so tests do
// not check the code against itself.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <functional>
#include <numbers>
#include <random>
#include <vector>

#include <Eigen/Dense>

namespace oracle {

/// Cyclic Jacobi rotations on a dense symmetric matrix. Ascending values.
inline std::vector<double> jacobi_eigenvalues(Eigen::MatrixXd a, double tol = 1e-15) {
  const auto n = a.rows();
  for (int sweep = 0; sweep < 100; ++sweep) {
    double off = 0.0;
    for (Eigen::Index i = 0; i < n; ++i)
      for (Eigen::Index j = i + 1; j < n; ++j) off += a(i, j) * a(i, j);
    if (std::sqrt(off) <= tol * std::max(1.0, a.norm())) break;
    for (Eigen::Index p = 0; p < n; ++p) {
      for (Eigen::Index q = p + 1; q < n; ++q) {
        if (a(p, q) == 0.0) continue;
        const double tau = (a(q, q) - a(p, p)) / (2.0 * a(p, q));
        const double t = (tau >= 0 ? 1.0 : -1.0) / (std::abs(tau) + std::sqrt(1.0 + tau * tau));
        const double c = 1.0 / std::sqrt(1.0 + t * t), s = t * c;
        for (Eigen::Index k = 0; k < n; ++k) {
          const double akp = a(k, p), akq = a(k, q);
          a(k, p) = c * akp - s * akq;
          a(k, q) = s * akp + c * akq;
        }
        for (Eigen::Index k = 0; k < n; ++k) {
          const double apk = a(p, k), aqk = a(q, k);
          a(p, k) = c * apk - s * aqk;
          a(q, k) = s * apk + c * aqk;
        }
      }
    }
  }
  std::vector<double> ev(static_cast<std::size_t>(n));
  for (Eigen::Index i = 0; i < n; ++i) ev[static_cast<std::size_t>(i)] = a(i, i);
  std::sort(ev.begin(), ev.end());
  return ev;
}

inline Eigen::MatrixXd random_symmetric(Eigen::Index n, unsigned seed) {
  std::mt19937 rng(seed);
  std::normal_distribution<double> nd;
  Eigen::MatrixXd a(n, n);
  for (Eigen::Index i = 0; i < n; ++i)
    for (Eigen::Index j = 0; j <= i; ++j) a(i, j) = a(j, i) = nd(rng);
  return a;
}

/// T_j(t) straight from the trigonometric definition.
inline double cheb(int j, double t) {
  t = std::clamp(t, -1.0, 1.0);
  return std::cos(j * std::acos(t));
}

/// Composite Simpson rule on [a, b] with `n` (even) panels.
inline double simpson(const std::function<double(double)>& f, double a, double b, int n) {
  const double h = (b - a) / n;
  double s = f(a) + f(b);
  for (int i = 1; i < n; ++i) s += f(a + i * h) * (i % 2 ? 4.0 : 2.0);
  return s * h / 3.0;
}

/// Every eigenvalue of the Dirichlet 7-point Laplacian on an nx x ny x nz
/// grid, ascending.
inline std::vector<double> laplacian_spectrum(int nx, int ny, int nz) {
  const double pi = std::numbers::pi;
  std::vector<double> ev;
  ev.reserve(static_cast<std::size_t>(nx) * ny * nz);
  for (int i = 1; i <= nx; ++i)
    for (int j = 1; j <= ny; ++j)
      for (int k = 1; k <= nz; ++k)
        ev.push_back(6.0 - 2.0 * std::cos(i * pi / (nx + 1)) - 2.0 * std::cos(j * pi / (ny + 1)) -
                     2.0 * std::cos(k * pi / (nz + 1)));
  std::sort(ev.begin(), ev.end());
  return ev;
}

inline std::vector<double> in_range(const std::vector<double>& ev, double lo, double hi) {
  std::vector<double> out;
  for (double x : ev)
    if (x >= lo && x <= hi) out.push_back(x);
  return out;
}

/// Moves x to the middle of the gap between the eigenvalues around it, so
/// interval ends never sit on (or within rounding of) an eigenvalue.
inline double snap_to_gap(const std::vector<double>& ev, double x) {
  auto it = std::lower_bound(ev.begin(), ev.end(), x);
  // Step over the cluster of numerically equal values around x.
  while (it != ev.end() && it != ev.begin() && *it - *(it - 1) < 1e-9) ++it;
  if (it == ev.begin() || it == ev.end()) return x;
  return 0.5 * (*(it - 1) + *it);
}

}  // namespace oracle

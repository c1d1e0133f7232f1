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

#include "sliceig/eig_small.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <string>

namespace sliceig {

DenseBlock ProjectedMatrix::to_dense() const {
  const auto l = static_cast<Eigen::Index>(head.size());
  const auto m = static_cast<Eigen::Index>(size());
  DenseBlock t = DenseBlock::Zero(m, m);
  for (Eigen::Index i = 0; i < l; ++i) {
    t(i, i) = head[static_cast<std::size_t>(i)];
    if (l < m) {
      t(i, l) = spike[static_cast<std::size_t>(i)];
      t(l, i) = spike[static_cast<std::size_t>(i)];
    }
  }
  for (std::size_t j = 0; j < alpha.size(); ++j) {
    const auto p = l + static_cast<Eigen::Index>(j);
    t(p, p) = alpha[j];
    if (j + 1 < alpha.size()) {
      t(p, p + 1) = beta[j];
      t(p + 1, p) = beta[j];
    }
  }
  return t;
}

namespace {

using Index = Eigen::Index;

// Householder reduction of the symmetric matrix held in `v` (lower triangle
// read) to tridiagonal form, working from the last row upwards so that the
// last row of the orthogonal factor stays e_{n-1}. On return d holds the
// diagonal and e[i] the coupling between i-1 and i (e[0] = 0). With
// `accumulate` the orthogonal factor overwrites v; otherwise v is scratch.
//
// Rows whose only nonzero left of the diagonal is the subdiagonal are
// skipped, so tridiagonal tails cost O(n) per row.
void tridiagonalize(DenseBlock& v, std::vector<double>& d, std::vector<double>& e, bool accumulate) {
  const Index n = v.rows();
  d.assign(static_cast<std::size_t>(n), 0.0);
  e.assign(static_cast<std::size_t>(n), 0.0);
  for (Index j = 0; j < n; ++j) d[j] = v(n - 1, j);

  for (Index i = n - 1; i > 0; --i) {
    double scale = 0.0;
    double h = 0.0;
    for (Index k = 0; k + 1 < i; ++k) scale += std::abs(d[k]);
    if (scale == 0.0) {
      // Already tridiagonal in this row: no reflector.
      e[i] = d[i - 1];
      for (Index j = 0; j < i; ++j) {
        d[j] = v(i - 1, j);
        v(i, j) = 0.0;
        v(j, i) = 0.0;
      }
      d[i] = 0.0;
      continue;
    }
    scale += std::abs(d[i - 1]);
    for (Index k = 0; k < i; ++k) {
      d[k] /= scale;
      h += d[k] * d[k];
    }
    double f = d[i - 1];
    double g = std::sqrt(h);
    if (f > 0) g = -g;
    e[i] = scale * g;
    h -= f * g;
    d[i - 1] = f - g;
    for (Index j = 0; j < i; ++j) e[j] = 0.0;

    for (Index j = 0; j < i; ++j) {
      f = d[j];
      v(j, i) = f;
      g = e[j] + v(j, j) * f;
      for (Index k = j + 1; k <= i - 1; ++k) {
        g += v(k, j) * d[k];
        e[k] += v(k, j) * f;
      }
      e[j] = g;
    }
    f = 0.0;
    for (Index j = 0; j < i; ++j) {
      e[j] /= h;
      f += e[j] * d[j];
    }
    const double hh = f / (h + h);
    for (Index j = 0; j < i; ++j) e[j] -= hh * d[j];
    for (Index j = 0; j < i; ++j) {
      f = d[j];
      g = e[j];
      for (Index k = j; k <= i - 1; ++k) v(k, j) -= (f * e[k] + g * d[k]);
      d[j] = v(i - 1, j);
      v(i, j) = 0.0;
    }
    d[i] = h;
  }

  if (!accumulate) {
    // Diagonal of the reduced matrix sits on v's diagonal.
    for (Index i = 0; i < n; ++i) d[i] = v(i, i);
    e[0] = 0.0;
    return;
  }

  for (Index i = 0; i + 1 < n; ++i) {
    v(n - 1, i) = v(i, i);
    v(i, i) = 1.0;
    const double h = d[i + 1];
    if (h != 0.0) {
      for (Index k = 0; k <= i; ++k) d[k] = v(k, i + 1) / h;
      for (Index j = 0; j <= i; ++j) {
        double g = 0.0;
        for (Index k = 0; k <= i; ++k) g += v(k, i + 1) * v(k, j);
        for (Index k = 0; k <= i; ++k) v(k, j) -= g * d[k];
      }
    }
    for (Index k = 0; k <= i; ++k) v(k, i + 1) = 0.0;
  }
  for (Index j = 0; j < n; ++j) {
    d[j] = v(n - 1, j);
    v(n - 1, j) = 0.0;
  }
  v(n - 1, n - 1) = 1.0;
  e[0] = 0.0;
}

// Implicit-shift QL on the tridiagonal (d, e). Rotations are applied to the
// columns of `z` when given, and to the row vector `row` when given.
void tridiagonal_ql(std::vector<double>& d, std::vector<double>& e, DenseBlock* z,
                    std::vector<double>* row) {
  const Index n = static_cast<Index>(d.size());
  if (n == 0) return;
  for (Index i = 1; i < n; ++i) e[i - 1] = e[i];
  e[n - 1] = 0.0;

  const double eps = std::numeric_limits<double>::epsilon();
  double f = 0.0;
  double tst1 = 0.0;
  for (Index l = 0; l < n; ++l) {
    tst1 = std::max(tst1, std::abs(d[l]) + std::abs(e[l]));
    Index m = l;
    while (m < n - 1 && std::abs(e[m]) > eps * tst1) ++m;
    if (m > l) {
      int iter = 0;
      do {
        if (++iter > 60)
          throw NumericalError("tridiagonal QL did not converge for eigenvalue " + std::to_string(l));
        double g = d[l];
        double p = (d[l + 1] - g) / (2.0 * e[l]);
        double r = std::hypot(p, 1.0);
        if (p < 0) r = -r;
        d[l] = e[l] / (p + r);
        d[l + 1] = e[l] * (p + r);
        const double dl1 = d[l + 1];
        double h = g - d[l];
        for (Index i = l + 2; i < n; ++i) d[i] -= h;
        f += h;

        p = d[m];
        double c = 1.0, c2 = 1.0, c3 = 1.0;
        const double el1 = e[l + 1];
        double s = 0.0, s2 = 0.0;
        for (Index i = m - 1; i >= l; --i) {
          c3 = c2;
          c2 = c;
          s2 = s;
          g = c * e[i];
          h = c * p;
          r = std::hypot(p, e[i]);
          e[i + 1] = s * r;
          s = e[i] / r;
          c = p / r;
          p = c * d[i] - s * g;
          d[i + 1] = h + s * (c * g + s * d[i]);
          if (z) {
            auto zi = z->col(i);
            auto zi1 = z->col(i + 1);
            for (Index k = 0; k < n; ++k) {
              const double t = zi1[k];
              zi1[k] = s * zi[k] + c * t;
              zi[k] = c * zi[k] - s * t;
            }
          }
          if (row) {
            auto& rw = *row;
            const double t = rw[i + 1];
            rw[i + 1] = s * rw[i] + c * t;
            rw[i] = c * rw[i] - s * t;
          }
        }
        p = -s * s2 * c3 * el1 * e[l] / dl1;
        e[l] = s * p;
        d[l] = c * p;
      } while (std::abs(e[l]) > eps * tst1);
    }
    d[l] += f;
    e[l] = 0.0;
  }
}

std::vector<Index> descending_order(const std::vector<double>& d) {
  std::vector<Index> order(d.size());
  std::iota(order.begin(), order.end(), Index{0});
  std::stable_sort(order.begin(), order.end(), [&](Index a, Index b) { return d[a] > d[b]; });
  return order;
}

}  // namespace

SymEigen eig_symmetric(const DenseBlock& a) {
  if (a.rows() != a.cols()) throw UsageError("eig_symmetric: matrix must be square");
  const Index n = a.rows();
  SymEigen out;
  if (n == 0) return out;
  DenseBlock v = a;
  std::vector<double> d, e;
  tridiagonalize(v, d, e, true);
  tridiagonal_ql(d, e, &v, nullptr);
  const auto order = descending_order(d);
  out.values.resize(static_cast<std::size_t>(n));
  out.vectors.resize(n, n);
  for (Index j = 0; j < n; ++j) {
    out.values[static_cast<std::size_t>(j)] = d[order[j]];
    out.vectors.col(j) = v.col(order[j]);
  }
  return out;
}

SymEigen eig_projected(const ProjectedMatrix& m) { return eig_symmetric(m.to_dense()); }

SymEigenLastRow eig_projected_last_row(const ProjectedMatrix& m) {
  SymEigenLastRow out;
  const Index n = static_cast<Index>(m.size());
  if (n == 0) return out;
  DenseBlock v = m.to_dense();
  std::vector<double> d, e;
  tridiagonalize(v, d, e, false);
  std::vector<double> row(static_cast<std::size_t>(n), 0.0);
  row.back() = 1.0;
  tridiagonal_ql(d, e, nullptr, &row);
  const auto order = descending_order(d);
  out.values.resize(static_cast<std::size_t>(n));
  out.last_row.resize(static_cast<std::size_t>(n));
  for (Index j = 0; j < n; ++j) {
    out.values[static_cast<std::size_t>(j)] = d[order[j]];
    out.last_row[static_cast<std::size_t>(j)] = row[order[j]];
  }
  return out;
}

namespace {

// Parlett-Reinsch balancing by powers of two.
void balance_matrix(DenseBlock& a) {
  const Index n = a.rows();
  const double radix = 2.0;
  const double sqrdx = radix * radix;
  bool done = false;
  while (!done) {
    done = true;
    for (Index i = 0; i < n; ++i) {
      double r = 0.0, c = 0.0;
      for (Index j = 0; j < n; ++j)
        if (j != i) {
          c += std::abs(a(j, i));
          r += std::abs(a(i, j));
        }
      if (c == 0.0 || r == 0.0) continue;
      double g = r / radix;
      double f = 1.0;
      const double s = c + r;
      while (c < g) {
        f *= radix;
        c *= sqrdx;
      }
      g = r * radix;
      while (c > g) {
        f /= radix;
        c /= sqrdx;
      }
      if ((c + r) / f < 0.95 * s) {
        done = false;
        g = 1.0 / f;
        a.row(i) *= g;
        a.col(i) *= f;
      }
    }
  }
}

// Householder reflector P = I - tau u u^T with u(0) = 1 mapping x onto a
// multiple of e_0. Returns false when x is already zero below its head.
bool make_reflector(Eigen::Ref<Eigen::VectorXd> x, double& tau) {
  const double tail = x.tail(x.size() - 1).squaredNorm();
  if (tail == 0.0) {
    tau = 0.0;
    return false;
  }
  const double alpha = x(0);
  const double norm = std::sqrt(alpha * alpha + tail);
  const double beta = alpha > 0 ? -norm : norm;
  const double v0 = alpha - beta;
  x.tail(x.size() - 1) /= v0;
  x(0) = 1.0;
  tau = (beta - alpha) / beta;
  return true;
}

void to_hessenberg(DenseBlock& a) {
  const Index n = a.rows();
  Eigen::VectorXd u;
  for (Index k = 0; k + 2 < n; ++k) {
    u = a.col(k).segment(k + 1, n - k - 1);
    double tau = 0.0;
    if (!make_reflector(u, tau)) continue;
    // Left: rows k+1.., right: columns k+1..
    Eigen::RowVectorXd w = tau * (u.transpose() * a.bottomRows(n - k - 1));
    a.bottomRows(n - k - 1).noalias() -= u * w;
    Eigen::VectorXd w2 = tau * (a.rightCols(n - k - 1) * u);
    a.rightCols(n - k - 1).noalias() -= w2 * u.transpose();
    a.col(k).segment(k + 2, n - k - 2).setZero();
  }
}

void small_reflect_rows(DenseBlock& h, Index r0, Index len, const double* u, double tau, Index c0, Index c1) {
  for (Index j = c0; j <= c1; ++j) {
    double s = 0.0;
    for (Index t = 0; t < len; ++t) s += u[t] * h(r0 + t, j);
    s *= tau;
    for (Index t = 0; t < len; ++t) h(r0 + t, j) -= s * u[t];
  }
}

void small_reflect_cols(DenseBlock& h, Index c0, Index len, const double* u, double tau, Index r0, Index r1) {
  for (Index i = r0; i <= r1; ++i) {
    double s = 0.0;
    for (Index t = 0; t < len; ++t) s += h(i, c0 + t) * u[t];
    s *= tau;
    for (Index t = 0; t < len; ++t) h(i, c0 + t) -= s * u[t];
  }
}

// Reflector for a 2- or 3-vector, u(0) = 1.
bool small_reflector(double* x, Index len, double& tau) {
  Eigen::Map<Eigen::VectorXd> v(x, len);
  return make_reflector(v, tau);
}

}  // namespace

std::vector<std::complex<double>> eig_hessenberg(const DenseBlock& input) {
  if (input.rows() != input.cols()) throw UsageError("eig_hessenberg: matrix must be square");
  const Index n = input.rows();
  std::vector<std::complex<double>> out;
  out.reserve(static_cast<std::size_t>(n));
  if (n == 0) return out;
  if (!input.allFinite()) throw NumericalError("eig_hessenberg: non-finite entries");

  DenseBlock h = input;
  balance_matrix(h);
  to_hessenberg(h);

  const double eps = std::numeric_limits<double>::epsilon();
  const double norm = h.cwiseAbs().sum();
  Index hi = n - 1;
  int its = 0;
  int total_its = 0;
  const int max_total = 40 * static_cast<int>(n) + 100;

  while (hi >= 0) {
    // Find the start of the trailing unreduced block.
    Index l = hi;
    while (l > 0) {
      double s = std::abs(h(l - 1, l - 1)) + std::abs(h(l, l));
      if (s == 0.0) s = norm;
      if (std::abs(h(l, l - 1)) <= eps * s) {
        h(l, l - 1) = 0.0;
        break;
      }
      --l;
    }

    if (l == hi) {
      out.emplace_back(h(hi, hi), 0.0);
      --hi;
      its = 0;
      continue;
    }
    if (l == hi - 1) {
      const double a = h(hi - 1, hi - 1), b = h(hi - 1, hi);
      const double c = h(hi, hi - 1), d = h(hi, hi);
      const double p = 0.5 * (a - d);
      const double disc = p * p + b * c;
      const double mid = 0.5 * (a + d);
      if (disc >= 0.0) {
        const double r = std::sqrt(disc);
        const double z = p >= 0 ? p + r : p - r;
        const double l1 = d + z;
        const double l2 = z != 0.0 ? d - b * c / z : d;
        out.emplace_back(l1, 0.0);
        out.emplace_back(l2, 0.0);
      } else {
        const double r = std::sqrt(-disc);
        out.emplace_back(mid, r);
        out.emplace_back(mid, -r);
      }
      hi -= 2;
      its = 0;
      continue;
    }

    if (++total_its > max_total || ++its > 60)
      throw NumericalError("eig_hessenberg: Francis QR did not converge");

    double shift_sum, shift_prod;
    if (its % 11 == 10) {
      const double s = std::abs(h(hi, hi - 1)) + std::abs(h(hi - 1, hi - 2));
      shift_sum = 1.5 * s;
      shift_prod = s * s;
    } else {
      shift_sum = h(hi - 1, hi - 1) + h(hi, hi);
      shift_prod = h(hi - 1, hi - 1) * h(hi, hi) - h(hi - 1, hi) * h(hi, hi - 1);
    }

    double v[3];
    v[0] = h(l, l) * h(l, l) + h(l, l + 1) * h(l + 1, l) - shift_sum * h(l, l) + shift_prod;
    v[1] = h(l + 1, l) * (h(l, l) + h(l + 1, l + 1) - shift_sum);
    v[2] = h(l + 1, l) * h(l + 2, l + 1);

    for (Index k = l; k <= hi - 2; ++k) {
      double tau = 0.0;
      double u[3] = {v[0], v[1], v[2]};
      if (small_reflector(u, 3, tau)) {
        const Index c0 = k > l ? k - 1 : l;
        small_reflect_rows(h, k, 3, u, tau, c0, hi);
        small_reflect_cols(h, k, 3, u, tau, l, std::min(k + 3, hi));
        if (k > l) {
          h(k + 1, k - 1) = 0.0;
          h(k + 2, k - 1) = 0.0;
        }
      }
      v[0] = h(k + 1, k);
      v[1] = h(k + 2, k);
      v[2] = k + 3 <= hi ? h(k + 3, k) : 0.0;
    }
    // Final 2x2 reflector restoring Hessenberg form at the bottom.
    {
      const Index k = hi - 1;
      double tau = 0.0;
      double u[2] = {v[0], v[1]};
      if (small_reflector(u, 2, tau)) {
        small_reflect_rows(h, k, 2, u, tau, k - 1, hi);
        small_reflect_cols(h, k, 2, u, tau, l, hi);
        h(k + 1, k - 1) = 0.0;
      }
    }
  }
  return out;
}

}  // namespace sliceig

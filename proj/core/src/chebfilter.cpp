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

#include "sliceig/chebfilter.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <limits>
#include <numbers>
#include <sstream>

#include "sliceig/eig_small.hpp"

namespace sliceig {

namespace {
constexpr double kPi = std::numbers::pi;
constexpr double kNewtonTol = 1e-12;

double clamp_unit(double t) { return std::clamp(t, -1.0, 1.0); }

// b_j = ghat_j [cos(j theta_xi) - cos(j theta_eta)], with ghat_0 = g_0 / 2.
std::vector<double> balance_terms(double theta_xi, double theta_eta, int k, Damping damping) {
  auto g = damping_coeffs(k, damping);
  g[0] *= 0.5;
  std::vector<double> b(g.size());
  for (int j = 0; j <= k; ++j) b[j] = g[j] * (std::cos(j * theta_xi) - std::cos(j * theta_eta));
  return b;
}

double abs_sum(const std::vector<double>& b) {
  double s = 0.0;
  for (double x : b) s += std::abs(x);
  return s;
}
}  // namespace

std::string to_string(Damping d) {
  switch (d) {
    case Damping::none: return "none";
    case Damping::jackson: return "jackson";
    case Damping::lanczos_sigma: return "sigma";
  }
  return "unknown";
}

Damping parse_damping(const std::string& s) {
  if (s == "none") return Damping::none;
  if (s == "jackson") return Damping::jackson;
  if (s == "sigma" || s == "lanczos_sigma") return Damping::lanczos_sigma;
  throw UsageError("unknown damping '" + s + "' (expected none, jackson or sigma)");
}

std::vector<double> jackson_coeffs(int k) {
  if (k < 0) throw UsageError("jackson_coeffs: negative degree");
  const double a = kPi / (k + 2);
  const double denom = (k + 2) * std::sin(a);
  std::vector<double> g(static_cast<std::size_t>(k) + 1);
  for (int j = 0; j <= k; ++j)
    g[j] = std::sin((j + 1) * a) / denom + (1.0 - (j + 1.0) / (k + 2.0)) * std::cos(j * a);
  g[0] = 1.0;  // the formula gives 1 up to rounding
  return g;
}

std::vector<double> sigma_coeffs(int k) {
  if (k < 0) throw UsageError("sigma_coeffs: negative degree");
  const double t = kPi / (k + 1);
  std::vector<double> s(static_cast<std::size_t>(k) + 1);
  s[0] = 1.0;
  for (int j = 1; j <= k; ++j) s[j] = std::sin(j * t) / (j * t);
  return s;
}

std::vector<double> damping_coeffs(int k, Damping damping) {
  switch (damping) {
    case Damping::jackson: return jackson_coeffs(k);
    case Damping::lanczos_sigma: return sigma_coeffs(k);
    case Damping::none: break;
  }
  if (k < 0) throw UsageError("damping_coeffs: negative degree");
  return std::vector<double>(static_cast<std::size_t>(k) + 1, 1.0);
}

std::vector<double> delta_coeffs(double theta_gamma, int k, Damping damping) {
  auto c = damping_coeffs(k, damping);
  c[0] *= 0.5;
  for (int j = 1; j <= k; ++j) c[j] *= std::cos(j * theta_gamma);
  return c;
}

double eval_chebyshev(std::span<const double> coeffs, double t) {
  if (coeffs.empty()) return 0.0;
  t = clamp_unit(t);
  double b1 = 0.0, b2 = 0.0;
  for (std::size_t j = coeffs.size() - 1; j >= 1; --j) {
    const double b0 = 2.0 * t * b1 - b2 + coeffs[j];
    b2 = b1;
    b1 = b0;
  }
  return coeffs[0] + t * b1 - b2;
}

double kernel_poly_eval(double gamma, int k, double t) {
  const double tg = std::acos(clamp_unit(gamma));
  const double tt = std::acos(clamp_unit(t));
  double num = 1.0 / kPi;
  double den = 1.0 / kPi;
  for (int j = 1; j <= k; ++j) {
    const double a = std::cos(j * tg);
    num += 2.0 / kPi * a * std::cos(j * tt);
    den += 2.0 / kPi * a * a;
  }
  return num / den;
}

double filter_norm_sq(double gamma, int k) {
  if (k < 1) throw UsageError("filter_norm_sq: degree must be >= 1");
  const double m = 2.0 * k + 1.0;
  const double theta = std::acos(clamp_unit(gamma));
  const double s = std::sin(theta);
  const double dirichlet = s == 0.0 ? 1.0 : std::sin(m * theta) / (m * s);
  return 2.0 * kPi / m / (1.0 + dirichlet);
}

double balance_residual(double theta, double theta_xi, double theta_eta, int k, Damping damping) {
  const auto b = balance_terms(theta_xi, theta_eta, k, damping);
  double f = 0.0;
  for (int j = 0; j <= k; ++j) f += b[j] * std::cos(j * theta);
  return f;
}

double balance_residual_derivative(double theta, double theta_xi, double theta_eta, int k,
                                   Damping damping) {
  const auto b = balance_terms(theta_xi, theta_eta, k, damping);
  double fp = 0.0;
  for (int j = 1; j <= k; ++j) fp -= b[j] * j * std::sin(j * theta);
  return fp;
}

namespace {

struct NewtonOutcome {
  double theta;
  int iterations;
  bool converged;
  double residual;
};

NewtonOutcome newton(const std::vector<double>& b, double theta, double lo, double hi, double tol,
                     int max_iter) {
  auto eval = [&](double th, double& fp) {
    double f = 0.0;
    fp = 0.0;
    for (std::size_t j = 0; j < b.size(); ++j) {
      f += b[j] * std::cos(j * th);
      fp -= b[j] * static_cast<double>(j) * std::sin(j * th);
    }
    return f;
  };
  double fp = 0.0;
  double f = eval(theta, fp);
  int it = 0;
  while (std::abs(f) > tol && it < max_iter) {
    if (fp == 0.0) break;
    const double next = theta - f / fp;
    if (!(next > lo && next < hi)) break;
    theta = next;
    f = eval(theta, fp);
    ++it;
  }
  return {theta, it, std::abs(f) <= tol, std::abs(f)};
}

void check_angles(double theta_xi, double theta_eta) {
  if (!(theta_eta >= 0.0 && theta_eta < theta_xi && theta_xi <= kPi))
    throw UsageError("balance: angles must satisfy 0 <= theta_eta < theta_xi <= pi");
}

}  // namespace

BalanceResult hessenberg_balance(double theta_xi, double theta_eta, int k, Damping damping,
                                 double theta_c) {
  check_angles(theta_xi, theta_eta);
  if (k < 1) throw UsageError("hessenberg_balance: degree must be >= 1");
  const auto b = balance_terms(theta_xi, theta_eta, k, damping);
  const double scale = abs_sum(b);

  BalanceResult res;
  res.used_hessenberg = true;
  res.scale = scale;
  res.theta_gamma = theta_c;

  // Drop vanishing leading terms so the companion form is well defined.
  int top = k;
  while (top > 0 && std::abs(b[top]) <= 1e-14 * scale) --top;
  if (top == 0) {
    res.residual = std::abs(balance_residual(theta_c, theta_xi, theta_eta, k, damping));
    return res;
  }

  // 2 gamma t_j = c_j t_{j+1} + t_{j-1}, c_0 = 2, c_j = 1, closed at the top
  // row by t_top = -sum_j beta_j t_j.
  const auto n = static_cast<Eigen::Index>(top);
  DenseBlock h = DenseBlock::Zero(n, n);
  for (Eigen::Index j = 0; j < n; ++j) {
    const double cj = j == 0 ? 2.0 : 1.0;
    if (j + 1 < n) {
      h(j, j + 1) += cj;
    } else {
      for (Eigen::Index i = 0; i < n; ++i) h(j, i) -= cj * b[i] / b[top];
    }
    if (j > 0) h(j, j - 1) += 1.0;
  }
  const auto eig = eig_hessenberg(h);

  const double g_lo = std::cos(theta_xi);
  const double g_hi = std::cos(theta_eta);
  const double target = std::cos(theta_c);
  const double slack = 1e-12;
  bool found = false;
  double best = 0.0;
  for (const auto& z : eig) {
    if (std::abs(z.imag()) > 1e-8) continue;
    const double g = 0.5 * z.real();
    if (g < g_lo - slack || g > g_hi + slack) continue;
    if (!found || std::abs(g - target) < std::abs(best - target)) {
      best = g;
      found = true;
    }
  }
  if (found) {
    res.theta_gamma = std::acos(clamp_unit(best));
    res.balanced = true;
  }
  res.residual = std::abs(balance_residual(res.theta_gamma, theta_xi, theta_eta, k, damping));
  return res;
}

BalanceResult balance(double theta_xi, double theta_eta, int k, Damping damping, int max_newton) {
  check_angles(theta_xi, theta_eta);
  if (k < 1) throw UsageError("balance: degree must be >= 1");
  const auto b = balance_terms(theta_xi, theta_eta, k, damping);
  const double scale = abs_sum(b);
  const double tol = kNewtonTol * scale;
  const double theta_c = 0.5 * (theta_xi + theta_eta);

  BalanceResult res;
  res.scale = scale;
  const auto nt = newton(b, theta_c, theta_eta, theta_xi, tol, max_newton);
  res.newton_iterations = nt.iterations;
  if (nt.converged) {
    res.theta_gamma = nt.theta;
    res.balanced = true;
    res.residual = nt.residual;
    return res;
  }

  auto hb = hessenberg_balance(theta_xi, theta_eta, k, damping, theta_c);
  hb.newton_iterations = res.newton_iterations;
  if (!hb.balanced) return hb;
  // The eigenvalue route is accurate to roughly the conditioning of H;
  // a few Newton steps bring f down to the working tolerance.
  const auto polish = newton(b, hb.theta_gamma, theta_eta, theta_xi, tol, 8);
  if (polish.residual <= hb.residual) {
    hb.theta_gamma = polish.theta;
    hb.residual = polish.residual;
  }
  hb.balanced = hb.residual <= 1e-10 * scale;
  return hb;
}

PolyFilter::PolyFilter(int k, double theta_gamma, Damping damping, double bar_at, bool balanced)
    : k_(k),
      coeffs_(delta_coeffs(theta_gamma, k, damping)),
      gamma_(std::cos(theta_gamma)),
      theta_gamma_(theta_gamma),
      damping_(damping),
      balanced_(balanced) {
  const double at_center = eval_chebyshev(coeffs_, gamma_);
  if (!(at_center > 0.0)) throw NumericalError("filter value at its centre is not positive");
  for (double& c : coeffs_) c /= at_center;
  bar_ = eval_chebyshev(coeffs_, bar_at);
}

DegreeCapError::DegreeCapError(int k_max, double value_xi, double value_eta)
    : NumericalError([&] {
        std::ostringstream os;
        os << "filter degree cap " << k_max << " reached; endpoint values " << value_xi << ", "
           << value_eta << " still above the threshold (interval too narrow, re-slice)";
        return os.str();
      }()),
      k_max_(k_max),
      value_xi_(value_xi),
      value_eta_(value_eta) {}

double resolve_phi(const FilterSpec& spec, const SpectralMap& map) {
  if (spec.phi_threshold) {
    const double phi = *spec.phi_threshold;
    if (!(phi > 0.0 && phi < 1.0)) throw UsageError("phi threshold must lie in (0, 1)");
    return phi;
  }
  const double a = map.to_reference(spec.xi);
  const double b = map.to_reference(spec.eta);
  const bool end = a <= -1.0 + 1e-12 || b >= 1.0 - 1e-12;
  return end ? kPhiEnd : kPhiInterior;
}

PolyFilter select_degree(const FilterSpec& spec, const SpectralMap& map) {
  if (!(spec.xi < spec.eta)) throw UsageError("filter interval must satisfy xi < eta");
  if (spec.k_min < 1 || spec.k_max < spec.k_min) throw UsageError("need 1 <= k_min <= k_max");
  const double a = clamp_unit(map.to_reference(spec.xi));
  const double b = clamp_unit(map.to_reference(spec.eta));
  if (!(a < b)) throw UsageError("filter interval lies outside the spectrum bounds");
  const double phi = resolve_phi(spec, map);

  const double theta_xi = std::acos(a);
  const double theta_eta = std::acos(b);
  const double theta_c = 0.5 * (theta_xi + theta_eta);
  const double gamma_c = std::cos(theta_c);

  double va = 0.0, vb = 0.0;
  int k = spec.k_min;
  for (; k <= spec.k_max; ++k) {
    const auto c = delta_coeffs(theta_c, k, spec.damping);
    const double norm = eval_chebyshev(c, gamma_c);
    va = eval_chebyshev(c, a) / norm;
    vb = eval_chebyshev(c, b) / norm;
    if (va <= phi && vb <= phi) break;
  }
  if (k > spec.k_max) throw DegreeCapError(spec.k_max, va, vb);

  const auto bal = balance(theta_xi, theta_eta, k, spec.damping);
  return PolyFilter(k, bal.theta_gamma, spec.damping, a, bal.balanced);
}

FilterOperator::FilterOperator(const SparseSymMatrix& a, const SpectralMap& map, const PolyFilter& filter)
    : a_(&a),
      map_(map),
      coeffs_(filter.coeffs().begin(), filter.coeffs().end()),
      w_prev_(static_cast<Eigen::Index>(a.n())),
      w_cur_(static_cast<Eigen::Index>(a.n())),
      w_next_(static_cast<Eigen::Index>(a.n())) {
  if (coeffs_.empty()) throw UsageError("FilterOperator: empty filter");
}

void FilterOperator::apply(const Eigen::Ref<const Vector>& v, Eigen::Ref<Vector> out) {
  const std::size_t n = a_->n();
  if (static_cast<std::size_t>(v.size()) != n || static_cast<std::size_t>(out.size()) != n)
    throw UsageError("apply_filter: vector length does not match matrix dimension");
  const auto start = std::chrono::steady_clock::now();
  const double c = map_.c;
  const double inv_d = 1.0 / map_.d;
  const std::size_t k = coeffs_.size() - 1;

  out = coeffs_[0] * v;
  if (k >= 1) {
    w_prev_ = v;
    matvec(*a_, std::span<const double>(v.data(), n), std::span<double>(w_cur_.data(), n));
    for (std::size_t i = 0; i < n; ++i) {
      w_cur_[i] = (w_cur_[i] - c * v[i]) * inv_d;
      out[i] += coeffs_[1] * w_cur_[i];
    }
    for (std::size_t j = 2; j <= k; ++j) {
      matvec(*a_, std::span<const double>(w_cur_.data(), n), std::span<double>(w_next_.data(), n));
      const double cj = coeffs_[j];
      const double two_d = 2.0 * inv_d;
      for (std::size_t i = 0; i < n; ++i) {
        const double w = (w_next_[i] - c * w_cur_[i]) * two_d - w_prev_[i];
        w_next_[i] = w;
        out[i] += cj * w;
      }
      std::swap(w_prev_, w_cur_);
      std::swap(w_cur_, w_next_);
    }
  }
  matvecs_ += k;
  seconds_ += std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
}

Vector FilterOperator::apply(const Vector& v) {
  Vector out(v.size());
  apply(v, out);
  return out;
}

Vector apply_filter(const SparseSymMatrix& a, const SpectralMap& map, const PolyFilter& filter,
                    const Vector& v, std::size_t* matvec_counter) {
  FilterOperator op(a, map, filter);
  Vector out = op.apply(v);
  if (matvec_counter) *matvec_counter += op.matvecs();
  return out;
}

}  // namespace sliceig

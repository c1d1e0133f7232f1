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

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "sliceig/sparse.hpp"
#include "sliceig/spectrum_bounds.hpp"

namespace sliceig {

enum class Damping { none, jackson, lanczos_sigma };

std::string to_string(Damping d);
/// Accepts "none", "jackson", "sigma" / "lanczos_sigma".
Damping parse_damping(const std::string& s);

/// Jackson factors g_j = sin((j+1)a)/((k+2) sin a) + (1 - (j+1)/(k+2)) cos(j a),
/// a = pi/(k+2), for j = 0..k.
std::vector<double> jackson_coeffs(int k);

/// Lanczos sigma factors: 1, then sin(j t)/(j t) with t = pi/(k+1).
std::vector<double> sigma_coeffs(int k);

/// Damping multipliers of the requested kind (all ones for Damping::none).
std::vector<double> damping_coeffs(int k, Damping damping);

/// Damped Chebyshev coefficients of the delta function centred at
/// cos(theta_gamma): g_0/2 for j = 0 and g_j cos(j theta_gamma) above.
/// The halved leading term is applied here, so every evaluator below
/// consumes plain Chebyshev coefficients.
std::vector<double> delta_coeffs(double theta_gamma, int k, Damping damping);

/// sum_j c_j T_j(t) by Clenshaw's recurrence. t is clamped to [-1, 1].
double eval_chebyshev(std::span<const double> coeffs, double t);

/// Normalized least-squares filter written as a kernel polynomial:
/// sum_j That_j(gamma) That_j(t) / sum_j That_j(gamma)^2 with the
/// orthonormal Chebyshev basis That_0 = T_0/sqrt(pi), That_j = T_j/sqrt(pi/2).
double kernel_poly_eval(double gamma, int k, double t);

/// Closed form of the Chebyshev-weighted squared norm of the normalized
/// filter: 2 pi/(2k+1) / (1 + sin((2k+1)th)/((2k+1) sin th)), th = acos(gamma).
/// Uses the Dirichlet-term limit at gamma = +-1.
double filter_norm_sq(double gamma, int k);

/// Balancing residual f(theta) = sum_j g_j cos(j theta)[cos(j theta_xi) - cos(j theta_eta)]
/// and its derivative in theta.
double balance_residual(double theta, double theta_xi, double theta_eta, int k, Damping damping);
double balance_residual_derivative(double theta, double theta_xi, double theta_eta, int k,
                                   Damping damping);

struct BalanceResult {
  double theta_gamma = 0.0;
  bool balanced = false;       // false: no admissible root, theta_c returned
  bool used_hessenberg = false;
  int newton_iterations = 0;
  double residual = 0.0;       // |f(theta_gamma)|
  double scale = 0.0;          // sum_j g_j |cos(j theta_xi) - cos(j theta_eta)|
};

/// Moves the delta centre so the filter takes equal values at both interval
/// ends. Angles follow acos, so 0 <= theta_eta < theta_xi <= pi. Newton from
/// the mid-angle for at most `max_newton` steps (tolerance 1e-12 * scale),
/// then the companion-matrix route, then a Newton polish of that root.
BalanceResult balance(double theta_xi, double theta_eta, int k, Damping damping, int max_newton = 2);

/// Companion-matrix route: real eigenvalues of the k x k Hessenberg matrix
/// H/2 in [cos theta_xi, cos theta_eta]; returns acos of the one closest to
/// cos(theta_c). No polishing.
BalanceResult hessenberg_balance(double theta_xi, double theta_eta, int k, Damping damping,
                                 double theta_c);

struct FilterSpec {
  double xi = 0.0;
  double eta = 0.0;
  Damping damping = Damping::lanczos_sigma;
  /// Bar target; unset means 0.6 for interior intervals, 0.3 when an
  /// endpoint reaches the spectrum bound.
  std::optional<double> phi_threshold;
  int k_min = 3;
  int k_max = 3000;
};

/// Filter value threshold defaults.
inline constexpr double kPhiInterior = 0.6;
inline constexpr double kPhiEnd = 0.3;

/// Balanced, normalized polynomial filter in reference coordinates.
class PolyFilter {
 public:
  PolyFilter() = default;
  /// Builds the filter of degree k centred at acos(theta_gamma), normalized
  /// to 1 at the centre, with the bar taken at the reference point
  /// `bar_at` (the mapped left endpoint).
  PolyFilter(int k, double theta_gamma, Damping damping, double bar_at, bool balanced);

  int degree() const noexcept { return k_; }
  std::span<const double> coeffs() const noexcept { return coeffs_; }
  double gamma() const noexcept { return gamma_; }
  double theta_gamma() const noexcept { return theta_gamma_; }
  double bar() const noexcept { return bar_; }
  Damping damping() const noexcept { return damping_; }
  bool balanced() const noexcept { return balanced_; }

  /// Filter value at a reference-coordinate point.
  double operator()(double t) const { return eval_chebyshev(coeffs_, t); }

 private:
  int k_ = 0;
  std::vector<double> coeffs_;
  double gamma_ = 0.0;
  double theta_gamma_ = 0.0;
  double bar_ = 0.0;
  Damping damping_ = Damping::none;
  bool balanced_ = false;
};

/// The degree cap was reached before both endpoint values fell below the
/// threshold.
class DegreeCapError : public NumericalError {
 public:
  DegreeCapError(int k_max, double value_xi, double value_eta);
  int k_max() const noexcept { return k_max_; }
  double value_xi() const noexcept { return value_xi_; }
  double value_eta() const noexcept { return value_eta_; }

 private:
  int k_max_;
  double value_xi_;
  double value_eta_;
};

double resolve_phi(const FilterSpec& spec, const SpectralMap& map);

/// Smallest degree in [k_min, k_max] whose mid-angle filter is at most the
/// threshold at both mapped endpoints, then balanced at that degree.
PolyFilter select_degree(const FilterSpec& spec, const SpectralMap& map);

/// Applies rho(Ahat) with Ahat = (A - cI)/d via the three-term recurrence.
/// Holds workspace, so one instance per thread. Exactly degree() products
/// with A per apply().
class FilterOperator {
 public:
  FilterOperator(const SparseSymMatrix& a, const SpectralMap& map, const PolyFilter& filter);

  void apply(const Eigen::Ref<const Vector>& v, Eigen::Ref<Vector> out);
  Vector apply(const Vector& v);

  std::size_t matvecs() const noexcept { return matvecs_; }
  double matvec_seconds() const noexcept { return seconds_; }
  std::size_t n() const noexcept { return a_->n(); }

 private:
  const SparseSymMatrix* a_;
  SpectralMap map_;
  std::vector<double> coeffs_;
  Vector w_prev_, w_cur_, w_next_;
  std::size_t matvecs_ = 0;
  double seconds_ = 0.0;
};

/// One-shot rho(Ahat) v. Adds the product count to `matvec_counter`.
Vector apply_filter(const SparseSymMatrix& a, const SpectralMap& map, const PolyFilter& filter,
                    const Vector& v, std::size_t* matvec_counter = nullptr);

}  // namespace sliceig

#pragma once

#include <cmath>
#include <concepts>
#include <cstddef>
#include <numbers>

#include "yule/errors.hpp"

// Closed-form moments, rate constants and bound evaluators for the
// correlation of two independent OU paths sharing drift theta.

namespace yule::analytic {

namespace detail {

inline void require_positive(double v, const char* what) {
  if (!std::isfinite(v) || v <= 0.0) {
    throw DomainError(std::string(what) + " must be finite and > 0");
  }
}

// b - 5/2 + 2e^{-b} + e^{-2b}/2 + 2b e^{-b}
//   = sum_{k>=4} (-1)^k (2 + 2^{k-1} - 2k) b^k / k!
template <std::floating_point Scalar>
Scalar var_ft_shape(Scalar b) {
  if (b < Scalar(2)) {
    Scalar sum = 0;
    Scalar term = b * b * b / 6;  // b^k / k! at k = 3
    for (int k = 4; k <= 60; ++k) {
      term *= b / Scalar(k);
      const Scalar c = Scalar(2) + std::ldexp(Scalar(1), k - 1) - Scalar(2 * k);
      sum += ((k % 2 == 0) ? c : -c) * term;
    }
    return sum;
  }
  const Scalar eb = std::exp(-b);
  return b - Scalar(2.5) + 2 * eb + eb * eb / 2 + 2 * b * eb;
}

// a - 2(1 - e^{-a}) + (1 - e^{-2a})/2
//   = sum_{k>=3} (-1)^{k+1} (2^{k-1} - 2) a^k / k!
template <std::floating_point Scalar>
Scalar xbar_shape(Scalar a) {
  if (a < Scalar(2)) {
    Scalar sum = 0;
    Scalar term = a * a / 2;
    for (int k = 3; k <= 60; ++k) {
      term *= a / Scalar(k);
      const Scalar c = std::ldexp(Scalar(1), k - 1) - Scalar(2);
      sum += ((k % 2 == 1) ? c : -c) * term;
    }
    return sum;
  }
  return a + 2 * std::expm1(-a) - std::expm1(-2 * a) / 2;
}

}  // namespace detail

/// E[F_T^2] for F_T = T^{-1/2} int_0^T X1 X2 du:
/// (1/(4 theta^3 T)) int_0^T (1 - e^{-2 theta z})(1 - e^{-2 theta (T-z)})^2 dz.
template <std::floating_point Scalar>
Scalar var_ft(Scalar theta, Scalar horizon) {
  detail::require_positive(theta, "theta");
  detail::require_positive(horizon, "T");
  const Scalar b = 2 * theta * horizon;
  return detail::var_ft_shape(b) / (8 * std::pow(theta, 4) * horizon);
}

/// lim_{T -> inf} E[F_T^2] = 1 / (4 theta^3).
template <std::floating_point Scalar>
Scalar var_ft_limit(Scalar theta) {
  detail::require_positive(theta, "theta");
  return Scalar(1) / (4 * theta * theta * theta);
}

/// Constant (7 + 8 theta) / (16 theta^4) in |E[F_T^2] - 1/(4 theta^3)| <= C/T.
template <std::floating_point Scalar>
Scalar var_ft_error_constant(Scalar theta) {
  detail::require_positive(theta, "theta");
  return (7 + 8 * theta) / (16 * std::pow(theta, 4));
}

/// mu_theta(T) = 1 - (1 - e^{-2 theta T}) / (2 theta T), the mean of
/// Y11(T) / (T / (2 theta)) before the sample-mean correction.
template <std::floating_point Scalar>
Scalar mu_theta(Scalar theta, Scalar horizon) {
  detail::require_positive(theta, "theta");
  detail::require_positive(horizon, "T");
  const Scalar b = 2 * theta * horizon;
  return 1 + std::expm1(-b) / b;
}

/// E[Xbar(T)^2] = (1/(T^2 theta^2)) int_0^T (1 - e^{-theta (T-u)})^2 du.
template <std::floating_point Scalar>
Scalar mean_sq_xbar(Scalar theta, Scalar horizon) {
  detail::require_positive(theta, "theta");
  detail::require_positive(horizon, "T");
  const Scalar a = theta * horizon;
  return detail::xbar_shape(a) / (horizon * horizon * theta * theta * theta);
}

/// Exact E[X~(n)^2] for the discrete sample mean over t_0..t_{n-1}. O(n).
double mean_sq_xtilde(double theta, std::size_t n, double delta);

/// (1/theta)(1 + 2/theta) / (n delta), the upper bound on mean_sq_xtilde.
double mean_sq_xtilde_bound(double theta, std::size_t n, double delta);

/// int_{-T}^{T} |Q(t)|^{4/3} dt for Q(t) = e^{-theta|t|} / (2 theta).
double stationary_cov_power_integral(double theta, double horizon);

/// (1/(4T)) (27 / (128 theta^7)) (1 - e^{-4 theta T / 3})^3, the Young-type
/// upper bound on the squared norm of the first contraction of h~_T.
double contraction_bound(double theta, double horizon);

// -- constants of the continuous-time rate --------------------------------

/// c(theta) = sqrt((2 + 7/(4 theta))^2 + 27/(4 theta)): Kolmogorov rate
/// constant for 2 theta^{3/2} F_T. Distinct from the unnamed C(theta) of the
/// numerator bound and from var_ft_error_constant.
double fourth_moment_rate_constant(double theta);

/// cst(theta) = 4 (3 + 7/(4 theta)) / theta + 64 / theta^2, the bound on
/// T * Var(Y~11(T)).
double denominator_variance_constant(double theta);

/// K = e^{17/128}.
inline double tail_constant() { return std::exp(17.0 / 128.0); }

/// T*(theta) = max(e, 25 / (16 theta^2 cst(theta))).
double continuous_threshold(double theta);

enum class Regime { Continuous, Discrete };

/// Which term of max((n delta)^{-1/2}, (n delta^2)^{1/3}) dominates.
enum class ActiveBranch { None, Horizon, Mesh };

const char* to_string(Regime regime) noexcept;
const char* to_string(ActiveBranch branch) noexcept;

struct RateBound {
  double value = 0.0;
  /// Prefactor multiplying the rate shape ln(T)/sqrt(T).
  double constant = 0.0;
  Regime regime = Regime::Continuous;
  double valid_from = 0.0;
  /// True when the absolute constant is unknown and `value` is the rate
  /// shape only (constant reported as 1).
  bool relative = false;
  ActiveBranch branch = ActiveBranch::None;
  double shape = 0.0;

  // continuous-time ingredients
  double rate_constant = 0.0;      // c(theta)
  double variance_constant = 0.0;  // cst(theta)
  double tail_k = 0.0;             // K
  double concentration = 0.0;      // 4 sqrt(cst(theta))
};

/// Explicit part of the continuous-time Kolmogorov bound for
/// sqrt(theta T) rho(T):
///   c(theta)/sqrt(T) + 4K/sqrt(T) + 12 c ln(T)/sqrt(T),  c = 4 sqrt(cst).
/// The Michel-Pfanzagl product term enters with an unspecified constant and
/// is not included. Throws BelowThreshold when T <= T*(theta).
RateBound rate_bound_continuous(double theta, double horizon);

/// Rate shape ln(n delta) * max((n delta)^{-1/2}, (n delta^2)^{1/3}) with
/// unit constant.
RateBound rate_bound_discrete(double theta, std::size_t n, double delta);

struct MeshPlan {
  std::size_t n = 0;
  double lambda = 0.0;
  double delta = 0.0;
  double horizon = 0.0;
  /// ln(n) n^{(1-2 lambda)/3} for lambda <= 5/7, else ln(n) n^{-(1-lambda)/2}.
  double predicted_rate = 0.0;
  /// n delta^2 -> 0 (lambda > 1/2).
  bool mesh_vanishes = false;
};

/// Plan with delta = n^{-lambda}, 1/2 < lambda < 1.
MeshPlan mesh_plan(std::size_t n, double lambda);

/// Balanced plan lambda = 5/7: T_n = n^{2/7}, rate ln(n) n^{-1/7}.
MeshPlan optimal_mesh(std::size_t n);

// -- Michel-Pfanzagl machinery --------------------------------------------

/// E[exp(N N' / beta)] = 1/sqrt(1 - s1^2 s2^2 / beta^2), N ~ N(0, s1^2),
/// N' ~ N(0, s2^2) independent. Requires beta > s1 s2.
double product_normal_mgf(double sigma1, double sigma2, double beta);

/// g_beta(eps) = 4 e^{-eps/beta} + eps.
double mp_objective(double beta, double epsilon);

struct MpOptimum {
  double epsilon = 0.0;
  double g_value = 0.0;
};

/// argmin of g_beta: eps* = beta ln(4/beta), g(eps*) = beta (1 + ln(4/beta)).
/// Requires 0 < beta < 4.
MpOptimum mp_optimal_epsilon(double beta);

/// Markov/Chernoff tail for a centered second-chaos variable Y:
/// P(Y > y) <= exp(-y/beta + Var/beta^2 + k3/(2 beta^3)), beta >= 4 sqrt(Var).
double chaos_tail_bound(double y, double beta, double variance, double k3);

// -- discretization -------------------------------------------------------

/// C_theta = 4 max(8/(9 theta), (sqrt 2 / 3) theta^{-1/2}, 1/4).
double discretization_error_constant(double theta);

/// C_theta * n * delta^2, the bound on E[delta(n)^2] = E[(A(n) - F_{T_n})^2].
double discretization_error_bound(double theta, std::size_t n, double delta);

}  // namespace yule::analytic

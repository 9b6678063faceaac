#include "yule/analytic.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

namespace yule::analytic {

using detail::require_positive;

double mean_sq_xtilde(double theta, std::size_t n, double delta) {
  require_positive(theta, "theta");
  require_positive(delta, "delta");
  if (n < 1) throw DomainError("n must be >= 1");
  const double q = std::exp(-theta * delta);
  const double one_minus_q = -std::expm1(-theta * delta);
  double diag = 0.0;
  double off = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double t = static_cast<double>(i) * delta;
    const double v = -std::expm1(-2.0 * theta * t) / (2.0 * theta);
    const auto m = static_cast<double>(n - 1 - i);
    // sum_{r=1}^{m} q^r
    const double geo = q * -std::expm1(m * std::log(q)) / one_minus_q;
    diag += v;
    off += v * geo;
  }
  const auto nn = static_cast<double>(n);
  return (diag + 2.0 * off) / (nn * nn);
}

double mean_sq_xtilde_bound(double theta, std::size_t n, double delta) {
  require_positive(theta, "theta");
  require_positive(delta, "delta");
  return (1.0 / theta) * (1.0 + 2.0 / theta) /
         (static_cast<double>(n) * delta);
}

double stationary_cov_power_integral(double theta, double horizon) {
  require_positive(theta, "theta");
  require_positive(horizon, "T");
  // 2 (2 theta)^{-4/3} int_0^T e^{-4 theta t / 3} dt
  return std::pow(2.0 * theta, -4.0 / 3.0) * (3.0 / (2.0 * theta)) *
         -std::expm1(-4.0 * theta * horizon / 3.0);
}

double contraction_bound(double theta, double horizon) {
  require_positive(theta, "theta");
  require_positive(horizon, "T");
  const double tail = -std::expm1(-4.0 * theta * horizon / 3.0);
  return (1.0 / (4.0 * horizon)) * (27.0 / (128.0 * std::pow(theta, 7))) *
         tail * tail * tail;
}

double fourth_moment_rate_constant(double theta) {
  require_positive(theta, "theta");
  const double a = 2.0 + 7.0 / (4.0 * theta);
  return std::sqrt(a * a + 27.0 / (4.0 * theta));
}

double denominator_variance_constant(double theta) {
  require_positive(theta, "theta");
  return 4.0 * (3.0 + 7.0 / (4.0 * theta)) / theta + 64.0 / (theta * theta);
}

double continuous_threshold(double theta) {
  const double cst = denominator_variance_constant(theta);
  return std::max(std::numbers::e, 25.0 / (16.0 * theta * theta * cst));
}

const char* to_string(Regime regime) noexcept {
  return regime == Regime::Continuous ? "continuous" : "discrete";
}

const char* to_string(ActiveBranch branch) noexcept {
  switch (branch) {
    case ActiveBranch::None:
      return "none";
    case ActiveBranch::Horizon:
      return "horizon";
    case ActiveBranch::Mesh:
      return "mesh";
  }
  return "unknown";
}

RateBound rate_bound_continuous(double theta, double horizon) {
  require_positive(theta, "theta");
  require_positive(horizon, "T");
  const double threshold = continuous_threshold(theta);
  if (horizon <= threshold) {
    throw BelowThreshold("T = " + std::to_string(horizon) +
                         " not above T*(theta) = " + std::to_string(threshold));
  }
  RateBound b;
  b.regime = Regime::Continuous;
  b.valid_from = threshold;
  b.rate_constant = fourth_moment_rate_constant(theta);
  b.variance_constant = denominator_variance_constant(theta);
  b.tail_k = tail_constant();
  b.concentration = 4.0 * std::sqrt(b.variance_constant);
  b.constant = 12.0 * b.concentration;
  const double root = std::sqrt(horizon);
  b.shape = std::log(horizon) / root;
  b.value = (b.rate_constant + 4.0 * b.tail_k) / root + b.constant * b.shape;
  return b;
}

RateBound rate_bound_discrete(double theta, std::size_t n, double delta) {
  require_positive(theta, "theta");
  require_positive(delta, "delta");
  const double horizon = static_cast<double>(n) * delta;
  if (!(horizon > std::numbers::e)) {
    throw DomainError("discrete rate needs n * delta > e");
  }
  const double mesh_term = horizon * delta;  // n delta^2
  const double by_horizon = 1.0 / std::sqrt(horizon);
  const double by_mesh = std::cbrt(mesh_term);
  RateBound b;
  b.regime = Regime::Discrete;
  b.valid_from = std::numbers::e;
  b.relative = true;
  b.constant = 1.0;
  b.branch = by_mesh > by_horizon ? ActiveBranch::Mesh : ActiveBranch::Horizon;
  b.shape = std::log(horizon) * std::max(by_horizon, by_mesh);
  b.value = b.shape;
  return b;
}

MeshPlan mesh_plan(std::size_t n, double lambda) {
  if (n < 2) throw DomainError("mesh plan needs n >= 2");
  if (!(lambda > 0.5 && lambda < 1.0)) {
    throw DomainError("lambda must lie in (1/2, 1)");
  }
  const auto nn = static_cast<double>(n);
  MeshPlan p;
  p.n = n;
  p.lambda = lambda;
  p.delta = std::pow(nn, -lambda);
  p.horizon = std::pow(nn, 1.0 - lambda);
  p.mesh_vanishes = lambda > 0.5;
  const double exponent = lambda <= 5.0 / 7.0 ? (1.0 - 2.0 * lambda) / 3.0
                                              : -(1.0 - lambda) / 2.0;
  p.predicted_rate = std::log(nn) * std::pow(nn, exponent);
  return p;
}

MeshPlan optimal_mesh(std::size_t n) { return mesh_plan(n, 5.0 / 7.0); }

double product_normal_mgf(double sigma1, double sigma2, double beta) {
  require_positive(sigma1, "sigma1");
  require_positive(sigma2, "sigma2");
  const double s = sigma1 * sigma2;
  if (!(beta > s)) throw DomainError("product normal mgf needs beta > s1*s2");
  const double r = s / beta;
  return 1.0 / std::sqrt(1.0 - r * r);
}

double mp_objective(double beta, double epsilon) {
  require_positive(beta, "beta");
  return 4.0 * std::exp(-epsilon / beta) + epsilon;
}

MpOptimum mp_optimal_epsilon(double beta) {
  if (!(beta > 0.0 && beta < 4.0)) {
    throw DomainError("beta must lie in (0, 4)");
  }
  const double log_ratio = std::log(4.0 / beta);
  return {beta * log_ratio, beta * (1.0 + log_ratio)};
}

double chaos_tail_bound(double y, double beta, double variance, double k3) {
  if (!std::isfinite(y) || !std::isfinite(k3)) {
    throw DomainError("tail bound inputs must be finite");
  }
  if (!(variance >= 0.0)) throw DomainError("variance must be >= 0");
  require_positive(beta, "beta");
  if (beta < 4.0 * std::sqrt(variance)) {
    throw BetaTooSmall("beta must be >= 4 sqrt(variance)");
  }
  return std::exp(-y / beta + variance / (beta * beta) +
                  k3 / (2.0 * beta * beta * beta));
}

double discretization_error_constant(double theta) {
  require_positive(theta, "theta");
  return 4.0 * std::max({8.0 / (9.0 * theta),
                         std::numbers::sqrt2 / 3.0 / std::sqrt(theta), 0.25});
}

double discretization_error_bound(double theta, std::size_t n, double delta) {
  require_positive(delta, "delta");
  const auto nn = static_cast<double>(n);
  return discretization_error_constant(theta) * nn * delta * delta;
}

}  // namespace yule::analytic

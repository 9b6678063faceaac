#pragma once

#include <algorithm>
#include <cmath>
#include <concepts>
#include <cstdint>
#include <numeric>
#include <vector>

#include <Eigen/Dense>

#include "yule/errors.hpp"
#include "yule/rng.hpp"

namespace yule::chaos {

// -- kernels ---------------------------------------------------------------
//
// F_T = I_2(h_T) on L^2([-T,T]^2), where the negative half-line carries the
// second Brownian motion. Y11 = 2 theta I_2(k_T) + deterministic part on
// L^2([0,T]^2).

/// h_T(x, y) = e^{theta x} e^{-theta y} [e^{-2 theta T} - e^{-2 theta max(x, -y)}]
///             / (2 theta sqrt T),  x in [0,T], y in [-T,0]; zero elsewhere.
template <std::floating_point Scalar>
Scalar h_kernel(Scalar theta, Scalar horizon, Scalar x, Scalar y) {
  if (x < 0 || x > horizon || y < -horizon || y > 0) return Scalar(0);
  const Scalar far = std::max(x, -y);
  const Scalar spread = x - y;  // <= 2 far <= 2T
  return (std::exp(theta * (spread - 2 * horizon)) -
          std::exp(theta * (spread - 2 * far))) /
         (2 * theta * std::sqrt(horizon));
}

/// Symmetrization (h_T(x,y) + h_T(y,x)) / 2.
template <std::floating_point Scalar>
Scalar h_sym_kernel(Scalar theta, Scalar horizon, Scalar x, Scalar y) {
  return (h_kernel(theta, horizon, x, y) + h_kernel(theta, horizon, y, x)) / 2;
}

/// k_T(x, y) = e^{theta x} e^{theta y} (e^{-2 theta max(x,y)} - e^{-2 theta T})
///             / (2 theta T) on [0,T]^2.
template <std::floating_point Scalar>
Scalar k_kernel(Scalar theta, Scalar horizon, Scalar x, Scalar y) {
  if (x < 0 || x > horizon || y < 0 || y > horizon) return Scalar(0);
  const Scalar near = std::max(x, y);
  // e^{theta(x+y-2 near)} - e^{theta(x+y-2T)}; both exponents <= 0
  return (std::exp(theta * (x + y - 2 * near)) -
          std::exp(theta * (x + y - 2 * horizon))) /
         (2 * theta * horizon);
}

/// g_T(u) = (1 - e^{-theta (T - u)}) / (theta T): Xbar(T) = I_1(g_T).
template <std::floating_point Scalar>
Scalar xbar_factor(Scalar theta, Scalar horizon, Scalar u) {
  if (u < 0 || u > horizon) return Scalar(0);
  return -std::expm1(-theta * (horizon - u)) / (theta * horizon);
}

/// Kernel of the centered denominator term
/// Y~11(T) = 2 theta I_2(k_T) - 2 theta (Xbar^2 - E Xbar^2)
///         = I_2(2 theta (k_T - g_T (x) g_T)).
template <std::floating_point Scalar>
Scalar y11_kernel(Scalar theta, Scalar horizon, Scalar x, Scalar y) {
  return 2 * theta *
         (k_kernel(theta, horizon, x, y) -
          xbar_factor(theta, horizon, x) * xbar_factor(theta, horizon, y));
}

// -- quadrature ------------------------------------------------------------

enum class KernelDomain {
  SymmetricTT,  // [-T, T]
  PositiveT,    // [0, T]
};

/// Composite midpoint nodes and weights on a kernel's domain.
struct KernelGrid {
  Eigen::VectorXd nodes;
  Eigen::VectorXd weights;
  KernelDomain domain = KernelDomain::PositiveT;
  double horizon = 0.0;

  static KernelGrid midpoint(KernelDomain domain, double horizon,
                             Eigen::Index m);

  Eigen::Index size() const noexcept { return nodes.size(); }
  double lower() const noexcept {
    return domain == KernelDomain::SymmetricTT ? -horizon : 0.0;
  }
  double length() const noexcept {
    return domain == KernelDomain::SymmetricTT ? 2.0 * horizon : horizon;
  }
};

/// K_ij = kernel(x_i, x_j).
template <typename Kernel>
Eigen::MatrixXd kernel_matrix(const Kernel& kernel, const KernelGrid& grid) {
  const Eigen::Index m = grid.size();
  Eigen::MatrixXd k(m, m);
  for (Eigen::Index j = 0; j < m; ++j) {
    for (Eigen::Index i = 0; i < m; ++i) {
      k(i, j) = kernel(grid.nodes[i], grid.nodes[j]);
    }
  }
  return k;
}

/// sum_ij w_i w_j kernel(x_i, x_j)^2, approximating the squared L^2 norm.
template <typename Kernel>
double l2_norm_sq(const Kernel& kernel, const KernelGrid& grid) {
  if (grid.size() < 64) throw DomainError("l2_norm_sq needs m >= 64 nodes");
  const Eigen::MatrixXd k = kernel_matrix(kernel, grid);
  return grid.weights.dot(k.cwiseAbs2() * grid.weights);
}

/// One Richardson step on the midpoint rule: (4 N(m) - N(m/2)) / 3.
/// The midpoint error expands in even powers of the cell width, so this
/// removes the leading h^2 term. m must be even.
template <typename Kernel>
double l2_norm_sq_extrapolated(const Kernel& kernel, KernelDomain domain,
                               double horizon, Eigen::Index m) {
  if (m % 2 != 0) throw DomainError("extrapolation needs an even m");
  const double fine = l2_norm_sq(kernel, KernelGrid::midpoint(domain, horizon, m));
  const double coarse =
      l2_norm_sq(kernel, KernelGrid::midpoint(domain, horizon, m / 2));
  return (4.0 * fine - coarse) / 3.0;
}

/// ||f (x)_1 f||^2 with (f (x)_1 f)(x, y) = int f(x, z) f(y, z) dz, all
/// integrals by the grid's quadrature. Cost O(m^3).
template <typename Kernel>
double contraction_norm_sq(const Kernel& kernel, const KernelGrid& grid) {
  if (grid.size() < 128) {
    throw DomainError("contraction_norm_sq needs m >= 128 nodes");
  }
  const Eigen::MatrixXd k = kernel_matrix(kernel, grid);
  const Eigen::VectorXd& w = grid.weights;
  const Eigen::MatrixXd contracted = k * w.asDiagonal() * k.transpose();
  return w.dot(contracted.cwiseAbs2() * w);
}

/// Contraction norm of the symmetrized h_T on the midpoint grid of [-T, T].
double h_contraction_norm_sq(double theta, double horizon, Eigen::Index m);

/// 2 ||h~_T||^2 = E[F_T^2] by extrapolated midpoint quadrature.
double h_variance_quadrature(double theta, double horizon, Eigen::Index m);

// -- spectra ---------------------------------------------------------------

/// Eigenvalues of a second-chaos kernel, sorted by |lambda| descending.
/// A variable I_2(f) has the law of sum lambda_n (Z_n^2 - 1).
struct ChaosSpectrum {
  Eigen::VectorXd lambdas;
  double trace = 0.0;        // sum lambda
  double hs_norm_sq = 0.0;   // sum lambda^2
  double third_sum = 0.0;    // sum lambda^3

  /// Var(sum lambda (Z^2 - 1)) = 2 sum lambda^2.
  double variance() const noexcept { return 2.0 * hs_norm_sq; }
  /// Third cumulant, 8 sum lambda^3.
  double third_cumulant() const noexcept { return 8.0 * third_sum; }

  static ChaosSpectrum from_eigenvalues(Eigen::VectorXd values,
                                        Eigen::Index rank);
};

/// Nystrom approximation: eigenvalues of W^{1/2} K W^{1/2}, which approximate
/// those of the integral operator. Keeps the `rank` largest in magnitude.
ChaosSpectrum nystrom_spectrum(const Eigen::MatrixXd& kernel_values,
                               const KernelGrid& grid, Eigen::Index rank);

template <typename Kernel>
ChaosSpectrum nystrom_spectrum(const Kernel& kernel, const KernelGrid& grid,
                               Eigen::Index rank) {
  return nystrom_spectrum(kernel_matrix(kernel, grid), grid, rank);
}

/// One draw of sum lambda_k (xi_k^2 - 1).
double sample_second_chaos(const ChaosSpectrum& spectrum, std::uint64_t seed);

/// `count` independent draws from one generator seeded by `seed`.
Eigen::VectorXd sample_second_chaos(const ChaosSpectrum& spectrum,
                                    std::uint64_t seed, Eigen::Index count);

}  // namespace yule::chaos

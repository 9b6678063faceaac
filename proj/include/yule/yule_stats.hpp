#pragma once

#include <cmath>
#include <cstddef>
#include <optional>

#include <Eigen/Dense>

#include "yule/errors.hpp"
#include "yule/ou_sim.hpp"

namespace yule {

enum class StatMode { Discrete, Quadrature };

/// Centered second moments of a path pair and the resulting correlation.
///
/// Discrete mode uses left-endpoint Riemann sums over k = 0..n-1; quadrature
/// mode uses the composite trapezoid rule over all n+1 samples.
struct YuleResult {
  double y11 = 0.0;
  double y12 = 0.0;
  double y22 = 0.0;
  double rho = 0.0;
  /// sqrt(theta * T_n) * rho, present when theta was supplied.
  std::optional<double> psi;
  double horizon = 0.0;
  std::size_t n = 0;
  StatMode mode = StatMode::Discrete;
};

/// Relative threshold below which a centered sum of squares counts as zero.
inline constexpr double kDegeneracyTolerance = 1e-14;
/// Largest |rho| - 1 overshoot silently clamped back into [-1, 1].
inline constexpr double kRhoClampSlack = 1e-12;

namespace detail {

// Mean over the first `count` entries.
template <typename Derived>
typename Derived::Scalar head_mean(const Eigen::MatrixBase<Derived>& x,
                                   Eigen::Index count) {
  return x.head(count).mean();
}

// Trapezoid weights on n+1 uniform samples, mesh factored out:
// (1/2, 1, ..., 1, 1/2).
template <typename Derived>
typename Derived::Scalar trapezoid_sum(const Eigen::MatrixBase<Derived>& f) {
  const Eigen::Index last = f.size() - 1;
  return f.sum() - (f[0] + f[last]) / 2;
}

inline double finish_rho(double y11, double y12, double y22, double scale11,
                         double scale22) {
  if (!(y11 > kDegeneracyTolerance * scale11) ||
      !(y22 > kDegeneracyTolerance * scale22)) {
    throw DegenerateVariance("sampled series has (near) zero centered variance");
  }
  double rho = y12 / std::sqrt(y11 * y22);
  if (std::abs(rho) > 1.0) {
    if (std::abs(rho) - 1.0 > kRhoClampSlack) {
      throw Error("correlation overshoot beyond round-off: " +
                  std::to_string(rho));
    }
    rho = std::copysign(1.0, rho);
  }
  return rho;
}

}  // namespace detail

/// Discrete Y_ij(n) = delta * sum_{k<n} x_i(t_k) x_j(t_k) - T_n xbar_i xbar_j,
/// with xbar the mean over k = 0..n-1. Inputs hold n+1 samples; the last one
/// is ignored. Evaluated in centered (two-pass) form.
template <typename DerivedI, typename DerivedJ>
double y_discrete(const Eigen::MatrixBase<DerivedI>& xi,
                  const Eigen::MatrixBase<DerivedJ>& xj, double delta) {
  if (xi.size() != xj.size() || xi.size() < 3) {
    throw DomainError("y_discrete needs two series of equal length >= 3");
  }
  const Eigen::Index n = xi.size() - 1;
  const auto ci = (xi.head(n).array() - detail::head_mean(xi, n)).eval();
  const auto cj = (xj.head(n).array() - detail::head_mean(xj, n)).eval();
  return delta * static_cast<double>((ci * cj).sum());
}

template <typename Scalar>
double y_discrete(const BasicPathPair<Scalar>& pair, int i, int j) {
  auto pick = [&](int idx) -> const typename BasicPathPair<Scalar>::Vector& {
    if (idx == 1) return pair.x1;
    if (idx == 2) return pair.x2;
    throw DomainError("path index must be 1 or 2");
  };
  return y_discrete(pick(i), pick(j), pair.grid.delta());
}

/// rho~(n) = Y12 / sqrt(Y11 Y22) from n+1 samples per series. Because delta
/// cancels this is the 1/n Pearson correlation of samples 0..n-1.
template <typename Derived1, typename Derived2>
YuleResult rho_discrete(const Eigen::MatrixBase<Derived1>& x1,
                        const Eigen::MatrixBase<Derived2>& x2, double delta) {
  if (x1.size() != x2.size() || x1.size() < 3) {
    throw DomainError("rho_discrete needs two series of equal length >= 3");
  }
  const Eigen::Index n = x1.size() - 1;
  const auto c1 = (x1.head(n).array() - detail::head_mean(x1, n)).eval();
  const auto c2 = (x2.head(n).array() - detail::head_mean(x2, n)).eval();

  YuleResult r;
  r.mode = StatMode::Discrete;
  r.n = static_cast<std::size_t>(n);
  r.horizon = static_cast<double>(n) * delta;
  r.y11 = delta * static_cast<double>(c1.square().sum());
  r.y22 = delta * static_cast<double>(c2.square().sum());
  r.y12 = delta * static_cast<double>((c1 * c2).sum());
  const double s1 = delta * static_cast<double>(x1.head(n).squaredNorm());
  const double s2 = delta * static_cast<double>(x2.head(n).squaredNorm());
  r.rho = detail::finish_rho(r.y11, r.y12, r.y22, s1, s2);
  return r;
}

template <typename Scalar>
YuleResult rho_discrete(const BasicPathPair<Scalar>& pair) {
  return rho_discrete(pair.x1, pair.x2, pair.grid.delta());
}

/// psi(n, theta) = sqrt(theta * T_n) * rho~(n).
template <typename Scalar>
YuleResult psi_result(const BasicPathPair<Scalar>& pair, double theta) {
  if (!std::isfinite(theta) || theta <= 0.0) {
    throw DomainError("psi needs theta > 0");
  }
  YuleResult r = rho_discrete(pair);
  r.psi = std::sqrt(theta * r.horizon) * r.rho;
  return r;
}

template <typename Scalar>
double psi(const BasicPathPair<Scalar>& pair, double theta) {
  return *psi_result(pair, theta).psi;
}

/// Trapezoid approximation of the continuous-time statistic on [0, T_n].
template <typename Derived1, typename Derived2>
YuleResult rho_quadrature(const Eigen::MatrixBase<Derived1>& x1,
                          const Eigen::MatrixBase<Derived2>& x2, double delta) {
  if (x1.size() != x2.size() || x1.size() < 3) {
    throw DomainError("rho_quadrature needs two series of equal length >= 3");
  }
  const Eigen::Index n = x1.size() - 1;
  const double horizon = static_cast<double>(n) * delta;
  const double mean1 = delta * detail::trapezoid_sum(x1) / horizon;
  const double mean2 = delta * detail::trapezoid_sum(x2) / horizon;
  const auto c1 = (x1.array() - mean1).matrix().eval();
  const auto c2 = (x2.array() - mean2).matrix().eval();

  YuleResult r;
  r.mode = StatMode::Quadrature;
  r.n = static_cast<std::size_t>(n);
  r.horizon = horizon;
  r.y11 = delta * detail::trapezoid_sum(c1.array().square().matrix());
  r.y22 = delta * detail::trapezoid_sum(c2.array().square().matrix());
  r.y12 = delta * detail::trapezoid_sum(c1.cwiseProduct(c2));
  const double s1 =
      delta * detail::trapezoid_sum(x1.array().square().matrix().eval());
  const double s2 =
      delta * detail::trapezoid_sum(x2.array().square().matrix().eval());
  r.rho = detail::finish_rho(r.y11, r.y12, r.y22, s1, s2);
  return r;
}

template <typename Scalar>
YuleResult rho_quadrature(const BasicPathPair<Scalar>& pair) {
  return rho_quadrature(pair.x1, pair.x2, pair.grid.delta());
}

}  // namespace yule

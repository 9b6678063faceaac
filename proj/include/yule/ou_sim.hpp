#pragma once

#include <cmath>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <random>
#include <string>

#include <Eigen/Dense>

#include "yule/errors.hpp"
#include "yule/rng.hpp"

namespace yule {

/// Drift and starting value of dX = -theta X dt + dW.
class OuParams {
 public:
  explicit OuParams(double theta, double x0 = 0.0);

  double theta() const noexcept { return theta_; }
  double x0() const noexcept { return x0_; }

 private:
  double theta_;
  double x0_;
};

/// Uniform grid t_k = k * delta, k = 0..n, with horizon T_n = n * delta.
class SampleGrid {
 public:
  SampleGrid(std::size_t n, double delta);

  /// Mesh delta = n^(-lambda).
  static SampleGrid from_lambda(std::size_t n, double lambda);

  std::size_t steps() const noexcept { return n_; }
  std::size_t size() const noexcept { return n_ + 1; }
  double delta() const noexcept { return delta_; }
  double horizon() const noexcept { return static_cast<double>(n_) * delta_; }
  double time(std::size_t k) const noexcept {
    return static_cast<double>(k) * delta_;
  }

  friend bool operator==(const SampleGrid&, const SampleGrid&) = default;

 private:
  std::size_t n_;
  double delta_;
};

enum class Scheme { Exact, Euler, External };

const char* to_string(Scheme scheme) noexcept;

/// Two aligned trajectories on a common grid.
template <typename Scalar>
struct BasicPathPair {
  using Vector = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;

  SampleGrid grid;
  Vector x1;
  Vector x2;
  Scheme scheme = Scheme::Exact;
  std::uint64_t seed = 0;
  /// Set when the Euler recursion ran with 1 <= theta * delta < 2.
  std::optional<std::string> warning;
};

using PathPair = BasicPathPair<double>;

namespace detail {

// x[k+1] = a * x[k] + s * xi_k, xi_k iid N(0,1).
template <typename Scalar>
void ar1_fill(Eigen::Matrix<Scalar, Eigen::Dynamic, 1>& x, Scalar x0, Scalar a,
              Scalar s, Engine& engine) {
  std::normal_distribution<Scalar> normal;
  x[0] = x0;
  for (Eigen::Index k = 1; k < x.size(); ++k) {
    x[k] = a * x[k - 1] + s * normal(engine);
  }
}

}  // namespace detail

/// Samples the pair through the exact Gaussian transition
/// X(t+delta) = e^{-theta delta} X(t) + sigma_delta xi,
/// sigma_delta^2 = (1 - e^{-2 theta delta}) / (2 theta).
/// Path i draws its noise from derive_seed(seed, i).
template <typename Scalar = double>
BasicPathPair<Scalar> simulate_exact(const OuParams& params,
                                     const SampleGrid& grid,
                                     std::uint64_t seed) {
  const double theta = params.theta();
  const double delta = grid.delta();
  const auto a = static_cast<Scalar>(std::exp(-theta * delta));
  const auto s = static_cast<Scalar>(
      std::sqrt(-std::expm1(-2.0 * theta * delta) / (2.0 * theta)));
  const auto len = static_cast<Eigen::Index>(grid.size());

  BasicPathPair<Scalar> pair{grid, {}, {}, Scheme::Exact, seed, std::nullopt};
  pair.x1.resize(len);
  pair.x2.resize(len);
  Engine e1 = make_engine(derive_seed(seed, 1));
  Engine e2 = make_engine(derive_seed(seed, 2));
  detail::ar1_fill(pair.x1, static_cast<Scalar>(params.x0()), a, s, e1);
  detail::ar1_fill(pair.x2, static_cast<Scalar>(params.x0()), a, s, e2);
  return pair;
}

/// Euler recursion x[k+1] = (1 - drift*delta) x[k] + dW_k, dW_k ~ N(0, delta).
/// Unlike simulate_euler, accepts drift = 0 (Brownian skeleton); used as the
/// common kernel and by diagnostics.
template <typename Scalar = double>
BasicPathPair<Scalar> euler_recursion(double drift, double x0,
                                      const SampleGrid& grid,
                                      std::uint64_t seed) {
  if (!std::isfinite(drift) || drift < 0.0) {
    throw DomainError("euler drift must be finite and nonnegative");
  }
  const double step = drift * grid.delta();
  if (step >= 2.0) {
    throw UnstableScheme("euler scheme explosive: theta*delta = " +
                         std::to_string(step) + " >= 2");
  }
  const auto a = static_cast<Scalar>(1.0 - step);
  const auto s = static_cast<Scalar>(std::sqrt(grid.delta()));
  const auto len = static_cast<Eigen::Index>(grid.size());

  BasicPathPair<Scalar> pair{grid, {}, {}, Scheme::Euler, seed, std::nullopt};
  if (step >= 1.0) {
    pair.warning = "euler scheme unstable: theta*delta = " +
                   std::to_string(step) + " >= 1";
  }
  pair.x1.resize(len);
  pair.x2.resize(len);
  Engine e1 = make_engine(derive_seed(seed, 1));
  Engine e2 = make_engine(derive_seed(seed, 2));
  detail::ar1_fill(pair.x1, static_cast<Scalar>(x0), a, s, e1);
  detail::ar1_fill(pair.x2, static_cast<Scalar>(x0), a, s, e2);
  return pair;
}

template <typename Scalar = double>
BasicPathPair<Scalar> simulate_euler(const OuParams& params,
                                     const SampleGrid& grid,
                                     std::uint64_t seed) {
  return euler_recursion<Scalar>(params.theta(), params.x0(), grid, seed);
}

template <typename Scalar = double>
BasicPathPair<Scalar> simulate(const OuParams& params, const SampleGrid& grid,
                               std::uint64_t seed, Scheme scheme) {
  switch (scheme) {
    case Scheme::Exact:
      return simulate_exact<Scalar>(params, grid, seed);
    case Scheme::Euler:
      return simulate_euler<Scalar>(params, grid, seed);
    case Scheme::External:
      break;
  }
  throw DomainError("cannot simulate with scheme 'external'");
}

/// E[X(r) X(s)] = e^{-theta(r+s)} (e^{2 theta min(r,s)} - 1) / (2 theta),
/// for X(0) = 0.
double covariance(const OuParams& params, double r, double s);

/// Q(lag) = e^{-theta |lag|} / (2 theta); covariance of the stationary process.
double stationary_cov(const OuParams& params, double lag);

}  // namespace yule

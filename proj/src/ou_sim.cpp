#include "yule/ou_sim.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace yule {

OuParams::OuParams(double theta, double x0) : theta_(theta), x0_(x0) {
  if (!std::isfinite(theta) || theta <= 0.0) {
    throw DomainError("theta must be finite and > 0, got " +
                      std::to_string(theta));
  }
  if (!std::isfinite(x0)) throw DomainError("x0 must be finite");
}

SampleGrid::SampleGrid(std::size_t n, double delta) : n_(n), delta_(delta) {
  if (n < 2) throw DomainError("grid needs n >= 2 steps");
  if (!std::isfinite(delta) || delta <= 0.0) {
    throw DomainError("mesh delta must be finite and > 0");
  }
}

SampleGrid SampleGrid::from_lambda(std::size_t n, double lambda) {
  if (!std::isfinite(lambda)) throw DomainError("lambda must be finite");
  return SampleGrid(n, std::pow(static_cast<double>(n), -lambda));
}

const char* to_string(Scheme scheme) noexcept {
  switch (scheme) {
    case Scheme::Exact:
      return "exact";
    case Scheme::Euler:
      return "euler";
    case Scheme::External:
      return "external";
  }
  return "unknown";
}

double covariance(const OuParams& params, double r, double s) {
  if (!(r >= 0.0) || !(s >= 0.0)) {
    throw DomainError("covariance times must be >= 0");
  }
  const double theta = params.theta();
  const double lo = std::min(r, s);
  // e^{-theta(r+s)} (e^{2 theta lo} - 1) = e^{-theta|r-s|} (1 - e^{-2 theta lo})
  return std::exp(-theta * std::abs(r - s)) * -std::expm1(-2.0 * theta * lo) /
         (2.0 * theta);
}

double stationary_cov(const OuParams& params, double lag) {
  if (!std::isfinite(lag)) throw DomainError("lag must be finite");
  const double theta = params.theta();
  return std::exp(-theta * std::abs(lag)) / (2.0 * theta);
}

}  // namespace yule

#include "yule/chaos_kernel.hpp"

#include <random>

namespace yule::chaos {

KernelGrid KernelGrid::midpoint(KernelDomain domain, double horizon,
                                Eigen::Index m) {
  if (!std::isfinite(horizon) || horizon <= 0.0) {
    throw DomainError("kernel grid horizon must be > 0");
  }
  if (m < 1) throw DomainError("kernel grid needs m >= 1");
  KernelGrid grid;
  grid.domain = domain;
  grid.horizon = horizon;
  const double h = grid.length() / static_cast<double>(m);
  grid.nodes = Eigen::VectorXd::LinSpaced(m, 0.0, static_cast<double>(m - 1));
  grid.nodes = (grid.nodes.array() + 0.5) * h + grid.lower();
  grid.weights = Eigen::VectorXd::Constant(m, h);
  return grid;
}

double h_contraction_norm_sq(double theta, double horizon, Eigen::Index m) {
  const auto grid = KernelGrid::midpoint(KernelDomain::SymmetricTT, horizon, m);
  return contraction_norm_sq(
      [=](double x, double y) { return h_sym_kernel(theta, horizon, x, y); },
      grid);
}

double h_variance_quadrature(double theta, double horizon, Eigen::Index m) {
  return 2.0 * l2_norm_sq_extrapolated(
                   [=](double x, double y) {
                     return h_sym_kernel(theta, horizon, x, y);
                   },
                   KernelDomain::SymmetricTT, horizon, m);
}

ChaosSpectrum ChaosSpectrum::from_eigenvalues(Eigen::VectorXd values,
                                              Eigen::Index rank) {
  std::vector<double> sorted(values.data(), values.data() + values.size());
  std::stable_sort(sorted.begin(), sorted.end(), [](double a, double b) {
    return std::abs(a) > std::abs(b);
  });
  const auto keep = std::clamp<Eigen::Index>(rank, 0, values.size());
  ChaosSpectrum s;
  s.lambdas = Eigen::Map<const Eigen::VectorXd>(sorted.data(), keep);
  s.trace = s.lambdas.sum();
  s.hs_norm_sq = s.lambdas.squaredNorm();
  s.third_sum = s.lambdas.array().cube().sum();
  return s;
}

ChaosSpectrum nystrom_spectrum(const Eigen::MatrixXd& kernel_values,
                               const KernelGrid& grid, Eigen::Index rank) {
  const Eigen::Index m = grid.size();
  if (kernel_values.rows() != m || kernel_values.cols() != m) {
    throw DomainError("kernel matrix does not match the grid");
  }
  if (rank < 1 || rank > m) throw DomainError("rank must lie in [1, m]");
  const double scale = kernel_values.cwiseAbs().maxCoeff();
  if ((kernel_values - kernel_values.transpose()).cwiseAbs().maxCoeff() >
      1e-12 * (scale > 0.0 ? scale : 1.0)) {
    throw DomainError("nystrom_spectrum needs a symmetric kernel");
  }
  const Eigen::VectorXd root_w = grid.weights.cwiseSqrt();
  const Eigen::MatrixXd weighted =
      root_w.asDiagonal() * kernel_values * root_w.asDiagonal();
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(weighted,
                                                        Eigen::EigenvaluesOnly);
  if (solver.info() != Eigen::Success) {
    throw EigenFailure("symmetric eigen-solve did not converge");
  }
  return ChaosSpectrum::from_eigenvalues(solver.eigenvalues(), rank);
}

namespace {

double draw(const Eigen::VectorXd& lambdas, Engine& engine) {
  std::normal_distribution<double> normal;
  double sum = 0.0;
  for (Eigen::Index k = 0; k < lambdas.size(); ++k) {
    const double xi = normal(engine);
    sum += lambdas[k] * (xi * xi - 1.0);
  }
  return sum;
}

}  // namespace

double sample_second_chaos(const ChaosSpectrum& spectrum, std::uint64_t seed) {
  Engine engine = make_engine(seed);
  return draw(spectrum.lambdas, engine);
}

Eigen::VectorXd sample_second_chaos(const ChaosSpectrum& spectrum,
                                    std::uint64_t seed, Eigen::Index count) {
  Engine engine = make_engine(seed);
  Eigen::VectorXd out(count);
  for (Eigen::Index i = 0; i < count; ++i) out[i] = draw(spectrum.lambdas, engine);
  return out;
}

}  // namespace yule::chaos

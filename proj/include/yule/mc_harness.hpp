#pragma once

#include <cstddef>
#include <cstdint>
#include <exception>
#include <functional>
#include <optional>
#include <span>
#include <vector>

#include <Eigen/Dense>

#include "yule/ou_sim.hpp"

namespace yule::mc {

enum class Statistic { Rho, Psi };

const char* to_string(Statistic statistic) noexcept;

/// One Monte Carlo experiment on rho~(n) or psi(n, theta). Defaults follow the
/// reference protocol: lambda = 0.6, 500 replications, Euler scheme.
struct McConfig {
  double theta = 1.0;
  std::size_t n = 10000;
  std::optional<double> lambda = 0.6;
  std::optional<double> delta;
  std::size_t replications = 500;
  std::uint64_t master_seed = 42;
  Scheme scheme = Scheme::Euler;
  Statistic statistic = Statistic::Rho;
  /// 0 selects default_worker_count().
  std::size_t workers = 0;

  /// Throws DomainError unless exactly one of lambda/delta is set, theta > 0,
  /// n >= 2 and replications >= 2.
  void validate() const;
  SampleGrid grid() const;
};

/// Worker count from YULE_WORKERS, else std::thread::hardware_concurrency().
std::size_t default_worker_count();

/// Runs body(i) for i in [0, count) on `workers` threads. Indices are handed
/// out dynamically; the first exception thrown by any body is rethrown after
/// all workers stop.
void parallel_for(std::size_t count, std::size_t workers,
                  const std::function<void(std::size_t)>& body);

/// Statistic values ordered by replication index. Replications whose sampled
/// series were degenerate are left out and counted in `skipped`.
struct McResult {
  std::vector<std::size_t> replications;
  std::vector<double> values;
  std::size_t skipped = 0;
};

/// Replication r simulates with seed derive_seed(master_seed, r). Output is
/// identical for every worker count. More than 1% skipped replications is a
/// TooManySkipped error.
McResult run_mc(const McConfig& config);

struct McSummary {
  std::size_t count = 0;
  double mean = 0.0;
  double median = 0.0;
  double stddev = 0.0;  // divisor count - 1
  double min = 0.0;
  double max = 0.0;
};

McSummary summarize(std::span<const double> samples);

/// Standard normal CDF, 0.5 erfc(-x / sqrt 2).
double normal_cdf(double x);

struct KsReport {
  double distance = 0.0;
  std::size_t sample_size = 0;
  /// Order statistic at which the supremum is attained.
  double location = 0.0;
};

/// sup_z |F_N(z) - Phi(z)| for the empirical CDF F_N of the samples.
/// Needs at least 10 samples.
KsReport kolmogorov_distance(std::span<const double> samples);

/// Right-continuous step function: F(z) = probability[k] for
/// points[k] <= z < points[k+1], zero left of points[0].
struct Ecdf {
  std::vector<double> points;
  std::vector<double> probability;

  double operator()(double z) const;
};

Ecdf ecdf(std::span<const double> samples);

struct Histogram {
  Eigen::VectorXd edges;  // bins + 1 entries
  std::vector<std::size_t> counts;
};

/// Equal-width bins spanning [min, max]; the right edge is closed. A sample
/// with zero range gets a unit-width window centered on the value.
Histogram histogram(std::span<const double> samples, std::size_t bins);

/// Monte Carlo draws of delta(n) = A(n) - F_{T_n}, where
/// A(n) = (sqrt(T_n)/n) sum_{k<n} X1 X2 on the observation grid and F_{T_n}
/// is replaced by a trapezoid integral on a grid `refine` times finer. Paths
/// use the exact transition on the fine grid.
std::vector<double> discretization_error_samples(double theta, std::size_t n,
                                                 double lambda,
                                                 std::size_t replications,
                                                 std::uint64_t master_seed,
                                                 std::size_t refine = 16,
                                                 std::size_t workers = 0);

}  // namespace yule::mc

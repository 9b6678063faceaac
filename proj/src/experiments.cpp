#include <cmath>

#include "yule/cli_io.hpp"
#include "yule/rng.hpp"

namespace yule::cli {

std::vector<TableRow> run_table1(const TableSpec& spec) {
  std::vector<TableRow> rows;
  rows.reserve(spec.thetas.size() * spec.ns.size());
  std::uint64_t cell = 0;
  for (const double theta : spec.thetas) {
    for (const std::size_t n : spec.ns) {
      mc::McConfig config;
      config.theta = theta;
      config.n = n;
      config.lambda = spec.lambda;
      config.replications = spec.replications;
      config.master_seed = derive_seed(spec.master_seed, cell++);
      config.scheme = spec.scheme;
      config.statistic = spec.statistic;
      config.workers = spec.workers;
      const auto result = mc::run_mc(config);
      rows.push_back({theta, n, config.grid().horizon(),
                      mc::summarize(result.values)});
    }
  }
  return rows;
}

double two_sided_p_value(double psi) {
  // 2 (1 - Phi(|psi|)) = erfc(|psi| / sqrt 2), without cancellation
  return std::erfc(std::abs(psi) / std::sqrt(2.0));
}

AssessReport assess(const PathPair& pair, double theta) {
  AssessReport report;
  report.stats = psi_result(pair, theta);
  report.p_value = two_sided_p_value(*report.stats.psi);
  if (report.stats.horizon > std::exp(1.0)) {
    report.rate = analytic::rate_bound_discrete(theta, pair.grid.steps(),
                                                pair.grid.delta());
  }
  return report;
}

}  // namespace yule::cli

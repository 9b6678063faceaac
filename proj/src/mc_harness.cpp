#include "yule/mc_harness.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdlib>
#include <limits>
#include <mutex>
#include <numbers>
#include <string>
#include <thread>

#include "yule/errors.hpp"
#include "yule/rng.hpp"
#include "yule/yule_stats.hpp"

namespace yule::mc {

const char* to_string(Statistic statistic) noexcept {
  return statistic == Statistic::Rho ? "rho" : "psi";
}

void McConfig::validate() const {
  if (!std::isfinite(theta) || theta <= 0.0) {
    throw DomainError("theta must be finite and > 0");
  }
  if (n < 2) throw DomainError("n must be >= 2");
  if (lambda.has_value() == delta.has_value()) {
    throw DomainError("set exactly one of lambda and delta");
  }
  if (lambda && !(*lambda > 0.5 && *lambda < 1.0)) {
    throw DomainError("lambda must lie in (1/2, 1)");
  }
  if (replications < 2) throw DomainError("replications must be >= 2");
  if (scheme == Scheme::External) {
    throw DomainError("monte carlo needs a simulation scheme");
  }
}

SampleGrid McConfig::grid() const {
  validate();
  return lambda ? SampleGrid::from_lambda(n, *lambda) : SampleGrid(n, *delta);
}

std::size_t default_worker_count() {
  if (const char* env = std::getenv("YULE_WORKERS")) {
    char* end = nullptr;
    const unsigned long v = std::strtoul(env, &end, 10);
    if (end != env && *end == '\0' && v > 0) return v;
  }
  return std::max(1u, std::thread::hardware_concurrency());
}

void parallel_for(std::size_t count, std::size_t workers,
                  const std::function<void(std::size_t)>& body) {
  if (workers == 0) workers = default_worker_count();
  workers = std::min(workers, std::max<std::size_t>(count, 1));

  std::atomic<std::size_t> next{0};
  std::atomic<bool> failed{false};
  std::exception_ptr error;
  std::mutex error_mutex;

  auto work = [&] {
    for (;;) {
      if (failed.load(std::memory_order_relaxed)) return;
      const std::size_t i = next.fetch_add(1, std::memory_order_relaxed);
      if (i >= count) return;
      try {
        body(i);
      } catch (...) {
        std::lock_guard lock(error_mutex);
        if (!error) error = std::current_exception();
        failed = true;
      }
    }
  };

  if (workers <= 1) {
    work();
  } else {
    std::vector<std::jthread> pool;
    pool.reserve(workers - 1);
    for (std::size_t w = 1; w < workers; ++w) pool.emplace_back(work);
    work();
  }
  if (error) std::rethrow_exception(error);
}

McResult run_mc(const McConfig& config) {
  const SampleGrid grid = config.grid();
  const OuParams params(config.theta);

  constexpr double kSkipped = std::numeric_limits<double>::quiet_NaN();
  std::vector<double> slots(config.replications, kSkipped);

  parallel_for(config.replications, config.workers, [&](std::size_t r) {
    const auto pair =
        simulate(params, grid, derive_seed(config.master_seed, r), config.scheme);
    try {
      const YuleResult res = config.statistic == Statistic::Psi
                                 ? psi_result(pair, config.theta)
                                 : rho_discrete(pair);
      slots[r] = config.statistic == Statistic::Psi ? *res.psi : res.rho;
    } catch (const DegenerateVariance&) {
      // left as NaN, counted below
    }
  });

  McResult out;
  out.values.reserve(slots.size());
  out.replications.reserve(slots.size());
  for (std::size_t r = 0; r < slots.size(); ++r) {
    if (std::isnan(slots[r])) {
      ++out.skipped;
      continue;
    }
    out.replications.push_back(r);
    out.values.push_back(slots[r]);
  }
  if (100 * out.skipped > config.replications) {
    throw TooManySkipped(std::to_string(out.skipped) + " of " +
                         std::to_string(config.replications) +
                         " replications were degenerate");
  }
  return out;
}

McSummary summarize(std::span<const double> samples) {
  if (samples.size() < 2) throw EmptySample("summary needs at least 2 samples");
  std::vector<double> sorted(samples.begin(), samples.end());
  std::sort(sorted.begin(), sorted.end());
  const std::size_t count = sorted.size();

  McSummary s;
  s.count = count;
  s.min = sorted.front();
  s.max = sorted.back();
  s.median = count % 2 == 1
                 ? sorted[count / 2]
                 : (sorted[count / 2 - 1] + sorted[count / 2]) / 2.0;
  const Eigen::Map<const Eigen::VectorXd> x(samples.data(),
                                            static_cast<Eigen::Index>(count));
  s.mean = x.mean();
  s.stddev = std::sqrt((x.array() - s.mean).square().sum() /
                       static_cast<double>(count - 1));
  return s;
}

double normal_cdf(double x) {
  return 0.5 * std::erfc(-x / std::numbers::sqrt2);
}

KsReport kolmogorov_distance(std::span<const double> samples) {
  if (samples.size() < 10) {
    throw EmptySample("kolmogorov distance needs at least 10 samples");
  }
  std::vector<double> sorted(samples.begin(), samples.end());
  std::sort(sorted.begin(), sorted.end());
  const auto count = static_cast<double>(sorted.size());

  KsReport report;
  report.sample_size = sorted.size();
  for (std::size_t i = 0; i < sorted.size(); ++i) {
    const double phi = normal_cdf(sorted[i]);
    const double above = static_cast<double>(i + 1) / count - phi;
    const double below = phi - static_cast<double>(i) / count;
    const double d = std::max(above, below);
    if (d > report.distance) {
      report.distance = d;
      report.location = sorted[i];
    }
  }
  return report;
}

double Ecdf::operator()(double z) const {
  const auto it = std::upper_bound(points.begin(), points.end(), z);
  if (it == points.begin()) return 0.0;
  return probability[static_cast<std::size_t>(it - points.begin()) - 1];
}

Ecdf ecdf(std::span<const double> samples) {
  if (samples.empty()) throw EmptySample("ecdf needs at least 1 sample");
  std::vector<double> sorted(samples.begin(), samples.end());
  std::sort(sorted.begin(), sorted.end());
  const auto count = static_cast<double>(sorted.size());

  Ecdf f;
  for (std::size_t i = 0; i < sorted.size(); ++i) {
    if (!f.points.empty() && f.points.back() == sorted[i]) {
      f.probability.back() = static_cast<double>(i + 1) / count;
    } else {
      f.points.push_back(sorted[i]);
      f.probability.push_back(static_cast<double>(i + 1) / count);
    }
  }
  return f;
}

Histogram histogram(std::span<const double> samples, std::size_t bins) {
  if (bins == 0) throw ZeroBins("histogram needs at least one bin");
  if (samples.empty()) throw EmptySample("histogram needs at least 1 sample");
  const auto [lo_it, hi_it] = std::minmax_element(samples.begin(), samples.end());
  double lo = *lo_it;
  double hi = *hi_it;
  if (hi == lo) {
    lo -= 0.5;
    hi += 0.5;
  }
  Histogram h;
  h.edges = Eigen::VectorXd::LinSpaced(static_cast<Eigen::Index>(bins + 1), lo, hi);
  h.counts.assign(bins, 0);
  const double width = (hi - lo) / static_cast<double>(bins);
  for (const double x : samples) {
    auto b = static_cast<std::size_t>((x - lo) / width);
    b = std::min(b, bins - 1);
    // guard against round-off placing x one bin off its edges
    while (b > 0 && x < h.edges[static_cast<Eigen::Index>(b)]) --b;
    while (b + 1 < bins && x >= h.edges[static_cast<Eigen::Index>(b + 1)]) ++b;
    ++h.counts[b];
  }
  return h;
}

std::vector<double> discretization_error_samples(double theta, std::size_t n,
                                                 double lambda,
                                                 std::size_t replications,
                                                 std::uint64_t master_seed,
                                                 std::size_t refine,
                                                 std::size_t workers) {
  if (refine < 1) throw DomainError("refine must be >= 1");
  const SampleGrid coarse = SampleGrid::from_lambda(n, lambda);
  const SampleGrid fine(n * refine, coarse.delta() / static_cast<double>(refine));
  const OuParams params(theta);
  const double horizon = coarse.horizon();
  const double root_t = std::sqrt(horizon);

  std::vector<double> out(replications);
  parallel_for(replications, workers, [&](std::size_t r) {
    const auto pair = simulate_exact(params, fine, derive_seed(master_seed, r));
    const Eigen::VectorXd product = pair.x1.cwiseProduct(pair.x2);
    const auto stride = static_cast<Eigen::Index>(refine);
    double riemann = 0.0;
    for (Eigen::Index k = 0; k < static_cast<Eigen::Index>(n); ++k) {
      riemann += product[k * stride];
    }
    const double a_n = root_t / static_cast<double>(n) * riemann;
    const Eigen::Index last = product.size() - 1;
    const double integral =
        fine.delta() * (product.sum() - (product[0] + product[last]) / 2.0);
    out[r] = a_n - integral / root_t;
  });
  return out;
}

}  // namespace yule::mc

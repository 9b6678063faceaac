// Acceptance suite: one PASS/FAIL line per criterion, exit status 1 if any fail.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "yule/analytic.hpp"
#include "yule/chaos_kernel.hpp"
#include "yule/cli_io.hpp"
#include "yule/mc_harness.hpp"
#include "yule/yule_stats.hpp"

using namespace yule;

namespace {

struct Verdict {
  bool pass = false;
  std::string detail;
};

std::string fmt(const char* pattern, auto... args) {
  char buf[512];
  std::snprintf(buf, sizeof buf, pattern, args...);
  return buf;
}

mc::McConfig protocol(double theta, std::size_t n, mc::Statistic statistic) {
  mc::McConfig c;
  c.theta = theta;
  c.n = n;
  c.lambda = 0.6;
  c.replications = 500;
  c.master_seed = 42;
  c.scheme = Scheme::Euler;
  c.statistic = statistic;
  return c;
}

// psi samples at theta = 2, n = 1e5, shared by criteria 2 and 3
const std::vector<double>& psi_samples() {
  static const std::vector<double> values =
      mc::run_mc(protocol(2.0, 100000, mc::Statistic::Psi)).values;
  return values;
}

Verdict table_row() {
  cli::TableSpec spec;
  spec.thetas = {1.0};
  spec.ns = {10000};
  const auto t0 = std::chrono::steady_clock::now();
  const auto rows = cli::run_table1(spec);
  const double secs =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  const auto& s = rows[0].summary;
  const bool ok = std::abs(s.mean) <= 0.02 && s.stddev >= 0.10 && s.stddev <= 0.20 &&
                  secs <= 60.0;
  return {ok, fmt("mean=%.5f stddev=%.5f runtime=%.1fs (reference -0.01022, 0.14990)",
                  s.mean, s.stddev, secs)};
}

Verdict psi_statistics() {
  const auto t0 = std::chrono::steady_clock::now();
  const auto s = mc::summarize(psi_samples());
  const double secs =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  const bool ok = std::abs(s.mean) <= 0.1 && std::abs(s.median) <= 0.1 &&
                  s.stddev >= 0.9 && s.stddev <= 1.1 && secs <= 300.0;
  return {ok, fmt("mean=%.5f median=%.5f stddev=%.5f runtime=%.1fs "
                  "(reference 0.00832, 0.01206, 0.99691)",
                  s.mean, s.median, s.stddev, secs)};
}

Verdict kolmogorov() {
  const auto r = mc::kolmogorov_distance(psi_samples());
  return {r.distance <= 0.08, fmt("D=%.5f over %zu samples (reference ~0.01974, accept <= 0.08)",
                                  r.distance, r.sample_size)};
}

Verdict variance_limit() {
  bool ok = true;
  double worst = 0.0;
  for (double theta : {0.25, 0.5, 1.0, 2.0, 5.0, 10.0}) {
    for (double T : {0.1, 1.0, 5.0, 10.0, 50.0, 100.0, 1000.0}) {
      const double gap = std::abs(analytic::var_ft(theta, T) - analytic::var_ft_limit(theta));
      const double bound = analytic::var_ft_error_constant(theta) / T;
      worst = std::max(worst, gap / bound);
      ok = ok && gap <= bound;
    }
  }
  const double closed = analytic::var_ft(1.0, 10.0);
  const double quad = chaos::h_variance_quadrature(1.0, 10.0, 2048);
  const double rel = std::abs(quad - closed) / closed;
  ok = ok && rel <= 1e-6;
  return {ok, fmt("lattice max gap/bound=%.3f; quadrature %.10f vs closed %.10f, rel %.2e",
                  worst, quad, closed, rel)};
}

Verdict contraction() {
  bool ok = true;
  std::string detail;
  for (double T : {5.0, 10.0, 20.0}) {
    const double value = chaos::h_contraction_norm_sq(1.0, T, 256);
    const double bound = analytic::contraction_bound(1.0, T);
    ok = ok && value >= 0.0 && value <= bound;
    detail += fmt("T=%g: %.5f <= %.5f; ", T, value, bound);
  }
  return {ok, detail};
}

Verdict spectrum() {
  const double theta = 1.0, T = 10.0;
  auto k = [&](double x, double y) { return chaos::k_kernel(theta, T, x, y); };
  const auto fine = chaos::KernelGrid::midpoint(chaos::KernelDomain::PositiveT, T, 1024);
  const auto full = chaos::nystrom_spectrum(k, fine, 1024);
  const double target = analytic::mu_theta(theta, T) / (2 * theta);
  const double trace_rel = std::abs(full.trace - target) / target;

  const auto coarse = chaos::KernelGrid::midpoint(chaos::KernelDomain::PositiveT, T, 256);
  const auto s = chaos::nystrom_spectrum(k, coarse, 60);
  const Eigen::VectorXd draws = chaos::sample_second_chaos(s, 42, 200000);
  const double n = static_cast<double>(draws.size());
  const Eigen::ArrayXd cube = draws.array().cube();
  const double third = cube.mean();
  const double se_third = std::sqrt((cube - third).square().sum() / (n - 1) / n);
  const Eigen::ArrayXd centered = draws.array() - draws.mean();
  const double var = centered.square().sum() / (n - 1);
  const double se_var =
      std::sqrt((centered.square() - var).square().sum() / (n - 1) / n);

  const bool trace_ok = trace_rel <= 1e-6;
  const bool third_ok = std::abs(third - s.third_cumulant()) <= 4 * se_third;
  const bool two_ok = std::abs(var - 2 * s.hs_norm_sq) <= 4 * se_var;
  const bool one_rejected = std::abs(var - s.hs_norm_sq) > 4 * se_var;
  return {trace_ok && third_ok && two_ok && one_rejected,
          fmt("trace rel err %.2e; E[Y^3]=%.6f vs 8*sum l^3=%.6f (SE %.1e); "
              "Var=%.6f vs 2*sum l^2=%.6f, sum l^2=%.6f (SE %.1e)",
              trace_rel, third, s.third_cumulant(), se_third, var, 2 * s.hs_norm_sq,
              s.hs_norm_sq, se_var)};
}

double pearson(const Eigen::VectorXd& x, const Eigen::VectorXd& y, std::size_t count) {
  long double mx = 0, my = 0;
  for (std::size_t k = 0; k < count; ++k) {
    mx += x[k];
    my += y[k];
  }
  mx /= count;
  my /= count;
  long double sxy = 0, sxx = 0, syy = 0;
  for (std::size_t k = 0; k < count; ++k) {
    sxy += (x[k] - mx) * (y[k] - my);
    sxx += (x[k] - mx) * (x[k] - mx);
    syy += (y[k] - my) * (y[k] - my);
  }
  return static_cast<double>(sxy / std::sqrt(sxx * syy));
}

Verdict pearson_oracle() {
  double worst = 0.0;
  int pairs = 0;
  for (std::size_t n : {3u, 17u, 128u, 1001u}) {
    for (std::uint64_t seed = 0; seed < 100; ++seed) {
      const auto p = simulate_exact(OuParams(1.0), SampleGrid::from_lambda(n, 0.6),
                                    derive_seed(n, seed));
      worst = std::max(worst, std::abs(rho_discrete(p).rho - pearson(p.x1, p.x2, n)));
      ++pairs;
    }
  }
  return {worst <= 1e-12, fmt("max |diff| = %.2e over %d pairs", worst, pairs)};
}

Verdict clt_variance() {
  bool ok = true;
  std::string detail;
  for (double theta : {1.0, 5.0}) {
    const auto r = mc::run_mc(protocol(theta, 100000, mc::Statistic::Rho));
    const double root_t = std::sqrt(std::pow(1e5, 0.4));
    std::vector<double> scaled;
    for (double v : r.values) scaled.push_back(root_t * v);
    const double var = std::pow(mc::summarize(scaled).stddev, 2);
    const bool in = var >= 0.7 / theta && var <= 1.4 / theta;
    ok = ok && in;
    detail += fmt("theta=%g: var=%.4f in [%.3f, %.3f]; ", theta, var, 0.7 / theta,
                  1.4 / theta);
  }
  return {ok, detail};
}

Verdict discretization() {
  const std::size_t n = 10000;
  const double lambda = 0.6;
  const auto d = mc::discretization_error_samples(1.0, n, lambda, 500, 42, 16);
  double mean_sq = 0.0;
  for (double x : d) mean_sq += x * x;
  mean_sq /= static_cast<double>(d.size());
  const double bound = analytic::discretization_error_bound(1.0, n, std::pow(1e4, -lambda));
  return {mean_sq <= bound, fmt("E[delta^2]=%.3e <= C*n*delta^2=%.5f", mean_sq, bound)};
}

std::string run_cli(std::vector<std::string> args) {
  std::vector<const char*> argv{"yule"};
  for (const auto& a : args) argv.push_back(a.c_str());
  std::ostringstream out, err;
  const int code = cli::main_entry(static_cast<int>(argv.size()), argv.data(), out, err);
  return std::to_string(code) + "\n" + out.str();
}

Verdict determinism() {
  const std::vector<std::vector<std::string>> experiments = {
      {"mc-table", "--theta", "1,5", "--n", "10000,20000", "--reps", "100", "--seed", "42"},
      {"ks", "--theta", "2", "--n", "20000", "--reps", "100", "--format", "csv"},
      {"simulate", "--theta", "1", "--n", "5000", "--seed", "9"},
      {"mc-table", "--theta", "2", "--n", "5000", "--reps", "64", "--scheme", "exact",
       "--statistic", "psi"},
  };
  int identical = 0;
  for (const auto& base : experiments) {
    std::vector<std::string> outputs;
    for (const char* w : {"1", "2", "4", "1"}) {
      auto args = base;
      args.insert(args.end(), {"--workers", w});
      outputs.push_back(run_cli(args));
    }
    bool same = outputs[0].rfind("0\n", 0) == 0;
    for (const auto& o : outputs) same = same && o == outputs[0];
    identical += same;
  }
  return {identical == static_cast<int>(experiments.size()),
          fmt("%d/%zu experiments byte-identical across workers {1,2,4} and rerun",
              identical, experiments.size())};
}

}  // namespace

int main() {
  const std::vector<std::pair<const char*, std::function<Verdict()>>> criteria = {
      {"table row theta=1, n=1e4", table_row},
      {"psi statistics theta=2, n=1e5", psi_statistics},
      {"Kolmogorov distance of psi", kolmogorov},
      {"variance limit and quadrature", variance_limit},
      {"contraction bound", contraction},
      {"spectrum identities", spectrum},
      {"Pearson oracle equivalence", pearson_oracle},
      {"CLT variance scaling", clt_variance},
      {"discretization-error bound", discretization},
      {"determinism across workers", determinism},
  };
  int failed = 0;
  int index = 0;
  for (const auto& [name, check] : criteria) {
    ++index;
    Verdict v;
    try {
      v = check();
    } catch (const std::exception& e) {
      v = {false, std::string("threw: ") + e.what()};
    }
    failed += !v.pass;
    std::printf("%s criterion %d: %s | %s\n", v.pass ? "PASS" : "FAIL", index, name,
                v.detail.c_str());
    std::fflush(stdout);
  }
  std::printf("%d/%zu criteria passed\n", static_cast<int>(criteria.size()) - failed,
              criteria.size());
  return failed == 0 ? 0 : 1;
}

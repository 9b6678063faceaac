#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "yule/analytic.hpp"
#include "yule/errors.hpp"
#include "yule/mc_harness.hpp"
#include "yule/ou_sim.hpp"
#include "yule/yule_stats.hpp"

namespace yule::cli {

inline constexpr std::string_view kVersion = "0.1.0";
inline constexpr int kSchemaVersion = 1;

inline constexpr int kExitOk = 0;
inline constexpr int kExitRuntime = 1;
inline constexpr int kExitUsage = 2;

/// Bad command line. Maps to exit code 2.
class UsageError : public Error {
 public:
  using Error::Error;
};

enum class Command {
  Simulate,
  Rho,
  Psi,
  McTable,
  Ks,
  Analytic,
  MeshPlan,
  KernelCheck,
  Assess,
};

enum class Format { Csv, Json };

const char* to_string(Command command) noexcept;

/// A validated command line. Parameter values are kept as the strings the
/// user typed; typed accessors convert on demand.
struct ExperimentSpec {
  Command command = Command::Simulate;
  std::map<std::string, std::string> parameters;
  std::string output_path;  // empty means stdout
  Format format = Format::Json;
  /// Set when --help was requested; holds the help text.
  std::optional<std::string> help;

  bool has(const std::string& name) const;
  std::string text(const std::string& name) const;
  double real(const std::string& name) const;
  std::size_t count(const std::string& name) const;
  std::uint64_t seed() const;
  std::vector<double> reals(const std::string& name) const;
  std::vector<std::size_t> counts(const std::string& name) const;

  /// `command=...;key=value;...` over every parameter except output and
  /// worker settings, which never change results.
  std::string config_string() const;
};

/// Parses argv[1..]. Throws UsageError for unknown flags, missing required
/// parameters, malformed numbers and conflicting lambda/delta.
ExperimentSpec parse_cli(const std::vector<std::string>& args);

// -- files -----------------------------------------------------------------

/// `%.17g`: round-trips every double.
std::string format_real(double value);

/// `# seed=<seed>, version=<version>, config=<config>`
std::string provenance_line(const ExperimentSpec& spec);

void write_paths_csv(std::ostream& out, const PathPair& pair,
                     const std::string& provenance);

/// Reads `t,x1,x2` with optional `#` comment lines and a header row. The time
/// column must be a uniform grid starting anywhere; each t_k may deviate from
/// t_0 + k * delta by at most 1e-9 * delta.
PathPair read_paths_csv(std::istream& in);

void write_samples_csv(std::ostream& out, const mc::McResult& result,
                       const std::string& provenance);
void write_ecdf_csv(std::ostream& out, const mc::Ecdf& f,
                    const std::string& provenance);
void write_histogram_csv(std::ostream& out, const mc::Histogram& h,
                         const std::string& provenance);

// -- experiments -----------------------------------------------------------

struct TableSpec {
  std::vector<double> thetas{1.0, 5.0, 10.0};
  std::vector<std::size_t> ns{10000, 50000, 100000};
  double lambda = 0.6;
  std::size_t replications = 500;
  std::uint64_t master_seed = 42;
  Scheme scheme = Scheme::Euler;
  mc::Statistic statistic = mc::Statistic::Rho;
  std::size_t workers = 0;
};

struct TableRow {
  double theta = 0.0;
  std::size_t n = 0;
  double horizon = 0.0;
  mc::McSummary summary;
};

/// One Monte Carlo cell per (theta, n), theta-major. Cell c runs with master
/// seed derive_seed(master_seed, c).
std::vector<TableRow> run_table1(const TableSpec& spec);

/// `theta,n,T_n,mean,median,stddev`
void write_table_csv(std::ostream& out, std::span<const TableRow> rows,
                     const std::string& provenance);

struct AssessReport {
  YuleResult stats;  // discrete, with psi
  double p_value = 0.0;
  std::optional<analytic::RateBound> rate;  // absent when T_n <= e
};

/// Two-sided p-value 2 (1 - Phi(|psi|)).
double two_sided_p_value(double psi);

AssessReport assess(const PathPair& pair, double theta);

/// Executes a parsed command, writing results to `out` (or the spec's output
/// file) and diagnostics to `err`. Returns the process exit code.
int run(const ExperimentSpec& spec, std::ostream& out, std::ostream& err);

/// parse_cli + run with exit-code mapping.
int main_entry(int argc, const char* const* argv, std::ostream& out,
               std::ostream& err);

}  // namespace yule::cli

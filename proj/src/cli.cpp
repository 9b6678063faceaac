#include <CLI11.hpp>
#include <json.hpp>

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iostream>
#include <sstream>

#include "yule/chaos_kernel.hpp"
#include "yule/cli_io.hpp"

namespace yule::cli {

using nlohmann::json;

namespace {

enum class Kind { Real, Count, Seed, Text, RealList, CountList };

struct OptionDef {
  const char* name;
  Kind kind;
  const char* help;
  bool required = false;
};

struct CommandDef {
  Command command;
  const char* name;
  const char* help;
  std::vector<OptionDef> options;
  bool grid = false;  // accepts --lambda / --delta
  Format default_format = Format::Json;
};

const std::vector<CommandDef>& command_table() {
  static const std::vector<CommandDef> table = {
      {Command::Simulate,
       "simulate",
       "Simulate a pair of OU paths and write t,x1,x2",
       {{"theta", Kind::Real, "drift theta > 0", true},
        {"n", Kind::Count, "number of steps", true},
        {"scheme", Kind::Text, "exact | euler (default euler)"}},
       true,
       Format::Csv},
      {Command::Rho,
       "rho",
       "Correlation statistics of a simulated or ingested pair",
       {{"input", Kind::Text, "CSV with columns t,x1,x2"},
        {"theta", Kind::Real, "drift theta > 0 (simulation, adds psi)"},
        {"n", Kind::Count, "number of steps (simulation)"},
        {"scheme", Kind::Text, "exact | euler (default euler)"}},
       true},
      {Command::Psi,
       "psi",
       "Standardized statistic sqrt(theta T_n) rho~(n)",
       {{"input", Kind::Text, "CSV with columns t,x1,x2"},
        {"theta", Kind::Real, "drift theta > 0", true},
        {"n", Kind::Count, "number of steps (simulation)"},
        {"scheme", Kind::Text, "exact | euler (default euler)"}},
       true},
      {Command::McTable,
       "mc-table",
       "Monte Carlo mean/median/stddev table over theta x n",
       {{"theta", Kind::RealList, "comma-separated thetas (default 1,5,10)"},
        {"n", Kind::CountList,
         "comma-separated sample sizes (default 10000,50000,100000)"},
        {"reps", Kind::Count, "replications per cell (default 500)"},
        {"scheme", Kind::Text, "exact | euler (default euler)"},
        {"statistic", Kind::Text, "rho | psi (default rho)"},
        {"samples", Kind::Text, "write replication,value CSV (single cell)"}},
       true,
       Format::Csv},
      {Command::Ks,
       "ks",
       "Kolmogorov distance of psi(n, theta) to N(0,1)",
       {{"theta", Kind::Real, "drift (default 2)"},
        {"n", Kind::Count, "number of steps (default 100000)"},
        {"reps", Kind::Count, "replications (default 500)"},
        {"scheme", Kind::Text, "exact | euler (default euler)"},
        {"ecdf", Kind::Text, "write x,F CSV"},
        {"histogram", Kind::Text, "write bin_left,bin_right,count CSV"},
        {"bins", Kind::Count, "histogram bins (default 30)"}},
       true},
      {Command::Analytic,
       "analytic",
       "Evaluate a closed-form quantity",
       {{"name", Kind::Text, "formula name", true},
        {"theta", Kind::Real, "drift"},
        {"T", Kind::Real, "horizon"},
        {"n", Kind::Count, "sample size"},
        {"beta", Kind::Real, "scale beta"},
        {"sigma1", Kind::Real, "std of first factor"},
        {"sigma2", Kind::Real, "std of second factor"},
        {"y", Kind::Real, "tail level"},
        {"variance", Kind::Real, "variance"},
        {"k3", Kind::Real, "third cumulant"},
        {"epsilon", Kind::Real, "epsilon"}},
       true},
      {Command::MeshPlan,
       "mesh-plan",
       "Mesh delta = n^-lambda, horizon and predicted rate",
       {{"n", Kind::Count, "sample size", true}},
       true},
      {Command::KernelCheck,
       "kernel-check",
       "Quadrature and spectral checks of the chaos kernels",
       {{"theta", Kind::Real, "drift (default 1)"},
        {"T", Kind::Real, "horizon (default 10)"},
        {"m", Kind::Count, "quadrature nodes for the variance (default 2048)"},
        {"m-contraction", Kind::Count, "nodes for the contraction (default 256)"},
        {"m-spectrum", Kind::Count, "nodes for the spectrum (default 512)"},
        {"rank", Kind::Count, "eigenvalues to report (default 10)"}}},
      {Command::Assess,
       "assess",
       "Test two observed series for nonsense correlation",
       {{"input", Kind::Text, "CSV with columns t,x1,x2", true},
        {"theta", Kind::Real, "known drift theta > 0", true}}},
  };
  return table;
}

double to_real(const std::string& name, const std::string& s) {
  std::size_t used = 0;
  double v = 0.0;
  try {
    v = std::stod(s, &used);
  } catch (const std::exception&) {
    used = 0;
  }
  if (used == 0 || used != s.size() || !std::isfinite(v)) {
    throw UsageError("--" + name + ": expected a number, got '" + s + "'");
  }
  return v;
}

std::size_t to_count(const std::string& name, const std::string& s) {
  const double v = to_real(name, s);
  if (v < 0 || v != std::floor(v) || v > 1e15) {
    throw UsageError("--" + name + ": expected a nonnegative integer, got '" +
                     s + "'");
  }
  return static_cast<std::size_t>(v);
}

std::vector<std::string> split_list(const std::string& s) {
  std::vector<std::string> parts;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, ',')) parts.push_back(item);
  return parts;
}

void check_kind(const std::string& name, Kind kind, const std::string& value) {
  switch (kind) {
    case Kind::Real:
      to_real(name, value);
      break;
    case Kind::Count:
      to_count(name, value);
      break;
    case Kind::Seed:
      if (value.empty() ||
          !std::all_of(value.begin(), value.end(),
                       [](char c) { return c >= '0' && c <= '9'; })) {
        throw UsageError("--seed: expected an unsigned integer");
      }
      break;
    case Kind::RealList:
      for (const auto& v : split_list(value)) to_real(name, v);
      break;
    case Kind::CountList:
      for (const auto& v : split_list(value)) to_count(name, v);
      break;
    case Kind::Text:
      break;
  }
}

}  // namespace

const char* to_string(Command command) noexcept {
  switch (command) {
    case Command::Simulate:
      return "simulate";
    case Command::Rho:
      return "rho";
    case Command::Psi:
      return "psi";
    case Command::McTable:
      return "mc-table";
    case Command::Ks:
      return "ks";
    case Command::Analytic:
      return "analytic";
    case Command::MeshPlan:
      return "mesh-plan";
    case Command::KernelCheck:
      return "kernel-check";
    case Command::Assess:
      return "assess";
  }
  return "unknown";
}

bool ExperimentSpec::has(const std::string& name) const {
  return parameters.contains(name);
}

std::string ExperimentSpec::text(const std::string& name) const {
  const auto it = parameters.find(name);
  if (it == parameters.end()) throw UsageError("missing --" + name);
  return it->second;
}

double ExperimentSpec::real(const std::string& name) const {
  return to_real(name, text(name));
}

std::size_t ExperimentSpec::count(const std::string& name) const {
  return to_count(name, text(name));
}

std::uint64_t ExperimentSpec::seed() const {
  return has("seed") ? std::stoull(text("seed")) : 42;
}

std::vector<double> ExperimentSpec::reals(const std::string& name) const {
  std::vector<double> out;
  for (const auto& v : split_list(text(name))) out.push_back(to_real(name, v));
  return out;
}

std::vector<std::size_t> ExperimentSpec::counts(const std::string& name) const {
  std::vector<std::size_t> out;
  for (const auto& v : split_list(text(name))) out.push_back(to_count(name, v));
  return out;
}

std::string ExperimentSpec::config_string() const {
  std::string s = std::string("command=") + to_string(command);
  for (const auto& [k, v] : parameters) {
    if (k == "workers" || k == "samples" || k == "ecdf" || k == "histogram") {
      continue;
    }
    s += ";" + k + "=" + v;
  }
  return s;
}

ExperimentSpec parse_cli(const std::vector<std::string>& args) {
  CLI::App app{"Yule nonsense-correlation toolkit for OU paths", "yule"};
  app.require_subcommand(1);

  std::map<std::string, std::map<std::string, std::string>> values;
  std::map<std::string, std::string> output, format;
  std::map<std::string, CLI::App*> subs;

  for (const auto& def : command_table()) {
    CLI::App* sub = app.add_subcommand(def.name, def.help);
    auto& store = values[def.name];
    for (const auto& opt : def.options) {
      auto* o = sub->add_option(std::string("--") + opt.name, store[opt.name],
                                opt.help);
      if (opt.required) o->required();
    }
    if (def.grid) {
      auto* lam = sub->add_option("--lambda", store["lambda"],
                                  "mesh exponent, delta = n^-lambda");
      auto* del = sub->add_option("--delta", store["delta"], "explicit mesh");
      lam->excludes(del);
      del->excludes(lam);
    }
    sub->add_option("--seed", store["seed"], "master seed (default 42)");
    sub->add_option("--workers", store["workers"],
                    "worker threads (default $YULE_WORKERS or all cores)");
    sub->add_option("-o,--output", output[def.name], "output file");
    sub->add_option("--format", format[def.name], "csv | json")
        ->check(CLI::IsMember({"csv", "json"}));
    subs[def.name] = sub;
  }

  std::vector<const char*> argv{"yule"};
  for (const auto& a : args) argv.push_back(a.c_str());

  ExperimentSpec spec;
  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::CallForHelp& e) {
    std::ostringstream help;
    app.exit(e, help, help);
    spec.help = help.str();
    return spec;
  } catch (const CLI::ParseError& e) {
    throw UsageError(e.what());
  }

  for (const auto& def : command_table()) {
    CLI::App* sub = subs[def.name];
    if (!sub->parsed()) continue;
    spec.command = def.command;
    spec.format = def.default_format;
    spec.output_path = output[def.name];
    if (!format[def.name].empty()) {
      spec.format = format[def.name] == "csv" ? Format::Csv : Format::Json;
    }
    std::vector<OptionDef> all = def.options;
    if (def.grid) {
      all.push_back({"lambda", Kind::Real, ""});
      all.push_back({"delta", Kind::Real, ""});
    }
    all.push_back({"seed", Kind::Seed, ""});
    all.push_back({"workers", Kind::Count, ""});
    for (const auto& opt : all) {
      if (sub->count(std::string("--") + opt.name) == 0) continue;
      const std::string& value = values[def.name][opt.name];
      check_kind(opt.name, opt.kind, value);
      spec.parameters[opt.name] = value;
    }
  }

  if (spec.has("scheme") && spec.text("scheme") != "exact" &&
      spec.text("scheme") != "euler") {
    throw UsageError("--scheme must be 'exact' or 'euler'");
  }
  if (spec.has("statistic") && spec.text("statistic") != "rho" &&
      spec.text("statistic") != "psi") {
    throw UsageError("--statistic must be 'rho' or 'psi'");
  }
  if ((spec.command == Command::Rho || spec.command == Command::Psi) &&
      !spec.has("input") && !(spec.has("theta") && spec.has("n"))) {
    throw UsageError(std::string(to_string(spec.command)) +
                     ": give --input or --theta and --n");
  }
  return spec;
}

std::string provenance_line(const ExperimentSpec& spec) {
  return "# seed=" + std::to_string(spec.seed()) +
         ", version=" + std::string(kVersion) +
         ", config=" + spec.config_string();
}

namespace {

json provenance_json(const ExperimentSpec& spec) {
  return {{"seed", spec.seed()},
          {"version", std::string(kVersion)},
          {"config", spec.config_string()}};
}

json envelope(const ExperimentSpec& spec) {
  return {{"schema_version", kSchemaVersion},
          {"provenance", provenance_json(spec)}};
}

Scheme scheme_of(const ExperimentSpec& spec) {
  if (!spec.has("scheme")) return Scheme::Euler;
  return spec.text("scheme") == "exact" ? Scheme::Exact : Scheme::Euler;
}

std::size_t workers_of(const ExperimentSpec& spec) {
  return spec.has("workers") ? spec.count("workers") : 0;
}

SampleGrid grid_of(const ExperimentSpec& spec, std::size_t n) {
  if (spec.has("delta")) return SampleGrid(n, spec.real("delta"));
  return SampleGrid::from_lambda(n, spec.has("lambda") ? spec.real("lambda")
                                                       : 0.6);
}

double lambda_of(const ExperimentSpec& spec) {
  return spec.has("lambda") ? spec.real("lambda") : 0.6;
}

json to_json(const YuleResult& r) {
  json j = {{"y11", r.y11},         {"y12", r.y12},
            {"y22", r.y22},         {"rho", r.rho},
            {"horizon", r.horizon}, {"n", r.n},
            {"mode", r.mode == StatMode::Discrete ? "discrete" : "quadrature"}};
  if (r.psi) j["psi"] = *r.psi;
  return j;
}

json to_json(const mc::McSummary& s) {
  return {{"count", s.count},   {"mean", s.mean}, {"median", s.median},
          {"stddev", s.stddev}, {"min", s.min},   {"max", s.max}};
}

json to_json(const analytic::RateBound& b) {
  json j = {{"value", b.value},
            {"constant", b.constant},
            {"regime", analytic::to_string(b.regime)},
            {"valid_from", b.valid_from},
            {"relative", b.relative},
            {"shape", b.shape}};
  if (b.regime == analytic::Regime::Discrete) {
    j["active_branch"] = analytic::to_string(b.branch);
  } else {
    j["rate_constant"] = b.rate_constant;
    j["variance_constant"] = b.variance_constant;
    j["tail_constant"] = b.tail_k;
    j["concentration_constant"] = b.concentration;
  }
  return j;
}

json to_json(const analytic::MeshPlan& p) {
  return {{"n", p.n},
          {"lambda", p.lambda},
          {"delta", p.delta},
          {"horizon", p.horizon},
          {"predicted_rate", p.predicted_rate},
          {"mesh_vanishes", p.mesh_vanishes}};
}

PathPair load_or_simulate(const ExperimentSpec& spec) {
  if (spec.has("input")) {
    std::ifstream in(spec.text("input"));
    if (!in) throw Error("cannot open input file '" + spec.text("input") + "'");
    return read_paths_csv(in);
  }
  const OuParams params(spec.real("theta"));
  return simulate(params, grid_of(spec, spec.count("n")), spec.seed(),
                  scheme_of(spec));
}

void write_json(std::ostream& out, const json& j) { out << j.dump(2) << '\n'; }

std::ofstream open_side_file(const std::string& path) {
  std::ofstream f(path);
  if (!f) throw Error("cannot open '" + path + "' for writing");
  return f;
}

json analytic_value(const ExperimentSpec& spec, const std::string& name) {
  namespace an = analytic;
  auto theta = [&] { return spec.real("theta"); };
  auto horizon = [&] { return spec.real("T"); };
  auto delta = [&] {
    return spec.has("delta")
               ? spec.real("delta")
               : std::pow(static_cast<double>(spec.count("n")), -lambda_of(spec));
  };
  if (name == "var_ft") return an::var_ft(theta(), horizon());
  if (name == "var_ft_limit") return an::var_ft_limit(theta());
  if (name == "var_ft_error_constant") return an::var_ft_error_constant(theta());
  if (name == "mu_theta") return an::mu_theta(theta(), horizon());
  if (name == "mean_sq_xbar") return an::mean_sq_xbar(theta(), horizon());
  if (name == "mean_sq_xtilde") {
    return an::mean_sq_xtilde(theta(), spec.count("n"), delta());
  }
  if (name == "mean_sq_xtilde_bound") {
    return an::mean_sq_xtilde_bound(theta(), spec.count("n"), delta());
  }
  if (name == "contraction_bound") return an::contraction_bound(theta(), horizon());
  if (name == "stationary_cov_power_integral") {
    return an::stationary_cov_power_integral(theta(), horizon());
  }
  if (name == "fourth_moment_rate_constant") {
    return an::fourth_moment_rate_constant(theta());
  }
  if (name == "denominator_variance_constant") {
    return an::denominator_variance_constant(theta());
  }
  if (name == "tail_constant") return an::tail_constant();
  if (name == "continuous_threshold") return an::continuous_threshold(theta());
  if (name == "rate_bound_continuous") {
    return to_json(an::rate_bound_continuous(theta(), horizon()));
  }
  if (name == "rate_bound_discrete") {
    return to_json(an::rate_bound_discrete(theta(), spec.count("n"), delta()));
  }
  if (name == "optimal_mesh") return to_json(an::optimal_mesh(spec.count("n")));
  if (name == "product_normal_mgf") {
    return an::product_normal_mgf(spec.real("sigma1"), spec.real("sigma2"),
                                  spec.real("beta"));
  }
  if (name == "mp_objective") {
    return an::mp_objective(spec.real("beta"), spec.real("epsilon"));
  }
  if (name == "mp_optimal_epsilon") {
    const auto opt = an::mp_optimal_epsilon(spec.real("beta"));
    return {{"epsilon", opt.epsilon}, {"g_value", opt.g_value}};
  }
  if (name == "chaos_tail_bound") {
    return an::chaos_tail_bound(spec.real("y"), spec.real("beta"),
                                spec.real("variance"), spec.real("k3"));
  }
  if (name == "discretization_error_constant") {
    return an::discretization_error_constant(theta());
  }
  if (name == "discretization_error_bound") {
    return an::discretization_error_bound(theta(), spec.count("n"), delta());
  }
  throw UsageError("analytic: unknown --name '" + name + "'");
}

int run_command(const ExperimentSpec& spec, std::ostream& out, std::ostream& err) {
  const std::string prov = provenance_line(spec);
  switch (spec.command) {
    case Command::Simulate: {
      const OuParams params(spec.real("theta"));
      const auto pair = simulate(params, grid_of(spec, spec.count("n")),
                                 spec.seed(), scheme_of(spec));
      if (pair.warning) err << "warning: " << *pair.warning << '\n';
      if (spec.format == Format::Csv) {
        write_paths_csv(out, pair, prov);
      } else {
        json j = envelope(spec);
        j["delta"] = pair.grid.delta();
        j["x1"] = std::vector<double>(pair.x1.begin(), pair.x1.end());
        j["x2"] = std::vector<double>(pair.x2.begin(), pair.x2.end());
        write_json(out, j);
      }
      return kExitOk;
    }
    case Command::Rho:
    case Command::Psi: {
      const auto pair = load_or_simulate(spec);
      YuleResult discrete = spec.has("theta")
                                ? psi_result(pair, spec.real("theta"))
                                : rho_discrete(pair);
      YuleResult quad = rho_quadrature(pair);
      if (spec.has("theta")) {
        quad.psi = std::sqrt(spec.real("theta") * quad.horizon) * quad.rho;
      }
      if (spec.format == Format::Csv) {
        out << prov << '\n' << "mode,y11,y12,y22,rho,psi,horizon,n\n";
        for (const auto* r : {&discrete, &quad}) {
          out << (r->mode == StatMode::Discrete ? "discrete" : "quadrature")
              << ',' << format_real(r->y11) << ',' << format_real(r->y12) << ','
              << format_real(r->y22) << ',' << format_real(r->rho) << ','
              << (r->psi ? format_real(*r->psi) : "") << ','
              << format_real(r->horizon) << ',' << r->n << '\n';
        }
      } else {
        json j = envelope(spec);
        j["name"] = to_string(spec.command);
        j["discrete"] = to_json(discrete);
        j["quadrature"] = to_json(quad);
        write_json(out, j);
      }
      return kExitOk;
    }
    case Command::McTable: {
      TableSpec table;
      if (spec.has("theta")) table.thetas = spec.reals("theta");
      if (spec.has("n")) table.ns = spec.counts("n");
      if (spec.has("delta")) {
        throw UsageError("mc-table takes --lambda, not --delta");
      }
      table.lambda = lambda_of(spec);
      if (spec.has("reps")) table.replications = spec.count("reps");
      table.master_seed = spec.seed();
      table.scheme = scheme_of(spec);
      table.statistic = spec.has("statistic") && spec.text("statistic") == "psi"
                            ? mc::Statistic::Psi
                            : mc::Statistic::Rho;
      table.workers = workers_of(spec);
      if (spec.has("samples")) {
        if (table.thetas.size() != 1 || table.ns.size() != 1) {
          throw UsageError("--samples needs a single theta and n");
        }
        mc::McConfig config;
        config.theta = table.thetas[0];
        config.n = table.ns[0];
        config.lambda = table.lambda;
        config.replications = table.replications;
        config.master_seed = derive_seed(table.master_seed, 0);
        config.scheme = table.scheme;
        config.statistic = table.statistic;
        config.workers = table.workers;
        auto f = open_side_file(spec.text("samples"));
        write_samples_csv(f, mc::run_mc(config), prov);
      }
      const auto rows = run_table1(table);
      if (spec.format == Format::Csv) {
        write_table_csv(out, rows, prov);
      } else {
        json j = envelope(spec);
        j["rows"] = json::array();
        for (const auto& r : rows) {
          json row = to_json(r.summary);
          row["theta"] = r.theta;
          row["n"] = r.n;
          row["T_n"] = r.horizon;
          j["rows"].push_back(row);
        }
        write_json(out, j);
      }
      return kExitOk;
    }
    case Command::Ks: {
      mc::McConfig config;
      config.theta = spec.has("theta") ? spec.real("theta") : 2.0;
      config.n = spec.has("n") ? spec.count("n") : 100000;
      if (spec.has("delta")) {
        config.lambda.reset();
        config.delta = spec.real("delta");
      } else {
        config.lambda = lambda_of(spec);
      }
      config.replications = spec.has("reps") ? spec.count("reps") : 500;
      config.master_seed = spec.seed();
      config.scheme = scheme_of(spec);
      config.statistic = mc::Statistic::Psi;
      config.workers = workers_of(spec);
      const auto result = mc::run_mc(config);
      const auto ks = mc::kolmogorov_distance(result.values);
      const auto summary = mc::summarize(result.values);
      if (spec.has("ecdf")) {
        auto f = open_side_file(spec.text("ecdf"));
        write_ecdf_csv(f, mc::ecdf(result.values), prov);
      }
      if (spec.has("histogram")) {
        auto f = open_side_file(spec.text("histogram"));
        write_histogram_csv(
            f, mc::histogram(result.values, spec.has("bins") ? spec.count("bins") : 30),
            prov);
      }
      if (spec.format == Format::Csv) {
        out << prov << '\n' << "distance,sample_size,location,skipped\n"
            << format_real(ks.distance) << ',' << ks.sample_size << ','
            << format_real(ks.location) << ',' << result.skipped << '\n';
      } else {
        json j = envelope(spec);
        j["distance"] = ks.distance;
        j["sample_size"] = ks.sample_size;
        j["location"] = ks.location;
        j["skipped"] = result.skipped;
        j["summary"] = to_json(summary);
        write_json(out, j);
      }
      return kExitOk;
    }
    case Command::Analytic: {
      const std::string name = spec.text("name");
      json params = json::object();
      for (const auto& [k, v] : spec.parameters) {
        if (k == "name" || k == "workers" || k == "seed") continue;
        try {
          params[k] = to_real(k, v);
        } catch (const UsageError&) {
          params[k] = v;
        }
      }
      json j = envelope(spec);
      j["name"] = name;
      j["params"] = params;
      j["value"] = analytic_value(spec, name);
      write_json(out, j);
      return kExitOk;
    }
    case Command::MeshPlan: {
      const std::size_t n = spec.count("n");
      const auto plan = spec.has("lambda")
                            ? analytic::mesh_plan(n, spec.real("lambda"))
                            : analytic::optimal_mesh(n);
      json j = envelope(spec);
      j["plan"] = to_json(plan);
      if (plan.horizon > std::exp(1.0)) {
        j["rate"] = to_json(analytic::rate_bound_discrete(1.0, n, plan.delta));
      }
      write_json(out, j);
      return kExitOk;
    }
    case Command::KernelCheck: {
      const double theta = spec.has("theta") ? spec.real("theta") : 1.0;
      const double horizon = spec.has("T") ? spec.real("T") : 10.0;
      const auto m = static_cast<Eigen::Index>(spec.has("m") ? spec.count("m") : 2048);
      const auto mc_nodes = static_cast<Eigen::Index>(
          spec.has("m-contraction") ? spec.count("m-contraction") : 256);
      const auto ms = static_cast<Eigen::Index>(
          spec.has("m-spectrum") ? spec.count("m-spectrum") : 512);
      const auto rank =
          static_cast<Eigen::Index>(spec.has("rank") ? spec.count("rank") : 10);
      const auto grid =
          chaos::KernelGrid::midpoint(chaos::KernelDomain::PositiveT, horizon, ms);
      const auto spectrum = chaos::nystrom_spectrum(
          [=](double x, double y) { return chaos::k_kernel(theta, horizon, x, y); },
          grid, std::min(rank, ms));
      json j = envelope(spec);
      j["var_closed_form"] = analytic::var_ft(theta, horizon);
      j["var_quadrature"] = chaos::h_variance_quadrature(theta, horizon, m);
      j["contraction_value"] = chaos::h_contraction_norm_sq(theta, horizon, mc_nodes);
      j["contraction_bound"] = analytic::contraction_bound(theta, horizon);
      j["top_eigenvalues"] =
          std::vector<double>(spectrum.lambdas.begin(), spectrum.lambdas.end());
      write_json(out, j);
      return kExitOk;
    }
    case Command::Assess: {
      std::ifstream in(spec.text("input"));
      if (!in) throw Error("cannot open input file '" + spec.text("input") + "'");
      const auto pair = read_paths_csv(in);
      const auto report = assess(pair, spec.real("theta"));
      json j = envelope(spec);
      j["rho"] = report.stats.rho;
      j["psi"] = *report.stats.psi;
      j["horizon"] = report.stats.horizon;
      j["n"] = report.stats.n;
      j["p_value"] = report.p_value;
      if (report.p_value < 1e-15) j["p_value_note"] = "< 1e-15";
      if (report.rate) j["rate"] = to_json(*report.rate);
      write_json(out, j);
      return kExitOk;
    }
  }
  return kExitRuntime;
}

}  // namespace

int run(const ExperimentSpec& spec, std::ostream& out, std::ostream& err) {
  if (spec.help) {
    out << *spec.help;
    return kExitOk;
  }
  if (spec.output_path.empty()) return run_command(spec, out, err);
  std::ofstream file(spec.output_path);
  if (!file) throw Error("cannot open '" + spec.output_path + "' for writing");
  return run_command(spec, file, err);
}

int main_entry(int argc, const char* const* argv, std::ostream& out,
               std::ostream& err) {
  std::vector<std::string> args(argv + 1, argv + argc);
  try {
    const ExperimentSpec spec = parse_cli(args);
    return run(spec, out, err);
  } catch (const UsageError& e) {
    err << "usage error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kExitRuntime;
  }
}

}  // namespace yule::cli

#include <gtest/gtest.h>

#include <sys/wait.h>

#include <algorithm>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "yule/cli_io.hpp"

using namespace yule;
using namespace yule::cli;
namespace fs = std::filesystem;

namespace {

struct Outcome {
  int code;
  std::string out;
  std::string err;
};

Outcome invoke(std::vector<std::string> args) {
  std::vector<const char*> argv{"yule"};
  for (const auto& a : args) argv.push_back(a.c_str());
  std::ostringstream out, err;
  const int code =
      main_entry(static_cast<int>(argv.size()), argv.data(), out, err);
  return {code, out.str(), err.str()};
}

fs::path scratch(const std::string& name) {
  const auto dir = fs::temp_directory_path() / "yule_cli_tests";
  fs::create_directories(dir);
  return dir / name;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

PathPair simulated(double theta, std::size_t n, std::uint64_t seed) {
  return simulate(OuParams(theta), SampleGrid::from_lambda(n, 0.6), seed,
                  Scheme::Euler);
}

}  // namespace

TEST(ParseCli, McTableExample) {
  const auto spec = parse_cli({"mc-table", "--theta", "1", "--n", "10000",
                               "--lambda", "0.6", "--reps", "500", "--seed", "42"});
  EXPECT_EQ(spec.command, Command::McTable);
  EXPECT_EQ(spec.reals("theta"), std::vector<double>{1.0});
  EXPECT_EQ(spec.counts("n"), std::vector<std::size_t>{10000});
  EXPECT_DOUBLE_EQ(spec.real("lambda"), 0.6);
  EXPECT_EQ(spec.count("reps"), 500u);
  EXPECT_EQ(spec.seed(), 42u);
  EXPECT_EQ(spec.format, Format::Csv);
}

TEST(ParseCli, Lists) {
  const auto spec = parse_cli({"mc-table", "--theta", "1,5,10", "--n", "1e4,5e4,1e5"});
  EXPECT_EQ(spec.reals("theta"), (std::vector<double>{1, 5, 10}));
  EXPECT_EQ(spec.counts("n"), (std::vector<std::size_t>{10000, 50000, 100000}));
}

TEST(ParseCli, MeshPlanDrivesOptimalMesh) {
  const auto spec = parse_cli({"mesh-plan", "--n", "10000000"});
  EXPECT_EQ(spec.command, Command::MeshPlan);
  const auto r = invoke({"mesh-plan", "--n", "10000000"});
  ASSERT_EQ(r.code, kExitOk) << r.err;
  const auto j = nlohmann::json::parse(r.out);
  EXPECT_NEAR(j["plan"]["horizon"].get<double>(), 100.0, 1e-9);
  EXPECT_NEAR(j["plan"]["delta"].get<double>(), 1e-5, 1e-17);
  EXPECT_EQ(j["schema_version"], 1);
}

TEST(ParseCli, AssessExample) {
  const auto spec = parse_cli({"assess", "--input", "pair.csv", "--theta", "2"});
  EXPECT_EQ(spec.command, Command::Assess);
  EXPECT_EQ(spec.text("input"), "pair.csv");
  EXPECT_DOUBLE_EQ(spec.real("theta"), 2.0);
  EXPECT_EQ(spec.format, Format::Json);
}

TEST(ParseCli, UsageErrors) {
  EXPECT_THROW(parse_cli({}), UsageError);
  EXPECT_THROW(parse_cli({"frobnicate"}), UsageError);
  EXPECT_THROW(parse_cli({"simulate", "--theta", "1", "--n", "10", "--bogus", "1"}),
               UsageError);
  EXPECT_THROW(parse_cli({"simulate", "--theta", "1"}), UsageError);
  EXPECT_THROW(parse_cli({"simulate", "--theta", "1", "--n", "10", "--lambda", "0.6",
                          "--delta", "0.1"}),
               UsageError);
  EXPECT_THROW(parse_cli({"simulate", "--theta", "x", "--n", "10"}), UsageError);
  EXPECT_THROW(parse_cli({"simulate", "--theta", "1", "--n", "2.5"}), UsageError);
  EXPECT_THROW(parse_cli({"simulate", "--theta", "1", "--n", "10", "--scheme", "rk4"}),
               UsageError);
  EXPECT_THROW(parse_cli({"rho"}), UsageError);
  EXPECT_THROW(parse_cli({"assess", "--theta", "2"}), UsageError);
  EXPECT_THROW(parse_cli({"simulate", "--theta", "1", "--n", "10", "--format", "xml"}),
               UsageError);
  EXPECT_THROW(parse_cli({"simulate", "--theta", "1", "--n", "10", "--seed", "-3"}),
               UsageError);
}

TEST(ParseCli, Help) {
  const auto spec = parse_cli({"--help"});
  ASSERT_TRUE(spec.help.has_value());
  EXPECT_NE(spec.help->find("mc-table"), std::string::npos);
  const auto r = invoke({"ks", "--help"});
  EXPECT_EQ(r.code, kExitOk);
  EXPECT_NE(r.out.find("--reps"), std::string::npos);
}

TEST(Provenance, ConfigExcludesOutputAndWorkers) {
  const auto a = parse_cli({"ks", "--theta", "2", "--workers", "3", "-o", "x.json"});
  const auto b = parse_cli({"ks", "--theta", "2"});
  EXPECT_EQ(provenance_line(a), provenance_line(b));
  EXPECT_EQ(provenance_line(b), "# seed=42, version=0.1.0, config=command=ks;theta=2");
}

TEST(ExitCodes, Contract) {
  EXPECT_EQ(invoke({"analytic", "--name", "var_ft", "--theta", "1", "--T", "10"}).code,
            kExitOk);
  EXPECT_EQ(invoke({"nonsense"}).code, kExitUsage);
  EXPECT_EQ(invoke({"analytic", "--name", "no_such_formula"}).code, kExitUsage);
  // valid syntax, invalid math
  EXPECT_EQ(invoke({"simulate", "--theta", "-1", "--n", "10"}).code, kExitRuntime);
  EXPECT_EQ(invoke({"analytic", "--name", "rate_bound_continuous", "--theta", "1",
                    "--T", "2"})
                .code,
            kExitRuntime);
  EXPECT_EQ(invoke({"assess", "--input", "/nonexistent/pair.csv", "--theta", "1"}).code,
            kExitRuntime);
}

TEST(ExitCodes, RealProcess) {
  const std::string cli = YULE_CLI_PATH;
  auto status = [&](const std::string& args) {
    const int raw = std::system((cli + " " + args + " >/dev/null 2>&1").c_str());
    return WIFEXITED(raw) ? WEXITSTATUS(raw) : -1;
  };
  EXPECT_EQ(status("mesh-plan --n 1000"), 0);
  EXPECT_EQ(status("simulate --theta 0 --n 10"), 1);
  EXPECT_EQ(status("simulate --n 10"), 2);
  EXPECT_EQ(status(""), 2);
}

TEST(Analytic, JsonShape) {
  const auto r = invoke({"analytic", "--name", "var_ft", "--theta", "1", "--T", "10"});
  const auto j = nlohmann::json::parse(r.out);
  EXPECT_EQ(j["name"], "var_ft");
  EXPECT_EQ(j["params"]["theta"], 1.0);
  EXPECT_NEAR(j["value"].get<double>(), 0.21875, 1e-8);
  EXPECT_TRUE(j.contains("provenance"));
  const auto mp = nlohmann::json::parse(
      invoke({"analytic", "--name", "mp_optimal_epsilon", "--beta", "0.1"}).out);
  EXPECT_NEAR(mp["value"]["epsilon"].get<double>(), 0.1 * std::log(40.0), 1e-15);
}

TEST(KernelCheck, JsonShape) {
  const auto r = invoke({"kernel-check", "--m", "256", "--m-contraction", "128",
                         "--m-spectrum", "128", "--rank", "5"});
  ASSERT_EQ(r.code, kExitOk) << r.err;
  const auto j = nlohmann::json::parse(r.out);
  for (const char* key : {"var_closed_form", "var_quadrature", "contraction_value",
                          "contraction_bound", "top_eigenvalues"}) {
    EXPECT_TRUE(j.contains(key)) << key;
  }
  EXPECT_EQ(j["top_eigenvalues"].size(), 5u);
  EXPECT_LE(j["contraction_value"].get<double>(), j["contraction_bound"].get<double>());
}

TEST(Csv, RoundTrip) {
  const auto pair = simulated(1.0, 5000, 11);
  std::stringstream ss;
  write_paths_csv(ss, pair, "# seed=11, version=0.1.0, config=test");
  const auto back = read_paths_csv(ss);
  EXPECT_EQ(back.grid.steps(), pair.grid.steps());
  EXPECT_NEAR(back.grid.delta(), pair.grid.delta(), 1e-15);
  EXPECT_EQ(back.x1, pair.x1);
  EXPECT_EQ(back.x2, pair.x2);
  EXPECT_NEAR(rho_discrete(back).rho, rho_discrete(pair).rho, 1e-12);
  EXPECT_EQ(back.scheme, Scheme::External);
}

TEST(Csv, CliRoundTrip) {
  const auto path = scratch("pair.csv");
  ASSERT_EQ(invoke({"simulate", "--theta", "2", "--n", "3000", "--seed", "5", "-o",
                    path.string()})
                .code,
            kExitOk);
  const std::string text = slurp(path);
  EXPECT_EQ(text.rfind("# seed=5, version=0.1.0, config=", 0), 0u);
  const auto r = invoke({"rho", "--input", path.string()});
  ASSERT_EQ(r.code, kExitOk) << r.err;
  const auto j = nlohmann::json::parse(r.out);
  const auto pair = simulated(2.0, 3000, 5);
  EXPECT_NEAR(j["discrete"]["rho"].get<double>(), rho_discrete(pair).rho, 1e-12);
  EXPECT_NEAR(j["quadrature"]["rho"].get<double>(), rho_quadrature(pair).rho, 1e-12);
}

TEST(Csv, ReaderRejectsBadInput) {
  {
    std::stringstream ss("t,x1,x2\n0,1,2\n0.1,1,2\n0.25,3,4\n");
    EXPECT_THROW(read_paths_csv(ss), NonuniformGrid);
  }
  {
    std::stringstream ss("t,x1,x2\n0,1,2\n0.1,1\n0.2,3,4\n");
    EXPECT_THROW(read_paths_csv(ss), ParseError);
  }
  {
    std::stringstream ss("t,x1,x2\n0,1,2\n0.1,abc,2\n0.2,3,4\n");
    EXPECT_THROW(read_paths_csv(ss), ParseError);
  }
  {
    std::stringstream ss("time,a,b\n0,1,2\n0.1,1,2\n0.2,3,4\n");
    EXPECT_THROW(read_paths_csv(ss), ParseError);
  }
  {
    std::stringstream ss("# only comments\n0,1,2\n");
    EXPECT_THROW(read_paths_csv(ss), ParseError);
  }
}

TEST(Csv, ReaderAcceptsShiftedGridAndComments) {
  std::stringstream ss(
      "# a comment\n# another\nt,x1,x2\n10.0,1,2\n10.5,0,1\n# mid\n11.0,2,0\n"
      "11.5,3,5\n");
  const auto p = read_paths_csv(ss);
  EXPECT_EQ(p.grid.steps(), 3u);
  EXPECT_DOUBLE_EQ(p.grid.delta(), 0.5);
  // within 1e-9 relative of the mesh is fine
  std::stringstream jitter("0,1,2\n0.10000000000001,2,1\n0.2,0,0\n");
  EXPECT_NO_THROW(read_paths_csv(jitter));
}

TEST(Csv, ProvenanceOnEveryArtifact) {
  const auto samples = scratch("samples.csv");
  const auto e = scratch("ecdf.csv");
  const auto h = scratch("hist.csv");
  const auto table = invoke({"mc-table", "--theta", "1", "--n", "200", "--reps", "20",
                             "--samples", samples.string()});
  ASSERT_EQ(table.code, kExitOk) << table.err;
  const auto ks = invoke({"ks", "--n", "200", "--reps", "20", "--format", "csv", "--ecdf",
                          e.string(), "--histogram", h.string()});
  ASSERT_EQ(ks.code, kExitOk) << ks.err;
  for (const auto& text : {table.out, ks.out, slurp(samples), slurp(e), slurp(h)}) {
    EXPECT_EQ(text.rfind("# seed=", 0), 0u) << text.substr(0, 60);
  }
  EXPECT_NE(slurp(samples).find("\nreplication,value\n"), std::string::npos);
  EXPECT_NE(slurp(e).find("\nx,F\n"), std::string::npos);
  EXPECT_NE(slurp(h).find("\nbin_left,bin_right,count\n"), std::string::npos);
  for (const char* cmd : {"rho", "psi"}) {
    const auto r = invoke({cmd, "--theta", "1", "--n", "300"});
    ASSERT_EQ(r.code, kExitOk) << r.err;
    EXPECT_TRUE(nlohmann::json::parse(r.out).contains("provenance"));
  }
}

TEST(Table, ShapeAndHeader) {
  TableSpec spec;
  spec.ns = {100, 200, 300};
  spec.replications = 10;
  const auto rows = run_table1(spec);
  ASSERT_EQ(rows.size(), 9u);
  EXPECT_EQ(rows[0].theta, 1.0);
  EXPECT_EQ(rows[1].n, 200u);
  EXPECT_EQ(rows[3].theta, 5.0);
  EXPECT_NEAR(rows[8].horizon, std::pow(300.0, 0.4), 1e-12);
  std::stringstream ss;
  write_table_csv(ss, rows, "# p");
  std::string line;
  std::getline(ss, line);
  std::getline(ss, line);
  EXPECT_EQ(line, "theta,n,T_n,mean,median,stddev");
}

TEST(Table, ReferenceCells) {
  TableSpec five;
  five.thetas = {5.0};
  five.ns = {50000};
  const auto a = run_table1(five);
  EXPECT_LE(std::abs(a[0].summary.mean), 0.02);

  TableSpec ten;
  ten.thetas = {10.0};
  ten.ns = {100000};
  const auto b = run_table1(ten);
  EXPECT_GE(b[0].summary.stddev, 0.016);
  EXPECT_LE(b[0].summary.stddev, 0.063);
}

TEST(Table, StddevShrinksWithN) {
  std::vector<std::vector<double>> ratio(3);
  for (std::uint64_t seed = 0; seed < 5; ++seed) {
    TableSpec spec;
    spec.ns = {10000, 100000};
    spec.replications = 100;
    spec.master_seed = 500 + seed;
    const auto rows = run_table1(spec);
    for (std::size_t t = 0; t < 3; ++t) {
      ratio[t].push_back(rows[2 * t + 1].summary.stddev / rows[2 * t].summary.stddev);
    }
  }
  for (auto& r : ratio) {
    std::sort(r.begin(), r.end());
    EXPECT_LT(r[2], 1.0);
  }
}

TEST(Assess, PerfectCopy) {
  // psi = sqrt(theta T_n) needs to pass ~8 for p < 1e-15: T_n = 100 here
  auto pair = simulated(1.0, 100000, 3);
  pair.x2 = pair.x1;
  const auto report = assess(pair, 1.0);
  EXPECT_NEAR(report.stats.rho, 1.0, 1e-15);
  EXPECT_LT(report.p_value, 1e-15);
  ASSERT_TRUE(report.rate.has_value());
  EXPECT_EQ(report.rate->regime, analytic::Regime::Discrete);

  const auto path = scratch("copy.csv");
  {
    std::ofstream f(path);
    write_paths_csv(f, pair, "# copy");
  }
  const auto r = invoke({"assess", "--input", path.string(), "--theta", "1"});
  ASSERT_EQ(r.code, kExitOk) << r.err;
  EXPECT_EQ(nlohmann::json::parse(r.out)["p_value_note"], "< 1e-15");
}

TEST(Assess, PValueArithmetic) {
  EXPECT_NEAR(two_sided_p_value(1.96), 0.05, 1e-4);
  EXPECT_NEAR(two_sided_p_value(-1.96), two_sided_p_value(1.96), 1e-16);
  EXPECT_DOUBLE_EQ(two_sided_p_value(0.0), 1.0);
  EXPECT_GT(two_sided_p_value(9.0), 0.0);
}

TEST(Assess, PValuesAreCalibrated) {
  std::vector<double> p;
  for (std::uint64_t seed = 0; seed < 200; ++seed) {
    p.push_back(assess(simulated(1.0, 100000, derive_seed(2718, seed)), 1.0).p_value);
  }
  std::sort(p.begin(), p.end());
  double d = 0.0;
  for (std::size_t i = 0; i < p.size(); ++i) {
    d = std::max({d, (i + 1) / 200.0 - p[i], p[i] - i / 200.0});
  }
  EXPECT_LE(d, 0.1);
}

TEST(Assess, CliJson) {
  const auto path = scratch("assess.csv");
  std::ofstream(path) << "# external data\nt,x1,x2\n0,0,0\n1,1,-1\n2,0.5,0.2\n3,2,1\n"
                         "4,1,3\n";
  const auto r = invoke({"assess", "--input", path.string(), "--theta", "2"});
  ASSERT_EQ(r.code, kExitOk) << r.err;
  const auto j = nlohmann::json::parse(r.out);
  for (const char* key : {"rho", "psi", "p_value", "horizon", "n"}) {
    EXPECT_TRUE(j.contains(key)) << key;
  }
  EXPECT_NEAR(j["psi"].get<double>(), std::sqrt(2.0 * 4.0) * j["rho"].get<double>(),
              1e-15);
}

TEST(Determinism, ByteIdenticalAcrossWorkers) {
  const std::vector<std::string> base{"mc-table", "--theta", "1,5", "--n", "2000,4000",
                                      "--reps", "40", "--seed", "7"};
  auto with_workers = [&](const char* w) {
    auto args = base;
    args.insert(args.end(), {"--workers", w});
    return invoke(args);
  };
  const auto one = with_workers("1");
  const auto three = with_workers("3");
  ASSERT_EQ(one.code, kExitOk) << one.err;
  EXPECT_EQ(one.out, three.out);
  EXPECT_EQ(one.out, with_workers("1").out);
}

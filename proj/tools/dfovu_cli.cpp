// Command-line front end: generate, solve, bench, profile.

#include <cstdint>
#include <filesystem>
#include <iostream>
#include <random>
#include <string>

#include <CLI11.hpp>

#include "dfovu/bench.hpp"
#include "dfovu/driver.hpp"
#include "dfovu/errors.hpp"
#include "dfovu/greybox.hpp"
#include "dfovu/io.hpp"

namespace {

constexpr int kOk = 0;
constexpr int kRunFailure = 1;
constexpr int kUsage = 2;

struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct GenerateArgs {
  int n = 0;
  int dim_v = 0;
  std::uint64_t seed = 0;
  bool nonconvex = false;
  std::string out;
};

struct SolveArgs {
  std::string problem;
  std::string x0;
  std::string solver;
  dfovu::SolverConfig config;
  std::string r = "dynamic";
  std::string report;
  std::string trace;
};

struct BenchArgs {
  std::string config;
  std::string out_dir;
};

struct ProfileArgs {
  std::string reports;
  std::string out;
  std::string svg;
};

int run_generate(const GenerateArgs& a) {
  const dfovu::ProblemSpec spec = dfovu::generate_random(a.n, a.dim_v, a.seed, !a.nonconvex);
  dfovu::write_problem(spec, a.out);
  return kOk;
}

dfovu::Vector start_point(const std::string& x0, int n, std::uint64_t seed) {
  if (x0 != "rand") {
    dfovu::Vector x = dfovu::read_point(x0);
    if (x.size() != n) throw UsageError("--x0: point has " + std::to_string(x.size()) + " entries, problem has n = " +
                                        std::to_string(n));
    return x;
  }
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unif(-1.0, 1.0);
  dfovu::Vector x(n);
  for (int i = 0; i < n; ++i) x[i] = unif(rng);
  return x;
}

int run_solve(SolveArgs a) {
  if (a.r == "dynamic") {
    a.config.r_rule = dfovu::RRule::dynamic;
  } else {
    std::size_t used = 0;
    double value = 0.0;
    try {
      value = std::stod(a.r, &used);
    } catch (const std::exception&) {
      used = 0;
    }
    if (used != a.r.size()) throw UsageError("--r: expected 'dynamic' or a number, got '" + a.r + "'");
    a.config.r_rule = dfovu::RRule::fixed;
    a.config.r0 = value;
  }
  a.config.validate();

  const dfovu::ProblemSpec spec = dfovu::read_problem(a.problem);
  const dfovu::Vector x0 = start_point(a.x0, spec.n, a.config.seed);
  dfovu::GreyBox oracle(spec);
  const dfovu::RunReport report = a.solver == "dfovu" ? dfovu::dfo_vu_solve(oracle, x0, a.config)
                                                      : dfovu::baseline_bundle_solve(oracle, x0, a.config);

  dfovu::ReportMeta meta;
  meta.instance = std::filesystem::path(a.problem).stem().string();
  meta.problem = a.problem;
  meta.known_dim_v = spec.known_dim_v;
  dfovu::write_report(a.report, report, meta);
  if (!a.trace.empty()) dfovu::write_step_log(a.trace, report.step_log);

  std::cout << a.solver << ": " << dfovu::to_string(report.termination) << "  f = " << report.f_final
            << "  calls = " << report.calls;
  if (report.ra) std::cout << "  RA = " << *report.ra;
  if (report.v_found) std::cout << "  v_found = " << *report.v_found;
  std::cout << '\n';
  return report.termination == dfovu::Termination::stopped ? kOk : kRunFailure;
}

int run_bench(const BenchArgs& a) {
  const dfovu::BatteryConfig config = dfovu::read_battery_config(a.config);
  const dfovu::BatteryResult result = dfovu::run_battery(config);
  dfovu::write_battery_outputs(a.out_dir, result);

  for (const auto& row : result.bands) {
    std::cout << row.band;
    for (const auto& [solver, mean] : row.mean_ra) std::cout << "  " << solver << " " << mean;
    std::cout << '\n';
  }
  for (const auto& row : result.vdim)
    std::cout << row.solver << " v_found exact " << row.exact << "/" << row.total << '\n';

  bool failed = false;
  for (const auto& run : result.runs) failed = failed || dfovu::is_failure(run.report.termination);
  return failed ? kRunFailure : kOk;
}

int run_profile(const ProfileArgs& a) {
  const auto reports = dfovu::read_report_dir(a.reports);
  if (reports.empty()) throw UsageError("--reports: no reports found in '" + a.reports + "'");
  const dfovu::ProfileData data = dfovu::compute_profiles(dfovu::profile_samples(reports));
  dfovu::write_text(a.out, dfovu::profile_csv(data));
  if (!a.svg.empty()) dfovu::write_text(a.svg, dfovu::profile_svg(data));
  return kOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Derivative-free VU bundle solver for max-of-quadratics problems"};
  app.require_subcommand(1);

  GenerateArgs gen;
  auto* generate = app.add_subcommand("generate", "Write a random max-of-quadratics problem");
  generate->add_option("--n", gen.n, "Dimension")->required()->check(CLI::Range(2, 1 << 20));
  generate->add_option("--dimv", gen.dim_v, "V-space dimension at the solution")->required();
  generate->add_option("--seed", gen.seed, "Generator seed")->required();
  generate->add_flag("--nonconvex", gen.nonconvex, "One concave piece");
  generate->add_option("--out", gen.out, "Output problem file")->required();

  SolveArgs sol;
  auto* solve = app.add_subcommand("solve", "Solve one problem from one start point");
  solve->add_option("--problem", sol.problem, "Problem file")->required()->check(CLI::ExistingFile);
  solve->add_option("--x0", sol.x0, "'rand' or a JSON point file")->required();
  solve->add_option("--solver", sol.solver, "dfovu or baseline")
      ->required()
      ->check(CLI::IsMember({"dfovu", "baseline"}));
  solve->add_option("--delta", sol.config.delta, "Stopping tolerance on |s|^2")->capture_default_str();
  solve->add_option("--eps0", sol.config.eps0, "Initial stencil radius")->capture_default_str();
  solve->add_option("--eps-min", sol.config.eps_min, "Stencil radius for stopping")->capture_default_str();
  solve->add_option("--eps-factor", sol.config.eps_factor, "Radius shrink factor")->capture_default_str();
  solve->add_option("--m-descent", sol.config.m_descent, "Descent test parameter")->capture_default_str();
  solve->add_option("--max-calls", sol.config.max_calls, "Oracle call budget (0: 800 min(n,20))")
      ->capture_default_str();
  solve->add_option("--r", sol.r, "'dynamic' or a fixed proximal parameter")->capture_default_str();
  solve->add_option("--seed", sol.config.seed, "Seed for the random start and stencil rotation")
      ->capture_default_str();
  solve->add_option("--report", sol.report, "Output report JSON")->required();
  solve->add_option("--trace", sol.trace, "Output step log CSV");

  BenchArgs ben;
  auto* bench = app.add_subcommand("bench", "Run a problem battery");
  bench->add_option("--config", ben.config, "Battery config JSON")->required()->check(CLI::ExistingFile);
  bench->add_option("--out-dir", ben.out_dir, "Output directory")->required();

  ProfileArgs prof;
  auto* profile = app.add_subcommand("profile", "Accuracy profiles from saved reports");
  profile->add_option("--reports", prof.reports, "Directory of report JSON files")
      ->required()
      ->check(CLI::ExistingDirectory);
  profile->add_option("--out", prof.out, "Output CSV")->required();
  profile->add_option("--svg", prof.svg, "Output SVG plot");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kOk : kUsage;
  }

  try {
    if (*generate) return run_generate(gen);
    if (*solve) return run_solve(sol);
    if (*bench) return run_bench(ben);
    if (*profile) return run_profile(prof);
  } catch (const UsageError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kUsage;
  } catch (const dfovu::ContractViolation& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kUsage;
  } catch (const dfovu::IoError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kUsage;
  } catch (const std::exception& e) {
    std::cerr << "run failed: " << e.what() << '\n';
    return kRunFailure;
  }
  return kUsage;
}

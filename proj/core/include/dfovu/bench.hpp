#pragma once

#include <cstdint>
#include <functional>
#include <map>
#include <string>
#include <vector>

#include "dfovu/driver.hpp"

namespace dfovu {

struct BatteryConfig {
  std::vector<int> dims{10};
  std::vector<double> vdim_fractions{0.25, 0.5, 0.75};
  int instances_per_cell = 1;
  int starts_per_instance = 2;
  std::uint64_t max_calls = 0;  // 0 selects 800 * min(n, 20)
  std::vector<std::string> solvers{"dfovu", "baseline"};
  std::uint64_t seed = 1;
  bool convex = true;
  bool include_maxquad = false;
  /// Drop budget / QP failures from RA averages instead of using their best value.
  bool exclude_failures = false;
  int threads = 1;
  SolverConfig solver;

  void validate() const;
};

/// dim V for a fraction of n: round half up, clamped to [1, n - 1].
int dim_v_for(int n, double fraction);

/// Band label for dim_v / n: "(0,15)", "[15,30)", "[30,45)", "[45,60)", "[60,100)".
std::string vdim_band(int n, int dim_v);
const std::vector<std::string>& vdim_bands();

/// Failure per the benchmark rules: budget reached or QP error.
bool is_failure(Termination t);

struct BatteryTask {
  int problem_id = 0;
  int start_id = 0;
  std::string solver;
  std::string instance;  // "<problem>_s<start>", shared by all solvers on the same run
  std::string problem;   // "maxquad" or "rand_n10_v5_<id>"
  int n = 0;
  int dim_v = 0;
  std::uint64_t problem_seed = 0;
  bool convex = true;
};

struct BatteryRun {
  BatteryTask task;
  RunReport report;
};

struct BandRow {
  std::string band;
  std::map<std::string, int> runs;
  std::map<std::string, double> mean_ra;
};

/// Cumulative v_found hit counts against the known dim V.
struct VdimRow {
  std::string solver;
  int total = 0;
  int exact = 0;
  int within1 = 0;
  int within2 = 0;
  int within5 = 0;
  int over5 = 0;
};

struct BatteryResult {
  std::vector<BatteryRun> runs;  // ordered by (problem, start, solver)
  std::vector<BandRow> bands;    // last row is the overall "(0,100)"
  std::vector<VdimRow> vdim;
};

/// Enumerates every (problem, start, solver) task in deterministic order.
std::vector<BatteryTask> battery_tasks(const BatteryConfig& config);

/// Builds the problem behind a task.
ProblemSpec battery_problem(const BatteryTask& task);

/// Start point for a task (components uniform in [-1, 1]).
Vector battery_start(const BatteryConfig& config, const BatteryTask& task);

using ObserverFactory = std::function<SolveObserver(const BatteryTask&)>;

/**
 * Runs every task, in parallel over `threads` workers, and aggregates
 * Table-style RA bands and v_found hit counts. Results are ordered by task,
 * independent of the worker count.
 */
BatteryResult run_battery(const BatteryConfig& config, const ObserverFactory& observers = {});

/// Recomputes band and v_found summaries from a list of runs.
void summarize(const BatteryConfig& config, BatteryResult& result);

/// RA floor applied before taking the reciprocal for profiles.
inline constexpr double kProfileRaFloor = 1e-3;

struct ProfileSample {
  std::string instance;
  double ra = 0.0;
};

struct ProfileCurve {
  std::string solver;
  std::vector<double> theta;  // ascending breakpoints, shared across curves
  std::vector<double> phi;    // fraction of instances with ratio <= theta

  /// Step-function value at an arbitrary theta.
  double at(double theta) const;
};

struct ProfileData {
  std::vector<ProfileCurve> curves;
};

/// Accuracy profiles over resource 1/max(RA, 1e-3). All solvers must cover the same instances.
ProfileData compute_profiles(const std::map<std::string, std::vector<ProfileSample>>& by_solver);

}  // namespace dfovu

#include "dfovu/bench.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <limits>
#include <mutex>
#include <random>
#include <set>
#include <thread>

#include "dfovu/errors.hpp"

namespace dfovu {

namespace {

std::uint64_t splitmix(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

constexpr std::uint64_t kStartStream = 0x5151a7a7c3c3e1e1ULL;

}  // namespace

void BatteryConfig::validate() const {
  if (dims.empty() && !include_maxquad) throw ContractViolation("battery: no dimensions and no maxquad");
  for (int n : dims)
    if (n < 2) throw ContractViolation("battery: dimensions must be >= 2");
  for (double f : vdim_fractions)
    if (!(f > 0.0 && f < 1.0)) throw ContractViolation("battery: vdim fractions must lie in (0, 1)");
  if (instances_per_cell <= 0 || starts_per_instance <= 0) throw ContractViolation("battery: counts must be positive");
  if (solvers.empty()) throw ContractViolation("battery: no solvers");
  for (const auto& s : solvers)
    if (s != "dfovu" && s != "baseline") throw ContractViolation("battery: unknown solver '" + s + "'");
  if (threads <= 0) throw ContractViolation("battery: threads must be positive");
  solver.validate();
}

int dim_v_for(int n, double fraction) {
  const int v = static_cast<int>(std::floor(fraction * n + 0.5));
  return std::clamp(v, 1, n - 1);
}

const std::vector<std::string>& vdim_bands() {
  static const std::vector<std::string> bands{"(0,15)", "[15,30)", "[30,45)", "[45,60)", "[60,100)"};
  return bands;
}

std::string vdim_band(int n, int dim_v) {
  // Integer comparison avoids 0.3 * n style round-off at band edges.
  const long pct100 = 100L * dim_v;
  const auto& b = vdim_bands();
  if (pct100 < 15L * n) return b[0];
  if (pct100 < 30L * n) return b[1];
  if (pct100 < 45L * n) return b[2];
  if (pct100 < 60L * n) return b[3];
  return b[4];
}

bool is_failure(Termination t) { return t == Termination::budget || t == Termination::qp_failure; }

std::vector<BatteryTask> battery_tasks(const BatteryConfig& config) {
  std::vector<BatteryTask> problems;
  int id = 0;
  if (config.include_maxquad) {
    BatteryTask t;
    t.problem_id = id++;
    t.problem = "maxquad";
    t.n = 10;
    t.dim_v = 3;
    t.convex = true;
    problems.push_back(t);
  }
  for (int n : config.dims)
    for (double frac : config.vdim_fractions)
      for (int i = 0; i < config.instances_per_cell; ++i) {
        BatteryTask t;
        t.problem_id = id++;
        t.n = n;
        t.dim_v = dim_v_for(n, frac);
        t.convex = config.convex;
        t.problem_seed = splitmix(config.seed ^ splitmix(static_cast<std::uint64_t>(t.problem_id)));
        t.problem = (config.convex ? "rand_n" : "ncvx_n") + std::to_string(n) + "_v" + std::to_string(t.dim_v) + "_" +
                    std::to_string(t.problem_id);
        problems.push_back(t);
      }

  std::vector<BatteryTask> tasks;
  for (const auto& p : problems)
    for (int s = 0; s < config.starts_per_instance; ++s)
      for (const auto& solver : config.solvers) {
        BatteryTask t = p;
        t.start_id = s;
        t.solver = solver;
        t.instance = p.problem + "_s" + std::to_string(s);
        tasks.push_back(std::move(t));
      }
  return tasks;
}

ProblemSpec battery_problem(const BatteryTask& task) {
  if (task.problem == "maxquad") return make_maxquad();
  return generate_random(task.n, task.dim_v, task.problem_seed, task.convex);
}

Vector battery_start(const BatteryConfig& config, const BatteryTask& task) {
  std::mt19937_64 rng(splitmix(config.seed ^ kStartStream ^
                               splitmix(static_cast<std::uint64_t>(task.problem_id) * 1009u +
                                        static_cast<std::uint64_t>(task.start_id))));
  std::uniform_real_distribution<double> unif(-1.0, 1.0);
  Vector x(task.n);
  for (int i = 0; i < task.n; ++i) x[i] = unif(rng);
  return x;
}

BatteryResult run_battery(const BatteryConfig& config, const ObserverFactory& observers) {
  config.validate();
  const std::vector<BatteryTask> tasks = battery_tasks(config);
  BatteryResult result;
  result.runs.resize(tasks.size());

  std::atomic<std::size_t> next{0};
  std::exception_ptr error;
  std::mutex error_mutex;

  auto worker = [&] {
    while (true) {
      const std::size_t i = next.fetch_add(1);
      if (i >= tasks.size()) return;
      try {
        const BatteryTask& task = tasks[i];
        const ProblemSpec spec = battery_problem(task);
        GreyBox oracle(spec);
        SolverConfig cfg = config.solver;
        cfg.max_calls = config.max_calls;
        cfg.seed = task.problem_seed + static_cast<std::uint64_t>(task.start_id);
        const SolveObserver obs = observers ? observers(task) : SolveObserver{};
        const Vector x0 = battery_start(config, task);
        RunReport rep = task.solver == "dfovu" ? dfo_vu_solve(oracle, x0, cfg, obs)
                                               : baseline_bundle_solve(oracle, x0, cfg, obs);
        result.runs[i] = {task, std::move(rep)};
      } catch (...) {
        std::lock_guard lock(error_mutex);
        if (!error) error = std::current_exception();
        next.store(tasks.size());
      }
    }
  };

  const int nthreads = std::max(1, std::min<int>(config.threads, static_cast<int>(tasks.size())));
  if (nthreads == 1) {
    worker();
  } else {
    std::vector<std::jthread> pool;
    for (int t = 0; t < nthreads; ++t) pool.emplace_back(worker);
  }
  if (error) std::rethrow_exception(error);

  summarize(config, result);
  return result;
}

void summarize(const BatteryConfig& config, BatteryResult& result) {
  result.bands.clear();
  result.vdim.clear();
  std::vector<std::string> solvers = config.solvers;

  auto band_row = [&](const std::string& label, auto&& in_band) {
    BandRow row;
    row.band = label;
    for (const auto& s : solvers) {
      double sum = 0.0;
      int count = 0;
      for (const auto& run : result.runs) {
        if (run.task.solver != s || !in_band(run.task)) continue;
        if (config.exclude_failures && is_failure(run.report.termination)) continue;
        sum += run.report.ra.value_or(0.0);
        ++count;
      }
      row.runs[s] = count;
      row.mean_ra[s] = count > 0 ? sum / count : 0.0;
    }
    return row;
  };
  for (const auto& label : vdim_bands())
    result.bands.push_back(band_row(label, [&](const BatteryTask& t) { return vdim_band(t.n, t.dim_v) == label; }));
  result.bands.push_back(band_row("(0,100)", [](const BatteryTask&) { return true; }));

  for (const auto& s : solvers) {
    VdimRow row;
    row.solver = s;
    for (const auto& run : result.runs) {
      if (run.task.solver != s || !run.report.v_found) continue;
      const int err = std::abs(*run.report.v_found - run.task.dim_v);
      ++row.total;
      if (err == 0) ++row.exact;
      if (err <= 1) ++row.within1;
      if (err <= 2) ++row.within2;
      if (err <= 5) ++row.within5;
      else ++row.over5;
    }
    result.vdim.push_back(row);
  }
}

double ProfileCurve::at(double t) const {
  double value = 0.0;
  for (std::size_t i = 0; i < theta.size(); ++i) {
    if (theta[i] <= t) value = phi[i];
    else break;
  }
  return value;
}

ProfileData compute_profiles(const std::map<std::string, std::vector<ProfileSample>>& by_solver) {
  if (by_solver.empty()) throw ContractViolation("compute_profiles: no solvers");

  std::map<std::string, std::map<std::string, double>> resource;  // solver -> instance -> 1/RA
  std::set<std::string> reference;
  bool first = true;
  for (const auto& [solver, samples] : by_solver) {
    std::set<std::string> seen;
    for (const auto& s : samples) {
      if (!seen.insert(s.instance).second)
        throw ContractViolation("compute_profiles: duplicate instance '" + s.instance + "' for " + solver);
      resource[solver][s.instance] = 1.0 / std::max(s.ra, kProfileRaFloor);
    }
    if (first) {
      reference = seen;
      first = false;
    } else if (seen != reference) {
      throw ContractViolation("compute_profiles: solvers ran different instance sets");
    }
  }
  if (reference.empty()) throw ContractViolation("compute_profiles: no instances");

  std::map<std::string, std::vector<double>> ratios;
  std::set<double> breakpoints;
  for (const auto& inst : reference) {
    double best = std::numeric_limits<double>::infinity();
    for (const auto& [solver, res] : resource) best = std::min(best, res.at(inst));
    for (const auto& [solver, res] : resource) {
      const double ratio = res.at(inst) / best;
      ratios[solver].push_back(ratio);
      breakpoints.insert(ratio);
    }
  }

  ProfileData data;
  const auto total = static_cast<double>(reference.size());
  for (auto& [solver, rs] : ratios) {
    std::sort(rs.begin(), rs.end());
    ProfileCurve curve;
    curve.solver = solver;
    for (double t : breakpoints) {
      const auto count = std::upper_bound(rs.begin(), rs.end(), t) - rs.begin();
      curve.theta.push_back(t);
      curve.phi.push_back(static_cast<double>(count) / total);
    }
    data.curves.push_back(std::move(curve));
  }
  return data;
}

}  // namespace dfovu

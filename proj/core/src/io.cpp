#include "dfovu/io.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <limits>
#include <set>
#include <sstream>

#include <json.hpp>

#include "dfovu/errors.hpp"

namespace dfovu {

using json = nlohmann::json;
namespace fs = std::filesystem;

namespace {

json vector_json(const Vector& v) { return json(std::vector<double>(v.data(), v.data() + v.size())); }

Vector vector_from(const json& j, const char* what) {
  if (!j.is_array()) throw IoError(std::string(what) + ": expected an array");
  Vector v(static_cast<Eigen::Index>(j.size()));
  for (std::size_t i = 0; i < j.size(); ++i) {
    if (!j[i].is_number()) throw IoError(std::string(what) + ": expected numbers");
    v[static_cast<Eigen::Index>(i)] = j[i].get<double>();
  }
  return v;
}

Matrix matrix_from(const json& j, int n, const char* what) {
  if (!j.is_array() || static_cast<int>(j.size()) != n) throw IoError(std::string(what) + ": expected n rows");
  Matrix a(n, n);
  for (int r = 0; r < n; ++r) {
    const Vector row = vector_from(j[r], what);
    if (row.size() != n) throw IoError(std::string(what) + ": expected n columns");
    a.row(r) = row.transpose();
  }
  return a;
}

json parse(const std::string& text, const char* what) {
  try {
    return json::parse(text);
  } catch (const json::exception& e) {
    throw IoError(std::string(what) + ": " + e.what());
  }
}

template <class T>
json optional_json(const std::optional<T>& v) {
  return v ? json(*v) : json(nullptr);
}

// Finite doubles only; JSON has no inf/nan.
json number_json(double v) { return std::isfinite(v) ? json(v) : json(nullptr); }

}  // namespace

void write_text(const fs::path& path, const std::string& text) {
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot open '" + path.string() + "' for writing");
  out << text;
  if (!out) throw IoError("write to '" + path.string() + "' failed");
}

std::string read_text(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open '" + path.string() + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

ProblemSpec problem_from_json(const std::string& text) {
  const json j = parse(text, "problem");
  ProblemSpec spec;
  try {
    spec.n = j.at("n").get<int>();
    spec.m = j.at("m").get<int>();
    if (spec.n <= 0 || spec.m <= 0) throw IoError("problem: n and m must be positive");
    const json& quads = j.at("quads");
    if (!quads.is_array()) throw IoError("problem: quads must be an array");
    for (const auto& q : quads) {
      Quadratic piece;
      piece.H = matrix_from(q.at("H"), spec.n, "problem H");
      piece.b = vector_from(q.at("b"), "problem b");
      spec.quads.push_back(std::move(piece));
    }
    if (j.contains("known_opt_value") && !j["known_opt_value"].is_null())
      spec.known_opt_value = j["known_opt_value"].get<double>();
    if (j.contains("known_opt_point") && !j["known_opt_point"].is_null())
      spec.known_opt_point = vector_from(j["known_opt_point"], "problem known_opt_point");
    if (j.contains("known_dim_v") && !j["known_dim_v"].is_null()) spec.known_dim_v = j["known_dim_v"].get<int>();
    spec.convex = j.value("convex", true);
    if (j.contains("seed") && !j["seed"].is_null()) spec.seed = j["seed"].get<std::uint64_t>();
  } catch (const json::exception& e) {
    throw IoError(std::string("problem: ") + e.what());
  }
  spec.validate(1e-12);
  return spec;
}

std::string problem_to_json(const ProblemSpec& spec) {
  json quads = json::array();
  for (const auto& q : spec.quads) {
    json rows = json::array();
    for (int r = 0; r < q.H.rows(); ++r) rows.push_back(vector_json(q.H.row(r).transpose()));
    quads.push_back({{"H", rows}, {"b", vector_json(q.b)}});
  }
  json j;
  j["n"] = spec.n;
  j["m"] = spec.m;
  j["quads"] = quads;
  j["known_opt_value"] = optional_json(spec.known_opt_value);
  j["known_opt_point"] = spec.known_opt_point ? vector_json(*spec.known_opt_point) : json(nullptr);
  j["known_dim_v"] = optional_json(spec.known_dim_v);
  j["convex"] = spec.convex;
  j["seed"] = optional_json(spec.seed);
  return j.dump(1) + "\n";
}

ProblemSpec read_problem(const fs::path& path) { return problem_from_json(read_text(path)); }

void write_problem(const ProblemSpec& spec, const fs::path& path) { write_text(path, problem_to_json(spec)); }

Vector read_point(const fs::path& path) {
  const json j = parse(read_text(path), "point");
  if (j.is_object()) {
    if (!j.contains("x")) throw IoError("point: object without an \"x\" field");
    return vector_from(j["x"], "point");
  }
  return vector_from(j, "point");
}

std::string report_to_json(const RunReport& r, const ReportMeta& meta) {
  json steps = json::array();
  for (const auto& s : r.step_log)
    steps.push_back({{"k", s.k},
                     {"kind", std::string(to_string(s.kind))},
                     {"f", number_json(s.f)},
                     {"s_norm_sq", number_json(s.s_norm_sq)},
                     {"eps", s.eps},
                     {"r", s.r},
                     {"calls", s.calls}});
  json j;
  j["solver"] = r.solver;
  if (!meta.instance.empty()) j["instance"] = meta.instance;
  if (!meta.problem.empty()) j["problem"] = meta.problem;
  if (meta.known_dim_v) j["known_dim_v"] = *meta.known_dim_v;
  j["termination"] = std::string(to_string(r.termination));
  j["x_final"] = vector_json(r.x_final);
  j["f_final"] = number_json(r.f_final);
  j["x_best"] = vector_json(r.x_best);
  j["f_best"] = number_json(r.f_best);
  j["ra"] = optional_json(r.ra);
  j["v_found"] = optional_json(r.v_found);
  j["calls"] = r.calls;
  j["outer_iters"] = r.outer_iters;
  j["serious_steps"] = r.serious_steps;
  j["null_steps"] = r.null_steps;
  j["u_steps"] = r.u_steps;
  j["u_rejected"] = r.u_rejected;
  j["inner_iters"] = r.inner_iters;
  j["s_final_norm"] = number_json(r.s_final_norm);
  j["eps_final"] = r.eps_final;
  j["wall_time"] = r.wall_time;
  j["step_log"] = steps;
  return j.dump(1) + "\n";
}

void write_report(const fs::path& path, const RunReport& report, const ReportMeta& meta) {
  write_text(path, report_to_json(report, meta));
}

ReportSummary report_summary_from_json(const std::string& text) {
  const json j = parse(text, "report");
  ReportSummary s;
  try {
    s.solver = j.at("solver").get<std::string>();
    s.instance = j.value("instance", std::string());
    s.termination = termination_from_string(j.at("termination").get<std::string>());
    s.f_final = j.at("f_final").is_null() ? std::numeric_limits<double>::quiet_NaN() : j["f_final"].get<double>();
    if (!j.at("ra").is_null()) s.ra = j["ra"].get<double>();
    if (!j.at("v_found").is_null()) s.v_found = j["v_found"].get<int>();
    s.calls = j.at("calls").get<std::uint64_t>();
  } catch (const json::exception& e) {
    throw IoError(std::string("report: ") + e.what());
  }
  return s;
}

std::vector<ReportSummary> read_report_dir(const fs::path& dir) {
  if (!fs::is_directory(dir)) throw IoError("'" + dir.string() + "' is not a directory");
  std::vector<fs::path> files;
  for (const auto& entry : fs::recursive_directory_iterator(dir))
    if (entry.is_regular_file() && entry.path().extension() == ".json") files.push_back(entry.path());
  std::sort(files.begin(), files.end());
  std::vector<ReportSummary> out;
  for (const auto& f : files) {
    const std::string text = read_text(f);
    const json j = parse(text, "report");
    // Skip non-report JSON (e.g. a copied config) that happens to live in the tree.
    if (!j.is_object() || !j.contains("termination")) continue;
    out.push_back(report_summary_from_json(text));
    if (out.back().instance.empty()) out.back().instance = f.stem().string();
  }
  return out;
}

std::string step_log_csv(const std::vector<StepRecord>& log) {
  std::ostringstream out;
  out << std::setprecision(17);
  out << "k,kind,f,s_norm_sq,eps,r,calls\n";
  for (const auto& s : log)
    out << s.k << ',' << to_string(s.kind) << ',' << s.f << ',' << s.s_norm_sq << ',' << s.eps << ',' << s.r << ','
        << s.calls << '\n';
  return out.str();
}

void write_step_log(const fs::path& path, const std::vector<StepRecord>& log) {
  write_text(path, step_log_csv(log));
}

BatteryConfig battery_config_from_json(const std::string& text) {
  const json j = parse(text, "bench config");
  if (!j.is_object()) throw IoError("bench config: expected an object");
  static const std::set<std::string> known{"dims",        "vdim_fractions", "instances_per_cell",
                                           "starts_per_instance", "max_calls",  "solvers",
                                           "seed",        "convex",         "include_maxquad",
                                           "exclude_failures",    "threads",    "solver"};
  static const std::set<std::string> known_solver{"delta", "eps0",       "eps_min",        "eps_factor",
                                                  "m_descent", "eps_guard", "r",           "bundle_cap",
                                                  "rotate_stencil", "check_invariants"};
  for (const auto& [k, v] : j.items())
    if (!known.count(k)) throw IoError("bench config: unknown key '" + k + "'");

  BatteryConfig c;
  try {
    if (j.contains("dims")) c.dims = j["dims"].get<std::vector<int>>();
    if (j.contains("vdim_fractions")) c.vdim_fractions = j["vdim_fractions"].get<std::vector<double>>();
    c.instances_per_cell = j.value("instances_per_cell", c.instances_per_cell);
    c.convex = j.value("convex", c.convex);
    c.starts_per_instance = j.value("starts_per_instance", c.convex ? 2 : 5);
    c.max_calls = j.value("max_calls", c.max_calls);
    if (j.contains("solvers")) c.solvers = j["solvers"].get<std::vector<std::string>>();
    c.seed = j.value("seed", c.seed);
    c.include_maxquad = j.value("include_maxquad", c.include_maxquad);
    c.exclude_failures = j.value("exclude_failures", c.exclude_failures);
    c.threads = j.value("threads", c.threads);
    if (j.contains("solver")) {
      const json& s = j["solver"];
      for (const auto& [k, v] : s.items())
        if (!known_solver.count(k)) throw IoError("bench config: unknown solver key '" + k + "'");
      SolverConfig& sc = c.solver;
      sc.delta = s.value("delta", sc.delta);
      sc.eps0 = s.value("eps0", sc.eps0);
      sc.eps_min = s.value("eps_min", sc.eps_min);
      sc.eps_factor = s.value("eps_factor", sc.eps_factor);
      sc.m_descent = s.value("m_descent", sc.m_descent);
      sc.eps_guard = s.value("eps_guard", sc.eps_guard);
      sc.bundle_cap = s.value("bundle_cap", sc.bundle_cap);
      sc.rotate_stencil = s.value("rotate_stencil", sc.rotate_stencil);
      sc.check_invariants = s.value("check_invariants", sc.check_invariants);
      if (s.contains("r")) {
        if (s["r"].is_string() && s["r"] == "dynamic") {
          sc.r_rule = RRule::dynamic;
        } else if (s["r"].is_number()) {
          sc.r_rule = RRule::fixed;
          sc.r0 = s["r"].get<double>();
        } else {
          throw IoError("bench config: solver.r must be \"dynamic\" or a number");
        }
      }
    }
  } catch (const json::exception& e) {
    throw IoError(std::string("bench config: ") + e.what());
  }
  c.validate();
  return c;
}

BatteryConfig read_battery_config(const fs::path& path) { return battery_config_from_json(read_text(path)); }

std::map<std::string, std::vector<ProfileSample>> profile_samples(const std::vector<ReportSummary>& reports) {
  std::map<std::string, std::vector<ProfileSample>> out;
  for (const auto& r : reports) out[r.solver].push_back({r.instance, r.ra.value_or(0.0)});
  return out;
}

std::map<std::string, std::vector<ProfileSample>> profile_samples(const std::vector<BatteryRun>& runs) {
  std::map<std::string, std::vector<ProfileSample>> out;
  for (const auto& r : runs) out[r.task.solver].push_back({r.task.instance, r.report.ra.value_or(0.0)});
  return out;
}

std::string profile_csv(const ProfileData& data) {
  std::ostringstream out;
  out << std::setprecision(17) << "solver,theta,phi\n";
  for (const auto& c : data.curves)
    for (std::size_t i = 0; i < c.theta.size(); ++i) out << c.solver << ',' << c.theta[i] << ',' << c.phi[i] << '\n';
  return out.str();
}

std::string profile_svg(const ProfileData& data) {
  constexpr double width = 640, height = 420, left = 60, right = 150, top = 20, bottom = 50;
  const double pw = width - left - right, ph = height - top - bottom;
  double tmax = 1.0;
  for (const auto& c : data.curves)
    if (!c.theta.empty()) tmax = std::max(tmax, c.theta.back());
  // Leave room to the right of the last breakpoint so the final step is visible.
  const double tlo = 1.0, thi = tmax > 1.0 ? tmax * 1.05 : 2.0;
  auto sx = [&](double t) { return left + pw * (std::log(t) - std::log(tlo)) / (std::log(thi) - std::log(tlo)); };
  auto sy = [&](double p) { return top + ph * (1.0 - p); };

  static const char* colors[] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b"};
  std::ostringstream out;
  out << std::fixed << std::setprecision(2);
  out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << width << "\" height=\"" << height
      << "\" font-family=\"sans-serif\" font-size=\"12\">\n";
  out << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  out << "<rect x=\"" << left << "\" y=\"" << top << "\" width=\"" << pw << "\" height=\"" << ph
      << "\" fill=\"none\" stroke=\"black\"/>\n";
  for (int i = 0; i <= 4; ++i) {
    const double p = i / 4.0;
    out << "<line x1=\"" << left - 4 << "\" y1=\"" << sy(p) << "\" x2=\"" << left << "\" y2=\"" << sy(p)
        << "\" stroke=\"black\"/>\n";
    out << "<text x=\"" << left - 8 << "\" y=\"" << sy(p) + 4 << "\" text-anchor=\"end\">" << p << "</text>\n";
  }
  for (double t = 1.0; t <= thi; t *= 10.0) {
    out << "<line x1=\"" << sx(t) << "\" y1=\"" << top + ph << "\" x2=\"" << sx(t) << "\" y2=\"" << top + ph + 4
        << "\" stroke=\"black\"/>\n";
    out << "<text x=\"" << sx(t) << "\" y=\"" << top + ph + 18 << "\" text-anchor=\"middle\">" << std::defaultfloat
        << t << std::fixed << "</text>\n";
  }
  out << "<text x=\"" << left + pw / 2 << "\" y=\"" << height - 10 << "\" text-anchor=\"middle\">theta (log scale)</text>\n";
  out << "<text x=\"15\" y=\"" << top + ph / 2 << "\" text-anchor=\"middle\" transform=\"rotate(-90 15 " << top + ph / 2
      << ")\">phi(theta)</text>\n";

  for (std::size_t k = 0; k < data.curves.size(); ++k) {
    const auto& c = data.curves[k];
    const char* color = colors[k % std::size(colors)];
    out << "<polyline fill=\"none\" stroke=\"" << color << "\" stroke-width=\"2\" points=\"";
    double prev = 0.0;
    out << sx(tlo) << ',' << sy(0.0);
    for (std::size_t i = 0; i < c.theta.size(); ++i) {
      out << ' ' << sx(c.theta[i]) << ',' << sy(prev) << ' ' << sx(c.theta[i]) << ',' << sy(c.phi[i]);
      prev = c.phi[i];
    }
    out << ' ' << sx(thi) << ',' << sy(prev) << "\"/>\n";
    const double ly = top + 20 + 20 * static_cast<double>(k);
    out << "<line x1=\"" << left + pw + 10 << "\" y1=\"" << ly << "\" x2=\"" << left + pw + 35 << "\" y2=\"" << ly
        << "\" stroke=\"" << color << "\" stroke-width=\"2\"/>\n";
    out << "<text x=\"" << left + pw + 40 << "\" y=\"" << ly + 4 << "\">" << c.solver << "</text>\n";
  }
  out << "</svg>\n";
  return out.str();
}

void write_battery_outputs(const fs::path& out_dir, const BatteryResult& result) {
  fs::create_directories(out_dir);
  for (const auto& run : result.runs) {
    ReportMeta meta{run.task.instance, run.task.problem, run.task.dim_v};
    write_report(out_dir / "reports" / run.task.solver / (run.task.instance + ".json"), run.report, meta);
  }

  std::ostringstream runs;
  runs << std::setprecision(17)
       << "instance,problem,n,dim_v,start,solver,termination,f_final,ra,v_found,calls,serious,null,ustep,wall_time\n";
  for (const auto& run : result.runs) {
    const auto& r = run.report;
    runs << run.task.instance << ',' << run.task.problem << ',' << run.task.n << ',' << run.task.dim_v << ','
         << run.task.start_id << ',' << run.task.solver << ',' << to_string(r.termination) << ',' << r.f_final << ','
         << (r.ra ? std::to_string(*r.ra) : "") << ',' << (r.v_found ? std::to_string(*r.v_found) : "") << ','
         << r.calls << ',' << r.serious_steps << ',' << r.null_steps << ',' << r.u_steps << ',' << r.wall_time << '\n';
  }
  write_text(out_dir / "runs.csv", runs.str());

  std::ostringstream summary;
  summary << std::setprecision(6) << "band,solver,runs,mean_ra\n";
  for (const auto& row : result.bands)
    for (const auto& [solver, count] : row.runs)
      summary << row.band << ',' << solver << ',' << count << ',' << row.mean_ra.at(solver) << '\n';
  write_text(out_dir / "summary.csv", summary.str());

  std::ostringstream vdim;
  vdim << "solver,total,exact,within1,within2,within5,over5\n";
  for (const auto& row : result.vdim)
    vdim << row.solver << ',' << row.total << ',' << row.exact << ',' << row.within1 << ',' << row.within2 << ','
         << row.within5 << ',' << row.over5 << '\n';
  write_text(out_dir / "vdim.csv", vdim.str());

  if (!result.runs.empty()) {
    const ProfileData profiles = compute_profiles(profile_samples(result.runs));
    write_text(out_dir / "profile.csv", profile_csv(profiles));
    write_text(out_dir / "profile.svg", profile_svg(profiles));
  }
}

}  // namespace dfovu

#pragma once

#include <filesystem>
#include <map>
#include <stdexcept>
#include <optional>
#include <string>
#include <vector>

#include "dfovu/bench.hpp"
#include "dfovu/driver.hpp"
#include "dfovu/greybox.hpp"

namespace dfovu {

/// Raised for unreadable or malformed input files.
class IoError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Problem files. Reading validates shapes and symmetry (||H - H'||_inf <= 1e-12).
ProblemSpec problem_from_json(const std::string& text);
std::string problem_to_json(const ProblemSpec& spec);
ProblemSpec read_problem(const std::filesystem::path& path);
void write_problem(const ProblemSpec& spec, const std::filesystem::path& path);

/// A point stored as a bare JSON array or as {"x": [...]}.
Vector read_point(const std::filesystem::path& path);

/// Labels attached to a report so that profiles can match runs across solvers.
struct ReportMeta {
  std::string instance;
  std::string problem;
  std::optional<int> known_dim_v;
};

std::string report_to_json(const RunReport& report, const ReportMeta& meta = {});
void write_report(const std::filesystem::path& path, const RunReport& report, const ReportMeta& meta = {});

/// The fields of a saved report that the profile command needs.
struct ReportSummary {
  std::string solver;
  std::string instance;
  Termination termination = Termination::budget;
  double f_final = 0.0;
  std::optional<double> ra;
  std::optional<int> v_found;
  std::uint64_t calls = 0;
};

ReportSummary report_summary_from_json(const std::string& text);
/// Reads every *.json report below a directory, recursively, in path order.
std::vector<ReportSummary> read_report_dir(const std::filesystem::path& dir);

std::string step_log_csv(const std::vector<StepRecord>& log);
void write_step_log(const std::filesystem::path& path, const std::vector<StepRecord>& log);

/// Battery configuration. Unknown keys are rejected.
BatteryConfig battery_config_from_json(const std::string& text);
BatteryConfig read_battery_config(const std::filesystem::path& path);

/// Writes reports/<solver>/<instance>.json, runs.csv, summary.csv, vdim.csv,
/// profile.csv and profile.svg under out_dir.
void write_battery_outputs(const std::filesystem::path& out_dir, const BatteryResult& result);

/// Groups report summaries by solver for compute_profiles.
std::map<std::string, std::vector<ProfileSample>> profile_samples(const std::vector<ReportSummary>& reports);
std::map<std::string, std::vector<ProfileSample>> profile_samples(const std::vector<BatteryRun>& runs);

std::string profile_csv(const ProfileData& data);
std::string profile_svg(const ProfileData& data);

void write_text(const std::filesystem::path& path, const std::string& text);
std::string read_text(const std::filesystem::path& path);

}  // namespace dfovu

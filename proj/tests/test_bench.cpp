#include <gtest/gtest.h>

#include <set>

#include "dfovu/bench.hpp"
#include "dfovu/errors.hpp"

using namespace dfovu;

TEST(Battery, DimVRounding) {
  EXPECT_EQ(dim_v_for(10, 0.5), 5);
  EXPECT_EQ(dim_v_for(10, 0.25), 3);
  EXPECT_EQ(dim_v_for(10, 0.75), 8);
  EXPECT_EQ(dim_v_for(10, 0.01), 1);
  EXPECT_EQ(dim_v_for(10, 0.99), 9);
  EXPECT_EQ(dim_v_for(2, 0.5), 1);
}

TEST(Battery, BandEdges) {
  EXPECT_EQ(vdim_band(100, 14), "(0,15)");
  EXPECT_EQ(vdim_band(100, 15), "[15,30)");
  EXPECT_EQ(vdim_band(10, 3), "[30,45)");
  EXPECT_EQ(vdim_band(10, 5), "[45,60)");
  EXPECT_EQ(vdim_band(10, 6), "[60,100)");
  EXPECT_EQ(vdim_band(20, 3), "[15,30)");
  EXPECT_EQ(vdim_bands().size(), 5u);
}

TEST(Battery, FailureRule) {
  EXPECT_TRUE(is_failure(Termination::budget));
  EXPECT_TRUE(is_failure(Termination::qp_failure));
  EXPECT_FALSE(is_failure(Termination::stopped));
  EXPECT_FALSE(is_failure(Termination::eps_guard));
}

TEST(Battery, ConfigValidation) {
  BatteryConfig c;
  EXPECT_NO_THROW(c.validate());
  c.solvers = {"dfovu", "nomad"};
  EXPECT_THROW(c.validate(), ContractViolation);
  c = {};
  c.vdim_fractions = {1.0};
  EXPECT_THROW(c.validate(), ContractViolation);
  c = {};
  c.dims = {};
  EXPECT_THROW(c.validate(), ContractViolation);
  c.include_maxquad = true;
  EXPECT_NO_THROW(c.validate());
}

TEST(Battery, TaskEnumeration) {
  BatteryConfig c;
  c.dims = {10};
  c.vdim_fractions = {0.5};
  c.instances_per_cell = 2;
  c.starts_per_instance = 3;
  c.include_maxquad = true;
  const auto tasks = battery_tasks(c);
  ASSERT_EQ(tasks.size(), (1u + 2u) * 3u * 2u);
  EXPECT_EQ(tasks[0].problem, "maxquad");
  std::set<std::string> instances;
  for (const auto& t : tasks) {
    instances.insert(t.instance);
    if (t.problem != "maxquad") {
      EXPECT_EQ(t.dim_v, 5);
      EXPECT_EQ(battery_problem(t).m, 6);
    }
  }
  EXPECT_EQ(instances.size(), 9u);
  // Solvers on the same instance share the start point.
  EXPECT_EQ(tasks[2].instance, tasks[3].instance);
  EXPECT_NE(tasks[2].solver, tasks[3].solver);
  EXPECT_TRUE(bit_equal(battery_start(c, tasks[2]), battery_start(c, tasks[3])));
  const Vector x = battery_start(c, tasks[4]);
  EXPECT_LE(x.cwiseAbs().maxCoeff(), 1.0);
}

TEST(Battery, DeterministicAcrossThreadCounts) {
  BatteryConfig c;
  c.dims = {6};
  c.vdim_fractions = {0.3, 0.6};
  c.instances_per_cell = 2;
  c.starts_per_instance = 1;
  c.max_calls = 3000;
  c.threads = 1;
  const auto a = run_battery(c);
  c.threads = 3;
  const auto b = run_battery(c);
  ASSERT_EQ(a.runs.size(), b.runs.size());
  for (std::size_t i = 0; i < a.runs.size(); ++i) {
    EXPECT_EQ(a.runs[i].task.instance, b.runs[i].task.instance);
    EXPECT_EQ(a.runs[i].task.solver, b.runs[i].task.solver);
    EXPECT_TRUE(bit_equal(a.runs[i].report.x_final, b.runs[i].report.x_final));
  }
  ASSERT_EQ(a.bands.size(), b.bands.size());
  for (std::size_t i = 0; i < a.bands.size(); ++i) EXPECT_EQ(a.bands[i].mean_ra, b.bands[i].mean_ra);
  EXPECT_EQ(a.bands.back().band, "(0,100)");
}

TEST(Battery, SummaryAveragesAndHitCounts) {
  BatteryConfig c;
  c.dims = {10};
  c.vdim_fractions = {0.5};
  c.solvers = {"dfovu"};
  BatteryResult r;
  auto add = [&](const std::string& solver, double ra, int vf, Termination t) {
    BatteryRun run;
    run.task.solver = solver;
    run.task.n = 10;
    run.task.dim_v = 5;
    run.task.instance = "i" + std::to_string(r.runs.size());
    run.report.ra = ra;
    run.report.v_found = vf;
    run.report.termination = t;
    r.runs.push_back(run);
  };
  add("dfovu", 2.0, 5, Termination::stopped);
  add("dfovu", 1.0, 4, Termination::budget);
  add("dfovu", 3.0, 12, Termination::stopped);
  summarize(c, r);
  const auto& overall = r.bands.back();
  EXPECT_NEAR(overall.mean_ra.at("dfovu"), 2.0, 1e-15);
  EXPECT_EQ(overall.runs.at("dfovu"), 3);
  ASSERT_EQ(r.vdim.size(), 1u);
  EXPECT_EQ(r.vdim[0].total, 3);
  EXPECT_EQ(r.vdim[0].exact, 1);
  EXPECT_EQ(r.vdim[0].within1, 2);
  EXPECT_EQ(r.vdim[0].within5, 2);
  EXPECT_EQ(r.vdim[0].over5, 1);

  c.exclude_failures = true;
  summarize(c, r);
  EXPECT_NEAR(r.bands.back().mean_ra.at("dfovu"), 2.5, 1e-15);
}

TEST(Profiles, SingleSolverIsOneAtUnitRatio) {
  std::map<std::string, std::vector<ProfileSample>> in{{"a", {{"x", 1.0}, {"y", 0.0}, {"z", 5.0}}}};
  const auto p = compute_profiles(in);
  ASSERT_EQ(p.curves.size(), 1u);
  EXPECT_DOUBLE_EQ(p.curves[0].at(1.0), 1.0);
}

TEST(Profiles, DominatingSolver) {
  std::map<std::string, std::vector<ProfileSample>> in{
      {"good", {{"x", 3.0}, {"y", 2.0}}},
      {"bad", {{"x", 1.0}, {"y", 0.5}}},
  };
  const auto p = compute_profiles(in);
  for (const auto& c : p.curves) {
    EXPECT_DOUBLE_EQ(c.at(1.0), c.solver == "good" ? 1.0 : 0.0);
    EXPECT_DOUBLE_EQ(c.at(1e9), 1.0);
    EXPECT_DOUBLE_EQ(c.at(0.5), 0.0);
    for (std::size_t i = 1; i < c.phi.size(); ++i) {
      EXPECT_LE(c.phi[i - 1], c.phi[i]);
      EXPECT_LT(c.theta[i - 1], c.theta[i]);
    }
    EXPECT_GE(c.phi.front(), 0.0);
    EXPECT_LE(c.phi.back(), 1.0);
  }
}

TEST(Profiles, ZeroRaUsesFloor) {
  std::map<std::string, std::vector<ProfileSample>> in{
      {"a", {{"x", 0.0}}},
      {"b", {{"x", 1.0}}},
  };
  const auto p = compute_profiles(in);
  for (const auto& c : p.curves) {
    if (c.solver != "a") continue;
    EXPECT_DOUBLE_EQ(c.at(999.0), 0.0);
    EXPECT_DOUBLE_EQ(c.at(1000.0), 1.0);
  }
}

TEST(Profiles, MismatchedInstancesRejected) {
  std::map<std::string, std::vector<ProfileSample>> in{{"a", {{"x", 1.0}}}, {"b", {{"y", 1.0}}}};
  EXPECT_THROW(compute_profiles(in), ContractViolation);
  std::map<std::string, std::vector<ProfileSample>> dup{{"a", {{"x", 1.0}, {"x", 2.0}}}};
  EXPECT_THROW(compute_profiles(dup), ContractViolation);
  EXPECT_THROW(compute_profiles({}), ContractViolation);
}

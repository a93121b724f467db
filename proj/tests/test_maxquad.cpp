#include <gtest/gtest.h>

#include <fstream>

#include <json.hpp>

#include "dfovu/greybox.hpp"
#include "dfovu/metrics.hpp"
#include "support/oracles.hpp"

using namespace dfovu;

namespace {

struct Fixture {
  Vector point;
  double value = 0.0;
  std::vector<int> active;
};

Fixture load_fixture() {
  std::ifstream in(DFOVU_FIXTURE_DIR "/maxquad_opt.json");
  const auto j = nlohmann::json::parse(in);
  Fixture f;
  const auto p = j.at("point").get<std::vector<double>>();
  f.point = Eigen::Map<const Vector>(p.data(), static_cast<Eigen::Index>(p.size()));
  f.value = j.at("value").get<double>();
  f.active = j.at("active").get<std::vector<int>>();
  return f;
}

}  // namespace

TEST(Maxquad, FixturePointAttainsReferenceValue) {
  const auto spec = make_maxquad();
  const auto fx = load_fixture();
  const auto rec = evaluate_pieces(spec, fx.point);
  EXPECT_NEAR(rec.fmax, kMaxquadOptValue, 1e-6);
  EXPECT_NEAR(rec.fmax, fx.value, 1e-12);
}

TEST(Maxquad, FixtureIsStationary) {
  // 0 must lie in the convex hull of the active piece gradients.
  const auto spec = make_maxquad();
  const auto fx = load_fixture();
  CutSet cuts;
  for (int j : fx.active) cuts.add(piece_gradient(spec, j, fx.point), 0.0);
  const auto sol = prox_pl(cuts, Vector::Zero(10), 1.0);
  EXPECT_LE(sol.s.norm(), 1e-7);
  const auto rec = evaluate_pieces(spec, fx.point);
  EXPECT_EQ(rec.active, fx.active);
  EXPECT_EQ(v_found_of(rec), 3);
}

TEST(Maxquad, ExactGradientBundleAgreesWithFixture) {
  const auto spec = make_maxquad();
  const auto fx = load_fixture();
  for (double start : {0.0, 1.0}) {
    const Vector x = oracle::exact_bundle_minimize(spec, Vector::Constant(10, start));
    EXPECT_NEAR(evaluate_pieces(spec, x).fmax, kMaxquadOptValue, 1e-6) << "start " << start;
    EXPECT_LE((x - fx.point).norm(), 1e-3) << "start " << start;
  }
}

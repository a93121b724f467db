#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "dfovu/errors.hpp"
#include "dfovu/qpkernels.hpp"
#include "support/oracles.hpp"

using namespace dfovu;

namespace {

CutSet abs_cuts() {
  // |x| from its two linear pieces, in intercept form.
  CutSet c;
  c.add(Vector::Constant(1, 1.0), 0.0);
  c.add(Vector::Constant(1, -1.0), 0.0);
  return c;
}

CutSet random_cuts(int k, int n, std::mt19937_64& rng, double grad_scale = 1.0) {
  std::normal_distribution<double> g;
  CutSet c;
  for (int i = 0; i < k; ++i) {
    Vector v(n);
    for (auto& x : v) x = grad_scale * g(rng);
    c.add(v, g(rng));
  }
  return c;
}

void expect_solution_invariants(const CutSet& cuts, const Vector& z0, double r, const ProxSolution& sol) {
  EXPECT_GE(sol.lambda.minCoeff(), 0.0);
  EXPECT_NEAR(sol.lambda.sum(), 1.0, 1e-10);
  EXPECT_LE((sol.z - (z0 - sol.s / r)).norm(), 1e-8 * (1.0 + z0.norm()));
  Vector agg = Vector::Zero(z0.size());
  for (int i = 0; i < cuts.size(); ++i) agg += sol.lambda[i] * cuts.gradients[static_cast<std::size_t>(i)];
  EXPECT_LE((agg - sol.s).norm(), 1e-8 * (1.0 + agg.norm()));
  const double primal = sol.model_value + 0.5 * r * (sol.z - z0).squaredNorm();
  EXPECT_LE(sol.duality_gap, kProxGapTol * (1.0 + std::abs(primal)));
  EXPECT_LE(primal, cuts.value(z0) + 1e-10 * (1.0 + std::abs(primal)));
  for (int i = 0; i < cuts.size(); ++i)
    if (sol.lambda[i] > 1e-8) {
      const double cut = cuts.cut_value(i, sol.z);
      EXPECT_LE(sol.model_value - cut, 1e-6 * (1.0 + std::abs(sol.model_value))) << "cut " << i;
    }
}

}  // namespace

TEST(Prox, SingleCutIsAffineStep) {
  CutSet c;
  Vector g(3);
  g << 1.0, -2.0, 0.5;
  c.add(g, 4.0);
  const Vector z0 = Vector::Ones(3);
  const auto sol = prox_pl(c, z0, 2.0);
  EXPECT_NEAR(sol.lambda[0], 1.0, 1e-15);
  EXPECT_LE((sol.z - (z0 - g / 2.0)).norm(), 1e-14);
}

TEST(Prox, SoftThresholdOutsideBand) {
  for (double r : {0.5, 1.0, 4.0}) {
    for (double z0 : {2.5, -3.0, 1.0 / r + 1e-3, -1.0 / r - 0.7}) {
      const auto sol = prox_pl(abs_cuts(), Vector::Constant(1, z0), r);
      const double expected = z0 - std::copysign(1.0, z0) / r;
      EXPECT_NEAR(sol.z[0], expected, 1e-8) << "r=" << r << " z0=" << z0;
    }
  }
}

TEST(Prox, SoftThresholdInsideBand) {
  for (double r : {0.5, 1.0, 4.0}) {
    for (double frac : {0.0, 0.3, -0.9, 0.999}) {
      const double z0 = frac / r;
      const auto sol = prox_pl(abs_cuts(), Vector::Constant(1, z0), r);
      EXPECT_NEAR(sol.z[0], 0.0, 1e-8) << "r=" << r << " z0=" << z0;
    }
  }
}

TEST(Prox, OppositeCutsBalance) {
  CutSet c;
  Vector g(2);
  g << 1.0, 2.0;
  c.add(g, 0.0);
  c.add(-g, 0.0);
  const auto sol = prox_pl(c, Vector::Zero(2), 1.0);
  EXPECT_NEAR(sol.lambda[0], 0.5, 1e-10);
  EXPECT_NEAR(sol.lambda[1], 0.5, 1e-10);
  EXPECT_LE(sol.s.norm(), 1e-10);
  EXPECT_LE(sol.z.norm(), 1e-10);
}

TEST(Prox, RejectsBadInput) {
  EXPECT_THROW(prox_pl(abs_cuts(), Vector::Zero(1), 0.0), ContractViolation);
  EXPECT_THROW(prox_pl(CutSet{}, Vector::Zero(1), 1.0), ContractViolation);
  EXPECT_THROW(prox_pl(abs_cuts(), Vector::Zero(2), 1.0), ContractViolation);
}

TEST(Prox, MatchesProjectedGradientOracle) {
  std::mt19937_64 rng(7);
  std::uniform_int_distribution<int> kd(1, 5);
  std::uniform_int_distribution<int> nd(1, 5);
  std::uniform_real_distribution<double> rd(0.5, 5.0);
  for (int t = 0; t < 50; ++t) {
    const int k = kd(rng);
    const int n = nd(rng);
    const auto cuts = random_cuts(k, n, rng);
    Vector z0(n);
    std::normal_distribution<double> g;
    for (auto& v : z0) v = g(rng);
    const double r = rd(rng);
    const auto sol = prox_pl(cuts, z0, r);
    const Vector ref = oracle::pg_prox(cuts, z0, r);
    EXPECT_LE((sol.z - ref).cwiseAbs().maxCoeff(), 1e-6) << "instance " << t;
  }
}

TEST(Prox, InvariantsOnLargerRandomSets) {
  std::mt19937_64 rng(8);
  for (int t = 0; t < 200; ++t) {
    const int k = 2 + t % 25;
    const int n = 2 + t % 12;
    const auto cuts = random_cuts(k, n, rng, t % 4 == 0 ? 100.0 : 1.0);
    Vector z0 = Vector::Zero(n);
    z0[0] = 0.1 * t;
    const double r = t % 3 == 0 ? 1e4 : 1.0 + t;
    const auto sol = prox_pl(cuts, z0, r);
    expect_solution_invariants(cuts, z0, r, sol);
  }
}

TEST(Prox, DegenerateDuplicatesAndAffineDependence) {
  // Repeated and affinely dependent slopes make the dual Hessian singular.
  std::mt19937_64 rng(9);
  for (int t = 0; t < 50; ++t) {
    const int n = 3;
    auto cuts = random_cuts(3, n, rng);
    const Vector mid = 0.5 * (cuts.gradients[0] + cuts.gradients[1]);
    cuts.add(mid, 0.5 * (cuts.intercepts[0] + cuts.intercepts[1]));
    cuts.add(cuts.gradients[2], cuts.intercepts[2]);
    cuts.add(cuts.gradients[0], cuts.intercepts[0] - 1e-3);
    const Vector z0 = Vector::Constant(n, 0.01 * t);
    const auto sol = prox_pl(cuts, z0, 0.7);
    expect_solution_invariants(cuts, z0, 0.7, sol);
  }
}

TEST(Prox, BadlyScaledCutSet) {
  // Slopes over four orders of magnitude and a large prox parameter.
  std::mt19937_64 rng(10);
  for (int t = 0; t < 30; ++t) {
    CutSet cuts;
    std::normal_distribution<double> g;
    for (int i = 0; i < 20; ++i) {
      Vector v(10);
      for (auto& x : v) x = g(rng) * std::pow(10.0, (i % 5) - 1);
      cuts.add(v, g(rng) * 1e-3);
    }
    const Vector z0 = Vector::Zero(10);
    const double r = std::pow(10.0, t % 7);
    const auto sol = prox_pl(cuts, z0, r);
    expect_solution_invariants(cuts, z0, r, sol);
  }
}

TEST(Newton, IdentityGivesNegativeGradient) {
  Vector g(3);
  g << 1.0, -2.0, 3.0;
  EXPECT_LE((solve_newton(Matrix::Identity(3, 3), g) + g).norm(), 1e-15);
}

TEST(Newton, SingularHessianIsRegularized) {
  Matrix h = Matrix::Zero(2, 2);
  h(0, 0) = 2.0;
  Vector g(2);
  g << 2.0, 1.0;
  const Vector du = solve_newton(h, g);
  EXPECT_NEAR(du[0], -1.0, 1e-6);
  EXPECT_TRUE(std::isfinite(du[1]));
  EXPECT_LT(du[1], 0.0);
  EXPECT_LE(du.dot(g), 0.0);
}

TEST(Newton, EmptyAndZeroSystems) {
  EXPECT_EQ(solve_newton(Matrix(0, 0), Vector(0)).size(), 0);
  Vector g(2);
  g << 0.5, -0.25;
  EXPECT_EQ(solve_newton(Matrix::Zero(2, 2), g), Vector(-g));
  EXPECT_THROW(solve_newton(Matrix::Zero(2, 3), g), ContractViolation);
}

TEST(Newton, AlwaysDescent) {
  std::mt19937_64 rng(11);
  std::normal_distribution<double> g;
  for (int t = 0; t < 200; ++t) {
    const int d = 1 + t % 8;
    Matrix a(d, d);
    for (auto& v : a.reshaped()) v = g(rng);
    const Matrix h = symmetrized(a);
    Vector gu(d);
    for (auto& v : gu) v = g(rng);
    const Vector du = solve_newton(h, gu);
    EXPECT_LE(du.dot(gu), 1e-12 * gu.squaredNorm()) << "trial " << t;
  }
}

TEST(Simplex, ProjectionProperties) {
  std::mt19937_64 rng(12);
  std::normal_distribution<double> g;
  for (int t = 0; t < 100; ++t) {
    Vector v(1 + t % 9);
    for (auto& x : v) x = 3.0 * g(rng);
    const Vector p = project_to_simplex(v);
    EXPECT_GE(p.minCoeff(), 0.0);
    EXPECT_NEAR(p.sum(), 1.0, 1e-12);
    EXPECT_LE((p - oracle::simplex_projection(v)).norm(), 1e-14);
    EXPECT_LE((project_to_simplex(p) - p).norm(), 1e-14);
  }
}

#include <gtest/gtest.h>

#include <random>

#include "dfovu/errors.hpp"
#include "dfovu/greybox.hpp"
#include "dfovu/quadmodel.hpp"
#include "dfovu/stencil.hpp"
#include "support/oracles.hpp"

using namespace dfovu;

namespace {

Matrix stencil_points(const QuadStencil& st) {
  Matrix pts(st.dim(), st.size());
  for (int j = 0; j < st.size(); ++j) pts.col(j) = st.point(j);
  return pts;
}

Vector stencil_values(const Quadratic& q, const QuadStencil& st) {
  Vector v(st.size());
  for (int j = 0; j < st.size(); ++j) v[j] = q.value(st.point(j));
  return v;
}

Quadratic random_quadratic(int n, std::mt19937_64& rng) {
  std::normal_distribution<double> g;
  Matrix a(n, n);
  for (auto& v : a.reshaped()) v = g(rng);
  Vector b(n);
  for (auto& v : b) v = g(rng);
  return {symmetrized(a), b};
}

}  // namespace

TEST(QuadStencil, Layout) {
  Vector c(3);
  c << 1.0, -2.0, 0.5;
  const auto st = build_quad_stencil(c, 0.25);
  ASSERT_EQ(st.size(), 7);
  EXPECT_EQ(st.point(0), c);
  for (int k = 0; k < 3; ++k) {
    EXPECT_EQ(st.point(2 * k + 1), Vector(c + 0.25 * Vector::Unit(3, k)));
    EXPECT_EQ(st.point(2 * k + 2), Vector(c - 0.25 * Vector::Unit(3, k)));
  }
  EXPECT_THROW(build_quad_stencil(c, 0.0), ContractViolation);
}

TEST(MinFrobenius, DiagonalQuadraticAtOrigin) {
  std::mt19937_64 rng(1);
  std::uniform_real_distribution<double> u(-3.0, 3.0);
  for (int n = 1; n <= 10; ++n) {
    Vector d(n);
    for (auto& v : d) v = u(rng);
    const Quadratic q{Matrix(d.asDiagonal()), Vector::Zero(n)};
    const auto st = build_quad_stencil(Vector::Zero(n), 0.1);
    const auto fit = min_frobenius_fit(st, stencil_values(q, st));
    EXPECT_LE((fit.H - q.H).cwiseAbs().maxCoeff(), 1e-10);
    EXPECT_LE(fit.D.cwiseAbs().maxCoeff(), 1e-10);
    EXPECT_LE(std::abs(fit.C), 1e-10);
  }
}

TEST(MinFrobenius, DenseHessianKeepsOnlyDiagonal) {
  std::mt19937_64 rng(2);
  const auto q = random_quadratic(6, rng);
  Vector c(6);
  for (auto& v : c) v = 0.3;
  const auto st = build_quad_stencil(c, 0.05);
  const auto fit = min_frobenius_fit(st, stencil_values(q, st));
  EXPECT_LE((fit.H - Matrix(q.H.diagonal().asDiagonal())).cwiseAbs().maxCoeff(), 1e-8);
}

TEST(MinFrobenius, MatchesKktOracle) {
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  for (int t = 0; t < 100; ++t) {
    const int n = 1 + t % 10;
    const auto q = random_quadratic(n, rng);
    Vector c(n);
    for (auto& v : c) v = u(rng);
    const auto st = build_quad_stencil(c, 0.1 + 0.4 * std::abs(u(rng)));
    const Vector vals = stencil_values(q, st);
    const auto fit = min_frobenius_fit(st, vals);
    const auto ref = oracle::kkt_min_frobenius(stencil_points(st), vals);
    EXPECT_LE((fit.H - ref.H).cwiseAbs().maxCoeff(), 1e-8) << "n=" << n;
    EXPECT_LE((fit.D - ref.D).cwiseAbs().maxCoeff(), 1e-8) << "n=" << n;
    EXPECT_NEAR(fit.C, ref.C, 1e-8) << "n=" << n;
  }
}

TEST(MinFrobenius, InterpolatesAndIsSymmetric) {
  std::mt19937_64 rng(4);
  for (int t = 0; t < 50; ++t) {
    const int n = 2 + t % 9;
    const auto q = random_quadratic(n, rng);
    const auto st = build_quad_stencil(Vector::Constant(n, 0.1 * t), 1e-2);
    const Vector vals = stencil_values(q, st);
    const auto fit = min_frobenius_fit(st, vals);
    EXPECT_EQ(fit.H, fit.H.transpose());
    for (int j = 0; j < st.size(); ++j)
      EXPECT_LE(std::abs(fit.value(st.point(j)) - vals[j]), 1e-8 * (1.0 + std::abs(vals[j])));
  }
}

TEST(MinFrobenius, RejectsWrongValueCount) {
  const auto st = build_quad_stencil(Vector::Zero(3), 0.1);
  EXPECT_THROW(min_frobenius_fit(st, Vector::Zero(6)), ContractViolation);
}

TEST(UHessian, SingleDiagonalQuadratic) {
  ProblemSpec s;
  s.n = 3;
  s.m = 1;
  Vector d(3);
  d << 1.0, 2.0, 5.0;
  s.quads.push_back({Matrix(d.asDiagonal()), Vector::Zero(3)});
  GreyBox box(s);
  const std::vector<int> active{0};
  const Matrix h = approximate_u_hessian(box, Vector::Zero(3), 0.1, active, Matrix::Identity(3, 3));
  EXPECT_EQ(box.calls(), 7u);
  EXPECT_LE((h - Matrix(d.asDiagonal())).cwiseAbs().maxCoeff(), 1e-12);
}

TEST(UHessian, KinkPlusSmoothDirection) {
  ProblemSpec s;
  s.n = 2;
  s.m = 2;
  Matrix H = Matrix::Zero(2, 2);
  H(1, 1) = 1.0;
  s.quads.push_back({H, Vector::Unit(2, 0)});
  s.quads.push_back({H, -Vector::Unit(2, 0)});
  GreyBox box(s);
  const auto rec = box.evaluate(Vector::Zero(2));
  const std::vector<int> active{0, 1};
  const Matrix h = approximate_u_hessian(box, Vector::Zero(2), 1e-3, active, Matrix(Vector::Unit(2, 1)), &rec);
  EXPECT_EQ(box.calls(), 1u + 4u);
  ASSERT_EQ(h.rows(), 1);
  EXPECT_NEAR(h(0, 0), 1.0, 1e-9);
}

TEST(UHessian, ExactlySymmetricOutput) {
  const auto spec = generate_random(7, 3, 12);
  GreyBox box(spec);
  std::mt19937_64 rng(5);
  const Matrix U = random_orthogonal(7, rng).leftCols(4);
  const std::vector<int> active{0, 1, 2, 3};
  const Matrix h = approximate_u_hessian(box, Vector::Constant(7, 0.01), 1e-3, active, U);
  EXPECT_EQ(h, h.transpose());
}

TEST(UHessian, ExactOnDiagonalPiecesForAnyEpsilon) {
  std::mt19937_64 rng(8);
  std::uniform_real_distribution<double> u(0.5, 3.0);
  ProblemSpec s;
  s.n = 5;
  s.m = 3;
  for (int j = 0; j < 3; ++j) {
    Vector d(5);
    for (auto& v : d) v = u(rng);
    Vector b = Vector::Zero(5);
    b[j] = 1.0;
    b[(j + 1) % 3] = -1.0;
    s.quads.push_back({Matrix(d.asDiagonal()), b});
  }
  const Matrix U = orthogonal_complement(Matrix::Identity(5, 3).leftCols(2), 1e-8);
  Matrix ref = Matrix::Zero(5, 5);
  for (const auto& q : s.quads) ref += q.H / 3.0;
  ref = U.transpose() * ref * U;
  const std::vector<int> active{0, 1, 2};
  for (double eps : {1e-1, 1e-2, 1e-3}) {
    GreyBox box(s);
    const Matrix h = approximate_u_hessian(box, Vector::Zero(5), eps, active, U);
    EXPECT_LE((h - ref).norm(), 1e-7);
  }
}

TEST(UHessian, RandomInstanceMatchesProjectedMeanDiagonal) {
  // On quadratic pieces the fit is exact for every eps: U' mean(diag H_j) U.
  const auto spec = generate_random(8, 3, 31);
  const auto rec = evaluate_pieces(spec, Vector::Zero(8));
  GreyBox box0(spec);
  const auto info = approximate_first_order(box0, Vector::Zero(8), 1e-6);
  Matrix mean_diag = Matrix::Zero(8, 8);
  for (int j : rec.active) mean_diag += Matrix(spec.quads[static_cast<std::size_t>(j)].H.diagonal().asDiagonal());
  mean_diag /= static_cast<double>(rec.active.size());
  const Matrix ref = info.U.transpose() * mean_diag * info.U;
  for (double eps : {1e-1, 1e-2, 1e-3}) {
    GreyBox box(spec);
    const Matrix h = approximate_u_hessian(box, Vector::Constant(8, 1e-3), eps, rec.active, info.U);
    EXPECT_LE((h - ref).norm(), 1e-6 * (1.0 + ref.norm())) << "eps=" << eps;
  }
}

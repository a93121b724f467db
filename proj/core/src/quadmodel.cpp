#include "dfovu/quadmodel.hpp"

#include <string>

#include "dfovu/errors.hpp"

namespace dfovu {

Vector QuadStencil::point(int j) const {
  if (j == 0) return center;
  const int k = (j - 1) / 2;
  Vector p = center;
  p[k] += (j % 2 == 1) ? epsilon : -epsilon;
  return p;
}

QuadStencil build_quad_stencil(const Vector& center, double epsilon) {
  if (!(epsilon > 0.0)) throw ContractViolation("build_quad_stencil: epsilon must be positive");
  return {center, epsilon};
}

HessianFit min_frobenius_fit(const QuadStencil& stencil, const Vector& vals) {
  const int n = stencil.dim();
  if (vals.size() != stencil.size())
    throw ContractViolation("min_frobenius_fit: expected " + std::to_string(stencil.size()) + " values");
  const double eps = stencil.epsilon;
  const double f0 = vals[0];

  // Fit in shifted coordinates y = x - center: 0.5 y'Gy + d'y + c.
  Vector g(n);
  Vector d(n);
  for (int k = 0; k < n; ++k) {
    const double fp = vals[2 * k + 1];
    const double fm = vals[2 * k + 2];
    g[k] = (fp + fm - 2.0 * f0) / (eps * eps);
    d[k] = (fp - fm) / (2.0 * eps);
  }

  const Vector& xc = stencil.center;
  HessianFit fit;
  fit.H = g.asDiagonal();
  fit.D = d - g.cwiseProduct(xc);
  fit.C = f0 - d.dot(xc) + 0.5 * xc.dot(g.cwiseProduct(xc));
  return fit;
}

Matrix approximate_u_hessian(GreyBox& oracle, const Vector& x, double epsilon, std::span<const int> active,
                             const Matrix& U, const EvalRecord* center_hint) {
  const int n = oracle.dim();
  if (x.size() != n || U.rows() != n) throw ContractViolation("approximate_u_hessian: dimension mismatch");
  if (active.empty()) throw ContractViolation("approximate_u_hessian: empty active set");
  const QuadStencil st = build_quad_stencil(x, epsilon);

  const int m = oracle.spec().m;
  Matrix vals(st.size(), m);
  vals.row(0) = ((center_hint != nullptr && bit_equal(center_hint->x, x)) ? center_hint->values
                                                                           : oracle.evaluate(x).values)
                    .transpose();
  for (int j = 1; j < st.size(); ++j) vals.row(j) = oracle.evaluate(st.point(j)).values.transpose();

  Matrix h = Matrix::Zero(n, n);
  for (int i : active) h += min_frobenius_fit(st, vals.col(i)).H;
  h /= static_cast<double>(active.size());
  return symmetrized(U.transpose() * h * U);
}

}  // namespace dfovu

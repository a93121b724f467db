#pragma once

#include <span>

#include "dfovu/greybox.hpp"
#include "dfovu/linalg.hpp"

namespace dfovu {

/// 2n+1 points: the center, then center + epsilon e_k and center - epsilon e_k for k = 0..n-1.
struct QuadStencil {
  Vector center;
  double epsilon = 0.0;

  int dim() const { return static_cast<int>(center.size()); }
  int size() const { return 2 * dim() + 1; }
  /// Point j: 0 is the center, 2k+1 is +e_k, 2k+2 is -e_k.
  Vector point(int j) const;
};

QuadStencil build_quad_stencil(const Vector& center, double epsilon);

/// Quadratic 0.5 x'Hx + D'x + C in original coordinates.
struct HessianFit {
  Matrix H;
  Vector D;
  double C = 0.0;

  double value(const Vector& x) const { return 0.5 * x.dot(H * x) + D.dot(x) + C; }
};

/**
 * Minimum-Frobenius-norm quadratic interpolating `vals` on the stencil.
 *
 * On the +/- coordinate stencil the off-diagonal Hessian entries are not
 * constrained by any interpolation condition, so the minimum-norm solution
 * is the diagonal second central difference.
 */
HessianFit min_frobenius_fit(const QuadStencil& stencil, const Vector& vals);

/**
 * Approximate U-Hessian: U' (mean of the active pieces' fitted Hessians) U,
 * explicitly symmetrized. Makes 2n+1 oracle calls, or 2n when `center_hint`
 * is bit-identical to x.
 */
Matrix approximate_u_hessian(GreyBox& oracle, const Vector& x, double epsilon, std::span<const int> active,
                             const Matrix& U, const EvalRecord* center_hint = nullptr);

}  // namespace dfovu

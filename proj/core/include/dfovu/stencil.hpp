#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "dfovu/greybox.hpp"
#include "dfovu/linalg.hpp"

namespace dfovu {

/// n+1 point simplex: the center plus center + epsilon * d_i for orthonormal d_i.
struct SimplexStencil {
  Vector center;
  double epsilon = 0.0;
  Matrix directions;  // column i is d_i
  double mhat_cond = 1.0;

  int dim() const { return static_cast<int>(center.size()); }
  Vector point(int i) const { return center + epsilon * directions.col(i); }
};

/// Canonical directions unless rotate_seed is given, in which case d_i = Q e_i for a random orthogonal Q.
SimplexStencil build_stencil(const Vector& center, double epsilon,
                             std::optional<std::uint64_t> rotate_seed = std::nullopt);

/// M^{-1} (point_vals - center_val), with M the matrix of rows (y_i - y_0)'.
Vector simplex_gradient(const SimplexStencil& stencil, double center_val, const Vector& point_vals);

/// Approximate first-order data at a point: subgradient, V/U bases and U-gradient.
struct FirstOrderInfo {
  std::vector<int> active;
  Vector g_eps;
  Matrix V;  // n x (|active| - 1)
  Matrix U;  // n x dim U, orthonormal columns
  Vector u_grad;
  std::vector<Vector> active_gradients;  // simplex gradients, same order as `active`
  EvalRecord center;
  double epsilon = 0.0;

  int dim_u() const { return static_cast<int>(U.cols()); }
  int rank_v() const { return static_cast<int>(U.rows() - U.cols()); }
};

/// Relative pivot tolerance deciding which V columns count toward the V-space.
inline constexpr double kVRankTol = 1e-8;

/**
 * Evaluates the oracle on an n+1 point simplex around x and assembles the
 * averaged simplex subgradient over the almost-active pieces, the V matrix
 * of gradient differences, an orthonormal U spanning its complement, and
 * u_grad = U' g_eps.
 *
 * When `center_hint` is bit-identical to x its values are reused and only n
 * calls are made; otherwise n+1.
 */
FirstOrderInfo approximate_first_order(GreyBox& oracle, const Vector& x, double epsilon,
                                       const EvalRecord* center_hint = nullptr,
                                       std::optional<std::uint64_t> rotate_seed = std::nullopt);

}  // namespace dfovu

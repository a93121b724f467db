#pragma once

#include <vector>

#include "dfovu/linalg.hpp"

namespace dfovu {

/// Piecewise-linear model phi(z) = max_i { a_i + g_i'z }.
struct CutSet {
  std::vector<Vector> gradients;
  std::vector<double> intercepts;

  void add(Vector g, double a) {
    gradients.push_back(std::move(g));
    intercepts.push_back(a);
  }
  /// Adds the cut through (point, value) with slope g.
  void add_through(const Vector& point, double value, Vector g) {
    const double a = value - g.dot(point);
    add(std::move(g), a);
  }
  int size() const { return static_cast<int>(gradients.size()); }
  double cut_value(int i, const Vector& z) const;
  double value(const Vector& z) const;
};

struct ProxSolution {
  Vector z;                 // argmin phi(z) + r/2 ||z - z0||^2
  Vector lambda;            // dual weights on the unit simplex
  Vector s;                 // aggregate sum lambda_i g_i = r (z0 - z)
  double model_value = 0;   // phi(z)
  double duality_gap = 0;   // phi(z) - sum lambda_i cut_i(z), nonnegative
  int iterations = 0;
  bool used_fallback = false;
};

/// Duality-gap tolerance, relative to 1 + |primal objective|.
inline constexpr double kProxGapTol = 1e-8;

/**
 * Proximal point of a piecewise-linear model, through its dual
 *
 *   min_{lambda in simplex} ||G lambda||^2 / (2r) - sum_i lambda_i (a_i + g_i'z0),
 *
 * solved by a primal active-set method, falling back to a primal-dual interior-point
 * method and finally to projected gradient.
 * Throws QpFailure if none reaches the duality-gap tolerance.
 */
ProxSolution prox_pl(const CutSet& cuts, const Vector& z0, double r);

/// Euclidean projection onto the unit simplex.
Vector project_to_simplex(const Vector& v);

/// Eigenvalue floor for the U-Newton system, relative to the spectral norm.
inline constexpr double kNewtonEigFloor = 1e-8;

/**
 * Solves (Hu + sigma I) du = -gu. sigma is zero when the smallest eigenvalue
 * of Hu is at least 1e-8 ||Hu||, otherwise it lifts that eigenvalue to the
 * floor. A zero Hu gives du = -gu.
 */
Vector solve_newton(const Matrix& Hu, const Vector& gu);

}  // namespace dfovu

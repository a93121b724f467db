#pragma once

#include <atomic>
#include <cstdint>
#include <optional>
#include <vector>

#include "dfovu/linalg.hpp"

namespace dfovu {

/// Relative almost-active threshold: j is active when fmax - f_j <= 0.001 |fmax|.
inline constexpr double kActiveRelTol = 1e-3;
/// Absolute fallback used when |fmax| is numerically zero.
inline constexpr double kActiveAbsTol = 1e-6;
inline constexpr double kNearZeroValue = 1e-12;

/// One quadratic piece f_j(x) = 0.5 x'Hx + b'x.
struct Quadratic {
  Matrix H;
  Vector b;

  double value(const Vector& x) const { return 0.5 * x.dot(H * x) + b.dot(x); }
  Vector gradient(const Vector& x) const { return H * x + b; }
};

/// A finite-max-of-quadratics objective with optional solution metadata.
struct ProblemSpec {
  int n = 0;
  int m = 0;
  std::vector<Quadratic> quads;
  std::optional<double> known_opt_value;
  std::optional<Vector> known_opt_point;
  std::optional<int> known_dim_v;
  bool convex = true;
  std::optional<std::uint64_t> seed;

  /// Throws ContractViolation if shapes are inconsistent or an H_j is not symmetric.
  void validate(double symmetry_tol = 1e-12) const;
};

/// Result of one grey-box call.
struct EvalRecord {
  Vector x;
  Vector values;
  double fmax = 0.0;
  std::vector<int> active;  // 0-based subfunction indices, ascending
};

/// Almost-active index set for a vector of piece values (never empty).
std::vector<int> almost_active(const Vector& values, double fmax);

/// Evaluates every piece at x without touching any call counter.
EvalRecord evaluate_pieces(const ProblemSpec& spec, const Vector& x);

/// Exact-derivative helpers for tests and fixtures; never used by the solvers.
Vector piece_gradient(const ProblemSpec& spec, int j, const Vector& x);
double max_active_gradient_norm(const ProblemSpec& spec, const Vector& x);

/**
 * Grey-box oracle: each call evaluates all m pieces at one point.
 *
 * The spec is held by reference and must outlive the oracle. The call counter
 * is atomic so several threads may share one oracle, although the solvers
 * use one oracle per run.
 */
class GreyBox {
 public:
  explicit GreyBox(const ProblemSpec& spec) : spec_(&spec) {}
  GreyBox(const GreyBox&) = delete;
  GreyBox& operator=(const GreyBox&) = delete;

  EvalRecord evaluate(const Vector& x);

  std::uint64_t calls() const { return calls_.load(std::memory_order_relaxed); }
  const ProblemSpec& spec() const { return *spec_; }
  int dim() const { return spec_->n; }

 private:
  const ProblemSpec* spec_;
  std::atomic<std::uint64_t> calls_{0};
};

/// The classical 10-variable, 5-piece maxquad instance.
ProblemSpec make_maxquad();

inline constexpr double kMaxquadOptValue = -0.84140833459641814;

/**
 * Random max-of-quadratics with minimizer 0 and optimal value 0.
 *
 * m = dim_v + 1 pieces; each H_j = Q diag(lambda) Q' with dim_v nonzero
 * eigenvalues spread log-uniformly over [1, dim_v^2]. The b_j are affinely
 * independent and 0 is a strictly positive combination of them. With
 * convex = false the first piece is made positive definite and the last
 * negative definite, so 0 stays a Clarke-critical point with value 0.
 */
ProblemSpec generate_random(int n, int dim_v, std::uint64_t seed, bool convex = true);

}  // namespace dfovu

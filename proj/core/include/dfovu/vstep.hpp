#pragma once

#include <cstdint>
#include <functional>
#include <limits>
#include <optional>
#include <vector>

#include "dfovu/greybox.hpp"
#include "dfovu/qpkernels.hpp"
#include "dfovu/stencil.hpp"

namespace dfovu {

enum class ElementKind { regular, aggregate };

/// One cutting plane of the V-step model, stored as (point, value, slope).
struct BundleElement {
  ElementKind kind = ElementKind::regular;
  int index = 0;  // inner iteration that produced it; -1 for the aggregate
  Vector point;
  double fval = 0.0;
  Vector grad;

  double cut(const Vector& z) const { return fval + grad.dot(z - point); }
};

/// Tilt threshold: approximate slopes are corrected only when the overshoot exceeds this.
inline constexpr double kTiltThreshold = 1e-8;

/**
 * Tilts an approximate slope down so the cut through (zj, f_zj) does not
 * overshoot f at the center z0.
 *
 * E = f_zj + g_tilde'(z0 - zj) - f_z0. When E > 1e-8 the result is
 * g_tilde - E (z0 - zj) / ||z0 - zj||^2, for which the corrected cut passes
 * exactly through (z0, f_z0). Otherwise, or when zj == z0, g_tilde is
 * returned unchanged.
 */
Vector tilt_correct(const Vector& g_tilde, const Vector& z0, double f_z0, const Vector& zj, double f_zj);

struct InnerTrace {
  int j = 0;
  double model_gap = 0.0;
  double s_norm = 0.0;
  std::uint64_t calls = 0;
  int bundle_size = 0;
};

struct VStepOptions {
  int bundle_cap = 0;  // 0 means n + 10
  /// Absolute ceiling on oracle.calls(); checked before each inner iteration.
  std::uint64_t max_calls = std::numeric_limits<std::uint64_t>::max();
  std::optional<std::uint64_t> rotate_seed;
  bool check_invariants = true;
  std::function<void(const InnerTrace&)> trace;
};

struct VStepResult {
  Vector x_next;
  Vector s_next;
  EvalRecord x_next_record;
  double f_center = 0.0;      // f(z0)
  double model_value = 0.0;   // phi_j(x_next)
  double model_gap = 0.0;     // f(x_next) - phi_j(x_next)
  double r = 0.0;
  int inner_iters = 0;
  std::uint64_t calls_used = 0;
  Vector lambda;              // final prox weights
  std::vector<BundleElement> bundle;  // final model
  Vector first_g;             // approximate subgradient at z0
};

/**
 * Tilt-corrected derivative-free proximal bundle step from x_k.
 *
 * Iterates linearization, prox of the cutting-plane model and the inner
 * stopping test f(z_{j+1}) - phi_j(z_{j+1}) <= eps^2 / r. The bundle always
 * keeps the aggregate, the first and the newest element, then almost-active
 * cuts and the largest prox weights up to the cap.
 *
 * `first` may carry the first-order data already computed at x_k with the
 * same epsilon; it is reused for the j = 0 linearization.
 *
 * Throws BudgetExhausted, QpFailure, or InvariantViolation (when checks are on).
 */
VStepResult v_step(GreyBox& oracle, const Vector& x_k, double eps, double r, const VStepOptions& options = {},
                   const FirstOrderInfo* first = nullptr);

}  // namespace dfovu

#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "dfovu/greybox.hpp"
#include "dfovu/stencil.hpp"
#include "dfovu/vstep.hpp"

namespace dfovu {

enum class RRule { fixed, dynamic };

enum class Termination { stopped, eps_guard, budget, qp_failure };

enum class StepKind { serious, null_step, u_step, u_rejected, stop };

std::string_view to_string(Termination t);
std::string_view to_string(StepKind k);
Termination termination_from_string(std::string_view s);

struct SolverConfig {
  double delta = 1e-2;
  double eps_min = 1e-2;
  double m_descent = 0.1;
  double eps0 = 0.1;
  double eps_factor = 0.9;
  double eps_guard = 1e-5;
  double r0 = 1.0;
  RRule r_rule = RRule::dynamic;
  std::uint64_t max_calls = 0;  // 0 selects 800 * min(n, 20)
  int bundle_cap = 0;           // 0 selects n + 10
  std::uint64_t seed = 0;
  bool rotate_stencil = false;
  bool check_invariants = true;

  /// Throws ContractViolation on out-of-range parameters.
  void validate() const;
  std::uint64_t call_budget(int n) const;
};

struct StepRecord {
  int k = 0;
  StepKind kind = StepKind::serious;
  double f = 0.0;
  double s_norm_sq = 0.0;
  double eps = 0.0;
  double r = 0.0;
  std::uint64_t calls = 0;
};

struct RunReport {
  std::string solver;
  Vector x_final;
  double f_final = 0.0;
  Vector x_best;
  double f_best = 0.0;
  double s_final_norm = 0.0;
  double eps_final = 0.0;
  int outer_iters = 0;
  int serious_steps = 0;
  int null_steps = 0;
  int u_steps = 0;
  int u_rejected = 0;
  int inner_iters = 0;
  std::uint64_t calls = 0;
  double wall_time = 0.0;
  Termination termination = Termination::budget;
  std::optional<double> ra;
  std::optional<int> v_found;
  std::vector<StepRecord> step_log;
};

/// Observation hook for one completed V-step (used by certificate checks and tracing).
struct VStepEvent {
  int k;
  const Vector& x_k;
  double f_xk;
  double eps;
  double r;
  const VStepResult& result;
};

struct SolveObserver {
  std::function<void(const VStepEvent&)> on_v_step;
  std::function<void(const InnerTrace&)> on_inner;
};

/**
 * Dynamic proximal parameter:
 *   t = 0.5 g_norm_sq / (1 + |f|) if |f| > 1e-10, else 2;
 *   r = max(1, min(1/t, 100 r_prev, 1e6)).
 */
double prox_parameter(double g_norm_sq, double f_xk, double r_prev);

struct UStepResult {
  Vector x_next;
  Vector du;
  Matrix u_hessian;
  FirstOrderInfo info;

  int dim_u() const { return info.dim_u(); }
};

/// U-Newton step x + U du with du from the regularized approximate U-Hessian system.
/// dim U = 0 returns x unchanged.
UStepResult u_step(GreyBox& oracle, const Vector& x, double eps, const EvalRecord* center_hint = nullptr,
                   std::optional<std::uint64_t> rotate_seed = std::nullopt);

/// Derivative-free VU bundle method.
RunReport dfo_vu_solve(GreyBox& oracle, const Vector& x0, const SolverConfig& config,
                       const SolveObserver& observer = {});

/// Same outer loop without U-steps: an inexact proximal bundle comparator.
RunReport baseline_bundle_solve(GreyBox& oracle, const Vector& x0, const SolverConfig& config,
                                const SolveObserver& observer = {});

}  // namespace dfovu

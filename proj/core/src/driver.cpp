#include "dfovu/driver.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <string>

#include "dfovu/errors.hpp"
#include "dfovu/metrics.hpp"
#include "dfovu/quadmodel.hpp"
#include "dfovu/qpkernels.hpp"

namespace dfovu {

std::string_view to_string(Termination t) {
  switch (t) {
    case Termination::stopped: return "stopped";
    case Termination::eps_guard: return "eps_guard";
    case Termination::budget: return "budget";
    case Termination::qp_failure: return "qp_failure";
  }
  return "unknown";
}

std::string_view to_string(StepKind k) {
  switch (k) {
    case StepKind::serious: return "serious";
    case StepKind::null_step: return "null";
    case StepKind::u_step: return "ustep";
    case StepKind::u_rejected: return "ustep_rejected";
    case StepKind::stop: return "stop";
  }
  return "unknown";
}

Termination termination_from_string(std::string_view s) {
  for (auto t : {Termination::stopped, Termination::eps_guard, Termination::budget, Termination::qp_failure})
    if (to_string(t) == s) return t;
  throw ContractViolation("unknown termination status '" + std::string(s) + "'");
}

void SolverConfig::validate() const {
  if (!(delta >= 0.0)) throw ContractViolation("delta must be >= 0");
  if (!(eps_min >= 0.0)) throw ContractViolation("eps_min must be >= 0");
  if (!(m_descent > 0.0 && m_descent < 1.0)) throw ContractViolation("m_descent must lie in (0, 1)");
  if (!(eps0 > 0.0)) throw ContractViolation("eps0 must be positive");
  if (!(eps_factor > 0.0 && eps_factor < 1.0)) throw ContractViolation("eps_factor must lie in (0, 1)");
  if (!(eps_guard > 0.0)) throw ContractViolation("eps_guard must be positive");
  if (!(r0 > 0.0)) throw ContractViolation("r0 must be positive");
  if (bundle_cap < 0) throw ContractViolation("bundle_cap must be >= 0");
}

std::uint64_t SolverConfig::call_budget(int n) const {
  return max_calls > 0 ? max_calls : 800u * static_cast<std::uint64_t>(std::min(n, 20));
}

double prox_parameter(double g_norm_sq, double f_xk, double r_prev) {
  if (!(r_prev >= 1.0)) throw ContractViolation("prox_parameter: r_prev must be >= 1");
  const double t = std::abs(f_xk) > 1e-10 ? 0.5 * g_norm_sq / (1.0 + std::abs(f_xk)) : 2.0;
  const double inv_t = t > 0.0 ? 1.0 / t : std::numeric_limits<double>::infinity();
  return std::max(1.0, std::min({inv_t, 100.0 * r_prev, 1e6}));
}

UStepResult u_step(GreyBox& oracle, const Vector& x, double eps, const EvalRecord* center_hint,
                   std::optional<std::uint64_t> rotate_seed) {
  UStepResult res;
  res.info = approximate_first_order(oracle, x, eps, center_hint, rotate_seed);
  if (res.info.dim_u() == 0) {
    res.x_next = x;
    res.du = Vector(0);
    res.u_hessian = Matrix(0, 0);
    return res;
  }
  res.u_hessian = approximate_u_hessian(oracle, x, eps, res.info.active, res.info.U, &res.info.center);
  res.du = solve_newton(res.u_hessian, res.info.u_grad);
  res.x_next = x + res.info.U * res.du;
  return res;
}

namespace {

std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t counter) {
  std::uint64_t z = seed + 0x9e3779b97f4a7c15ULL * (counter + 1);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

class OuterLoop {
 public:
  OuterLoop(GreyBox& oracle, const SolverConfig& cfg, const SolveObserver& obs, bool u_steps)
      : oracle_(oracle), cfg_(cfg), obs_(obs), take_u_steps_(u_steps), budget_(cfg.call_budget(oracle.dim())) {}

  RunReport run(const Vector& x0) {
    cfg_.validate();
    if (x0.size() != oracle_.dim()) throw ContractViolation("solve: x0 has the wrong dimension");
    const auto t0 = std::chrono::steady_clock::now();
    report_.solver = take_u_steps_ ? "dfovu" : "baseline";

    try {
      loop(x0);
    } catch (const BudgetExhausted&) {
      report_.termination = Termination::budget;
    } catch (const QpFailure&) {
      report_.termination = Termination::qp_failure;
    }

    if (report_.termination != Termination::stopped) final_ = best_;
    report_.x_final = final_.x;
    report_.f_final = final_.fmax;
    report_.x_best = best_.x;
    report_.f_best = best_.fmax;
    report_.eps_final = eps_;
    report_.calls = oracle_.calls();
    report_.v_found = v_found_of(final_);
    if (const auto& fbar = oracle_.spec().known_opt_value) report_.ra = compute_ra(best_.fmax, *fbar);
    report_.wall_time = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    return std::move(report_);
  }

 private:
  void require(std::uint64_t needed) {
    if (oracle_.calls() + needed > budget_) throw BudgetExhausted("solve: budget exhausted", best_.x, best_.fmax);
  }

  std::optional<std::uint64_t> next_rotation() {
    if (!cfg_.rotate_stencil) return std::nullopt;
    return mix_seed(cfg_.seed, rotation_counter_++);
  }

  void consider(const EvalRecord& rec) {
    if (best_.x.size() == 0 || rec.fmax < best_.fmax) best_ = rec;
  }

  void log(StepKind kind, double f, double s_norm_sq) {
    report_.step_log.push_back({k_, kind, f, s_norm_sq, eps_, r_, oracle_.calls()});
  }

  void loop(const Vector& x0) {
    const int n = oracle_.dim();
    eps_ = cfg_.eps0;
    r_ = cfg_.r_rule == RRule::fixed ? cfg_.r0 : 1.0;
    double r_prev = 1.0;

    require(1);
    EvalRecord xrec = oracle_.evaluate(x0);
    best_ = xrec;
    final_ = xrec;

    VStepOptions vopts;
    vopts.bundle_cap = cfg_.bundle_cap;
    vopts.max_calls = budget_;
    vopts.check_invariants = cfg_.check_invariants;
    vopts.trace = obs_.on_inner;

    while (true) {
      const std::optional<std::uint64_t> rot = next_rotation();
      vopts.rotate_seed = rot;
      FirstOrderInfo info;
      if (cached_ && cached_->epsilon == eps_ && bit_equal(cached_->center.x, xrec.x)) {
        info = std::move(*cached_);
      } else {
        require(static_cast<std::uint64_t>(n));
        info = approximate_first_order(oracle_, xrec.x, eps_, &xrec, rot);
      }
      cached_.reset();
      if (cfg_.r_rule == RRule::dynamic) {
        r_ = prox_parameter(info.g_eps.squaredNorm(), xrec.fmax, r_prev);
        r_prev = r_;
      }

      const VStepResult v = v_step(oracle_, xrec.x, eps_, r_, vopts, &info);
      report_.inner_iters += v.inner_iters;
      if (obs_.on_v_step) obs_.on_v_step({k_, xrec.x, xrec.fmax, eps_, r_, v});
      consider(v.x_next_record);

      const double s2 = v.s_next.squaredNorm();
      report_.s_final_norm = std::sqrt(s2);

      if (s2 <= cfg_.delta && eps_ <= cfg_.eps_min) {
        final_ = v.x_next_record;
        report_.termination = Termination::stopped;
        ++k_;
        log(StepKind::stop, final_.fmax, s2);
        report_.outer_iters = k_;
        return;
      }

      const double decrease = xrec.fmax - v.x_next_record.fmax;
      const bool descent = decrease >= (cfg_.m_descent / (2.0 * r_)) * s2;
      ++k_;
      report_.outer_iters = k_;
      if (!descent) {
        eps_ *= cfg_.eps_factor;
        ++report_.null_steps;
        log(StepKind::null_step, xrec.fmax, s2);
        continue;
      }

      if (s2 <= cfg_.delta) eps_ *= cfg_.eps_factor;
      ++report_.serious_steps;
      if (cfg_.check_invariants && v.x_next_record.fmax > xrec.fmax)
        throw InvariantViolation("solve: serious step increased f");
      xrec = v.x_next_record;
      final_ = xrec;
      log(StepKind::serious, xrec.fmax, s2);

      if (eps_ < cfg_.eps_guard) {
        report_.termination = Termination::eps_guard;
        return;
      }
      if (!take_u_steps_) continue;

      require(3 * static_cast<std::uint64_t>(n) + 1);
      const UStepResult u = u_step(oracle_, xrec.x, eps_, &xrec, next_rotation());
      ++k_;
      report_.outer_iters = k_;
      if (u.dim_u() == 0) {
        // Nothing moved: the stencil at x_k is still valid for the next V-step.
        if (!cfg_.rotate_stencil) cached_ = u.info;
        log(StepKind::u_step, xrec.fmax, s2);
        ++report_.u_steps;
        continue;
      }
      EvalRecord urec = oracle_.evaluate(u.x_next);
      consider(urec);
      if (urec.fmax < xrec.fmax) {
        xrec = std::move(urec);
        final_ = xrec;
        ++report_.u_steps;
        log(StepKind::u_step, xrec.fmax, s2);
      } else {
        if (!cfg_.rotate_stencil) cached_ = u.info;
        ++report_.u_rejected;
        log(StepKind::u_rejected, xrec.fmax, s2);
      }
    }
  }

  GreyBox& oracle_;
  const SolverConfig& cfg_;
  const SolveObserver& obs_;
  bool take_u_steps_;
  std::optional<FirstOrderInfo> cached_;
  std::uint64_t budget_;
  RunReport report_;
  EvalRecord best_;
  EvalRecord final_;
  double eps_ = 0.0;
  double r_ = 1.0;
  int k_ = 0;
  std::uint64_t rotation_counter_ = 0;
};

}  // namespace

RunReport dfo_vu_solve(GreyBox& oracle, const Vector& x0, const SolverConfig& config, const SolveObserver& observer) {
  return OuterLoop(oracle, config, observer, true).run(x0);
}

RunReport baseline_bundle_solve(GreyBox& oracle, const Vector& x0, const SolverConfig& config,
                                const SolveObserver& observer) {
  return OuterLoop(oracle, config, observer, false).run(x0);
}

}  // namespace dfovu

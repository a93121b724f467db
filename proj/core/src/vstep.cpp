#include "dfovu/vstep.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

#include "dfovu/errors.hpp"

namespace dfovu {

Vector tilt_correct(const Vector& g_tilde, const Vector& z0, double f_z0, const Vector& zj, double f_zj) {
  const Vector step = z0 - zj;
  const double dist_sq = step.squaredNorm();
  if (dist_sq == 0.0) return g_tilde;
  const double overshoot = f_zj + g_tilde.dot(step) - f_z0;
  if (overshoot <= kTiltThreshold) return g_tilde;
  return g_tilde - (overshoot / dist_sq) * step;
}

namespace {

double rel_tol(double v, double tol = 1e-8) { return tol * (1.0 + std::abs(v)); }

CutSet to_cuts(const std::vector<BundleElement>& bundle) {
  CutSet cuts;
  for (const auto& e : bundle) cuts.add_through(e.point, e.fval, e.grad);
  return cuts;
}

bool almost_active_cut(double cut_value, double model_value) {
  const double gap = model_value - cut_value;
  return gap <= kActiveRelTol * std::abs(model_value) ||
         (std::abs(model_value) < kNearZeroValue && gap <= kActiveAbsTol);
}

// Keeps {aggregate, element 0, newest} plus the best of the remaining regular
// elements: almost-active cuts at z_next first, then larger prox weight.
std::vector<BundleElement> prune(const std::vector<BundleElement>& bundle, const Vector& lambda,
                                 const Vector& z_next, double model_value, BundleElement aggregate,
                                 BundleElement newest, int cap) {
  std::vector<BundleElement> out;
  out.reserve(static_cast<std::size_t>(cap));
  out.push_back(std::move(aggregate));
  out.push_back(bundle.front());

  struct Candidate {
    std::size_t pos;
    bool near_active;
    double weight;
    double cut;
  };
  std::vector<Candidate> cands;
  for (std::size_t i = 1; i < bundle.size(); ++i) {
    if (bundle[i].kind == ElementKind::aggregate) continue;
    const double cut = bundle[i].cut(z_next);
    cands.push_back({i, almost_active_cut(cut, model_value), lambda[static_cast<Eigen::Index>(i)], cut});
  }
  std::stable_sort(cands.begin(), cands.end(), [](const Candidate& a, const Candidate& b) {
    if (a.near_active != b.near_active) return a.near_active;
    if (a.weight != b.weight) return a.weight > b.weight;
    return a.cut > b.cut;
  });
  const auto slots = static_cast<std::size_t>(std::max(0, cap - 3));
  for (std::size_t i = 0; i < std::min(slots, cands.size()); ++i) out.push_back(bundle[cands[i].pos]);
  out.push_back(std::move(newest));
  return out;
}

}  // namespace

VStepResult v_step(GreyBox& oracle, const Vector& x_k, double eps, double r, const VStepOptions& options,
                   const FirstOrderInfo* first) {
  if (!(eps > 0.0)) throw ContractViolation("v_step: eps must be positive");
  if (!(r > 0.0)) throw ContractViolation("v_step: r must be positive");
  const int n = oracle.dim();
  if (x_k.size() != n) throw ContractViolation("v_step: dimension mismatch");
  const int cap = std::max(3, options.bundle_cap > 0 ? options.bundle_cap : n + 10);
  const std::uint64_t calls_at_start = oracle.calls();
  const double stop_tol = eps * eps / r;

  const Vector z0 = x_k;
  Vector best_x = z0;
  double best_f = std::numeric_limits<double>::infinity();

  auto require_budget = [&](std::uint64_t needed) {
    if (oracle.calls() + needed > options.max_calls)
      throw BudgetExhausted("v_step: grey-box budget exhausted", best_x, best_f);
  };

  FirstOrderInfo info0;
  if (first != nullptr && bit_equal(first->center.x, z0) && first->epsilon == eps) {
    info0 = *first;
  } else {
    const EvalRecord* hint = first != nullptr ? &first->center : nullptr;
    require_budget(static_cast<std::uint64_t>(n) + 1);
    info0 = approximate_first_order(oracle, z0, eps, hint, options.rotate_seed);
  }
  const double f0 = info0.center.fmax;
  best_f = f0;

  std::vector<BundleElement> bundle;
  bundle.push_back({ElementKind::regular, 0, z0, f0, info0.g_eps});

  double prev_inner_obj = -std::numeric_limits<double>::infinity();
  for (int j = 0;; ++j) {
    const CutSet cuts = to_cuts(bundle);
    if (options.check_invariants && cuts.value(z0) > f0 + rel_tol(f0))
      throw InvariantViolation("v_step: model exceeds f at the center");

    const ProxSolution prox = prox_pl(cuts, z0, r);
    const Vector& z_next = prox.z;

    const double inner_obj = prox.model_value + 0.5 * r * (z_next - z0).squaredNorm();
    if (options.check_invariants && inner_obj < prev_inner_obj - rel_tol(prev_inner_obj))
      throw InvariantViolation("v_step: prox objective decreased between inner iterations");
    prev_inner_obj = inner_obj;

    require_budget(1);
    EvalRecord rec = oracle.evaluate(z_next);
    if (rec.fmax < best_f) {
      best_f = rec.fmax;
      best_x = z_next;
    }
    const double gap = rec.fmax - prox.model_value;

    if (options.trace)
      options.trace({j, gap, r * (z0 - z_next).norm(), oracle.calls(), static_cast<int>(bundle.size())});

    if (gap <= stop_tol) {
      VStepResult res;
      res.x_next = z_next;
      res.s_next = r * (z0 - z_next);
      res.x_next_record = std::move(rec);
      res.f_center = f0;
      res.model_value = prox.model_value;
      res.model_gap = gap;
      res.r = r;
      res.inner_iters = j + 1;
      res.calls_used = oracle.calls() - calls_at_start;
      res.lambda = prox.lambda;
      res.bundle = std::move(bundle);
      res.first_g = info0.g_eps;
      if (options.check_invariants && (res.s_next - prox.s).norm() > rel_tol(prox.s.norm()))
        throw InvariantViolation("v_step: aggregate subgradient disagrees with prox weights");
      return res;
    }

    BundleElement aggregate{ElementKind::aggregate, -1, z_next, prox.model_value, r * (z0 - z_next)};

    require_budget(static_cast<std::uint64_t>(n));
    const FirstOrderInfo info = approximate_first_order(oracle, z_next, eps, &rec, options.rotate_seed);
    const Vector g = tilt_correct(info.g_eps, z0, f0, z_next, rec.fmax);
    BundleElement newest{ElementKind::regular, j + 1, z_next, rec.fmax, g};
    if (options.check_invariants && newest.cut(z0) > f0 + rel_tol(f0))
      throw InvariantViolation("v_step: tilted cut overshoots f at the center");

    bundle = prune(bundle, prox.lambda, z_next, prox.model_value, std::move(aggregate), std::move(newest), cap);
  }
}

}  // namespace dfovu

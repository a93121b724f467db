#include "dfovu/stencil.hpp"

#include <string>

#include "dfovu/errors.hpp"

namespace dfovu {

SimplexStencil build_stencil(const Vector& center, double epsilon, std::optional<std::uint64_t> rotate_seed) {
  if (!(epsilon > 0.0)) throw ContractViolation("build_stencil: epsilon must be positive");
  const auto n = static_cast<int>(center.size());
  SimplexStencil st;
  st.center = center;
  st.epsilon = epsilon;
  if (rotate_seed) {
    std::mt19937_64 rng(*rotate_seed);
    st.directions = random_orthogonal(n, rng);
    // ||Mhat^{-1}|| = ||D||_2, which is 1 up to round-off for an orthogonal D.
    Eigen::JacobiSVD<Matrix> svd(st.directions);
    st.mhat_cond = n > 0 ? svd.singularValues()[0] : 1.0;
  } else {
    st.directions = Matrix::Identity(n, n);
    st.mhat_cond = 1.0;
  }
  return st;
}

Vector simplex_gradient(const SimplexStencil& stencil, double center_val, const Vector& point_vals) {
  if (point_vals.size() != stencil.dim())
    throw ContractViolation("simplex_gradient: expected " + std::to_string(stencil.dim()) + " point values");
  // M = epsilon * D', so M^{-1} = D / epsilon for orthonormal D.
  const Vector delta = point_vals.array() - center_val;
  return stencil.directions * delta / stencil.epsilon;
}

FirstOrderInfo approximate_first_order(GreyBox& oracle, const Vector& x, double epsilon,
                                       const EvalRecord* center_hint,
                                       std::optional<std::uint64_t> rotate_seed) {
  const int n = oracle.dim();
  if (x.size() != n) throw ContractViolation("approximate_first_order: dimension mismatch");
  const SimplexStencil st = build_stencil(x, epsilon, rotate_seed);

  FirstOrderInfo info;
  info.epsilon = epsilon;
  info.center = (center_hint != nullptr && bit_equal(center_hint->x, x)) ? *center_hint : oracle.evaluate(x);
  info.active = info.center.active;

  const int m = oracle.spec().m;
  Matrix vals(n, m);  // vals(i, j) = f_j(y_i)
  for (int i = 0; i < n; ++i) vals.row(i) = oracle.evaluate(st.point(i)).values.transpose();

  info.g_eps = Vector::Zero(n);
  for (int j : info.active) {
    Vector g = simplex_gradient(st, info.center.values[j], vals.col(j));
    info.g_eps += g;
    info.active_gradients.push_back(std::move(g));
  }
  info.g_eps /= static_cast<double>(info.active.size());

  const auto na = static_cast<int>(info.active.size());
  info.V.resize(n, na - 1);
  for (int c = 1; c < na; ++c)
    info.V.col(c - 1) = info.active_gradients[static_cast<std::size_t>(c)] - info.active_gradients[0];
  info.U = orthogonal_complement(info.V, kVRankTol);
  info.u_grad = info.U.transpose() * info.g_eps;
  return info;
}

}  // namespace dfovu

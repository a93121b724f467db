#include "dfovu/qpkernels.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "dfovu/errors.hpp"

namespace dfovu {

double CutSet::cut_value(int i, const Vector& z) const {
  const auto k = static_cast<std::size_t>(i);
  return intercepts[k] + gradients[k].dot(z);
}

double CutSet::value(const Vector& z) const {
  double best = -std::numeric_limits<double>::infinity();
  for (int i = 0; i < size(); ++i) best = std::max(best, cut_value(i, z));
  return best;
}

Vector project_to_simplex(const Vector& v) {
  const auto k = v.size();
  std::vector<double> u(v.data(), v.data() + k);
  std::sort(u.begin(), u.end(), std::greater<>());
  double cumsum = 0.0;
  double theta = 0.0;
  for (Eigen::Index i = 0; i < k; ++i) {
    cumsum += u[static_cast<std::size_t>(i)];
    const double t = (cumsum - 1.0) / static_cast<double>(i + 1);
    if (u[static_cast<std::size_t>(i)] - t > 0.0) theta = t;
  }
  return (v.array() - theta).max(0.0);
}

namespace {

// min 0.5 lambda'Q lambda + p'lambda over the unit simplex.
struct SimplexQp {
  Matrix Q;
  Vector p;

  double objective(const Vector& lam) const { return 0.5 * lam.dot(Q * lam) + p.dot(lam); }
  Vector gradient(const Vector& lam) const { return Q * lam + p; }
  // gap = lambda'grad - min_i grad_i; zero exactly at a KKT point.
  double gap(const Vector& lam) const {
    const Vector g = gradient(lam);
    return lam.dot(g) - g.minCoeff();
  }
};

// Primal active-set method. Returns false if the iteration cap is hit.
bool solve_active_set(const SimplexQp& qp, Vector& lam, int& iterations) {
  const auto k = static_cast<int>(qp.p.size());
  const int max_iter = 50 + 20 * k;
  const double qscale = std::max(1.0, qp.Q.cwiseAbs().maxCoeff());

  int start = 0;
  double best = std::numeric_limits<double>::infinity();
  for (int i = 0; i < k; ++i) {
    const double v = 0.5 * qp.Q(i, i) + qp.p[i];
    if (v < best) {
      best = v;
      start = i;
    }
  }
  lam = Vector::Zero(k);
  lam[start] = 1.0;
  std::vector<int> free{start};
  bool on_face_minimum = true;
  int uphill = 0;
  const double noise = 1e-13 * (qscale + qp.p.cwiseAbs().maxCoeff());

  for (iterations = 0; iterations < max_iter; ++iterations) {
    const Vector grad = qp.gradient(lam);
    const double gscale = 1.0 + grad.cwiseAbs().maxCoeff();
    const auto nf = static_cast<int>(free.size());

    Vector d = Vector::Zero(nf);
    bool ray = false;
    if (nf > 1 && !on_face_minimum) {
      const Matrix z = orthogonal_complement(Matrix::Ones(nf, 1), 1e-12);
      Matrix qff(nf, nf);
      Vector gf(nf);
      for (int a = 0; a < nf; ++a) {
        gf[a] = grad[free[static_cast<std::size_t>(a)]];
        for (int b = 0; b < nf; ++b)
          qff(a, b) = qp.Q(free[static_cast<std::size_t>(a)], free[static_cast<std::size_t>(b)]);
      }
      const Matrix hr = symmetrized(z.transpose() * qff * z);
      const Vector gr = z.transpose() * gf;
      Eigen::SelfAdjointEigenSolver<Matrix> eig(hr);
      const Vector& w = eig.eigenvalues();
      const Matrix& vecs = eig.eigenvectors();
      const double htol = 1e-11 * qscale;
      if (w[0] <= htol) {
        // Affinely dependent free gradients: move along a null direction of the
        // reduced Hessian, downhill, until a weight hits zero.
        Vector v = vecs.col(0);
        if (v.dot(gr) > 0.0) v = -v;
        d = z * v;
        ray = true;
      } else {
        Vector y = Vector::Zero(nf - 1);
        for (int i = 0; i < nf - 1; ++i) y -= (vecs.col(i).dot(gr) / w[i]) * vecs.col(i);
        d = z * y;
      }
    }

    if (nf == 1 || on_face_minimum) {
      std::erase_if(free, [&](int i) { return lam[i] <= 0.0; });
      double mu = 0.0;
      for (int i : free) mu += grad[i];
      mu /= static_cast<double>(free.size());
      int entering = -1;
      double most_negative = -1e-13 * gscale;
      for (int j = 0; j < k; ++j) {
        if (std::find(free.begin(), free.end(), j) != free.end()) continue;
        if (grad[j] - mu < most_negative) {
          most_negative = grad[j] - mu;
          entering = j;
        }
      }
      if (entering < 0) return true;
      free.push_back(entering);
      on_face_minimum = false;
      continue;
    }

    // Exact line search along d on the face, capped by the first weight to hit zero.
    double alpha = 1.0;
    {
      Vector dfull = Vector::Zero(k);
      for (int a = 0; a < nf; ++a) dfull[free[static_cast<std::size_t>(a)]] = d[a];
      const double slope = dfull.dot(grad);
      const double curv = dfull.dot(qp.Q * dfull);
      if (slope >= 0.0) {
        on_face_minimum = true;
        if (++uphill > 2 * k) return false;
        continue;
      }
      if (curv > 0.0) alpha = -slope / curv;
      else if (ray) alpha = std::numeric_limits<double>::infinity();
      if (!ray && std::abs(alpha - 1.0) < 1e-9) alpha = 1.0;
    }
    const double unblocked = alpha;
    int blocking = -1;
    for (int a = 0; a < nf; ++a) {
      if (d[a] < 0.0) {
        const double t = -lam[free[static_cast<std::size_t>(a)]] / d[a];
        if (t < alpha) {
          alpha = t;
          blocking = a;
        }
      }
    }
    if (!std::isfinite(alpha)) return false;
    Vector trial = lam;
    for (int a = 0; a < nf; ++a) trial[free[static_cast<std::size_t>(a)]] += alpha * d[a];
    if (blocking >= 0) trial[free[static_cast<std::size_t>(blocking)]] = 0.0;

    std::vector<int> kept;
    for (int i : free)
      if (trial[i] > 0.0) kept.push_back(i);
      else trial[i] = 0.0;
    if (kept.empty()) return false;
    trial /= trial.sum();

    // Round-off can make a face step uphill when Q is badly scaled; treat
    // that as having reached the face minimum instead of cycling.
    if (qp.objective(trial) > qp.objective(lam) + noise) {
      on_face_minimum = true;
      if (++uphill > 2 * k) return false;
      continue;
    }
    lam = std::move(trial);
    // A full Newton step lands on the minimizer over the current face.
    on_face_minimum = !ray && blocking < 0 && alpha == unblocked && kept.size() == free.size();
    free = std::move(kept);
  }
  return false;
}

// Primal-dual interior point with a fixed centering factor. Robust to
// degenerate and rank-deficient faces, where active-set pivoting can stall.
bool solve_interior_point(const SimplexQp& qp, Vector& lam, double gap_tol, int& iterations) {
  const auto k = qp.p.size();
  const double scale = std::max({1.0, qp.Q.cwiseAbs().maxCoeff(), qp.p.cwiseAbs().maxCoeff()});
  const Matrix Q = qp.Q / scale;
  const Vector p = qp.p / scale;
  const Vector ones = Vector::Ones(k);

  Vector x = Vector::Constant(k, 1.0 / static_cast<double>(k));
  Vector s = Vector::Ones(k);
  double mu = (Q * x + p - s).minCoeff();
  Vector best = x;
  double best_gap = std::numeric_limits<double>::infinity();

  for (iterations = 0; iterations < 200; ++iterations) {
    Vector cand = x.cwiseMax(0.0);
    cand /= cand.sum();
    const double g = qp.gap(cand);
    if (g < best_gap) {
      best_gap = g;
      best = cand;
    }
    if (best_gap <= gap_tol) break;

    const Vector rd = Q * x + p - mu * ones - s;
    const double rp = x.sum() - 1.0;
    const double tau = x.dot(s) / static_cast<double>(k);
    if (tau < 1e-300) break;
    const Vector rc = x.cwiseProduct(s).array() - 0.1 * tau;

    Matrix M = Q;
    M.diagonal() += s.cwiseQuotient(x);
    const Vector rhs = -rd - rc.cwiseQuotient(x);
    Eigen::LDLT<Matrix> ldlt(M);
    if (ldlt.info() != Eigen::Success) break;
    const Vector a = ldlt.solve(rhs);
    const Vector b = ldlt.solve(ones);
    const double denom = b.sum();
    if (!(std::abs(denom) > 0.0) || !a.allFinite() || !b.allFinite()) break;
    const double dmu = (-rp - a.sum()) / denom;
    const Vector dx = a + dmu * b;
    const Vector ds = (-rc - s.cwiseProduct(dx)).cwiseQuotient(x);

    double step = 1.0;
    for (Eigen::Index i = 0; i < k; ++i) {
      if (dx[i] < 0.0) step = std::min(step, -0.995 * x[i] / dx[i]);
      if (ds[i] < 0.0) step = std::min(step, -0.995 * s[i] / ds[i]);
    }
    x += step * dx;
    s += step * ds;
    mu += step * dmu;
  }
  lam = best;
  return best_gap <= gap_tol;
}

// Accelerated projected gradient; the safety net when the active-set method stalls.
void solve_projected_gradient(const SimplexQp& qp, Vector& lam, int max_iter, double gap_tol, int& iterations) {
  const double lip = std::max(qp.Q.operatorNorm(), 1e-300);
  Vector x = lam;
  Vector y = lam;
  double t = 1.0;
  for (iterations = 0; iterations < max_iter; ++iterations) {
    const Vector x_next = project_to_simplex(y - qp.gradient(y) / lip);
    const double t_next = 0.5 * (1.0 + std::sqrt(1.0 + 4.0 * t * t));
    y = x_next + ((t - 1.0) / t_next) * (x_next - x);
    x = x_next;
    t = t_next;
    if (iterations % 50 == 0 && qp.gap(x) <= gap_tol) break;
  }
  lam = x;
}

}  // namespace

ProxSolution prox_pl(const CutSet& cuts, const Vector& z0, double r) {
  if (!(r > 0.0)) throw ContractViolation("prox_pl: r must be positive");
  if (cuts.size() == 0) throw ContractViolation("prox_pl: empty cut set");
  const int k = cuts.size();
  const auto n = z0.size();

  Matrix g(n, k);
  Vector c(k);
  for (int i = 0; i < k; ++i) {
    if (cuts.gradients[static_cast<std::size_t>(i)].size() != n)
      throw ContractViolation("prox_pl: cut gradient dimension mismatch");
    g.col(i) = cuts.gradients[static_cast<std::size_t>(i)];
    c[i] = cuts.cut_value(i, z0);
  }
  SimplexQp qp{symmetrized(g.transpose() * g) / r, -c};

  auto finish = [&](const Vector& lam) {
    ProxSolution sol;
    sol.lambda = lam;
    sol.s = g * lam;
    sol.z = z0 - sol.s / r;
    sol.model_value = cuts.value(sol.z);
    double weighted = 0.0;
    for (int i = 0; i < k; ++i) weighted += lam[i] * cuts.cut_value(i, sol.z);
    sol.duality_gap = std::max(0.0, sol.model_value - weighted);
    return sol;
  };
  auto tolerance = [&](const ProxSolution& sol) {
    const double primal = sol.model_value + 0.5 * r * (sol.z - z0).squaredNorm();
    return kProxGapTol * (1.0 + std::abs(primal));
  };

  Vector lam;
  int iters = 0;
  const bool converged = solve_active_set(qp, lam, iters);
  ProxSolution sol = finish(lam);
  sol.iterations = iters;
  if (converged && sol.duality_gap <= tolerance(sol)) return sol;

  Vector ip_lam;
  int ip_iters = 0;
  solve_interior_point(qp, ip_lam, 0.1 * tolerance(sol), ip_iters);
  iters += ip_iters;
  ProxSolution ip_sol = finish(ip_lam);
  ip_sol.iterations = iters;
  ip_sol.used_fallback = true;
  if (ip_sol.duality_gap <= tolerance(ip_sol)) return ip_sol;

  if (qp.objective(ip_lam) < qp.objective(lam)) lam = ip_lam;
  int pg_iters = 0;
  solve_projected_gradient(qp, lam, 100000, 0.1 * tolerance(sol), pg_iters);
  ProxSolution fallback = finish(lam);
  fallback.iterations = iters + pg_iters;
  fallback.used_fallback = true;
  if (fallback.duality_gap <= tolerance(fallback)) return fallback;
  throw QpFailure("prox_pl: duality gap " + std::to_string(fallback.duality_gap) + " above tolerance with " +
                  std::to_string(k) + " cuts");
}

Vector solve_newton(const Matrix& Hu, const Vector& gu) {
  const auto d = gu.size();
  if (Hu.rows() != d || Hu.cols() != d) throw ContractViolation("solve_newton: dimension mismatch");
  if (d == 0) return Vector(0);
  Eigen::SelfAdjointEigenSolver<Matrix> eig(symmetrized(Hu));
  const Vector& w = eig.eigenvalues();
  const double norm = std::max(std::abs(w[0]), std::abs(w[d - 1]));
  if (norm == 0.0) return -gu;
  const double floor = kNewtonEigFloor * norm;
  const double sigma = w[0] >= floor ? 0.0 : floor - w[0];
  const Matrix& v = eig.eigenvectors();
  const Vector coeff = (v.transpose() * gu).array() / (w.array() + sigma);
  return -(v * coeff);
}

}  // namespace dfovu

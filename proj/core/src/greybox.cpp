#include "dfovu/greybox.hpp"

#include <cmath>
#include <string>

#include "dfovu/errors.hpp"

namespace dfovu {

void ProblemSpec::validate(double symmetry_tol) const {
  if (n <= 0 || m <= 0) throw ContractViolation("problem needs n > 0 and m > 0");
  if (static_cast<int>(quads.size()) != m)
    throw ContractViolation("problem has " + std::to_string(quads.size()) + " pieces, expected m = " +
                            std::to_string(m));
  for (int j = 0; j < m; ++j) {
    const auto& q = quads[static_cast<std::size_t>(j)];
    if (q.H.rows() != n || q.H.cols() != n || q.b.size() != n)
      throw ContractViolation("piece " + std::to_string(j) + " has wrong dimensions");
    if ((q.H - q.H.transpose()).cwiseAbs().maxCoeff() > symmetry_tol)
      throw ContractViolation("piece " + std::to_string(j) + " has a non-symmetric H");
  }
  if (known_opt_point && known_opt_point->size() != n)
    throw ContractViolation("known_opt_point has wrong dimension");
}

std::vector<int> almost_active(const Vector& values, double fmax) {
  std::vector<int> active;
  const double rel = kActiveRelTol * std::abs(fmax);
  const bool near_zero = std::abs(fmax) < kNearZeroValue;
  for (int j = 0; j < values.size(); ++j) {
    const double gap = fmax - values[j];
    if (gap <= rel || (near_zero && gap <= kActiveAbsTol)) active.push_back(j);
  }
  return active;
}

EvalRecord evaluate_pieces(const ProblemSpec& spec, const Vector& x) {
  if (x.size() != spec.n)
    throw ContractViolation("evaluate: point has dimension " + std::to_string(x.size()) + ", problem has n = " +
                            std::to_string(spec.n));
  EvalRecord rec;
  rec.x = x;
  rec.values.resize(spec.m);
  for (int j = 0; j < spec.m; ++j) rec.values[j] = spec.quads[static_cast<std::size_t>(j)].value(x);
  rec.fmax = rec.values.maxCoeff();
  rec.active = almost_active(rec.values, rec.fmax);
  return rec;
}

EvalRecord GreyBox::evaluate(const Vector& x) {
  EvalRecord rec = evaluate_pieces(*spec_, x);
  calls_.fetch_add(1, std::memory_order_relaxed);
  return rec;
}

Vector piece_gradient(const ProblemSpec& spec, int j, const Vector& x) {
  return spec.quads.at(static_cast<std::size_t>(j)).gradient(x);
}

double max_active_gradient_norm(const ProblemSpec& spec, const Vector& x) {
  const EvalRecord rec = evaluate_pieces(spec, x);
  double best = 0.0;
  for (int j : rec.active) best = std::max(best, piece_gradient(spec, j, x).norm());
  return best;
}

ProblemSpec make_maxquad() {
  constexpr int n = 10;
  constexpr int m = 5;
  ProblemSpec spec;
  spec.n = n;
  spec.m = m;
  spec.known_opt_value = kMaxquadOptValue;
  spec.known_dim_v = 3;
  spec.convex = true;
  for (int k = 1; k <= m; ++k) {
    Matrix a = Matrix::Zero(n, n);
    for (int i = 1; i <= n; ++i)
      for (int j = i + 1; j <= n; ++j) {
        const double v = std::exp(static_cast<double>(i) / j) * std::cos(i * j) * std::sin(k);
        a(i - 1, j - 1) = v;
        a(j - 1, i - 1) = v;
      }
    for (int i = 1; i <= n; ++i) {
      double off = 0.0;
      for (int j = 1; j <= n; ++j)
        if (j != i) off += std::abs(a(i - 1, j - 1));
      a(i - 1, i - 1) = (i / 10.0) * std::abs(std::sin(k)) + off;
    }
    Vector c(n);
    for (int i = 1; i <= n; ++i) c[i - 1] = std::exp(static_cast<double>(i) / k) * std::sin(i * k);
    // x'Ax - c'x  ==  0.5 x'(2A)x + (-c)'x
    spec.quads.push_back({2.0 * a, -c});
  }
  return spec;
}

namespace {

Vector log_uniform_spectrum(int count, double hi, std::mt19937_64& rng) {
  Vector eig(count);
  if (count == 0) return eig;
  std::uniform_real_distribution<double> unif(0.0, std::log(hi));
  for (int i = 0; i < count; ++i) eig[i] = std::exp(unif(rng));
  eig[0] = 1.0;
  if (count > 1) eig[count - 1] = hi;
  return eig;
}

Matrix spectral_matrix(int n, const Vector& nonzero, std::mt19937_64& rng) {
  const Matrix q = random_orthogonal(n, rng);
  Vector diag = Vector::Zero(n);
  diag.head(nonzero.size()) = nonzero;
  return symmetrized(q * diag.asDiagonal() * q.transpose());
}

}  // namespace

ProblemSpec generate_random(int n, int dim_v, std::uint64_t seed, bool convex) {
  if (n < 2 || dim_v < 1 || dim_v > n - 1)
    throw ContractViolation("generate_random: need 1 <= dim_v <= n - 1 (n = " + std::to_string(n) +
                            ", dim_v = " + std::to_string(dim_v) + ")");
  std::mt19937_64 rng(seed);
  const int m = dim_v + 1;
  const double cond = static_cast<double>(dim_v) * dim_v;

  ProblemSpec spec;
  spec.n = n;
  spec.m = m;
  spec.convex = convex;
  spec.seed = seed;
  spec.known_opt_value = 0.0;
  spec.known_opt_point = Vector::Zero(n);
  spec.known_dim_v = dim_v;

  for (int j = 0; j < m; ++j) {
    Matrix h;
    if (!convex && j == 0) {
      h = spectral_matrix(n, log_uniform_spectrum(n, cond, rng), rng);
    } else if (!convex && j == m - 1) {
      h = -spectral_matrix(n, log_uniform_spectrum(n, cond, rng), rng);
    } else {
      h = spectral_matrix(n, log_uniform_spectrum(dim_v, cond, rng), rng);
    }
    spec.quads.push_back({std::move(h), Vector::Zero(n)});
  }

  std::normal_distribution<double> normal(0.0, 1.0);
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  constexpr int kMaxAttempts = 100;
  for (int attempt = 0; attempt < kMaxAttempts; ++attempt) {
    Matrix b(n, m);
    for (int j = 0; j < m; ++j)
      for (int i = 0; i < n; ++i) b(i, j) = normal(rng);
    // Strictly positive simplex weights, bounded away from zero.
    Vector lambda(m);
    for (int j = 0; j < m; ++j) lambda[j] = 0.1 - std::log(1.0 - unif(rng));
    lambda /= lambda.sum();
    const Vector center = b * lambda;
    b.colwise() -= center;

    Matrix diffs(n, m - 1);
    for (int j = 1; j < m; ++j) diffs.col(j - 1) = b.col(j) - b.col(0);
    if (numerical_rank(diffs, 1e-8) != m - 1) continue;

    for (int j = 0; j < m; ++j) spec.quads[static_cast<std::size_t>(j)].b = b.col(j);
    return spec;
  }
  throw GenerationError("generate_random: affinely independent b_j not found after 100 attempts");
}

}  // namespace dfovu

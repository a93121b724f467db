#include "dfovu/linalg.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>

namespace dfovu {

Matrix random_orthogonal(int n, std::mt19937_64& rng) {
  std::normal_distribution<double> normal(0.0, 1.0);
  Matrix g(n, n);
  for (int j = 0; j < n; ++j)
    for (int i = 0; i < n; ++i) g(i, j) = normal(rng);
  Eigen::HouseholderQR<Matrix> qr(g);
  Matrix q = qr.householderQ();
  // Fix column signs so the distribution is Haar rather than QR-convention dependent.
  const Matrix r = qr.matrixQR().triangularView<Eigen::Upper>();
  for (int j = 0; j < n; ++j)
    if (r(j, j) < 0.0) q.col(j) = -q.col(j);
  return q;
}

namespace {

int pivots_above(const Eigen::ColPivHouseholderQR<Matrix>& qr, double threshold) {
  const auto& r = qr.matrixQR();
  const int k = static_cast<int>(std::min(r.rows(), r.cols()));
  int rank = 0;
  for (int i = 0; i < k; ++i)
    if (std::abs(r(i, i)) > threshold) ++rank;
  return rank;
}

}  // namespace

int numerical_rank(const Matrix& a, double rel_tol) {
  if (a.cols() == 0 || a.rows() == 0) return 0;
  const double scale = a.colwise().norm().maxCoeff();
  if (scale == 0.0) return 0;
  return pivots_above(Eigen::ColPivHouseholderQR<Matrix>(a), rel_tol * scale);
}

Matrix orthogonal_complement(const Matrix& a, double rel_tol) {
  const auto n = a.rows();
  if (a.cols() == 0) return Matrix::Identity(n, n);
  const double scale = a.colwise().norm().maxCoeff();
  if (scale == 0.0) return Matrix::Identity(n, n);
  Eigen::ColPivHouseholderQR<Matrix> qr(a);
  const int rank = pivots_above(qr, rel_tol * scale);
  const Matrix q = qr.householderQ();
  return q.rightCols(n - rank);
}

bool bit_equal(const Vector& a, const Vector& b) {
  if (a.size() != b.size()) return false;
  return a.size() == 0 ||
         std::memcmp(a.data(), b.data(), sizeof(double) * static_cast<std::size_t>(a.size())) == 0;
}

}  // namespace dfovu

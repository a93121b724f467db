#pragma once

#include <cstdint>
#include <random>

#include <Eigen/Dense>

namespace dfovu {

using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;

/// Haar-distributed orthogonal matrix from the QR factorization of a Gaussian matrix.
Matrix random_orthogonal(int n, std::mt19937_64& rng);

/// Numerical rank via column-pivoted QR, counting pivots above rel_tol * (largest column norm).
int numerical_rank(const Matrix& a, double rel_tol = 1e-8);

/// Orthonormal basis (n x (n - rank)) of the orthogonal complement of col(a).
/// An empty `a` (zero columns) yields the identity.
Matrix orthogonal_complement(const Matrix& a, double rel_tol = 1e-8);

/// Returns (a + a^T) / 2.
inline Matrix symmetrized(const Matrix& a) { return 0.5 * (a + a.transpose()); }

/// True when the two vectors have identical size and identical bit patterns.
bool bit_equal(const Vector& a, const Vector& b);

}  // namespace dfovu

#pragma once

#include <Eigen/Dense>

namespace riskphase {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;
using Index = Eigen::Index;

/// Lower-triangular Cholesky factor D with D D^T equal to the source matrix.
struct CholeskyFactor {
  Matrix lower;
  Index dim() const { return lower.rows(); }
};

/// The three quadratic-form scalars of an SPD matrix S and a vector mu:
///   a = 1' S^-1 1,  b = 1' S^-1 mu,  c = mu' S^-1 mu.
struct QuadScalars {
  double a = 0.0;
  double b = 0.0;
  double c = 0.0;
};

/// Throws ShapeError unless m is square and symmetric to within
/// rel_tol * max(1, max |m_ij|) entrywise.
void require_symmetric(const Matrix& m, double rel_tol = 1e-12);

/**
 * Cholesky factorization of a symmetric matrix.
 *
 * A pivot (Schur-complement diagonal entry) at or below
 *   dim * machine_epsilon * max_diagonal
 * raises NotPositiveDefiniteError. Definiteness is decided by a diagonally
 * pivoted sweep (largest Schur diagonal first), which classifies exactly
 * rank-deficient inputs (e.g. sample covariances with too few observations)
 * reliably; accepted matrices are then factorized without pivoting so the
 * returned factor is plain lower triangular.
 */
CholeskyFactor cholesky(const Matrix& m);

/// Solves S x = b through the factor (two triangular solves); never forms S^-1.
Vector spd_solve(const CholeskyFactor& f, const Vector& b);

/// a = 1'S^-1 1, b = 1'S^-1 mu, c = mu'S^-1 mu, computed as inner products of
/// forward-substituted vectors so that a > 0 and a*c >= b^2 hold by construction.
QuadScalars quad_scalars(const CholeskyFactor& f, const Vector& mu);

}  // namespace riskphase

#include "riskphase/spdlinalg.hpp"

#include <cmath>
#include <limits>
#include <string>

#include "riskphase/errors.hpp"

namespace riskphase {

void require_symmetric(const Matrix& m, double rel_tol) {
  if (m.rows() != m.cols()) {
    throw ShapeError("matrix is not square: " + std::to_string(m.rows()) + "x" +
                     std::to_string(m.cols()));
  }
  const double scale = std::max(1.0, m.cwiseAbs().maxCoeff());
  const double asym = (m - m.transpose()).cwiseAbs().maxCoeff();
  if (asym > rel_tol * scale) {
    throw ShapeError("matrix is not symmetric: max |m - m'| = " + std::to_string(asym));
  }
}

namespace {

// Symmetric row/column interchange k <-> p on lower-triangular storage.
void swap_lower(Matrix& a, Index k, Index p) {
  std::swap(a(k, k), a(p, p));
  for (Index i = 0; i < k; ++i) std::swap(a(k, i), a(p, i));
  for (Index i = k + 1; i < p; ++i) std::swap(a(i, k), a(p, i));
  for (Index i = p + 1; i < a.rows(); ++i) std::swap(a(i, k), a(i, p));
}

// Diagonally pivoted factorization used only as the definiteness test:
// taking the largest remaining Schur diagonal first keeps roundoff in the
// pivots unamplified, so the tolerance reliably exposes rank deficiency that
// an unpivoted sweep can miss behind an ill-conditioned leading block.
bool pivoted_spd_screen(Matrix a, double pivot_tol) {
  const Index n = a.rows();
  for (Index k = 0; k < n; ++k) {
    Index p = k;
    for (Index i = k + 1; i < n; ++i) {
      if (a(i, i) > a(p, p)) p = i;
    }
    const double pivot = a(p, p);
    if (!(pivot > pivot_tol)) return false;
    if (p != k) swap_lower(a, k, p);
    a(k, k) = std::sqrt(pivot);
    const Index rest = n - k - 1;
    if (rest > 0) {
      a.col(k).tail(rest) /= a(k, k);
      a.bottomRightCorner(rest, rest)
          .selfadjointView<Eigen::Lower>()
          .rankUpdate(a.col(k).tail(rest), -1.0);
    }
  }
  return true;
}

}  // namespace

CholeskyFactor cholesky(const Matrix& m) {
  require_symmetric(m);
  const Index n = m.rows();
  const double max_diag = (n > 0) ? m.diagonal().maxCoeff() : 0.0;
  const double pivot_tol =
      static_cast<double>(n) * std::numeric_limits<double>::epsilon() * max_diag;

  if (!pivoted_spd_screen(m, pivot_tol)) {
    throw NotPositiveDefiniteError("a pivot is at or below tolerance " +
                                   std::to_string(pivot_tol) +
                                   "; matrix is singular or indefinite");
  }

  // Right-looking factorization on the lower triangle; the diagonal of the
  // working matrix holds the Schur-complement pivots.
  Matrix a = m;
  for (Index k = 0; k < n; ++k) {
    const double pivot = a(k, k);
    if (!(pivot > pivot_tol)) {
      throw NotPositiveDefiniteError("pivot " + std::to_string(pivot) + " at index " +
                                     std::to_string(k) + " is at or below tolerance " +
                                     std::to_string(pivot_tol));
    }
    a(k, k) = std::sqrt(pivot);
    const Index rest = n - k - 1;
    if (rest > 0) {
      a.col(k).tail(rest) /= a(k, k);
      a.bottomRightCorner(rest, rest)
          .selfadjointView<Eigen::Lower>()
          .rankUpdate(a.col(k).tail(rest), -1.0);
    }
  }
  CholeskyFactor f;
  f.lower = a.triangularView<Eigen::Lower>();
  return f;
}

Vector spd_solve(const CholeskyFactor& f, const Vector& b) {
  if (b.size() != f.dim()) {
    throw ShapeError("spd_solve: vector length " + std::to_string(b.size()) +
                     " does not match factor dimension " + std::to_string(f.dim()));
  }
  Vector y = f.lower.triangularView<Eigen::Lower>().solve(b);
  return f.lower.transpose().triangularView<Eigen::Upper>().solve(y);
}

QuadScalars quad_scalars(const CholeskyFactor& f, const Vector& mu) {
  if (mu.size() != f.dim()) {
    throw ShapeError("quad_scalars: vector length " + std::to_string(mu.size()) +
                     " does not match factor dimension " + std::to_string(f.dim()));
  }
  const auto lower = f.lower.triangularView<Eigen::Lower>();
  const Vector u = lower.solve(Vector::Ones(f.dim()));
  const Vector v = lower.solve(mu);
  QuadScalars s;
  s.a = u.squaredNorm();
  s.b = u.dot(v);
  s.c = v.squaredNorm();
  return s;
}

}  // namespace riskphase

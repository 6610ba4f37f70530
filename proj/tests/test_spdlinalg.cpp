#include "riskphase/spdlinalg.hpp"

#include <cmath>
#include <limits>

#include <Eigen/Eigenvalues>

#include "doctest.h"
#include "riskphase/errors.hpp"
#include "support/instances.hpp"

using namespace riskphase;

TEST_CASE("cholesky of the identity is the identity") {
  const Matrix m = Matrix::Identity(3, 3);
  const CholeskyFactor f = cholesky(m);
  CHECK((f.lower - m).cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("cholesky of a hand-checked 2x2") {
  Matrix m(2, 2);
  m << 4, 2, 2, 5;
  const CholeskyFactor f = cholesky(m);
  CHECK(f.lower(0, 0) == doctest::Approx(2.0).epsilon(1e-15));
  CHECK(f.lower(1, 0) == doctest::Approx(1.0).epsilon(1e-15));
  CHECK(f.lower(1, 1) == doctest::Approx(2.0).epsilon(1e-15));
  CHECK(f.lower(0, 1) == 0.0);
}

TEST_CASE("cholesky rejects singular and asymmetric input") {
  Matrix rank1(2, 2);
  rank1 << 1, 1, 1, 1;
  CHECK_THROWS_AS(cholesky(rank1), NotPositiveDefiniteError);

  Matrix indefinite(2, 2);
  indefinite << 1, 2, 2, 1;
  CHECK_THROWS_AS(cholesky(indefinite), NotPositiveDefiniteError);

  Matrix skew(2, 2);
  skew << 1, 0.5, 0.25, 1;
  CHECK_THROWS_AS(cholesky(skew), ShapeError);

  CHECK_THROWS_AS(cholesky(Matrix::Zero(3, 3)), NotPositiveDefiniteError);
}

TEST_CASE("spd_solve examples and residual") {
  const CholeskyFactor id = cholesky(Matrix::Identity(4, 4));
  Vector b(4);
  b << 3, -1, 0.5, 2;
  CHECK((spd_solve(id, b) - b).cwiseAbs().maxCoeff() == 0.0);

  Matrix m(2, 2);
  m << 4, 2, 2, 5;
  Vector rhs(2);
  rhs << 4, 2;
  const Vector x = spd_solve(cholesky(m), rhs);
  CHECK(x(0) == doctest::Approx(1.0).epsilon(1e-14));
  CHECK(x(1) == doctest::Approx(0.0).scale(1.0).epsilon(1e-14));

  testsupport::InstanceRng rng(11);
  const Matrix spd = rng.spd_matrix(5);
  const Vector b5 = rng.normal_vector(5);
  const Vector x5 = spd_solve(cholesky(spd), b5);
  CHECK((spd * x5 - b5).norm() <= 1e-10 * b5.norm());

  CHECK_THROWS_AS(spd_solve(id, b5), ShapeError);
}

TEST_CASE("quad_scalars examples") {
  SUBCASE("identity, zero mean") {
    const CholeskyFactor f = cholesky(Matrix::Identity(6, 6));
    const QuadScalars s = quad_scalars(f, Vector::Zero(6));
    CHECK(s.a == doctest::Approx(6.0).epsilon(1e-15));
    CHECK(s.b == 0.0);
    CHECK(s.c == 0.0);
  }
  SUBCASE("identity, mu = (1, -1)") {
    const CholeskyFactor f = cholesky(Matrix::Identity(2, 2));
    Vector mu(2);
    mu << 1, -1;
    const QuadScalars s = quad_scalars(f, mu);
    CHECK(s.a == doctest::Approx(2.0).epsilon(1e-15));
    CHECK(s.b == doctest::Approx(0.0).scale(1.0).epsilon(1e-15));
    CHECK(s.c == doctest::Approx(2.0).epsilon(1e-15));
  }
  SUBCASE("diagonal (4, 1), mu = (2, 1)") {
    Matrix m = Matrix::Zero(2, 2);
    m(0, 0) = 4.0;
    m(1, 1) = 1.0;
    Vector mu(2);
    mu << 2, 1;
    const QuadScalars s = quad_scalars(cholesky(m), mu);
    CHECK(s.a == doctest::Approx(1.25).epsilon(1e-14));
    CHECK(s.b == doctest::Approx(1.5).epsilon(1e-14));
    CHECK(s.c == doctest::Approx(2.0).epsilon(1e-14));
  }
}

TEST_CASE("random SPD properties: reconstruction, Cauchy-Schwarz, scaling") {
  for (std::uint64_t seed = 1; seed <= 25; ++seed) {
    testsupport::InstanceRng rng(seed);
    const Eigen::Index n = 2 + static_cast<Eigen::Index>(seed % 7);
    const Matrix m = rng.spd_matrix(n);
    const Vector mu = rng.normal_vector(n);

    const CholeskyFactor f = cholesky(m);
    const double frob_err = (f.lower * f.lower.transpose() - m).norm() / m.norm();
    CHECK(frob_err <= 1e-10);
    CHECK((f.lower.diagonal().array() > 0.0).all());

    const QuadScalars s = quad_scalars(f, mu);
    CHECK(s.a > 0.0);
    CHECK(s.a * s.c - s.b * s.b >= -1e-10 * s.a * s.c);

    const double c = 0.25 + 3.0 * rng.uniform();
    const QuadScalars scaled = quad_scalars(cholesky(c * m), mu);
    CHECK(scaled.a == doctest::Approx(s.a / c).epsilon(1e-10));
    CHECK(scaled.b == doctest::Approx(s.b / c).epsilon(1e-10).scale(std::abs(s.b) + 1.0));
    CHECK(scaled.c == doctest::Approx(s.c / c).epsilon(1e-10));
  }
}

TEST_CASE("classification agrees with an eigenvalue oracle away from the tolerance") {
  for (std::uint64_t seed = 1; seed <= 60; ++seed) {
    testsupport::InstanceRng rng(7000 + seed);
    const Eigen::Index n = 2 + static_cast<Eigen::Index>(seed % 8);
    Matrix m;
    if (seed % 2 == 0) {
      m = rng.spd_matrix(n, 1e-6);
    } else {
      // shift an SPD matrix down to make it indefinite or nearly singular
      m = rng.spd_matrix(n, 0.0);
      Eigen::SelfAdjointEigenSolver<Matrix> pre(m);
      m -= (pre.eigenvalues()(0) * (1.0 + static_cast<double>(seed % 3))) *
           Matrix::Identity(n, n);
    }
    Eigen::SelfAdjointEigenSolver<Matrix> es(m);
    const double lambda_min = es.eigenvalues()(0);
    const double tol = static_cast<double>(n) * std::numeric_limits<double>::epsilon() *
                       m.diagonal().maxCoeff();
    if (std::abs(lambda_min) <= 8.0 * std::max(tol, 1e-18)) continue;  // too close to call
    if (lambda_min > 0.0) {
      CHECK_NOTHROW(cholesky(m));
    } else {
      CHECK_THROWS_AS(cholesky(m), NotPositiveDefiniteError);
    }
  }
}

TEST_CASE("rank-deficient Gram matrices always fail to factorize") {
  // G has fewer columns than rows, so G G' is exactly rank deficient.
  for (std::uint64_t seed = 1; seed <= 40; ++seed) {
    testsupport::InstanceRng rng(1000 + seed);
    const Eigen::Index n = 4 + static_cast<Eigen::Index>(seed % 5);
    const Eigen::Index k = n - 1 - static_cast<Eigen::Index>(seed % 3);
    Matrix g(n, k);
    for (Eigen::Index j = 0; j < k; ++j)
      for (Eigen::Index i = 0; i < n; ++i) g(i, j) = rng.normal();
    Matrix m = Matrix::Zero(n, n);
    m.selfadjointView<Eigen::Lower>().rankUpdate(g);
    m.triangularView<Eigen::StrictlyUpper>() =
        m.triangularView<Eigen::StrictlyLower>().transpose();
    CHECK_THROWS_AS(cholesky(m), NotPositiveDefiniteError);
  }
}

// Copyright 2026 The kmsdpp Authors
// SPDX-License-Identifier: Apache-2.0

#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "kmsdpp/linalg.hpp"
#include "oracles.hpp"

using namespace kmsdpp;
using namespace kmsdpp::linalg;
using kmsdpp::testing::random_symmetric;

TEST_SUITE("linalg") {
  TEST_CASE("eig_sym of the identity and of a diagonal matrix") {
    const auto eye = eig_sym(SymmetricOperator(Matrix::Identity(3, 3)));
    CHECK((eye.eigenvalues - Vector::Ones(3)).cwiseAbs().maxCoeff() < 1e-14);

    Matrix d = Matrix::Zero(2, 2);
    d.diagonal() << -1.0, 2.0;
    const auto dec = eig_sym(SymmetricOperator(d));
    CHECK(dec.eigenvalues(0) == doctest::Approx(-1.0).epsilon(1e-14));
    CHECK(dec.eigenvalues(1) == doctest::Approx(2.0).epsilon(1e-14));
    // Largest-magnitude entry of each column is positive, so V = I exactly.
    CHECK((dec.eigenvectors - Matrix::Identity(2, 2)).cwiseAbs().maxCoeff() < 1e-14);
  }

  TEST_CASE("eig_sym reconstructs random inputs and orders eigenvalues") {
    std::mt19937_64 rng(11);
    for (Eigen::Index n : {2, 5, 8, 17, 32}) {
      const Matrix a = random_symmetric(rng, n);
      const auto dec = eig_sym(SymmetricOperator(a));
      const Matrix& v = dec.eigenvectors;
      CHECK((v * dec.eigenvalues.asDiagonal() * v.transpose() - a).cwiseAbs().maxCoeff() <= 8e-10);
      CHECK((v.transpose() * v - Matrix::Identity(n, n)).cwiseAbs().maxCoeff() <= 1e-10);
      for (Eigen::Index i = 1; i < n; ++i) CHECK(dec.eigenvalues(i) >= dec.eigenvalues(i - 1));
      for (Eigen::Index j = 0; j < n; ++j) {
        Eigen::Index k = 0;
        v.col(j).cwiseAbs().maxCoeff(&k);
        CHECK(v(k, j) > 0.0);
      }
      // Bit-identical on identical input.
      CHECK(eig_sym(SymmetricOperator(a)).eigenvectors == v);
    }
  }

  TEST_CASE("SymmetricOperator rejects asymmetric, non-finite and unordered input") {
    Matrix a(2, 2);
    a << 1.0, 2.0, 2.5, 1.0;
    CHECK_THROWS_AS(SymmetricOperator{a}, PreconditionError);
    a(1, 0) = 2.0;
    CHECK_THROWS_AS(SymmetricOperator(a, SiteLabels{1.0, 0.0}), PreconditionError);
    a(0, 0) = NAN;
    CHECK_THROWS_AS(SymmetricOperator{a}, PreconditionError);
  }

  TEST_CASE("spectral functions on closed-form spectra") {
    Matrix d = Matrix::Zero(2, 2);
    d.diagonal() << -1.0, 2.0;
    const auto dec = eig_sym(SymmetricOperator(d));
    const Matrix one = apply_spectral_function(dec, ExpFunction{0.0, 0.0}).matrix();
    CHECK((one - Matrix::Identity(2, 2)).cwiseAbs().maxCoeff() < 1e-15);
    const Matrix ind = apply_spectral_function(dec, make_spectral_function("indicator_negative", 0.0)).matrix();
    CHECK(ind(0, 0) == 1.0);
    CHECK(ind(1, 1) == 0.0);

    Matrix f = Matrix::Zero(2, 2);
    f.diagonal() << -1.0, 1.0;
    const auto fdec = eig_sym(SymmetricOperator(f));
    const Matrix k = apply_spectral_function(fdec, make_spectral_function("fermi", std::log(3.0))).matrix();
    CHECK(k(0, 0) == doctest::Approx(0.75).epsilon(1e-14));
    CHECK(k(1, 1) == doctest::Approx(0.25).epsilon(1e-14));
    CHECK_THROWS_AS((void)make_spectral_function("sinh", 1.0), ConfigError);
  }

  TEST_CASE("exp(cA) exp(-cA) = I") {
    std::mt19937_64 rng(5);
    for (Eigen::Index n : {4, 10, 32}) {
      const Matrix a = random_symmetric(rng, n);
      const auto dec = eig_sym(SymmetricOperator(a));
      for (double radius : {1.0, 5.0, 20.0}) {
        const double c = radius / dec.eigenvalues.cwiseAbs().maxCoeff();
        const Matrix p = apply_spectral_function(dec, ExpFunction{c, 0.0}).matrix() *
                         apply_spectral_function(dec, ExpFunction{-c, 0.0}).matrix();
        const double residual = (p - Matrix::Identity(n, n)).cwiseAbs().maxCoeff();
        // The product has condition number e^{2 radius}; rounding alone costs eps·n·e^{2 radius}.
        const double floor = 1e-16 * static_cast<double>(n) * std::exp(2.0 * radius);
        CHECK(residual <= std::max(1e-9, 8.0 * floor));
        if (radius <= 5.0) CHECK(residual <= 1e-9);
      }
    }
  }

  TEST_CASE("fermi is clamped, monotone and overflow-free") {
    double prev = 1.0;
    for (double lambda = -50.0; lambda <= 50.0; lambda += 0.25) {
      const double f = fermi(200.0, lambda);
      CHECK(f >= 0.0);
      CHECK(f <= 1.0);
      CHECK(f <= prev);
      prev = f;
    }
    CHECK(fermi(1.0, 1e4) == 0.0);
    CHECK(fermi(1.0, -1e4) == 1.0);
    CHECK(fermi(3.0, 0.0) == 0.5);
  }

  TEST_CASE("near-zero eigenvalues are flagged") {
    Matrix d = Matrix::Zero(3, 3);
    d.diagonal() << -1.0, 1e-13, 2.0;
    const auto dec = eig_sym(SymmetricOperator(d));
    CHECK(near_zero_eigenvalues(dec).size() == 1);
    CHECK(zero_tolerance(dec) == doctest::Approx(3e-10));
  }

  TEST_CASE("determinant against cofactor expansion") {
    CHECK(determinant(Matrix(0, 0)) == 1.0);
    Matrix a(2, 2);
    a << 1, 2, 3, 4;
    CHECK(determinant(a) == doctest::Approx(-2.0).epsilon(1e-15));
    std::mt19937_64 rng(3);
    for (int rep = 0; rep < 10; ++rep) {
      const Matrix b = kmsdpp::testing::random_matrix(rng, 6, 6);
      CHECK(std::abs(determinant(b) - kmsdpp::testing::cofactor_determinant(b)) <= 1e-9);
    }
  }

  TEST_CASE("pfaffian closed forms and matching expansion") {
    Matrix a(2, 2);
    a << 0, 2.5, -2.5, 0;
    CHECK(pfaffian(SkewSymmetricMatrix(a)) == 2.5);
    CHECK(pfaffian(SkewSymmetricMatrix(Matrix::Zero(4, 4))) == 0.0);
    std::mt19937_64 rng(7);
    const Matrix g = kmsdpp::testing::random_skew(rng, 4);
    const double expected = g(0, 1) * g(2, 3) - g(0, 2) * g(1, 3) + g(0, 3) * g(1, 2);
    CHECK(pfaffian(SkewSymmetricMatrix(g)) == doctest::Approx(expected).epsilon(1e-13));
    for (Eigen::Index n : {6, 8}) {
      const Matrix s = kmsdpp::testing::random_skew(rng, n);
      CHECK(pfaffian(SkewSymmetricMatrix(s)) ==
            doctest::Approx(kmsdpp::testing::matching_pfaffian(s)).epsilon(1e-11));
    }
    CHECK_THROWS_AS((void)pfaffian(Matrix::Zero(3, 3)), PreconditionError);
  }

  TEST_CASE("SkewSymmetricMatrix validates and zeroes the diagonal") {
    Matrix a(2, 2);
    a << 1e-14, 1.0, -1.0, 0.0;
    const SkewSymmetricMatrix s(a);
    CHECK(s.matrix()(0, 0) == 0.0);
    a(1, 0) = -0.5;
    CHECK_THROWS_AS(SkewSymmetricMatrix{a}, PreconditionError);
  }
}

// Copyright 2026 The kmsdpp Authors
// SPDX-License-Identifier: Apache-2.0

#include <doctest.h>

#include <cmath>
#include <random>

#include "kmsdpp/kernels.hpp"
#include "oracles.hpp"

using namespace kmsdpp;
using namespace kmsdpp::kernels;
using linalg::Matrix;
using linalg::SymmetricOperator;
using linalg::Vector;

namespace {

SymmetricOperator diagonal(std::initializer_list<double> values) {
  Vector d(static_cast<Eigen::Index>(values.size()));
  Eigen::Index i = 0;
  for (double v : values) d(i++) = v;
  return SymmetricOperator(Matrix(d.asDiagonal()));
}

double max_abs(const Matrix& a) { return a.cwiseAbs().maxCoeff(); }

}  // namespace

TEST_SUITE("kernels") {
  TEST_CASE("fermi kernel closed forms") {
    const auto zero = fermi_kernel(SymmetricOperator(Matrix::Zero(4, 4)), 2.0);
    CHECK(max_abs(zero.matrix() - 0.5 * Matrix::Identity(4, 4)) == 0.0);
    CHECK(zero.provenance() == Provenance::Fermi);

    const auto k = fermi_kernel(diagonal({-1.0, 1.0}), std::log(3.0));
    CHECK(k(0, 0) == doctest::Approx(0.75).epsilon(1e-14));
    CHECK(k(1, 1) == doctest::Approx(0.25).epsilon(1e-14));

    std::mt19937_64 rng(21);
    const Matrix h = kmsdpp::testing::random_symmetric(rng, 7);
    const double total = fermi_kernel(SymmetricOperator(h), 1.3).matrix().trace() +
                         fermi_kernel(SymmetricOperator(Matrix(-h)), 1.3).matrix().trace();
    CHECK(total == doctest::Approx(7.0).epsilon(1e-13));
  }

  TEST_CASE("negative projections") {
    const auto p = negative_projection(diagonal({-2.0, -1.0, 3.0}));
    CHECK(max_abs(p.matrix() - Matrix(Vector::Map(std::array<double, 3>{1, 1, 0}.data(), 3).asDiagonal())) == 0.0);
    CHECK(max_abs(negative_projection(diagonal({1.0, 2.0})).matrix()) == 0.0);
    CHECK_THROWS_AS((void)negative_projection(diagonal({-1.0, 0.0, 2.0})), GapError);

    std::mt19937_64 rng(2);
    const SymmetricOperator h(kmsdpp::testing::random_symmetric(rng, 8));
    const Vector ev = linalg::eig_sym(h).eigenvalues;
    const double gap = ev.cwiseAbs().minCoeff();
    const auto proj = negative_projection(h);
    CHECK(max_abs(proj.matrix() * proj.matrix() - proj.matrix()) <= 1e-12);
    for (double c : {5.0, 10.0, 20.0}) {
      const double beta = c / gap;
      CHECK(max_abs(fermi_kernel(h, beta).matrix() - proj.matrix()) <= std::exp(-beta * gap));
    }
  }

  TEST_CASE("Christoffel-Darboux kernels") {
    const double mu = 1.4;
    const orthopoly::FamilySpec charlier = orthopoly::Charlier{mu};
    const auto k1 = cd_kernel(orthopoly::polynomial_table(charlier, orthopoly::make_window(charlier, 0, 30), 1));
    CHECK(k1(0, 0) == doctest::Approx(std::exp(-mu)).epsilon(1e-13));
    CHECK(k1(2, 3) == doctest::Approx(std::sqrt(orthopoly::weight(charlier, 2) * orthopoly::weight(charlier, 3)))
                          .epsilon(1e-12));

    const orthopoly::FamilySpec kraw = orthopoly::Krawtchouk{4, 0.5};
    const auto full = cd_kernel(orthopoly::polynomial_table(kraw, orthopoly::full_window(kraw), 5));
    CHECK(max_abs(full.matrix() - Matrix::Identity(5, 5)) <= 1e-12);

    const orthopoly::FamilySpec meixner = orthopoly::Meixner{1.5, 0.4};
    const auto k = cd_kernel(orthopoly::polynomial_table(meixner, orthopoly::choose_window(meixner), 6));
    CHECK(max_abs(k.matrix() * k.matrix() - k.matrix()) <= 1e-8);
    CHECK(k.matrix().trace() == doctest::Approx(6.0).epsilon(1e-10));
  }

  TEST_CASE("kernel validation") {
    Matrix bad = Matrix::Identity(2, 2) * 1.5;
    CHECK_THROWS_AS(CorrelationKernel(bad, linalg::default_labels(2), Provenance::Custom), ValidityError);
    Matrix half = Matrix::Identity(2, 2) * 0.5;
    CHECK_THROWS_AS(CorrelationKernel(half, linalg::default_labels(2), Provenance::Projection), NumericalError);
    CHECK_NOTHROW(CorrelationKernel(half, linalg::default_labels(2), Provenance::Custom));
  }

  TEST_CASE("integral kernels over the full support and a half line") {
    const double inf = kInfinity;
    const auto full = integral_kernel(orthopoly::Hermite{}, {-inf, inf}, 10, inf, 0.0);
    CHECK(max_abs(full.matrix() - Matrix::Identity(10, 10)) <= 1e-10);
    const auto half = integral_kernel(orthopoly::Hermite{}, {0.0, inf}, 10, inf, 0.0);
    CHECK(half(0, 0) == doctest::Approx(0.5).epsilon(1e-12));
    // Odd-even entries cancel by parity only when one of them is odd across the origin.
    CHECK(half(0, 2) == doctest::Approx(0.0).epsilon(1e-12));

    const auto jac = integral_kernel(orthopoly::Jacobi{-0.5, 0.7}, {-1.0, 1.0}, 12, inf, 0.0);
    CHECK(max_abs(jac.matrix() - Matrix::Identity(12, 12)) <= 1e-10);
    const auto lag = integral_kernel(orthopoly::Laguerre{0.5}, {0.0, inf}, 12, inf, 0.0);
    CHECK(max_abs(lag.matrix() - Matrix::Identity(12, 12)) <= 1e-10);
    CHECK_THROWS_AS((void)integral_kernel(orthopoly::Charlier{1.0}, {0.0, inf}, 4, inf, 0.0), PreconditionError);
  }

  TEST_CASE("Laguerre integral kernel against the reflected fermi kernel") {
    // Below r the occupation is 1/(1+e^{β(u-r)}), i.e. fermi_kernel(T - r), which is
    // s fermi_kernel(s(T-r)s) s; the truncation error shrinks as the dimension grows.
    const double r = 10.0;
    const double beta = 5.0;
    double prev = INFINITY;
    for (Eigen::Index n : {60, 120, 240}) {
      const auto k = integral_kernel(orthopoly::Laguerre{1.0}, {0.0, r}, n, beta, r);
      const auto t = orthopoly::jacobi_operator(orthopoly::Laguerre{1.0}, n);
      const SymmetricOperator flipped =
          orthopoly::sign_flip(SymmetricOperator(Matrix(t.matrix() - r * Matrix::Identity(n, n))));
      const Matrix reflected = orthopoly::sign_flip(SymmetricOperator(fermi_kernel(flipped, beta).matrix())).matrix();
      const double err = max_abs(k.matrix().topLeftCorner(20, 20) - reflected.topLeftCorner(20, 20));
      CHECK(err < prev);
      prev = err;
    }
    CHECK(prev <= 1e-3);
  }

  TEST_CASE("space-time kernel closed forms") {
    std::mt19937_64 rng(9);
    const SymmetricOperator h(kmsdpp::testing::random_symmetric(rng, 5));
    const double beta = 1.7;
    const SpaceTimeKernel r = space_time_kernel(h, beta);
    CHECK(max_abs(r.matrix(0.3, 0.3) - fermi_kernel(h, beta).matrix()) <= 1e-14);

    const SpaceTimeKernel zero = space_time_kernel(diagonal({-1.0, 1.0}), kInfinity);
    for (double u : {0.0, 0.5, 2.0, 7.0}) CHECK(zero.value(0, 0.0, 0, u) == doctest::Approx(std::exp(-u)).epsilon(1e-14));

    const double ln3 = std::log(3.0);
    const SpaceTimeKernel finite = space_time_kernel(diagonal({-1.0, 1.0}), ln3);
    CHECK(finite.value(1, ln3 / 2.0, 1, -ln3 / 2.0) == doctest::Approx(-0.25).epsilon(1e-14));
    CHECK_THROWS_AS(finite.check_time(ln3), DomainError);
  }

  TEST_CASE("time-reversal symmetry of the t <= s branch") {
    std::mt19937_64 rng(4);
    const SymmetricOperator h(kmsdpp::testing::random_symmetric(rng, 6));
    const SpaceTimeKernel r = space_time_kernel(h, 2.0);
    for (double t : {-0.9, -0.2, 0.0, 0.4}) {
      for (double s : {0.4, 0.7, 1.0}) {
        if (t > s) continue;
        for (Eigen::Index x = 0; x < 6; ++x) {
          for (Eigen::Index y = 0; y < 6; ++y) CHECK(std::abs(r.value(x, t, y, s) - r.value(y, -s, x, -t)) <= 1e-14);
        }
      }
    }
  }

  TEST_CASE("dynamical correlation reductions") {
    std::mt19937_64 rng(8);
    const SymmetricOperator h(kmsdpp::testing::random_symmetric(rng, 6));
    const double beta = 2.0;
    const SpaceTimeKernel r = space_time_kernel(h, beta);
    const auto k = fermi_kernel(h, beta);

    const std::vector<SpaceTimePoint> one{{3.0, 0.4}};
    CHECK(dynamical_correlation(r, one) == doctest::Approx(k(3, 3)).epsilon(1e-14));

    const std::vector<SpaceTimePoint> same{{0.0, 0.2}, {2.0, 0.2}, {5.0, 0.2}};
    Matrix minor(3, 3);
    const Eigen::Index idx[] = {0, 2, 5};
    for (int i = 0; i < 3; ++i) {
      for (int j = 0; j < 3; ++j) minor(i, j) = k(idx[i], idx[j]);
    }
    CHECK(std::abs(dynamical_correlation(r, same) - linalg::determinant(minor)) <= 1e-12);

    const std::vector<SpaceTimePoint> repeated{{1.0, 0.1}, {1.0, 0.1}};
    CHECK(dynamical_correlation(r, repeated) == 0.0);
    const std::vector<SpaceTimePoint> unsorted{{1.0, 0.5}, {2.0, 0.1}};
    CHECK_THROWS_AS((void)dynamical_correlation(r, unsorted), PreconditionError);
    const std::vector<SpaceTimePoint> outside{{1.0, 1.5}};
    CHECK_THROWS_AS((void)dynamical_correlation(r, outside), DomainError);
  }

  TEST_CASE("OP eigen-sum kernel equals the spectral kernel of -(D + mu)") {
    const orthopoly::FamilySpec kraw = orthopoly::Krawtchouk{10, 0.4};
    const auto window = orthopoly::full_window(kraw);
    const auto table = orthopoly::polynomial_table(kraw, window, 11);
    const double mu = -3.5;
    const double beta = 1.5;
    const auto d = orthopoly::difference_operator(kraw, window);
    const SymmetricOperator h(Matrix(-(d.matrix() + mu * Matrix::Identity(11, 11))), window.sites());
    const SpaceTimeKernel spectral = space_time_kernel(h, beta);
    const SpaceTimeKernel eigen_sum = op_space_time_kernel(table, mu, beta);
    for (double t : {-0.7, 0.0, 0.3}) {
      for (double s : {-0.5, 0.2, 0.75}) CHECK(max_abs(spectral.matrix(t, s) - eigen_sum.matrix(t, s)) <= 1e-9);
    }
  }

  TEST_CASE("zero-temperature OP kernel is a gauge of the projection kernel") {
    const orthopoly::FamilySpec kraw = orthopoly::Krawtchouk{8, 0.3};
    const auto window = orthopoly::full_window(kraw);
    const int N = 3;
    const auto table = orthopoly::polynomial_table(kraw, window, 9);
    const auto d = orthopoly::difference_operator(kraw, window);
    // Shifting by N - 1/2 leaves exactly the lowest N modes of -D below zero.
    const SymmetricOperator h(Matrix(-d.matrix() - (N - 0.5) * Matrix::Identity(9, 9)), window.sites());
    const SpaceTimeKernel projection = space_time_kernel(h, kInfinity);
    const SpaceTimeKernel op = op_zero_temperature_kernel(table, N);
    const std::vector<SpaceTimePoint> pts{{0.0, -1.0}, {2.0, -0.3}, {3.0, 0.0}, {5.0, 0.8}};
    CHECK(std::abs(dynamical_correlation(projection, pts) - dynamical_correlation(op, pts)) <= 1e-12);
    // Entries differ by the gauge e^{(s-t)(N-1/2)}, so they are not equal.
    CHECK(std::abs(projection.value(0, 0.0, 1, 1.0) - op.value(0, 0.0, 1, 1.0)) > 1e-3);
  }

  TEST_CASE("finite-temperature kernel approaches the projection kernel") {
    Matrix a(4, 4);
    a << -1.0, 0.3, 0.0, 0.0, 0.3, -0.4, 0.2, 0.0, 0.0, 0.2, 0.7, 0.1, 0.0, 0.0, 0.1, 1.5;
    const SymmetricOperator h(Matrix(4.0 * a));
    const double gap = linalg::eig_sym(h).eigenvalues.cwiseAbs().minCoeff();
    const SpaceTimeKernel limit = space_time_kernel(h, kInfinity);
    double prev = 0.0;
    double prev_beta = 0.0;
    for (double beta : {2.0, 4.0, 8.0, 16.0}) {
      const SpaceTimeKernel r = space_time_kernel(h, beta);
      const double err = max_abs(r.matrix(0.0, 0.0) - limit.matrix(0.0, 0.0));
      if (prev > 0.0) CHECK(err / prev <= 1.1 * std::exp(-gap * (beta - prev_beta)));
      prev = err;
      prev_beta = beta;
    }
  }
}

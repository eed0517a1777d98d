// Copyright 2026 The kmsdpp Authors
// SPDX-License-Identifier: Apache-2.0

#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <numbers>

#include "kmsdpp/orthopoly.hpp"

using namespace kmsdpp;
using namespace kmsdpp::orthopoly;
using linalg::Matrix;
using linalg::Vector;

namespace {

// One instance per discrete hypergeometric-type family, on windows generous
// enough for the lowest levels to be truncation-free.
std::vector<std::pair<FamilySpec, SiteWindow>> registry() {
  std::vector<std::pair<FamilySpec, SiteWindow>> out;
  const FamilySpec meixner = Meixner{1.5, 0.4};
  const FamilySpec charlier = Charlier{2.0};
  const FamilySpec kraw = Krawtchouk{10, 0.4};
  const FamilySpec hahn = Hahn{10, 0.5, 1.5};
  const FamilySpec racah = racah_from_jacobi(10, 0.5, 1.5);
  out.emplace_back(meixner, make_window(meixner, 0, 80));
  out.emplace_back(charlier, make_window(charlier, 0, 60));
  out.emplace_back(kraw, full_window(kraw));
  out.emplace_back(hahn, full_window(hahn));
  out.emplace_back(racah, full_window(racah));
  return out;
}

Vector descending_eigenvalues(const linalg::SymmetricOperator& d) {
  Vector ev = linalg::eig_sym(d).eigenvalues;
  std::sort(ev.begin(), ev.end(), std::greater<>());
  return ev;
}

}  // namespace

TEST_SUITE("orthopoly") {
  TEST_CASE("weights in closed form") {
    CHECK(weight(Charlier{1.7}, 0.0) == doctest::Approx(std::exp(-1.7)).epsilon(1e-14));
    CHECK(weight(Krawtchouk{4, 0.5}, 2.0) == doctest::Approx(6.0 / 16.0).epsilon(1e-14));
    CHECK(weight(Meixner{1.0, 0.3}, 3.0) == doctest::Approx(0.027 / 0.7).epsilon(1e-13));
    CHECK_THROWS_AS((void)weight(Krawtchouk{4, 0.5}, 5.0), PreconditionError);
    CHECK_THROWS_AS((void)weight(Charlier{1.0}, 0.5), PreconditionError);
  }

  TEST_CASE("parameter domains") {
    CHECK_THROWS_AS(validate(Meixner{1.0, 1.0}), ValidityError);
    CHECK_THROWS_AS(validate(Charlier{0.0}), ValidityError);
    CHECK_THROWS_AS(validate(Hahn{4, -1.5, 0.0}), ValidityError);
    CHECK_THROWS_AS(validate(Racah{4, 0.3, 0.2, 0.1, 0.1}), ValidityError);
    CHECK_NOTHROW(validate(racah_from_jacobi(6, 0.5, 1.5)));
    // Principal pair (conjugates) and complementary pair (same unit interval).
    CHECK(is_admissible_pair({{0.3, 1.2}, {0.3, -1.2}}));
    CHECK(is_admissible_pair({{0.2, 0.0}, {0.7, 0.0}}));
    CHECK_FALSE(is_admissible_pair({{0.2, 0.0}, {1.7, 0.0}}));
  }

  TEST_CASE("detailed balance of the rates against the weight") {
    // Δ[σw] = τw with σ = μ_x and τ = λ_x - μ_x is μ_{x+1} w(x+1) = λ_x w(x).
    for (const auto& [family, window] : registry()) {
      const auto& s = window.sites();
      for (std::size_t i = 0; i + 1 < s.size(); ++i) {
        const double lhs = death_rate(family, s[i] + 1.0) * weight(family, s[i] + 1.0);
        const double rhs = birth_rate(family, s[i]) * weight(family, s[i]);
        if (rhs < 1e-290) continue;
        CHECK(std::abs(lhs - rhs) <= 1e-10 * rhs);
      }
    }
  }

  TEST_CASE("polynomial tables") {
    const FamilySpec charlier = Charlier{1.0};
    const PolynomialTable c = polynomial_table(charlier, make_window(charlier, 0, 30), 1);
    CHECK(c.values(0, 0) == doctest::Approx(std::exp(-0.5)).epsilon(1e-14));

    const FamilySpec kraw = Krawtchouk{4, 0.5};
    const PolynomialTable k = polynomial_table(kraw, full_window(kraw), 5);
    CHECK((k.values * k.values.transpose() - Matrix::Identity(5, 5)).cwiseAbs().maxCoeff() <= 1e-10);

    for (const auto& [family, window] : registry()) {
      const PolynomialTable t = polynomial_table(family, window, 8);
      const double tol = std::max(1e-8, 3.0 * (1.0 - t.captured_mass));
      CHECK((t.values * t.values.transpose() - Matrix::Identity(8, 8)).cwiseAbs().maxCoeff() <= tol);
    }

    CHECK_THROWS_AS((void)polynomial_table(Hermite{}, make_window(charlier, 0, 4), 1), PreconditionError);
    CHECK_THROWS_AS((void)polynomial_table(Charlier{20.0}, make_window(Charlier{20.0}, 0, 5), 2),
                    WindowTooSmallError);
  }

  TEST_CASE("choose_window captures the mass") {
    const FamilySpec meixner = Meixner{1.5, 0.4};
    CHECK(captured_mass(meixner, choose_window(meixner)) >= 1.0 - 1e-12);
    const FamilySpec charlier = Charlier{3.0};
    CHECK(captured_mass(charlier, choose_window(charlier)) >= 1.0 - 1e-12);
  }

  TEST_CASE("Charlier difference operator entries and spectrum") {
    const double mu = 2.0;
    const FamilySpec family = Charlier{mu};
    const auto d = difference_operator(family, make_window(family, 0, 60));
    for (Eigen::Index x = 0; x < 5; ++x) {
      CHECK(d(x, x) == doctest::Approx(-(x + mu)).epsilon(1e-15));
      CHECK(d(x, x + 1) == doctest::Approx(std::sqrt(mu * (x + 1.0))).epsilon(1e-15));
    }
    const Vector ev = descending_eigenvalues(d);
    for (int n = 0; n < 5; ++n) CHECK(std::abs(ev(n) + n) <= 1e-6);
  }

  TEST_CASE("Meixner spectrum on a wide window") {
    const FamilySpec family = Meixner{1.5, 0.4};
    const Vector ev = descending_eigenvalues(difference_operator(family, make_window(family, 0, 80)));
    for (int n = 0; n < 10; ++n) CHECK(std::abs(ev(n) + 0.6 * n) <= 1e-6);
  }

  TEST_CASE("eigenvalue laws and eigenvectors of every discrete family") {
    constexpr int N = 8;
    for (const auto& [family, window] : registry()) {
      INFO(family_name(family));
      const auto d = difference_operator(family, window);
      const Vector ev = descending_eigenvalues(d);
      for (int n = 0; n < (N + 1) / 2; ++n) CHECK(std::abs(ev(n) - *eigenvalue_law(family, n)) <= 1e-6);

      // Rows of the polynomial table are eigenvectors of D with eigenvalue -m_n.
      const PolynomialTable t = polynomial_table(family, window, N);
      const Matrix& dm = d.matrix();
      const auto m = static_cast<Eigen::Index>(window.size());
      const Eigen::Index lo = m / 4;
      const Eigen::Index len = m / 2;
      for (int n = 0; n < (N + 1) / 2; ++n) {
        const Vector p = t.values.row(n).transpose();
        const Vector residual = dm * p - *eigenvalue_law(family, n) * p;
        CHECK(residual.segment(lo, len).cwiseAbs().maxCoeff() <= 1e-6 * (1.0 + dm.cwiseAbs().maxCoeff()));
      }
    }
  }

  TEST_CASE("finite families need the full window") {
    const FamilySpec kraw = Krawtchouk{6, 0.4};
    CHECK_THROWS_AS((void)difference_operator(kraw, make_window(kraw, 0, 4)), PreconditionError);
    CHECK_THROWS_AS((void)make_window(kraw, 0, 7), PreconditionError);
  }

  TEST_CASE("discrete hypergeometric operator on half-integers") {
    const FamilySpec dh = DiscreteHypergeometric{{{0.4, 0.0}, {0.6, 0.0}}, 0.3};
    const SiteWindow w = make_window(dh, -4.5, 4.5);
    CHECK(w.size() == 10);
    const auto d = difference_operator(dh, w);
    const double x = -4.5;
    CHECK(d(0, 0) == doctest::Approx(-(x + 0.3 * (1.0 + x)) / 0.7).epsilon(1e-14));
    CHECK(d(0, 1) == doctest::Approx(std::sqrt(0.3 * (0.4 + x + 0.5) * (0.6 + x + 0.5)) / 0.7).epsilon(1e-14));
    CHECK_THROWS_AS((void)choose_window(dh), ConfigError);
  }

  TEST_CASE("Jacobi operators") {
    const Matrix h = jacobi_operator(Hermite{}, 2).matrix();
    CHECK(h(0, 0) == 0.0);
    CHECK(h(0, 1) == doctest::Approx(std::sqrt(0.5)).epsilon(1e-15));
    const Matrix l = jacobi_operator(Laguerre{1.0}, 2).matrix();
    CHECK(l(0, 0) == 1.0);
    CHECK(l(0, 1) == doctest::Approx(1.0).epsilon(1e-15));
    CHECK(l(1, 1) == 3.0);

    // Hermite norms π^{1/2} 2^{-x} x! give a_x = √((x+1)/2) for the orthonormal recurrence.
    const Matrix h6 = jacobi_operator(Hermite{}, 6).matrix();
    for (int x = 0; x < 5; ++x) {
      const double nx = std::sqrt(std::numbers::pi) * std::pow(2.0, -x) * std::tgamma(x + 1.0);
      const double nx1 = std::sqrt(std::numbers::pi) * std::pow(2.0, -(x + 1)) * std::tgamma(x + 2.0);
      // x h_x = h_{x+1} + (x/2) h_{x-1} for monic h, so a_x = ‖h_{x+1}‖/‖h_x‖.
      CHECK(h6(x, x + 1) == doctest::Approx(std::sqrt(nx1 / nx)).epsilon(1e-14));
    }
    // Laguerre norms x! Γ(x+c).
    const double c = 1.5;
    const Matrix l6 = jacobi_operator(Laguerre{c}, 6).matrix();
    for (int x = 0; x < 5; ++x) {
      const double ratio = std::tgamma(x + 2.0) * std::tgamma(x + 1.0 + c) / (std::tgamma(x + 1.0) * std::tgamma(x + c));
      CHECK(l6(x, x + 1) == doctest::Approx(std::sqrt(ratio)).epsilon(1e-14));
    }

    const Vector hs = linalg::eig_sym(jacobi_operator(Hermite{}, 50)).eigenvalues;
    CHECK(std::abs(hs.sum()) <= 1e-10);
    const Vector ls = linalg::eig_sym(jacobi_operator(Laguerre{0.5}, 50)).eigenvalues;
    CHECK(ls.minCoeff() >= -0.05);
    const Vector js = linalg::eig_sym(jacobi_operator(Jacobi{-0.5, 0.7}, 50)).eigenvalues;
    CHECK(js.minCoeff() >= -1.05);
    CHECK(js.maxCoeff() <= 1.05);
    CHECK_THROWS_AS((void)jacobi_operator(Charlier{1.0}, 4), PreconditionError);
  }

  TEST_CASE("Charlier to discrete Hermite entries") {
    for (int k = 0; k < 6; ++k) {
      const LimitRung rung = limit_regime(Regime::CharlierToDHermite, k);
      const double mu = std::get<Charlier>(rung.source).mu;
      const double n = rung.scale_param;
      const Matrix& s = rung.scaled.matrix();
      for (Eigen::Index x = 0; x + 1 < 10; ++x) {
        CHECK(s(x, x) == doctest::Approx(-(x + mu - n) / std::sqrt(2.0 * n)).epsilon(1e-12));
        CHECK(s(x, x + 1) == doctest::Approx(std::sqrt(mu * (x + 1.0) / (2.0 * n))).epsilon(1e-12));
      }
    }
    // Entries approach the target as the ladder climbs.
    const LimitRung last = limit_regime(Regime::CharlierToDHermite, 8);
    CHECK(std::abs(last.scaled(3, 4) - std::sqrt(2.0)) < 0.01);
    CHECK(std::abs(last.scaled(3, 3) - last.target(3, 3)) < 0.01);
  }

  TEST_CASE("every ladder decreases on the central subwindow") {
    for (Regime r : all_regimes()) {
      INFO(regime_name(r));
      double prev = INFINITY;
      for (int k = 0; k < 6; ++k) {
        const LimitRung rung = limit_regime(r, k);
        const Block b = central_subwindow(rung.scaled.dim());
        const double err = (rung.scaled.matrix() - rung.target.matrix())
                               .block(b.begin, b.begin, b.size, b.size)
                               .cwiseAbs()
                               .maxCoeff();
        CHECK(err < prev);
        prev = err;
      }
    }
    CHECK_THROWS_AS((void)parse_regime("charlier_dlaguerre"), ConfigError);
    CHECK(parse_regime("racah_djacobi") == Regime::RacahToDJacobi);
  }

  TEST_CASE("sign flip conjugation") {
    const auto t = jacobi_operator(Laguerre{1.0}, 4);
    const Matrix f = sign_flip(t).matrix();
    CHECK(f(0, 1) == -t(0, 1));
    CHECK(f(1, 1) == t(1, 1));
    CHECK(f(0, 2) == t(0, 2));
  }
}

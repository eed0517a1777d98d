// Copyright 2026 The kmsdpp Authors
// SPDX-License-Identifier: Apache-2.0

#include <doctest.h>

#include <cmath>
#include <random>
#include <vector>

#include "kmsdpp/dpp.hpp"
#include "kmsdpp/kernels.hpp"
#include "kmsdpp/orthopoly.hpp"
#include "oracles.hpp"

using namespace kmsdpp;
using namespace kmsdpp::dpp;
using linalg::Matrix;
using linalg::SymmetricOperator;
using linalg::Vector;

TEST_SUITE("dpp") {
  TEST_CASE("configuration accessors") {
    const linalg::SiteLabels w{0.0, 1.0, 2.0, 3.0};
    const Configuration c(w, std::vector<bool>{false, true, false, true});
    CHECK(c.count() == 2);
    CHECK(c.bitstring() == "0101");
    CHECK(c.contains(3.0));
    CHECK_FALSE(c.contains(0.0));
    const std::vector<Eigen::Index> idx{1, 3};
    CHECK(Configuration(w, idx) == c);
    CHECK(c.indices() == idx);
  }

  TEST_CASE("sampler on trivial kernels") {
    const auto sites = linalg::default_labels(5);
    const kernels::CorrelationKernel zero(Matrix::Zero(5, 5), sites, kernels::Provenance::Custom);
    const kernels::CorrelationKernel full(Matrix::Identity(5, 5), sites, kernels::Provenance::Custom);
    for (const auto& c : sample_dpp(zero, 1, 50)) CHECK(c.count() == 0);
    for (const auto& c : sample_dpp(full, 1, 50)) CHECK(c.count() == 5);
  }

  TEST_CASE("projection kernels give exactly N points") {
    const orthopoly::FamilySpec fam = orthopoly::Krawtchouk{6, 0.4};
    const auto table = orthopoly::polynomial_table(fam, orthopoly::full_window(fam), 3);
    const auto k = kernels::cd_kernel(table);
    const auto samples = sample_dpp(k, 5, 2000);
    for (const auto& c : samples) CHECK(c.count() == 3);
    CHECK(samples == sample_dpp(k, 5, 2000, 3));
  }

  TEST_CASE("diagonal L-ensemble is independent Bernoulli") {
    Matrix l = Matrix::Zero(3, 3);
    l.diagonal() << 0.5, 1.0, 3.0;
    const LEnsemble e{SymmetricOperator(l)};
    const auto law = explicit_law(e);
    CHECK(law.total() == doctest::Approx(1.0).epsilon(1e-14));
    const Vector p = l.diagonal().array() / (1.0 + l.diagonal().array());
    for (const auto& atom : law.atoms()) {
      double expected = 1.0;
      for (Eigen::Index x = 0; x < 3; ++x) {
        const bool in = std::find(atom.occupied.begin(), atom.occupied.end(), x) != atom.occupied.end();
        expected *= in ? p(x) : 1.0 - p(x);
      }
      CHECK(atom.probability == doctest::Approx(expected).epsilon(1e-13));
    }
  }

  TEST_CASE("L-ensemble correlations are determinants of L(1+L)^{-1}") {
    std::mt19937_64 rng(12);
    const Matrix h = testing::random_symmetric(rng, 5);
    const Matrix l = testing::heat(h, 1.0);
    const LEnsemble e{SymmetricOperator(0.5 * (l + l.transpose()))};
    const auto law = explicit_law(e);
    const auto k = kernels::fermi_kernel(SymmetricOperator(h), 1.0);
    for (double x = 0; x < 5; ++x) {
      const std::vector<double> one{x};
      CHECK(std::abs(enumerate_correlations(law, one) - k(static_cast<Eigen::Index>(x), static_cast<Eigen::Index>(x))) <= 1e-12);
      for (double y = x + 1; y < 5; ++y) {
        const std::vector<double> two{x, y};
        CHECK(std::abs(enumerate_correlations(law, two) - kernel_correlation(k, two)) <= 1e-12);
      }
    }
    const std::vector<double> repeated{1.0, 1.0};
    CHECK(enumerate_correlations(law, repeated) == 0.0);
    CHECK(kernel_correlation(k, repeated) == 0.0);
  }

  TEST_CASE("orthogonal polynomial ensembles match Christoffel-Darboux determinants") {
    const orthopoly::FamilySpec fam = orthopoly::Krawtchouk{4, 0.5};
    const auto window = orthopoly::full_window(fam);
    const OpEnsemble e{fam, window, 2};
    const auto law = explicit_law(e);
    CHECK(law.total() == doctest::Approx(1.0).epsilon(1e-13));
    for (const auto& atom : law.atoms()) CHECK(atom.occupied.size() == 2);
    const auto k = kernels::cd_kernel(orthopoly::polynomial_table(fam, window, 2));
    for (const auto& atom : law.atoms()) {
      const std::vector<double> sites{window.sites()[atom.occupied[0]], window.sites()[atom.occupied[1]]};
      CHECK(std::abs(atom.probability - kernel_correlation(k, sites)) <= 1e-10);
      CHECK(std::abs(ensemble_probability(e, Configuration(window.sites(), atom.occupied)) - atom.probability) <=
            1e-12);
    }
    const std::vector<Eigen::Index> three{0, 1, 2};
    CHECK(ensemble_probability(e, Configuration(window.sites(), three)) == 0.0);
  }

  TEST_CASE("correlation estimator") {
    const std::vector<Configuration> none;
    const std::vector<double> site{0.0};
    CHECK_THROWS_AS((void)estimate_correlations(none, site), PreconditionError);

    const orthopoly::FamilySpec fam = orthopoly::Krawtchouk{6, 0.4};
    const auto k = kernels::cd_kernel(orthopoly::polynomial_table(fam, orthopoly::full_window(fam), 3));
    const auto samples = sample_dpp(k, 3, 20000);
    for (double x = 0; x <= 6; ++x) {
      const std::vector<double> one{x};
      const auto est = estimate_correlations(samples, one);
      CHECK(est.n_samples == samples.size());
      CHECK(std::abs(est.value - kernel_correlation(k, one)) <= 4.0 * est.std_error + 1e-12);
      const std::vector<double> pair{x, x == 6 ? 0.0 : x + 1};
      const auto est2 = estimate_correlations(samples, pair);
      CHECK(std::abs(est2.value - kernel_correlation(k, pair)) <= 4.0 * est2.std_error + 1e-12);
      // Adding a site can only lower the joint frequency.
      CHECK(est2.value <= est.value);
    }
    const std::vector<double> repeated{2.0, 2.0};
    CHECK(estimate_correlations(samples, repeated).value == 0.0);
  }

  TEST_CASE("ensemble errors") {
    const orthopoly::FamilySpec fam = orthopoly::Krawtchouk{4, 0.5};
    const OpEnsemble e{fam, orthopoly::full_window(fam), 2};
    const std::vector<Eigen::Index> idx{0};
    CHECK_THROWS_AS((void)ensemble_probability(e, Configuration(linalg::default_labels(3), idx)), PreconditionError);
    Matrix bad = Matrix::Identity(2, 2);
    bad(0, 0) = -3.0;
    const std::vector<Eigen::Index> one{0};
    CHECK_THROWS_AS((void)ensemble_probability(LEnsemble{SymmetricOperator(bad)},
                                               Configuration(linalg::default_labels(2), one)),
                    ValidityError);
  }
}

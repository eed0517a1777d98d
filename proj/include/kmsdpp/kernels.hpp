// Copyright 2026 The kmsdpp Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <limits>
#include <span>
#include <string>
#include <vector>

#include "kmsdpp/linalg.hpp"
#include "kmsdpp/orthopoly.hpp"

namespace kmsdpp::kernels {

inline constexpr double kInfinity = std::numeric_limits<double>::infinity();

enum class Provenance { Fermi, Projection, ChristoffelDarboux, Integral, Custom };

[[nodiscard]] std::string provenance_name(Provenance p);

/**
 * @brief Static DPP kernel on a site window.
 *
 * Checked on construction: symmetry within 1e-10, spectrum inside
 * [-1e-8, 1+1e-8] (1e-6 for integral kernels), and ‖K²-K‖ ≤ 1e-8 for projections.
 */
class CorrelationKernel {
 public:
  CorrelationKernel(linalg::Matrix values, linalg::SiteLabels sites, Provenance provenance);

  [[nodiscard]] const linalg::Matrix& matrix() const noexcept { return values_; }
  [[nodiscard]] const linalg::SiteLabels& sites() const noexcept { return sites_; }
  [[nodiscard]] Provenance provenance() const noexcept { return provenance_; }
  [[nodiscard]] Eigen::Index size() const noexcept { return values_.rows(); }
  [[nodiscard]] double operator()(Eigen::Index i, Eigen::Index j) const { return values_(i, j); }

 private:
  linalg::Matrix values_;
  linalg::SiteLabels sites_;
  Provenance provenance_;
};

/// e^{-βH}(1+e^{-βH})^{-1}.
[[nodiscard]] CorrelationKernel fermi_kernel(const linalg::SymmetricOperator& h, double beta);

/// Spectral projection onto {H < 0}; GapError if an eigenvalue sits at 0.
[[nodiscard]] CorrelationKernel negative_projection(const linalg::SymmetricOperator& h);

/// Σ_{n<N} p_n(x) p_n(y).
[[nodiscard]] CorrelationKernel cd_kernel(const orthopoly::PolynomialTable& table);

struct Interval {
  double lo;
  double hi;
};

/**
 * @brief ∫ p̃_x p̃_y g w over the support for x, y < m.
 *
 * β = ∞: g is the indicator of `interval`. β < ∞: g is the logistic
 * 1/(1+e^{β(r-u)}) when the interval reaches the top of the support, else
 * 1/(1+e^{β(u-r)}); the interval only selects the side.
 */
[[nodiscard]] CorrelationKernel integral_kernel(const orthopoly::FamilySpec& family,
                                                Interval interval, Eigen::Index m, double beta,
                                                double r);

struct SpaceTimePoint {
  double site;
  double time;
};

/**
 * @brief R(x,t;y,s) from spectral data of H.
 *
 * With u = s - t: t ≤ s gives Σ φφ e^{uλ}/(1+e^{βλ}); t > s gives
 * -Σ φφ e^{-(t-s)λ}/(1+e^{-βλ}). At β = ∞ the logistic factors become the
 * occupation indicator and its complement.
 */
class SpaceTimeKernel {
 public:
  /// Occupied modes at β = ∞ default to λ < 0.
  SpaceTimeKernel(linalg::Vector eigenvalues, linalg::Matrix eigenvectors, linalg::SiteLabels sites,
                  double beta, std::vector<bool> occupied = {});

  [[nodiscard]] double beta() const noexcept { return beta_; }
  [[nodiscard]] const linalg::SiteLabels& sites() const noexcept { return sites_; }
  [[nodiscard]] const linalg::Vector& eigenvalues() const noexcept { return eigenvalues_; }
  [[nodiscard]] Eigen::Index index_of(double site) const;

  /// Throws DomainError if t is outside [-β/2, β/2].
  void check_time(double t) const;

  [[nodiscard]] double value(Eigen::Index x, double t, Eigen::Index y, double s) const;
  [[nodiscard]] double evaluate(const SpaceTimePoint& p, const SpaceTimePoint& q) const;

  /// The full matrix R(·,t;·,s).
  [[nodiscard]] linalg::Matrix matrix(double t, double s) const;

 private:
  [[nodiscard]] linalg::Vector mode_factors(double t, double s) const;

  linalg::Vector eigenvalues_;
  linalg::Matrix eigenvectors_;
  linalg::SiteLabels sites_;
  double beta_;
  std::vector<bool> occupied_;
};

[[nodiscard]] SpaceTimeKernel space_time_kernel(const linalg::SymmetricOperator& h, double beta);

/// 𝒦_{-D-μ,β} from the polynomial table and the exact eigenvalue law.
[[nodiscard]] SpaceTimeKernel op_space_time_kernel(const orthopoly::PolynomialTable& table,
                                                   double mu, double beta);

/// 𝒦_{-D,N}: un-conjugated zero-temperature form with the lowest N modes occupied.
[[nodiscard]] SpaceTimeKernel op_zero_temperature_kernel(const orthopoly::PolynomialTable& table,
                                                         int N);

/// The matrix [R(x_i,t_i;x_j,t_j)] behind dynamical_correlation.
[[nodiscard]] linalg::Matrix correlation_matrix(const SpaceTimeKernel& kernel,
                                                std::span<const SpaceTimePoint> points);

/// det[R(x_i,t_i;x_j,t_j)] for time-sorted points; repeated points give 0.
[[nodiscard]] double dynamical_correlation(const SpaceTimeKernel& kernel,
                                           std::span<const SpaceTimePoint> points);

}  // namespace kmsdpp::kernels

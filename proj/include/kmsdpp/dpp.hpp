// Copyright 2026 The kmsdpp Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <variant>
#include <vector>

#include "kmsdpp/kernels.hpp"
#include "kmsdpp/orthopoly.hpp"

namespace kmsdpp::dpp {

/// Occupation of an ordered site window.
class Configuration {
 public:
  Configuration(linalg::SiteLabels window, std::vector<bool> occupied);
  /// Occupied window indices.
  Configuration(linalg::SiteLabels window, std::span<const Eigen::Index> occupied_indices);

  [[nodiscard]] const linalg::SiteLabels& window() const noexcept { return window_; }
  [[nodiscard]] const std::vector<bool>& occupied() const noexcept { return occupied_; }
  [[nodiscard]] std::size_t count() const noexcept;
  [[nodiscard]] bool contains(double site) const;
  [[nodiscard]] std::vector<Eigen::Index> indices() const;
  /// Window-ordered '0'/'1' characters.
  [[nodiscard]] std::string bitstring() const;

  friend bool operator==(const Configuration&, const Configuration&) = default;

 private:
  linalg::SiteLabels window_;
  std::vector<bool> occupied_;
};

struct CorrelationEstimate {
  double value;
  double std_error;
  std::size_t n_samples;
};

/// Spectral sampler: Bernoulli-thinned eigenvectors, then sequential site draws.
[[nodiscard]] std::vector<Configuration> sample_dpp(const kernels::CorrelationKernel& kernel,
                                                    std::uint64_t seed, std::size_t count,
                                                    int threads = 1);

struct LEnsemble {
  linalg::SymmetricOperator l;
};

/// Π w(x_i) Π_{i<j} (a(x_i) - a(x_j))² on N-subsets of the window, a the family abscissa.
struct OpEnsemble {
  orthopoly::FamilySpec family;
  orthopoly::SiteWindow window;
  int N;
};

using Ensemble = std::variant<LEnsemble, OpEnsemble>;

inline constexpr double kMaxSubsets = 1e7;

[[nodiscard]] double ensemble_probability(const Ensemble& ensemble, const Configuration& omega);

/// Sparse law: configurations with positive mass, as sorted occupied index lists.
class ExplicitLaw {
 public:
  struct Atom {
    std::vector<Eigen::Index> occupied;
    double probability;
  };

  ExplicitLaw(linalg::SiteLabels window, std::vector<Atom> atoms);

  [[nodiscard]] const linalg::SiteLabels& window() const noexcept { return window_; }
  [[nodiscard]] const std::vector<Atom>& atoms() const noexcept { return atoms_; }
  [[nodiscard]] double total() const noexcept;

 private:
  linalg::SiteLabels window_;
  std::vector<Atom> atoms_;
};

/// All 2^m configurations of an L-ensemble; m ≤ 14.
[[nodiscard]] ExplicitLaw explicit_law(const LEnsemble& ensemble);
/// All N-subsets of the window, normalized by exhaustive summation.
[[nodiscard]] ExplicitLaw explicit_law(const OpEnsemble& ensemble);

/// Mass of configurations containing every listed site; repeated sites give 0.
[[nodiscard]] double enumerate_correlations(const ExplicitLaw& law, std::span<const double> sites);

/// Empirical joint occupation frequency with binomial standard error.
[[nodiscard]] CorrelationEstimate estimate_correlations(std::span<const Configuration> samples,
                                                        std::span<const double> sites);

/// det[K(x_i, x_j)]; repeated sites give 0.
[[nodiscard]] double kernel_correlation(const kernels::CorrelationKernel& kernel,
                                        std::span<const double> sites);

}  // namespace kmsdpp::dpp

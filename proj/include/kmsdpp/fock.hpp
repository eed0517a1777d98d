// Copyright 2026 The kmsdpp Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "kmsdpp/cyclic_chain.hpp"
#include "kmsdpp/linalg.hpp"

namespace kmsdpp::fock {

inline constexpr int kMaxSites = 14;

using Mask = std::uint32_t;

/// Basis: occupation bitmasks in integer order; bit i is the i-th site ascending.
class FockSpace {
 public:
  explicit FockSpace(linalg::SiteLabels sites);
  explicit FockSpace(int m) : FockSpace(linalg::default_labels(m)) {}

  [[nodiscard]] int sites() const noexcept { return static_cast<int>(labels_.size()); }
  [[nodiscard]] Eigen::Index dim() const noexcept { return Eigen::Index{1} << sites(); }
  [[nodiscard]] const linalg::SiteLabels& labels() const noexcept { return labels_; }

  friend bool operator==(const FockSpace&, const FockSpace&) = default;

 private:
  linalg::SiteLabels labels_;
};

/// (-1)^{#occupied sites below site}.
[[nodiscard]] inline int jordan_wigner_sign(Mask mask, int site) noexcept {
  const Mask below = mask & ((Mask{1} << site) - 1U);
  return (__builtin_popcount(below) & 1) != 0 ? -1 : 1;
}

class FockOperator {
 public:
  FockOperator(FockSpace space, linalg::Matrix entries);

  [[nodiscard]] const FockSpace& space() const noexcept { return space_; }
  [[nodiscard]] const linalg::Matrix& matrix() const noexcept { return entries_; }
  [[nodiscard]] FockOperator adjoint() const { return {space_, entries_.transpose()}; }

  friend FockOperator operator*(const FockOperator& a, const FockOperator& b);
  friend FockOperator operator+(const FockOperator& a, const FockOperator& b);
  friend FockOperator operator-(const FockOperator& a, const FockOperator& b);
  friend FockOperator operator*(double c, const FockOperator& a);

 private:
  FockSpace space_;
  linalg::Matrix entries_;
};

[[nodiscard]] FockOperator identity(const FockSpace& space);
[[nodiscard]] FockOperator anticommutator(const FockOperator& a, const FockOperator& b);

struct CarOperators {
  std::vector<FockOperator> create;
  std::vector<FockOperator> annihilate;
  std::vector<FockOperator> density;
};

/// a*_x, a_x and ρ_x = a*_x a_x with ascending-site Jordan–Wigner signs.
[[nodiscard]] CarOperators car_operators(const FockSpace& space);

/// a*(h) = Σ h_x a*_x.
[[nodiscard]] FockOperator creation(const FockSpace& space, const linalg::Vector& h);
/// a(k) = Σ k_x a_x (real coefficients).
[[nodiscard]] FockOperator annihilation(const FockSpace& space, const linalg::Vector& k);

/// Π_{x∈ω} ρ_x Π_{x∉ω} (1-ρ_x) = |ω⟩⟨ω|.
[[nodiscard]] FockOperator configuration_projector(const FockSpace& space, Mask omega);

/// L = Σ H(x,y) a*_x a_y.
[[nodiscard]] FockOperator second_quantization(const FockSpace& space, const linalg::SymmetricOperator& h);

/**
 * @brief Gibbs state of L in L's eigenbasis.
 *
 * L is diagonalized per particle-number sector when it conserves the number
 * (always true for second quantizations). Heat kernels are formed as
 * e^{-τ(L - E_min)}; the shift cancels in every ratio.
 */
class ThermalState {
 public:
  ThermalState(const FockOperator& l, double beta);

  [[nodiscard]] double beta() const noexcept { return beta_; }
  [[nodiscard]] const FockSpace& space() const noexcept { return space_; }
  /// All eigenvalues of L, ascending.
  [[nodiscard]] linalg::Vector energies() const;
  /// log Tr(e^{-βL}).
  [[nodiscard]] double log_partition() const noexcept;

  /// e^{-τ(L - E_min)} in the occupation basis.
  [[nodiscard]] linalg::Matrix heat_kernel(double tau) const;

  [[nodiscard]] double expectation(const FockOperator& a) const;

  /// Tr(e^{-(t₁+β/2)L} A₁ e^{-(t₂-t₁)L} ⋯ A_n e^{-(β/2-t_n)L}) / Tr(e^{-βL}).
  [[nodiscard]] double schwinger(std::span<const FockOperator> ops, std::span<const double> times) const;

 private:
  struct Sector {
    std::vector<Eigen::Index> states;
    linalg::Vector energies;
    linalg::Matrix vectors;
  };

  [[nodiscard]] bool block_diagonal(const linalg::Matrix& a) const;
  [[nodiscard]] linalg::Vector decay(const Sector& s, double tau) const;
  [[nodiscard]] static linalg::Matrix block(const linalg::Matrix& a, const Sector& s);

  FockSpace space_;
  double beta_;
  std::vector<Sector> sectors_;
  std::vector<int> sector_of_;
  double e_min_;
  double z_shifted_;
};

[[nodiscard]] double gibbs_expectation(const FockOperator& l, double beta, const FockOperator& a);
[[nodiscard]] double schwinger(const FockOperator& l, double beta, std::span<const FockOperator> ops,
                               std::span<const double> times);

struct MinorWitness {
  int order = 0;
  std::vector<Eigen::Index> rows;
  std::vector<Eigen::Index> cols;
  double value = 0.0;
};

struct CertificateRow {
  double t;
  int min_minor_order;
  double min_minor_value;
  bool pass;
  MinorWitness witness;
  double fock_min_entry;  ///< NaN when the window exceeds 10 sites
};

struct CertificateReport {
  bool pass;
  bool gauge_found;
  std::vector<int> gauge;  ///< s_x = ±1 with s_x s_y H(x,y) ≤ 0 off the diagonal
  std::vector<CertificateRow> rows;
};

inline constexpr int kMaxMinorOrder = 5;
inline constexpr double kMinorThreshold = -1e-10;

/// Diagonal ± gauge making every off-diagonal entry nonpositive, if one exists.
[[nodiscard]] std::vector<int> sign_gauge(const linalg::SymmetricOperator& h, bool* found = nullptr);

/**
 * @brief Minors of e^{-t s H s} up to order min(m, 5) for each grid time.
 *
 * Entries are rescaled by e^{tλ_min}, a positive factor, so the scan is
 * scale-free. The Fock column reports min entries of e^{-t dΓ(sHs)}.
 */
[[nodiscard]] CertificateReport positivity_certificate(const linalg::SymmetricOperator& h, double beta,
                                                       std::span<const double> grid);

inline constexpr double kTransferClamp = -1e-12;

/**
 * @brief Periodic law of full configurations on a time grid in [-β/2, β/2].
 *
 * Built from the gauged L; diagonal sign gauges cancel around the cycle.
 */
class PathLaw {
 public:
  PathLaw(const linalg::SymmetricOperator& h, double beta, std::vector<double> grid);

  [[nodiscard]] const FockSpace& space() const noexcept { return space_; }
  [[nodiscard]] double beta() const noexcept { return beta_; }
  [[nodiscard]] const std::vector<double>& grid() const noexcept { return grid_; }
  [[nodiscard]] double log_partition() const noexcept { return log_z_; }
  [[nodiscard]] const CertificateReport& certificate() const noexcept { return certificate_; }
  [[nodiscard]] const CyclicChain& chain() const noexcept { return chain_; }

  [[nodiscard]] double probability(std::span<const Mask> path) const;
  /// Law of the configuration at grid index i, indexed by mask.
  [[nodiscard]] linalg::Vector marginal(std::size_t i) const { return chain_.marginal(i); }

 private:
  FockSpace space_;
  double beta_;
  std::vector<double> grid_;
  CertificateReport certificate_;
  double log_z_;
  CyclicChain chain_;
};

using Trajectory = std::vector<Mask>;

/// Deterministic per seed for any thread count.
[[nodiscard]] std::vector<Trajectory> sample_trajectory(const PathLaw& law, std::uint64_t seed,
                                                        std::size_t count, int threads = 1);

/// Every grid path, enumerated in lexicographic mask order; law.space().dim()^n entries.
[[nodiscard]] std::vector<std::pair<Trajectory, double>> enumerate_paths(const PathLaw& law);

/**
 * @brief Two-sided Markov residual of an enumerated law.
 *
 * For each pair i < j, max |P(ω)P(ω_i,ω_j) - P(inner arc, ω_i, ω_j) P(outer arc, ω_i, ω_j)|.
 */
[[nodiscard]] double markov_residual(const PathLaw& law);

}  // namespace kmsdpp::fock

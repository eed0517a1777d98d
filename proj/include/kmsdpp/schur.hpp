// Copyright 2026 The kmsdpp Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <compare>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "kmsdpp/cyclic_chain.hpp"
#include "kmsdpp/dpp.hpp"
#include "kmsdpp/linalg.hpp"

namespace kmsdpp::schur {

/// Weakly decreasing positive parts; the empty partition is ∅.
class Partition {
 public:
  Partition() = default;
  explicit Partition(std::vector<int> parts);

  [[nodiscard]] const std::vector<int>& parts() const noexcept { return parts_; }
  [[nodiscard]] int size() const noexcept { return size_; }
  [[nodiscard]] int length() const noexcept { return static_cast<int>(parts_.size()); }
  /// λ_i for 0-based i; 0 past the length.
  [[nodiscard]] int part(int i) const noexcept {
    return i < length() ? parts_[static_cast<std::size_t>(i)] : 0;
  }
  /// μ ⊆ λ as Young diagrams.
  [[nodiscard]] bool contains(const Partition& mu) const noexcept;
  /// "+"-joined parts; ∅ is the empty string.
  [[nodiscard]] std::string to_string() const;

  friend bool operator==(const Partition&, const Partition&) = default;

 private:
  std::vector<int> parts_;
  int size_ = 0;
};

/// Ordering by size, then ascending lexicographic parts.
[[nodiscard]] bool partition_less(const Partition& a, const Partition& b) noexcept;

/// All partitions with |λ| ≤ N_max in frozen (size, lex) order.
class PartitionSpace {
 public:
  explicit PartitionSpace(int n_max);

  [[nodiscard]] int n_max() const noexcept { return n_max_; }
  [[nodiscard]] Eigen::Index size() const noexcept { return static_cast<Eigen::Index>(parts_.size()); }
  [[nodiscard]] const Partition& at(Eigen::Index i) const { return parts_.at(static_cast<std::size_t>(i)); }
  [[nodiscard]] const std::vector<Partition>& partitions() const noexcept { return parts_; }
  [[nodiscard]] Eigen::Index index_of(const Partition& p) const;

  /// Indices with |λ| ≤ N_max - margin.
  [[nodiscard]] std::vector<Eigen::Index> protected_block(int margin) const;

 private:
  int n_max_;
  std::vector<Partition> parts_;
};

/// s_{λ/μ}(ex_γ) by Jacobi–Trudi with h_k = γ^k/k!; 0 unless μ ⊆ λ.
[[nodiscard]] double skew_schur_ex(const Partition& lambda, const Partition& mu, double gamma);

/// Matrix S(λ, κ) = s_{λ/κ}(ex_γ) over the space.
[[nodiscard]] linalg::Matrix skew_schur_table(const PartitionSpace& space, double gamma);

struct TransitionMatrix {
  int n_max;
  double theta;
  double t;
  linalg::Matrix entries;     ///< ⟨T^θ_t v_μ, v_λ⟩, exactly symmetric
  linalg::Vector dropped;     ///< Σ_{|ν| > N_max} T_t(λ,ν)² per row
};

[[nodiscard]] TransitionMatrix transition_matrix(const PartitionSpace& space, double theta, double t);

/**
 * @brief Bound on |(T_t T_s - T_{t+s})(λ,μ)| over the protected block.
 *
 * Cauchy–Schwarz over the dropped intermediate partitions:
 * √(dropped_t(λ)) √(dropped_s(μ)), each padded by roundoff.
 */
[[nodiscard]] double tail_bound(const TransitionMatrix& a, const TransitionMatrix& b,
                                const PartitionSpace& space, int margin);

struct SemigroupReport {
  double residual;
  double bound;
};

[[nodiscard]] SemigroupReport semigroup_check(const PartitionSpace& space, double theta, double t,
                                              double s, int margin);

struct VertexReport {
  double z;                      ///< e^{γγ'}
  double commutation_residual;   ///< Γ₊Γ₋ - Z Γ₋Γ₊ on the protected block
  double energy_residual_plus;   ///< Γ₊(ρ)u^H - u^H Γ₊(uρ)
  double energy_residual_minus;  ///< Γ₋(ρ)u^H - u^H Γ₋(u⁻¹ρ)
  Eigen::Index protected_size;
};

/// Truncated vertex operators Γ₊(ex_γ) (lowering) and Γ₋(ex_γ') (raising); u = e^{-t}.
[[nodiscard]] VertexReport vertex_identity_check(const PartitionSpace& space, double gamma,
                                                 double gamma_prime, double u, int margin);

/**
 * @brief Periodic law of partitions at grid times 0 ≤ t₁ ≤ … ≤ t_n ≤ β.
 *
 * Transfers T^θ_{t_{i+1}-t_i} and the wrap T^θ_{β-(t_n-t_1)}.
 */
class CylindricLaw {
 public:
  CylindricLaw(const PartitionSpace& space, double theta, double beta, std::vector<double> grid);

  [[nodiscard]] double theta() const noexcept { return theta_; }
  [[nodiscard]] double beta() const noexcept { return beta_; }
  [[nodiscard]] const std::vector<double>& grid() const noexcept { return grid_; }
  [[nodiscard]] const CyclicChain& chain() const noexcept { return chain_; }

  [[nodiscard]] double probability(std::span<const Eigen::Index> path) const { return chain_.probability(path); }
  [[nodiscard]] linalg::Vector marginal(std::size_t i) const { return chain_.marginal(i); }

 private:
  double theta_;
  double beta_;
  std::vector<double> grid_;
  CyclicChain chain_;
};

/// Grid-indexed partition indices; deterministic per seed for any thread count.
[[nodiscard]] std::vector<std::vector<Eigen::Index>> sample_cylindric(const CylindricLaw& law,
                                                                      std::uint64_t seed,
                                                                      std::size_t count,
                                                                      int threads = 1);

/// Occupation of 𝔖(λ) = {λ_i - i + 1/2} on a half-integer window.
[[nodiscard]] dpp::Configuration maya_configuration(const Partition& lambda,
                                                    const linalg::SiteLabels& window);

/// Half-integers -n+1/2, ..., n-1/2.
[[nodiscard]] linalg::SiteLabels maya_window(int n);

}  // namespace kmsdpp::schur

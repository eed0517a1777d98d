// Copyright 2026 The kmsdpp Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "kmsdpp/linalg.hpp"
#include "kmsdpp/random.hpp"

namespace kmsdpp {

/**
 * @brief Periodic transfer-matrix law on a finite state space.
 *
 * With transfers T_1..T_n, a path (ω_1..ω_n) has weight
 * T_1(ω_1,ω_2) ⋯ T_{n-1}(ω_{n-1},ω_n) T_n(ω_n,ω_1) / Tr(T_1 ⋯ T_n).
 * Entries must be nonnegative; callers clamp roundoff first.
 */
class CyclicChain {
 public:
  explicit CyclicChain(std::vector<linalg::Matrix> transfers);

  [[nodiscard]] std::size_t length() const noexcept { return transfers_.size(); }
  [[nodiscard]] Eigen::Index states() const noexcept { return transfers_.front().rows(); }
  [[nodiscard]] double trace() const noexcept { return trace_; }
  [[nodiscard]] const linalg::Matrix& transfer(std::size_t i) const { return transfers_.at(i); }

  [[nodiscard]] double probability(std::span<const Eigen::Index> path) const;

  /// Law of ω_i.
  [[nodiscard]] linalg::Vector marginal(std::size_t i) const;

  /// ω_1 from its exact marginal, then ω_i ∝ T_{i-1}(ω_{i-1}, ω_i) R_i(ω_i, ω_1).
  [[nodiscard]] std::vector<Eigen::Index> sample(random::Stream& stream) const;

 private:
  std::vector<linalg::Matrix> transfers_;
  std::vector<linalg::Matrix> suffix_;  // R_i = T_i ⋯ T_n
  double trace_;
};

}  // namespace kmsdpp

// Copyright 2026 The kmsdpp Authors
// SPDX-License-Identifier: Apache-2.0

#include "kmsdpp/schur.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace kmsdpp::schur {

using linalg::Matrix;
using linalg::Vector;

Partition::Partition(std::vector<int> parts) : parts_(std::move(parts)) {
  while (!parts_.empty() && parts_.back() == 0) parts_.pop_back();
  for (std::size_t i = 0; i < parts_.size(); ++i) {
    if (parts_[i] <= 0) throw PreconditionError("Partition: parts must be positive");
    if (i > 0 && parts_[i] > parts_[i - 1]) throw PreconditionError("Partition: parts must be weakly decreasing");
    size_ += parts_[i];
  }
}

bool Partition::contains(const Partition& mu) const noexcept {
  if (mu.length() > length()) return false;
  for (int i = 0; i < mu.length(); ++i) {
    if (mu.part(i) > part(i)) return false;
  }
  return true;
}

std::string Partition::to_string() const {
  std::string s;
  for (std::size_t i = 0; i < parts_.size(); ++i) {
    if (i > 0) s += '+';
    s += std::to_string(parts_[i]);
  }
  return s;
}

bool partition_less(const Partition& a, const Partition& b) noexcept {
  if (a.size() != b.size()) return a.size() < b.size();
  return std::lexicographical_compare(a.parts().begin(), a.parts().end(), b.parts().begin(), b.parts().end());
}

namespace {

void partitions_of(int n, int max_part, std::vector<int>& prefix, std::vector<Partition>& out) {
  if (n == 0) {
    out.emplace_back(prefix);
    return;
  }
  for (int p = std::min(n, max_part); p >= 1; --p) {
    prefix.push_back(p);
    partitions_of(n - p, p, prefix, out);
    prefix.pop_back();
  }
}

}  // namespace

PartitionSpace::PartitionSpace(int n_max) : n_max_(n_max) {
  if (n_max < 0) throw PreconditionError("PartitionSpace: N_max must be nonnegative");
  if (n_max > 40) throw SizeError("PartitionSpace: N_max above 40 is outside the dense design");
  for (int n = 0; n <= n_max; ++n) {
    std::vector<Partition> level;
    std::vector<int> prefix;
    partitions_of(n, n, prefix, level);
    std::sort(level.begin(), level.end(), partition_less);
    parts_.insert(parts_.end(), level.begin(), level.end());
  }
}

Eigen::Index PartitionSpace::index_of(const Partition& p) const {
  const auto it = std::lower_bound(parts_.begin(), parts_.end(), p, partition_less);
  if (it == parts_.end() || !(*it == p)) {
    throw PreconditionError("partition (" + p.to_string() + ") is not in the truncated space");
  }
  return static_cast<Eigen::Index>(it - parts_.begin());
}

std::vector<Eigen::Index> PartitionSpace::protected_block(int margin) const {
  std::vector<Eigen::Index> out;
  for (Eigen::Index i = 0; i < size(); ++i) {
    if (at(i).size() <= n_max_ - margin) out.push_back(i);
  }
  return out;
}

double skew_schur_ex(const Partition& lambda, const Partition& mu, double gamma) {
  if (!lambda.contains(mu)) return 0.0;
  const int k = lambda.size() - mu.size();
  if (k == 0) return 1.0;
  if (gamma == 0.0) return 0.0;
  // γ^k factors out of every term, leaving det[1/(λ_i - μ_j - i + j)!].
  const int n = lambda.length();
  Matrix h(n, n);
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      const int d = lambda.part(i) - mu.part(j) - i + j;
      h(i, j) = d < 0 ? 0.0 : std::exp(-std::lgamma(d + 1.0));
    }
  }
  return linalg::determinant(h) * std::pow(gamma, k);
}

Matrix skew_schur_table(const PartitionSpace& space, double gamma) {
  const Eigen::Index n = space.size();
  Matrix s = Matrix::Zero(n, n);
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = 0; j <= i; ++j) s(i, j) = skew_schur_ex(space.at(i), space.at(j), gamma);
  }
  return s;
}

namespace {

Matrix transition_entries(const PartitionSpace& space, double theta, double t) {
  const Eigen::Index n = space.size();
  const double gamma = theta * -std::expm1(-t);
  const double c = std::exp(theta * theta * std::expm1(-t));
  const Matrix s = skew_schur_table(space, gamma);
  Vector d(n);
  for (Eigen::Index k = 0; k < n; ++k) d(k) = std::exp(-t * space.at(k).size());
  // Explicit loop keeps (λ,μ) and (μ,λ) bit-identical.
  Matrix out(n, n);
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = 0; j <= i; ++j) {
      double acc = 0.0;
      for (Eigen::Index k = 0; k <= j; ++k) acc += d(k) * (s(i, k) * s(j, k));
      out(i, j) = out(j, i) = c * acc;
    }
  }
  return out;
}

}  // namespace

TransitionMatrix transition_matrix(const PartitionSpace& space, double theta, double t) {
  if (!(theta >= 0.0) || !(t >= 0.0) || !std::isfinite(theta) || !std::isfinite(t)) {
    throw PreconditionError("transition_matrix: need theta >= 0 and t >= 0");
  }
  TransitionMatrix out{space.n_max(), theta, t, transition_entries(space, theta, t), Vector()};
  // T_t T_t = T_{2t} on the full space, so the missing row mass is exact.
  const Matrix doubled = transition_entries(space, theta, 2.0 * t);
  out.dropped = (doubled.diagonal() - out.entries.rowwise().squaredNorm()).cwiseMax(0.0);
  return out;
}

namespace {

constexpr double kRoundoffFloor = 1e-15;

}  // namespace

double tail_bound(const TransitionMatrix& a, const TransitionMatrix& b, const PartitionSpace& space, int margin) {
  double da = 0.0;
  double db = 0.0;
  for (auto i : space.protected_block(margin)) {
    da = std::max(da, a.dropped(i));
    db = std::max(db, b.dropped(i));
  }
  return std::sqrt(da + kRoundoffFloor) * std::sqrt(db + kRoundoffFloor);
}

SemigroupReport semigroup_check(const PartitionSpace& space, double theta, double t, double s, int margin) {
  const TransitionMatrix a = transition_matrix(space, theta, t);
  const TransitionMatrix b = transition_matrix(space, theta, s);
  const TransitionMatrix ab = transition_matrix(space, theta, t + s);
  const Matrix product = a.entries * b.entries;
  double residual = 0.0;
  const auto block = space.protected_block(margin);
  for (auto i : block) {
    for (auto j : block) residual = std::max(residual, std::abs(product(i, j) - ab.entries(i, j)));
  }
  return {residual, tail_bound(a, b, space, margin)};
}

VertexReport vertex_identity_check(const PartitionSpace& space, double gamma, double gamma_prime, double u,
                                   int margin) {
  if (!(gamma >= 0.0) || !(gamma_prime >= 0.0) || !(u > 0.0)) {
    throw PreconditionError("vertex_identity_check: need gamma, gamma' >= 0 and u > 0");
  }
  // S(λ,μ) = s_{λ/μ}: Γ₋ is S, Γ₊ is Sᵀ.
  const Matrix plus = skew_schur_table(space, gamma).transpose();
  const Matrix minus = skew_schur_table(space, gamma_prime);
  const double z = std::exp(gamma * gamma_prime);
  Vector energy(space.size());
  for (Eigen::Index i = 0; i < space.size(); ++i) energy(i) = std::pow(u, space.at(i).size());

  const Matrix lhs = plus * minus;
  const Matrix rhs = z * (minus * plus);
  const Matrix plus_u = skew_schur_table(space, u * gamma).transpose();
  const Matrix minus_u = skew_schur_table(space, gamma_prime / u);
  const Matrix e_plus = plus * energy.asDiagonal() - energy.asDiagonal() * plus_u;
  const Matrix e_minus = minus * energy.asDiagonal() - energy.asDiagonal() * minus_u;

  VertexReport report{z, 0.0, 0.0, 0.0, 0};
  const auto block = space.protected_block(margin);
  report.protected_size = static_cast<Eigen::Index>(block.size());
  for (auto i : block) {
    for (auto j : block) {
      report.commutation_residual = std::max(report.commutation_residual, std::abs(lhs(i, j) - rhs(i, j)));
      report.energy_residual_plus = std::max(report.energy_residual_plus, std::abs(e_plus(i, j)));
      report.energy_residual_minus = std::max(report.energy_residual_minus, std::abs(e_minus(i, j)));
    }
  }
  return report;
}

namespace {

std::vector<double> cylindric_grid(std::vector<double> grid, double beta) {
  if (!(beta > 0.0) || !std::isfinite(beta)) throw PreconditionError("CylindricLaw: beta must be positive and finite");
  if (grid.empty()) throw PreconditionError("CylindricLaw: grid must be nonempty");
  for (std::size_t i = 0; i < grid.size(); ++i) {
    if (grid[i] < 0.0 || grid[i] > beta) throw DomainError("CylindricLaw: grid time outside [0, beta]");
    if (i > 0 && grid[i] < grid[i - 1]) throw PreconditionError("CylindricLaw: grid must be nondecreasing");
  }
  return grid;
}

CyclicChain cylindric_chain(const PartitionSpace& space, double theta, double beta, const std::vector<double>& grid) {
  std::vector<Matrix> transfers;
  for (std::size_t i = 0; i + 1 < grid.size(); ++i) {
    transfers.push_back(transition_matrix(space, theta, grid[i + 1] - grid[i]).entries);
  }
  transfers.push_back(transition_matrix(space, theta, std::max(beta - (grid.back() - grid.front()), 0.0)).entries);
  try {
    return CyclicChain(std::move(transfers));
  } catch (const NumericalError& e) {
    throw NumericalError("CylindricLaw: trace of the truncated transfer vanished; raise N_max or lower beta",
                         e.residual());
  }
}

}  // namespace

CylindricLaw::CylindricLaw(const PartitionSpace& space, double theta, double beta, std::vector<double> grid)
    : theta_(theta),
      beta_(beta),
      grid_(cylindric_grid(std::move(grid), beta)),
      chain_(cylindric_chain(space, theta, beta, grid_)) {}

std::vector<std::vector<Eigen::Index>> sample_cylindric(const CylindricLaw& law, std::uint64_t seed,
                                                        std::size_t count, int threads) {
  std::vector<std::vector<Eigen::Index>> out(count);
  random::for_each_chunk(count, threads, [&](std::size_t chunk, std::size_t begin, std::size_t end) {
    random::Stream stream(seed, chunk);
    for (std::size_t i = begin; i < end; ++i) out[i] = law.chain().sample(stream);
  });
  return out;
}

linalg::SiteLabels maya_window(int n) {
  if (n < 1) throw PreconditionError("maya_window: n must be positive");
  linalg::SiteLabels w;
  for (int k = -n; k < n; ++k) w.push_back(k + 0.5);
  return w;
}

dpp::Configuration maya_configuration(const Partition& lambda, const linalg::SiteLabels& window) {
  if (window.empty()) throw PreconditionError("maya_configuration: empty window");
  const double need_lo = -lambda.length() - 0.5;
  const double need_hi = lambda.part(0) - 0.5;
  if (window.front() > need_lo || window.back() < need_hi) {
    throw PreconditionError("maya_configuration: window must cover [" + std::to_string(need_lo) + ", " +
                            std::to_string(need_hi) + "]");
  }
  std::vector<bool> occ(window.size(), false);
  for (std::size_t k = 0; k < window.size(); ++k) {
    const double x = window[k];
    if (std::abs(x - std::floor(x) - 0.5) > 0.0) throw PreconditionError("maya_configuration: window sites must be half-integers");
    // x = λ_i - i + 1/2 for some 1-based i; below the diagram every site is occupied.
    const auto i = static_cast<int>(std::lround(-x + 0.5));  // candidate i when λ_i = 0
    if (x < 0.0 && i > lambda.length()) {
      occ[k] = true;
      continue;
    }
    for (int r = 1; r <= lambda.length(); ++r) {
      if (lambda.part(r - 1) - r + 0.5 == x) {
        occ[k] = true;
        break;
      }
    }
  }
  return dpp::Configuration(window, std::move(occ));
}

}  // namespace kmsdpp::schur

// Copyright 2026 The kmsdpp Authors
// SPDX-License-Identifier: Apache-2.0

#include "kmsdpp/dpp.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "kmsdpp/random.hpp"

namespace kmsdpp::dpp {

using linalg::Matrix;
using linalg::Vector;

namespace {

Eigen::Index site_index(const linalg::SiteLabels& window, double site) {
  const auto it = std::lower_bound(window.begin(), window.end(), site);
  if (it == window.end() || *it != site) {
    throw PreconditionError("site " + std::to_string(site) + " is not in the window");
  }
  return static_cast<Eigen::Index>(it - window.begin());
}

bool has_repeat(std::span<const double> sites) {
  std::vector<double> s(sites.begin(), sites.end());
  std::sort(s.begin(), s.end());
  return std::adjacent_find(s.begin(), s.end()) != s.end();
}

}  // namespace

Configuration::Configuration(linalg::SiteLabels window, std::vector<bool> occupied)
    : window_(std::move(window)), occupied_(std::move(occupied)) {
  if (occupied_.size() != window_.size()) throw PreconditionError("Configuration: size mismatch");
}

Configuration::Configuration(linalg::SiteLabels window, std::span<const Eigen::Index> occupied_indices)
    : window_(std::move(window)), occupied_(window_.size(), false) {
  for (auto i : occupied_indices) {
    if (i < 0 || static_cast<std::size_t>(i) >= window_.size()) {
      throw PreconditionError("Configuration: index outside the window");
    }
    occupied_[static_cast<std::size_t>(i)] = true;
  }
}

std::size_t Configuration::count() const noexcept {
  return static_cast<std::size_t>(std::count(occupied_.begin(), occupied_.end(), true));
}

bool Configuration::contains(double site) const {
  return occupied_[static_cast<std::size_t>(site_index(window_, site))];
}

std::vector<Eigen::Index> Configuration::indices() const {
  std::vector<Eigen::Index> out;
  for (std::size_t i = 0; i < occupied_.size(); ++i) {
    if (occupied_[i]) out.push_back(static_cast<Eigen::Index>(i));
  }
  return out;
}

std::string Configuration::bitstring() const {
  std::string s(occupied_.size(), '0');
  for (std::size_t i = 0; i < occupied_.size(); ++i) {
    if (occupied_[i]) s[i] = '1';
  }
  return s;
}

namespace {

// Projection DPP with orthonormal columns v: draw sites one at a time.
std::vector<Eigen::Index> sample_projection(Matrix v, random::Stream& stream) {
  const Eigen::Index m = v.rows();
  std::vector<Eigen::Index> picked;
  std::vector<double> w(static_cast<std::size_t>(m));
  while (v.cols() > 0) {
    const Eigen::Index k = v.cols();
    double total = 0.0;
    for (Eigen::Index x = 0; x < m; ++x) {
      w[static_cast<std::size_t>(x)] = v.row(x).squaredNorm();
      total += w[static_cast<std::size_t>(x)];
    }
    const auto x = static_cast<Eigen::Index>(stream.categorical(w, total));
    picked.push_back(x);
    if (k == 1) break;
    // Eliminate δ_x from the span, then restore orthonormality.
    Eigen::Index j = 0;
    v.row(x).cwiseAbs().maxCoeff(&j);
    const Vector pivot = v.col(j) / v(x, j);
    Matrix rest(m, k - 1);
    for (Eigen::Index c = 0, o = 0; c < k; ++c) {
      if (c == j) continue;
      rest.col(o++) = v.col(c) - v(x, c) * pivot;
    }
    Eigen::HouseholderQR<Matrix> qr(rest);
    v = qr.householderQ() * Matrix::Identity(m, k - 1);
    v.row(x).setZero();
  }
  std::sort(picked.begin(), picked.end());
  return picked;
}

}  // namespace

std::vector<Configuration> sample_dpp(const kernels::CorrelationKernel& kernel, std::uint64_t seed,
                                      std::size_t count, int threads) {
  Eigen::SelfAdjointEigenSolver<Matrix> solver(kernel.matrix());
  if (solver.info() != Eigen::Success) throw NumericalError("sample_dpp: eigensolver failed", 0.0);
  Vector lambda = solver.eigenvalues();
  const bool projection = kernel.provenance() == kernels::Provenance::Projection ||
                          kernel.provenance() == kernels::Provenance::ChristoffelDarboux;
  for (Eigen::Index n = 0; n < lambda.size(); ++n) {
    if (lambda(n) < -1e-8 || lambda(n) > 1.0 + 1e-8) {
      throw ValidityError("sample_dpp: kernel eigenvalue " + std::to_string(lambda(n)) + " outside [0,1]");
    }
    lambda(n) = projection ? std::round(std::clamp(lambda(n), 0.0, 1.0)) : std::clamp(lambda(n), 0.0, 1.0);
  }
  const Matrix& vectors = solver.eigenvectors();

  std::vector<Configuration> out(count, Configuration(kernel.sites(), std::vector<bool>(kernel.sites().size())));
  random::for_each_chunk(count, threads, [&](std::size_t chunk, std::size_t begin, std::size_t end) {
    random::Stream stream(seed, chunk);
    for (std::size_t i = begin; i < end; ++i) {
      std::vector<Eigen::Index> keep;
      for (Eigen::Index n = 0; n < lambda.size(); ++n) {
        // Exact 0 and 1 consume no randomness; projection draws are deterministic in size.
        if (lambda(n) == 1.0 || (lambda(n) > 0.0 && stream.uniform() < lambda(n))) keep.push_back(n);
      }
      Matrix v(vectors.rows(), static_cast<Eigen::Index>(keep.size()));
      for (std::size_t c = 0; c < keep.size(); ++c) v.col(static_cast<Eigen::Index>(c)) = vectors.col(keep[c]);
      const auto picked = sample_projection(std::move(v), stream);
      out[i] = Configuration(kernel.sites(), picked);
    }
  });
  return out;
}

namespace {

double binomial(Eigen::Index n, Eigen::Index k) {
  if (k < 0 || k > n) return 0.0;
  double b = 1.0;
  for (Eigen::Index i = 1; i <= k; ++i) b = b * static_cast<double>(n - k + i) / static_cast<double>(i);
  return b;
}

// log of Π w(x_i) Π_{i<j} (a_i - a_j)²
double op_log_weight(std::span<const Eigen::Index> idx, const Vector& log_w, const Vector& a) {
  double s = 0.0;
  for (std::size_t i = 0; i < idx.size(); ++i) {
    s += log_w(idx[i]);
    for (std::size_t j = i + 1; j < idx.size(); ++j) s += 2.0 * std::log(std::abs(a(idx[i]) - a(idx[j])));
  }
  return s;
}

template <typename Fn>
void for_each_subset(Eigen::Index m, Eigen::Index k, Fn&& fn) {
  std::vector<Eigen::Index> c(static_cast<std::size_t>(k));
  std::iota(c.begin(), c.end(), Eigen::Index{0});
  if (k > m) return;
  while (true) {
    fn(std::span<const Eigen::Index>(c));
    Eigen::Index i = k - 1;
    while (i >= 0 && c[static_cast<std::size_t>(i)] == m - k + i) --i;
    if (i < 0) return;
    ++c[static_cast<std::size_t>(i)];
    for (Eigen::Index j = i + 1; j < k; ++j) c[static_cast<std::size_t>(j)] = c[static_cast<std::size_t>(j - 1)] + 1;
  }
}

struct OpTables {
  Vector log_w;
  Vector a;
};

OpTables op_tables(const OpEnsemble& e) {
  if (e.N < 0) throw PreconditionError("op-ensemble: N must be nonnegative");
  const Eigen::Index m = e.window.size();
  if (binomial(m, e.N) > kMaxSubsets) {
    throw SizeError("op-ensemble: binomial(" + std::to_string(m) + ", " + std::to_string(e.N) +
                    ") exceeds the exhaustive-normalizer cap");
  }
  OpTables t{Vector(m), Vector(m)};
  for (Eigen::Index i = 0; i < m; ++i) {
    const double x = e.window.sites()[static_cast<std::size_t>(i)];
    t.log_w(i) = orthopoly::log_weight(e.family, x);
    t.a(i) = orthopoly::abscissa(e.family, x);
  }
  return t;
}

double l_probability(const LEnsemble& e, const Configuration& omega) {
  if (omega.window() != e.l.sites()) throw PreconditionError("L-ensemble: configuration window mismatch");
  const Eigen::Index m = e.l.dim();
  const double z = linalg::determinant(Matrix::Identity(m, m) + e.l.matrix());
  if (!(z > 0.0)) throw ValidityError("L-ensemble: det(1+L) is not positive");
  const auto idx = omega.indices();
  Matrix sub(static_cast<Eigen::Index>(idx.size()), static_cast<Eigen::Index>(idx.size()));
  for (std::size_t i = 0; i < idx.size(); ++i) {
    for (std::size_t j = 0; j < idx.size(); ++j) sub(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = e.l(idx[i], idx[j]);
  }
  return linalg::determinant(sub) / z;
}

}  // namespace

double ensemble_probability(const Ensemble& ensemble, const Configuration& omega) {
  if (const auto* l = std::get_if<LEnsemble>(&ensemble)) return l_probability(*l, omega);
  const auto& e = std::get<OpEnsemble>(ensemble);
  if (omega.window() != e.window.sites()) throw PreconditionError("op-ensemble: configuration window mismatch");
  if (omega.count() != static_cast<std::size_t>(e.N)) return 0.0;
  const OpTables t = op_tables(e);
  const auto idx = omega.indices();
  const double target = op_log_weight(idx, t.log_w, t.a);
  // Normalizer by exhaustive summation, scaled by the target weight.
  double z = 0.0;
  for_each_subset(e.window.size(), e.N, [&](std::span<const Eigen::Index> c) {
    z += std::exp(op_log_weight(c, t.log_w, t.a) - target);
  });
  return 1.0 / z;
}

ExplicitLaw::ExplicitLaw(linalg::SiteLabels window, std::vector<Atom> atoms)
    : window_(std::move(window)), atoms_(std::move(atoms)) {
  for (const auto& a : atoms_) {
    if (!(a.probability >= 0.0)) throw ValidityError("ExplicitLaw: negative or NaN probability");
    for (auto i : a.occupied) {
      if (i < 0 || static_cast<std::size_t>(i) >= window_.size()) {
        throw PreconditionError("ExplicitLaw: atom index outside the window");
      }
    }
  }
}

double ExplicitLaw::total() const noexcept {
  double s = 0.0;
  for (const auto& a : atoms_) s += a.probability;
  return s;
}

ExplicitLaw explicit_law(const LEnsemble& ensemble) {
  const Eigen::Index m = ensemble.l.dim();
  if (m > 14) throw SizeError("explicit_law: L-ensemble window exceeds 14 sites");
  const double z = linalg::determinant(Matrix::Identity(m, m) + ensemble.l.matrix());
  if (!(z > 0.0)) throw ValidityError("L-ensemble: det(1+L) is not positive");
  std::vector<ExplicitLaw::Atom> atoms;
  for (std::uint32_t mask = 0; mask < (1U << m); ++mask) {
    std::vector<Eigen::Index> idx;
    for (Eigen::Index x = 0; x < m; ++x) {
      if ((mask >> x) & 1U) idx.push_back(x);
    }
    Matrix sub(static_cast<Eigen::Index>(idx.size()), static_cast<Eigen::Index>(idx.size()));
    for (std::size_t i = 0; i < idx.size(); ++i) {
      for (std::size_t j = 0; j < idx.size(); ++j) sub(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = ensemble.l(idx[i], idx[j]);
    }
    const double p = linalg::determinant(sub) / z;
    if (p < -1e-12) throw ValidityError("L-ensemble: negative principal minor");
    atoms.push_back({std::move(idx), std::max(p, 0.0)});
  }
  return ExplicitLaw(ensemble.l.sites(), std::move(atoms));
}

ExplicitLaw explicit_law(const OpEnsemble& ensemble) {
  const OpTables t = op_tables(ensemble);
  std::vector<ExplicitLaw::Atom> atoms;
  std::vector<double> logs;
  for_each_subset(ensemble.window.size(), ensemble.N, [&](std::span<const Eigen::Index> c) {
    atoms.push_back({std::vector<Eigen::Index>(c.begin(), c.end()), 0.0});
    logs.push_back(op_log_weight(c, t.log_w, t.a));
  });
  const double top = logs.empty() ? 0.0 : *std::max_element(logs.begin(), logs.end());
  double z = 0.0;
  for (std::size_t i = 0; i < atoms.size(); ++i) {
    atoms[i].probability = std::exp(logs[i] - top);
    z += atoms[i].probability;
  }
  for (auto& a : atoms) a.probability /= z;
  return ExplicitLaw(ensemble.window.sites(), std::move(atoms));
}

double enumerate_correlations(const ExplicitLaw& law, std::span<const double> sites) {
  if (has_repeat(sites)) return 0.0;
  std::vector<Eigen::Index> want;
  for (double s : sites) want.push_back(site_index(law.window(), s));
  std::sort(want.begin(), want.end());
  double sum = 0.0;
  for (const auto& a : law.atoms()) {
    if (std::includes(a.occupied.begin(), a.occupied.end(), want.begin(), want.end())) sum += a.probability;
  }
  return sum;
}

CorrelationEstimate estimate_correlations(std::span<const Configuration> samples, std::span<const double> sites) {
  if (samples.empty()) throw PreconditionError("estimate_correlations: no samples");
  const std::size_t n = samples.size();
  if (has_repeat(sites)) return {0.0, 0.0, n};
  std::vector<Eigen::Index> idx;
  for (double s : sites) idx.push_back(site_index(samples.front().window(), s));
  std::size_t hits = 0;
  for (const auto& c : samples) {
    bool all = true;
    for (auto i : idx) all = all && c.occupied()[static_cast<std::size_t>(i)];
    hits += all ? 1 : 0;
  }
  const double p = static_cast<double>(hits) / static_cast<double>(n);
  return {p, std::sqrt(p * (1.0 - p) / static_cast<double>(n)), n};
}

double kernel_correlation(const kernels::CorrelationKernel& kernel, std::span<const double> sites) {
  if (has_repeat(sites)) return 0.0;
  const auto n = static_cast<Eigen::Index>(sites.size());
  std::vector<Eigen::Index> idx;
  for (double s : sites) idx.push_back(site_index(kernel.sites(), s));
  Matrix sub(n, n);
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = 0; j < n; ++j) sub(i, j) = kernel(idx[static_cast<std::size_t>(i)], idx[static_cast<std::size_t>(j)]);
  }
  return linalg::determinant(sub);
}

}  // namespace kmsdpp::dpp

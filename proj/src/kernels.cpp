// Copyright 2026 The kmsdpp Authors
// SPDX-License-Identifier: Apache-2.0

#include "kmsdpp/kernels.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace kmsdpp::kernels {

using linalg::Matrix;
using linalg::Vector;

std::string provenance_name(Provenance p) {
  switch (p) {
    case Provenance::Fermi: return "fermi";
    case Provenance::Projection: return "projection";
    case Provenance::ChristoffelDarboux: return "cd";
    case Provenance::Integral: return "integral";
    case Provenance::Custom: return "custom";
  }
  return "custom";
}

CorrelationKernel::CorrelationKernel(Matrix values, linalg::SiteLabels sites, Provenance provenance)
    : values_(std::move(values)), sites_(std::move(sites)), provenance_(provenance) {
  if (values_.rows() != values_.cols() || values_.rows() == 0) {
    throw PreconditionError("CorrelationKernel: values must be square and nonempty");
  }
  if (static_cast<Eigen::Index>(sites_.size()) != values_.rows()) {
    throw PreconditionError("CorrelationKernel: site count does not match dimension");
  }
  if (!values_.allFinite()) throw NumericalError("CorrelationKernel: non-finite entry", 0.0);
  const double asym = (values_ - values_.transpose()).cwiseAbs().maxCoeff();
  if (asym > 1e-10) throw ValidityError("CorrelationKernel: asymmetry " + std::to_string(asym));
  values_ = (0.5 * (values_ + values_.transpose())).eval();
  Eigen::SelfAdjointEigenSolver<Matrix> solver(values_, Eigen::EigenvaluesOnly);
  const double lo = solver.eigenvalues().minCoeff();
  const double hi = solver.eigenvalues().maxCoeff();
  // Quadrature-built kernels carry a looser spectral tolerance.
  const double tol = provenance_ == Provenance::Integral ? 1e-6 : 1e-8;
  if (lo < -tol || hi > 1.0 + tol) {
    std::ostringstream os;
    os << "CorrelationKernel: spectrum [" << lo << ", " << hi << "] leaves [0,1]";
    throw ValidityError(os.str());
  }
  if (provenance_ == Provenance::Projection || provenance_ == Provenance::ChristoffelDarboux) {
    const double idem = (values_ * values_ - values_).cwiseAbs().maxCoeff();
    if (idem > 1e-8) throw NumericalError("CorrelationKernel: projection defect", idem);
  }
}

CorrelationKernel fermi_kernel(const linalg::SymmetricOperator& h, double beta) {
  if (!(beta > 0.0) || !std::isfinite(beta)) {
    throw PreconditionError("fermi_kernel: beta must be positive and finite");
  }
  const auto dec = linalg::eig_sym(h);
  const auto k = linalg::apply_spectral_function(dec, linalg::FermiFunction{beta, 0.0});
  return CorrelationKernel(k.matrix(), h.sites(), Provenance::Fermi);
}

namespace {

void require_gap(const linalg::SpectralDecomposition& dec) {
  const auto flagged = linalg::near_zero_eigenvalues(dec);
  if (!flagged.empty()) {
    std::ostringstream os;
    os << "spectrum touches 0 within " << linalg::zero_tolerance(dec) << ":";
    for (double v : flagged) os << ' ' << v;
    throw GapError(os.str());
  }
}

}  // namespace

CorrelationKernel negative_projection(const linalg::SymmetricOperator& h) {
  const auto dec = linalg::eig_sym(h);
  require_gap(dec);
  const auto k = linalg::apply_spectral_function(dec, linalg::NegativeIndicator{0.0});
  return CorrelationKernel(k.matrix(), h.sites(), Provenance::Projection);
}

CorrelationKernel cd_kernel(const orthopoly::PolynomialTable& table) {
  const Matrix& p = table.values;
  return CorrelationKernel(p.transpose() * p, table.window.sites(),
                           Provenance::ChristoffelDarboux);
}

SpaceTimeKernel::SpaceTimeKernel(Vector eigenvalues, Matrix eigenvectors, linalg::SiteLabels sites,
                                 double beta, std::vector<bool> occupied)
    : eigenvalues_(std::move(eigenvalues)),
      eigenvectors_(std::move(eigenvectors)),
      sites_(std::move(sites)),
      beta_(beta),
      occupied_(std::move(occupied)) {
  if (!(beta_ > 0.0)) throw PreconditionError("SpaceTimeKernel: beta must be positive");
  if (eigenvectors_.cols() != eigenvalues_.size() ||
      eigenvectors_.rows() != static_cast<Eigen::Index>(sites_.size())) {
    throw PreconditionError("SpaceTimeKernel: spectral data shape mismatch");
  }
  if (std::isinf(beta_) && occupied_.empty()) {
    occupied_.resize(static_cast<std::size_t>(eigenvalues_.size()));
    for (Eigen::Index n = 0; n < eigenvalues_.size(); ++n) {
      occupied_[static_cast<std::size_t>(n)] = eigenvalues_(n) < 0.0;
    }
  }
  if (!occupied_.empty() && static_cast<Eigen::Index>(occupied_.size()) != eigenvalues_.size()) {
    throw PreconditionError("SpaceTimeKernel: occupation mask size mismatch");
  }
}

Eigen::Index SpaceTimeKernel::index_of(double site) const {
  const auto it = std::lower_bound(sites_.begin(), sites_.end(), site);
  if (it == sites_.end() || *it != site) {
    throw PreconditionError("site " + std::to_string(site) + " is not in the window");
  }
  return static_cast<Eigen::Index>(it - sites_.begin());
}

void SpaceTimeKernel::check_time(double t) const {
  if (!std::isfinite(t)) throw DomainError("time must be finite");
  if (std::isfinite(beta_) && std::abs(t) > 0.5 * beta_ * (1.0 + 1e-12)) {
    throw DomainError("time " + std::to_string(t) + " outside [-beta/2, beta/2]");
  }
}

Vector SpaceTimeKernel::mode_factors(double t, double s) const {
  const Eigen::Index n = eigenvalues_.size();
  Vector f(n);
  if (t <= s) {
    const double u = s - t;
    if (u > beta_ * (1.0 + 1e-12)) throw DomainError("|t - s| exceeds beta");
    for (Eigen::Index i = 0; i < n; ++i) {
      const double lam = eigenvalues_(i);
      if (std::isinf(beta_)) {
        f(i) = occupied_[static_cast<std::size_t>(i)] ? std::exp(u * lam) : 0.0;
      } else if (lam >= 0.0) {
        f(i) = std::exp((u - beta_) * lam) / (1.0 + std::exp(-beta_ * lam));
      } else {
        f(i) = std::exp(u * lam) / (1.0 + std::exp(beta_ * lam));
      }
    }
  } else {
    const double v = t - s;
    if (v > beta_ * (1.0 + 1e-12)) throw DomainError("|t - s| exceeds beta");
    for (Eigen::Index i = 0; i < n; ++i) {
      const double lam = eigenvalues_(i);
      if (std::isinf(beta_)) {
        f(i) = occupied_[static_cast<std::size_t>(i)] ? 0.0 : -std::exp(-v * lam);
      } else if (lam >= 0.0) {
        f(i) = -std::exp(-v * lam) / (1.0 + std::exp(-beta_ * lam));
      } else {
        f(i) = -std::exp((beta_ - v) * lam) / (1.0 + std::exp(beta_ * lam));
      }
    }
  }
  return f;
}

double SpaceTimeKernel::value(Eigen::Index x, double t, Eigen::Index y, double s) const {
  const Vector f = mode_factors(t, s);
  return (eigenvectors_.row(x).transpose().cwiseProduct(f)).dot(eigenvectors_.row(y).transpose());
}

double SpaceTimeKernel::evaluate(const SpaceTimePoint& p, const SpaceTimePoint& q) const {
  return value(index_of(p.site), p.time, index_of(q.site), q.time);
}

Matrix SpaceTimeKernel::matrix(double t, double s) const {
  const Vector f = mode_factors(t, s);
  return eigenvectors_ * f.asDiagonal() * eigenvectors_.transpose();
}

SpaceTimeKernel space_time_kernel(const linalg::SymmetricOperator& h, double beta) {
  auto dec = linalg::eig_sym(h);
  if (std::isinf(beta)) require_gap(dec);
  return SpaceTimeKernel(std::move(dec.eigenvalues), std::move(dec.eigenvectors), h.sites(), beta);
}

namespace {

Vector law_eigenvalues(const orthopoly::PolynomialTable& table, double mu) {
  Vector lam(table.N);
  for (int n = 0; n < table.N; ++n) {
    const auto m = orthopoly::eigenvalue_law(table.family, n);
    if (!m) {
      throw PreconditionError("op kernel: no eigenvalue law for " +
                              orthopoly::family_name(table.family));
    }
    lam(n) = -(*m + mu);
  }
  return lam;
}

}  // namespace

SpaceTimeKernel op_space_time_kernel(const orthopoly::PolynomialTable& table, double mu,
                                     double beta) {
  if (std::isinf(beta)) throw PreconditionError("op_space_time_kernel: beta must be finite");
  return SpaceTimeKernel(law_eigenvalues(table, mu), table.values.transpose(),
                         table.window.sites(), beta);
}

SpaceTimeKernel op_zero_temperature_kernel(const orthopoly::PolynomialTable& table, int N) {
  if (N < 0 || N > table.N) throw PreconditionError("op_zero_temperature_kernel: need N <= table.N");
  std::vector<bool> occupied(static_cast<std::size_t>(table.N), false);
  for (int n = 0; n < N; ++n) occupied[static_cast<std::size_t>(n)] = true;
  return SpaceTimeKernel(law_eigenvalues(table, 0.0), table.values.transpose(),
                         table.window.sites(), kInfinity, std::move(occupied));
}

Matrix correlation_matrix(const SpaceTimeKernel& kernel, std::span<const SpaceTimePoint> points) {
  const auto n = static_cast<Eigen::Index>(points.size());
  std::vector<Eigen::Index> idx(points.size());
  for (std::size_t i = 0; i < points.size(); ++i) {
    kernel.check_time(points[i].time);
    if (i > 0 && points[i].time < points[i - 1].time) {
      throw PreconditionError("dynamical_correlation: points must be sorted by time");
    }
    idx[i] = kernel.index_of(points[i].site);
  }
  Matrix r(n, n);
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = 0; j < n; ++j) {
      const auto& p = points[static_cast<std::size_t>(i)];
      const auto& q = points[static_cast<std::size_t>(j)];
      r(i, j) = kernel.value(idx[static_cast<std::size_t>(i)], p.time,
                             idx[static_cast<std::size_t>(j)], q.time);
    }
  }
  return r;
}

double dynamical_correlation(const SpaceTimeKernel& kernel, std::span<const SpaceTimePoint> points) {
  const Matrix r = correlation_matrix(kernel, points);
  for (std::size_t i = 0; i < points.size(); ++i) {
    for (std::size_t j = i + 1; j < points.size(); ++j) {
      if (points[i].site == points[j].site && points[i].time == points[j].time) return 0.0;
    }
  }
  return linalg::determinant(r);
}

}  // namespace kmsdpp::kernels

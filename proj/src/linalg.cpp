// Copyright 2026 The kmsdpp Authors
// SPDX-License-Identifier: Apache-2.0

#include "kmsdpp/linalg.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>
#include <type_traits>

namespace kmsdpp::linalg {

SiteLabels default_labels(Eigen::Index n) {
  SiteLabels labels(static_cast<std::size_t>(n));
  for (Eigen::Index i = 0; i < n; ++i) labels[static_cast<std::size_t>(i)] = static_cast<double>(i);
  return labels;
}

SymmetricOperator::SymmetricOperator(Matrix entries)
    : SymmetricOperator(entries, default_labels(entries.rows())) {}

SymmetricOperator::SymmetricOperator(Matrix entries, SiteLabels site_labels)
    : entries_(std::move(entries)), labels_(std::move(site_labels)) {
  if (entries_.rows() != entries_.cols() || entries_.rows() == 0) {
    throw PreconditionError("SymmetricOperator: matrix must be square and nonempty");
  }
  if (static_cast<Eigen::Index>(labels_.size()) != entries_.rows()) {
    throw PreconditionError("SymmetricOperator: label count does not match dimension");
  }
  if (!entries_.allFinite()) throw PreconditionError("SymmetricOperator: non-finite entry");
  for (std::size_t i = 1; i < labels_.size(); ++i) {
    if (!(labels_[i] > labels_[i - 1])) {
      throw PreconditionError("SymmetricOperator: site labels must be strictly increasing");
    }
  }
  const double scale = 1.0 + entries_.cwiseAbs().maxCoeff();
  const double asym = (entries_ - entries_.transpose()).cwiseAbs().maxCoeff();
  if (asym > 1e-12 * scale) {
    throw PreconditionError("SymmetricOperator: asymmetry " + std::to_string(asym));
  }
  entries_ = (0.5 * (entries_ + entries_.transpose())).eval();
}

Eigen::Index SymmetricOperator::index_of(double site) const {
  const auto it = std::lower_bound(labels_.begin(), labels_.end(), site);
  if (it == labels_.end() || *it != site) {
    throw PreconditionError("site " + std::to_string(site) + " is not in the window");
  }
  return static_cast<Eigen::Index>(it - labels_.begin());
}

SkewSymmetricMatrix::SkewSymmetricMatrix(Matrix entries) : entries_(std::move(entries)) {
  if (entries_.rows() != entries_.cols()) {
    throw PreconditionError("SkewSymmetricMatrix: matrix must be square");
  }
  if (entries_.size() > 0) {
    const double dev = (entries_ + entries_.transpose()).cwiseAbs().maxCoeff();
    if (dev > 1e-12) throw PreconditionError("SkewSymmetricMatrix: not skew-symmetric");
  }
  entries_ = (0.5 * (entries_ - entries_.transpose())).eval();
  entries_.diagonal().setZero();
}

SpectralDecomposition eig_sym(const SymmetricOperator& a) {
  Eigen::SelfAdjointEigenSolver<Matrix> solver(a.matrix());
  if (solver.info() != Eigen::Success) {
    throw NumericalError("eig_sym: eigensolver did not converge",
                         std::numeric_limits<double>::infinity());
  }
  SpectralDecomposition dec{solver.eigenvalues(), solver.eigenvectors(), a.sites()};
  for (Eigen::Index j = 0; j < dec.eigenvectors.cols(); ++j) {
    Eigen::Index arg = 0;
    dec.eigenvectors.col(j).cwiseAbs().maxCoeff(&arg);
    if (dec.eigenvectors(arg, j) < 0.0) dec.eigenvectors.col(j) *= -1.0;
  }
  return dec;
}

SpectralFunction make_spectral_function(std::string_view tag, double parameter, double shift) {
  if (tag == "exp") return ExpFunction{parameter, shift};
  if (tag == "fermi") {
    if (!(parameter > 0.0)) throw ConfigError("fermi: beta must be positive");
    return FermiFunction{parameter, shift};
  }
  if (tag == "indicator_negative") return NegativeIndicator{shift};
  throw ConfigError("unknown spectral function tag '" + std::string(tag) +
                    "' (expected exp, fermi, indicator_negative)");
}

double fermi(double beta, double lambda) noexcept {
  double value = 0.0;
  if (lambda >= 0.0) {
    const double e = std::exp(-beta * lambda);
    value = e / (1.0 + e);
  } else {
    value = 1.0 / (1.0 + std::exp(beta * lambda));
  }
  return std::clamp(value, 0.0, 1.0);
}

double zero_tolerance(const SpectralDecomposition& dec) noexcept {
  const double max_abs = dec.eigenvalues.size() > 0 ? dec.eigenvalues.cwiseAbs().maxCoeff() : 0.0;
  return 1e-10 * (1.0 + max_abs);
}

std::vector<double> near_zero_eigenvalues(const SpectralDecomposition& dec, double shift) {
  const double tol = zero_tolerance(dec);
  std::vector<double> flagged;
  for (Eigen::Index i = 0; i < dec.eigenvalues.size(); ++i) {
    if (std::abs(dec.eigenvalues(i) - shift) <= tol) flagged.push_back(dec.eigenvalues(i));
  }
  return flagged;
}

double evaluate(const SpectralFunction& f, double lambda, double zero_tol) {
  return std::visit(
      [&](const auto& g) -> double {
        using G = std::decay_t<decltype(g)>;
        if constexpr (std::is_same_v<G, ExpFunction>) {
          return std::exp(g.c * (lambda - g.shift));
        } else if constexpr (std::is_same_v<G, FermiFunction>) {
          return fermi(g.beta, lambda - g.shift);
        } else {
          const double x = lambda - g.shift;
          return (x < 0.0 && std::abs(x) > zero_tol) ? 1.0 : 0.0;
        }
      },
      f);
}

SymmetricOperator apply_spectral_function(const SpectralDecomposition& dec,
                                          const SpectralFunction& f) {
  const double tol = zero_tolerance(dec);
  Vector values(dec.eigenvalues.size());
  for (Eigen::Index i = 0; i < values.size(); ++i) values(i) = evaluate(f, dec.eigenvalues(i), tol);
  const Matrix& v = dec.eigenvectors;
  Matrix result = v * values.asDiagonal() * v.transpose();
  return SymmetricOperator(0.5 * (result + result.transpose()), dec.sites);
}

double pfaffian(const SkewSymmetricMatrix& a) { return pfaffian(a.matrix()); }

}  // namespace kmsdpp::linalg

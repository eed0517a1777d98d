// Copyright 2026 The kmsdpp Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <Eigen/Dense>

#include <cmath>
#include <cstddef>
#include <string_view>
#include <utility>
#include <variant>
#include <vector>

#include "kmsdpp/error.hpp"

namespace kmsdpp::linalg {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;

/// Site coordinates; integers or half-integers, both exact in binary64.
using SiteLabels = std::vector<double>;

/// Labels 0, 1, ..., n-1.
[[nodiscard]] SiteLabels default_labels(Eigen::Index n);

/**
 * @brief Finite real-symmetric truncation of a self-adjoint operator.
 *
 * Construction validates symmetry to 1e-12 (1 + max|A|), finiteness and
 * strictly increasing labels, then stores the exact symmetrization.
 */
class SymmetricOperator {
 public:
  explicit SymmetricOperator(Matrix entries);
  SymmetricOperator(Matrix entries, SiteLabels site_labels);

  [[nodiscard]] Eigen::Index dim() const noexcept { return entries_.rows(); }
  [[nodiscard]] const Matrix& matrix() const noexcept { return entries_; }
  [[nodiscard]] const SiteLabels& sites() const noexcept { return labels_; }
  [[nodiscard]] double operator()(Eigen::Index i, Eigen::Index j) const { return entries_(i, j); }

  /// Index of a site label; throws PreconditionError if absent.
  [[nodiscard]] Eigen::Index index_of(double site) const;

 private:
  Matrix entries_;
  SiteLabels labels_;
};

struct SpectralDecomposition {
  Vector eigenvalues;   ///< ascending
  Matrix eigenvectors;  ///< columns; largest-magnitude entry positive
  SiteLabels sites;
};

/// Skew-symmetric matrix with an exactly zero diagonal.
class SkewSymmetricMatrix {
 public:
  explicit SkewSymmetricMatrix(Matrix entries);

  [[nodiscard]] Eigen::Index dim() const noexcept { return entries_.rows(); }
  [[nodiscard]] const Matrix& matrix() const noexcept { return entries_; }

 private:
  Matrix entries_;
};

/// Symmetric QR (Eigen). Throws NumericalError if the solver fails.
[[nodiscard]] SpectralDecomposition eig_sym(const SymmetricOperator& a);

/// exp(c (λ - shift))
struct ExpFunction {
  double c = 0.0;
  double shift = 0.0;
};

/// 1 / (1 + exp(β (λ - shift)))
struct FermiFunction {
  double beta = 1.0;
  double shift = 0.0;
};

/// 1[λ - shift < 0]; eigenvalues within the zero tolerance map to 0.
struct NegativeIndicator {
  double shift = 0.0;
};

using SpectralFunction = std::variant<ExpFunction, FermiFunction, NegativeIndicator>;

/// Registry lookup by tag ("exp", "fermi", "indicator_negative").
[[nodiscard]] SpectralFunction make_spectral_function(std::string_view tag, double parameter,
                                                      double shift = 0.0);

/// Branch-stable logistic 1/(1+e^{βλ}), clamped to [0, 1].
[[nodiscard]] double fermi(double beta, double lambda) noexcept;

/// Zero tolerance for the spectrum of `dec`: 1e-10 (1 + max|λ|).
[[nodiscard]] double zero_tolerance(const SpectralDecomposition& dec) noexcept;

/// Eigenvalues with |λ - shift| within zero_tolerance.
[[nodiscard]] std::vector<double> near_zero_eigenvalues(const SpectralDecomposition& dec,
                                                        double shift = 0.0);

[[nodiscard]] double evaluate(const SpectralFunction& f, double lambda, double zero_tol);

/// V f(diag λ) Vᵀ.
[[nodiscard]] SymmetricOperator apply_spectral_function(const SpectralDecomposition& dec,
                                                        const SpectralFunction& f);

/// Pivoted LU determinant; the empty matrix has determinant 1.
template <typename Derived>
[[nodiscard]] typename Derived::Scalar determinant(const Eigen::MatrixBase<Derived>& a) {
  using Scalar = typename Derived::Scalar;
  if (a.rows() != a.cols()) throw PreconditionError("determinant: matrix is not square");
  if (a.rows() == 0) return Scalar(1);
  if (a.rows() == 1) return a(0, 0);
  using Dense = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;
  return Eigen::PartialPivLU<Dense>(Dense(a)).determinant();
}

/**
 * @brief Pfaffian by Parlett–Reid skew elimination with partial pivoting.
 *
 * The input must be skew-symmetric; only the strict lower triangle is read
 * after the copy is made.
 */
template <typename Derived>
[[nodiscard]] typename Derived::Scalar pfaffian(const Eigen::MatrixBase<Derived>& input) {
  using Scalar = typename Derived::Scalar;
  using Dense = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;
  const Eigen::Index n = input.rows();
  if (n != input.cols()) throw PreconditionError("pfaffian: matrix is not square");
  if (n % 2 != 0) throw PreconditionError("pfaffian: odd dimension");
  if (n == 0) return Scalar(1);

  Dense a = input;
  Scalar pf(1);
  for (Eigen::Index k = 0; k + 1 < n; k += 2) {
    Eigen::Index kp = 0;
    a.col(k).tail(n - k - 1).cwiseAbs().maxCoeff(&kp);
    kp += k + 1;
    if (kp != k + 1) {
      a.row(k + 1).swap(a.row(kp));
      a.col(k + 1).swap(a.col(kp));
      pf = -pf;
    }
    const Scalar pivot = a(k, k + 1);
    if (pivot == Scalar(0)) return Scalar(0);
    pf *= pivot;
    const Eigen::Index rest = n - k - 2;
    if (rest > 0) {
      const Eigen::Matrix<Scalar, Eigen::Dynamic, 1> tau = a.row(k).tail(rest).transpose() / pivot;
      const Eigen::Matrix<Scalar, Eigen::Dynamic, 1> col = a.col(k + 1).tail(rest);
      a.bottomRightCorner(rest, rest) += tau * col.transpose() - col * tau.transpose();
    }
  }
  return pf;
}

[[nodiscard]] double pfaffian(const SkewSymmetricMatrix& a);

}  // namespace kmsdpp::linalg

// Copyright 2026 The kmsdpp Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <complex>
#include <optional>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "kmsdpp/linalg.hpp"

namespace kmsdpp::orthopoly {

/// Conjugate (principal) or same-unit-interval real (complementary) pair.
struct ParameterPair {
  std::complex<double> first;
  std::complex<double> second;
};

struct Meixner {
  double c = 1.0;
  double xi = 0.5;
};
struct Charlier {
  double mu = 1.0;
};
struct Krawtchouk {
  int M = 1;
  double p = 0.5;
};
struct Hahn {
  int M = 1;
  double a = 0.0;
  double b = 0.0;
};
struct Racah {
  int M = 1;
  double alpha = -2.0;
  double beta = 0.0;
  double gamma = 0.0;
  double delta = 0.0;
};
struct Hermite {};
struct Laguerre {
  double c = 1.0;
};
struct Jacobi {
  double a = 0.0;
  double b = 0.0;
};
struct AskeyLesky {
  ParameterPair u;
  ParameterPair w;
};
struct DiscreteHypergeometric {
  ParameterPair z;
  double xi = 0.5;
};

using FamilySpec = std::variant<Meixner, Charlier, Krawtchouk, Hahn, Racah, Hermite, Laguerre,
                                Jacobi, AskeyLesky, DiscreteHypergeometric>;

/// Racah with α = -M-1, β = M+a+1, γ = a, δ = b.
[[nodiscard]] Racah racah_from_jacobi(int M, double a, double b);

[[nodiscard]] std::string family_name(const FamilySpec& family);

/// Throws ValidityError naming the offending parameter.
void validate(const FamilySpec& family);

[[nodiscard]] bool is_continuous(const FamilySpec& family) noexcept;
/// Discrete families whose operator follows the birth/death rate form.
[[nodiscard]] bool is_hypergeometric_type(const FamilySpec& family) noexcept;

/// True for principal or complementary pairs, i.e. (z+k)(z'+k) > 0 for all k.
[[nodiscard]] bool is_admissible_pair(const ParameterPair& pair) noexcept;

enum class Lattice { NonNegative, Integers, HalfIntegers, Finite };

[[nodiscard]] Lattice natural_lattice(const FamilySpec& family);

/**
 * @brief Contiguous run of sites on a lattice.
 *
 * lo and hi are inclusive; on HalfIntegers they are half-odd values.
 */
class SiteWindow {
 public:
  SiteWindow(Lattice lattice, double lo, double hi, int M = -1);

  [[nodiscard]] Lattice lattice() const noexcept { return lattice_; }
  [[nodiscard]] double lo() const noexcept { return lo_; }
  [[nodiscard]] double hi() const noexcept { return hi_; }
  [[nodiscard]] const linalg::SiteLabels& sites() const noexcept { return sites_; }
  [[nodiscard]] Eigen::Index size() const noexcept { return static_cast<Eigen::Index>(sites_.size()); }
  [[nodiscard]] bool contains(double x) const noexcept;

 private:
  Lattice lattice_;
  double lo_;
  double hi_;
  linalg::SiteLabels sites_;
};

/// Window on the family's natural lattice; validates containment.
[[nodiscard]] SiteWindow make_window(const FamilySpec& family, double lo, double hi);

/// The full lattice {0..M} of a finite family.
[[nodiscard]] SiteWindow full_window(const FamilySpec& family);

[[nodiscard]] bool in_lattice(const FamilySpec& family, double x);

/// log w(x) for discrete families, log w(u) for continuous ones.
[[nodiscard]] double log_weight(const FamilySpec& family, double x);
[[nodiscard]] double weight(const FamilySpec& family, double x);

/// Birth rate λ_x = σ(x) + τ(x).
[[nodiscard]] double birth_rate(const FamilySpec& family, double x);
/// Death rate μ_x = σ(x).
[[nodiscard]] double death_rate(const FamilySpec& family, double x);

/// Variable in which the family is polynomial: x, or x(x+γ+δ+1) for Racah.
[[nodiscard]] double abscissa(const FamilySpec& family, double x);

/// m_n when the paper's eigenvalue law applies to this family.
[[nodiscard]] std::optional<double> eigenvalue_law(const FamilySpec& family, int n);

/// Σ_window w / Σ_lattice w (1 for finite families).
[[nodiscard]] double captured_mass(const FamilySpec& family, const SiteWindow& window);

/// Grow hi (both ends on ℤ) until captured mass ≥ 1 - 1e-12, at most 10⁴ sites.
[[nodiscard]] SiteWindow choose_window(const FamilySpec& family);

struct PolynomialTable {
  FamilySpec family;
  SiteWindow window;
  int N;
  linalg::Matrix values;  ///< N × |window|, row n is p_n on the window
  double captured_mass;
  linalg::Vector diagonal;     ///< recurrence b_n (in the abscissa), n < N
  linalg::Vector offdiagonal;  ///< recurrence a_n, n < N-1
};

[[nodiscard]] PolynomialTable polynomial_table(const FamilySpec& family, const SiteWindow& window,
                                               int N);

/// Windowed birth–death (or hypergeometric) operator with Dirichlet truncation.
[[nodiscard]] linalg::SymmetricOperator difference_operator(const FamilySpec& family,
                                                            const SiteWindow& window);

/// Orthonormal three-term recurrence of a continuous family.
struct Recurrence {
  linalg::Vector diagonal;     ///< b_x, size dim
  linalg::Vector offdiagonal;  ///< a_x, size dim-1
  double total_mass;           ///< ∫ w
};

[[nodiscard]] Recurrence recurrence(const FamilySpec& family, Eigen::Index dim);

[[nodiscard]] linalg::SymmetricOperator jacobi_operator(const FamilySpec& family, Eigen::Index dim);

/// Support of a continuous weight; infinite ends are ±inf.
struct Support {
  double lo;
  double hi;
};
[[nodiscard]] Support support(const FamilySpec& family);

/// s A s with s δ_x = (-1)^x δ_x (site index parity).
[[nodiscard]] linalg::SymmetricOperator sign_flip(const linalg::SymmetricOperator& a);

enum class Regime {
  CharlierToDHermite,
  MeixnerToDHermite,
  MeixnerToDLaguerre,
  KrawtchoukToDHermite,
  HahnToDLaguerre,
  RacahToDJacobi,
};

[[nodiscard]] const std::vector<Regime>& all_regimes();
[[nodiscard]] std::string regime_name(Regime regime);
/// Throws ConfigError listing the registry on an unknown name.
[[nodiscard]] Regime parse_regime(std::string_view name);

struct LimitRung {
  linalg::SymmetricOperator scaled;
  linalg::SymmetricOperator target;
  double scale_param;  ///< the parameter driven to infinity (or ε⁻¹)
  FamilySpec source;   ///< family instance at this rung
  int N;               ///< particle number at this rung
};

/// Sites 0..window_size-1 for every regime.
[[nodiscard]] LimitRung limit_regime(Regime regime, int k, Eigen::Index window_size = 30);

/// [dim/3, 2 dim/3): the central subwindow used for ladder distances.
struct Block {
  Eigen::Index begin;
  Eigen::Index size;
};
[[nodiscard]] Block central_subwindow(Eigen::Index dim) noexcept;

}  // namespace kmsdpp::orthopoly

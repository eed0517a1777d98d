// Copyright 2026 The kmsdpp Authors
// SPDX-License-Identifier: Apache-2.0

// Parameter ladders for the six limit regimes. Each rung solves the regime's
// scaling constraint exactly so the only error left is the operator limit.

#include <cmath>
#include <string>

#include "kmsdpp/orthopoly.hpp"

namespace kmsdpp::orthopoly {
namespace {

using linalg::Matrix;
using linalg::SymmetricOperator;

// Ladder constants. Scale grows by 4 per rung: entry errors are O(scale^{-1/2}),
// so each rung roughly halves the error.
constexpr double kShiftHermite = 0.5;
constexpr double kN0 = 8.0;
constexpr double kMeixnerXi = 0.5;
constexpr double kLaguerreC = 1.5;
constexpr double kLaguerreShift = 2.0;
constexpr double kLaguerreN0 = 4.0;
constexpr double kKrawtchoukP0 = 0.05;
constexpr double kHahnA = 0.5;
constexpr double kHahnB = 0.5;
constexpr double kHahnShift = 1.0;
constexpr double kRacahA = 0.5;
constexpr double kRacahB = 0.5;
constexpr int kRacahN0 = 20;
constexpr int kRacahM0 = 40;

// Birth–death operator on sites 0..W-1; sites past M carry `extension` and no coupling.
Matrix rate_operator(const FamilySpec& family, Eigen::Index W, int M, double extension) {
  Matrix d = Matrix::Zero(W, W);
  for (Eigen::Index i = 0; i < W; ++i) {
    const double x = static_cast<double>(i);
    if (M >= 0 && i > M) {
      d(i, i) = extension;
      continue;
    }
    const double lam = birth_rate(family, x);
    d(i, i) = -(death_rate(family, x) + lam);
    if (i + 1 < W && (M < 0 || i + 1 <= M)) {
      d(i, i + 1) = d(i + 1, i) = std::sqrt(death_rate(family, x + 1.0) * lam);
    }
  }
  return d;
}

// Solves y² - √2 r y - c = 0 for the positive root.
double hermite_scale_root(double r, double c) {
  return (std::sqrt(2.0) * r + std::sqrt(2.0 * r * r + 4.0 * c)) / 2.0;
}

SymmetricOperator shifted(const SymmetricOperator& t, double r) {
  return SymmetricOperator(t.matrix() - r * Matrix::Identity(t.dim(), t.dim()));
}

// -s(T - r)s
SymmetricOperator reflected_laguerre(double c, double r, Eigen::Index W) {
  const SymmetricOperator t = jacobi_operator(Laguerre{c}, W);
  return SymmetricOperator(-sign_flip(shifted(t, r)).matrix());
}

}  // namespace

const std::vector<Regime>& all_regimes() {
  static const std::vector<Regime> regimes = {
      Regime::CharlierToDHermite,   Regime::MeixnerToDHermite, Regime::MeixnerToDLaguerre,
      Regime::KrawtchoukToDHermite, Regime::HahnToDLaguerre,   Regime::RacahToDJacobi};
  return regimes;
}

std::string regime_name(Regime regime) {
  switch (regime) {
    case Regime::CharlierToDHermite: return "charlier_dhermite";
    case Regime::MeixnerToDHermite: return "meixner_dhermite";
    case Regime::MeixnerToDLaguerre: return "meixner_dlaguerre";
    case Regime::KrawtchoukToDHermite: return "krawtchouk_dhermite";
    case Regime::HahnToDLaguerre: return "hahn_dlaguerre";
    case Regime::RacahToDJacobi: return "racah_djacobi";
  }
  return "unknown";
}

Regime parse_regime(std::string_view name) {
  std::string valid;
  for (Regime r : all_regimes()) {
    if (regime_name(r) == name) return r;
    valid += (valid.empty() ? "" : ", ") + regime_name(r);
  }
  throw ConfigError("unknown regime '" + std::string(name) + "' (valid: " + valid + ")");
}

LimitRung limit_regime(Regime regime, int k, Eigen::Index W) {
  if (k < 0) throw PreconditionError("limit_regime: ladder index must be nonnegative");
  if (W < 3) throw PreconditionError("limit_regime: window needs at least 3 sites");
  const double growth = std::pow(4.0, k);
  const Matrix eye = Matrix::Identity(W, W);
  const SymmetricOperator hermite_target = shifted(jacobi_operator(Hermite{}, W), kShiftHermite);

  switch (regime) {
    case Regime::CharlierToDHermite: {
      const double N = kN0 * growth;
      const Charlier family{N + std::sqrt(2.0 * N) * kShiftHermite};
      const Matrix d = rate_operator(family, W, -1, 0.0);
      return {SymmetricOperator((d + N * eye) / std::sqrt(2.0 * N)), hermite_target, N, family,
              static_cast<int>(N)};
    }
    case Regime::MeixnerToDHermite: {
      const double N = kN0 * growth;
      const double xi = kMeixnerXi;
      const double y = hermite_scale_root(kShiftHermite, (1.0 - xi) * N);
      const Meixner family{y * y / xi, xi};
      const Matrix d = rate_operator(family, W, -1, 0.0);
      return {SymmetricOperator((d + (1.0 - xi) * N * eye) / std::sqrt(2.0 * xi * family.c)),
              hermite_target, xi * family.c, family, static_cast<int>(N)};
    }
    case Regime::MeixnerToDLaguerre: {
      const double N = kLaguerreN0 * growth;
      const Meixner family{kLaguerreC, 1.0 - kLaguerreShift / N};
      const Matrix d = rate_operator(family, W, -1, 0.0);
      return {SymmetricOperator(d + (1.0 - family.xi) * N * eye),
              reflected_laguerre(kLaguerreC, kLaguerreShift, W), N, family, static_cast<int>(N)};
    }
    case Regime::KrawtchoukToDHermite: {
      const double N = kN0 * growth;
      const double y = hermite_scale_root(kShiftHermite, N);
      const double pm = y * y;
      const int M = static_cast<int>(std::lround(pm / (kKrawtchoukP0 / std::pow(2.0, k))));
      const Krawtchouk family{M, pm / M};
      const Matrix d = rate_operator(family, W, M, -N - 1.0);
      return {SymmetricOperator((d + N * eye) / std::sqrt(2.0 * pm)), hermite_target, pm, family,
              static_cast<int>(N)};
    }
    case Regime::HahnToDLaguerre: {
      const int N = static_cast<int>(kN0) << k;
      const double energy = N * (N + kHahnA + kHahnB + 1.0);
      const int M = static_cast<int>(std::lround(energy / kHahnShift));
      const Hahn family{M, kHahnA, kHahnB};
      const Matrix d = rate_operator(family, W, M, -energy - 1.0);
      return {SymmetricOperator((d + energy * eye) / M),
              reflected_laguerre(kHahnA + 1.0, kHahnShift, W), static_cast<double>(M), family, N};
    }
    case Regime::RacahToDJacobi: {
      const int N = kRacahN0 << k;
      const int M = kRacahM0 << k;
      const Racah family = racah_from_jacobi(M, kRacahA, kRacahB);
      const double energy = N * (N + family.alpha + family.beta + 1.0);
      // r_∞ = 1 - 2 (N0/M0)², so that N/M → √((1-r)/2) along the ladder.
      const double ratio = static_cast<double>(kRacahN0) / kRacahM0;
      const double r = 1.0 - 2.0 * ratio * ratio;
      const Matrix d = rate_operator(family, W, M, -energy - 1.0);
      const double m2 = static_cast<double>(M) * M;
      return {SymmetricOperator(2.0 / m2 * (d + energy * eye)),
              shifted(jacobi_operator(Jacobi{kRacahA, kRacahB}, W), r), static_cast<double>(M),
              family, N};
    }
  }
  throw ConfigError("limit_regime: unknown regime");
}

}  // namespace kmsdpp::orthopoly

// Copyright 2026 The kmsdpp Authors
// SPDX-License-Identifier: Apache-2.0

#include "special.hpp"

#include <array>
#include <cmath>
#include <limits>
#include <numbers>

namespace kmsdpp::detail {

SignedLog pochhammer(double a, int n) noexcept {
  SignedLog out;
  for (int i = 0; i < n; ++i) {
    const double f = a + i;
    if (f == 0.0) return SignedLog{0, -std::numeric_limits<double>::infinity()};
    if (f < 0.0) out.sign = -out.sign;
    out.log_abs += std::log(std::abs(f));
  }
  return out;
}

double log_abs_gamma(double x) noexcept { return std::lgamma(x); }

double log_abs_gamma(std::complex<double> z) noexcept {
  constexpr double g = 7.0;
  constexpr std::array<double, 9> c = {0.99999999999980993,     676.5203681218851,
                                       -1259.1392167224028,     771.32342877765313,
                                       -176.61502916214059,     12.507343278686905,
                                       -0.13857109526572012,    9.9843695780195716e-6,
                                       1.5056327351493116e-7};
  if (z.real() < 0.5) {
    // Reflection: |Γ(z)| = π / (|sin(πz)| |Γ(1-z)|).
    return std::log(std::numbers::pi) - std::log(std::abs(std::sin(std::numbers::pi * z))) -
           log_abs_gamma(1.0 - z);
  }
  const std::complex<double> w = z - 1.0;
  std::complex<double> sum = c[0];
  for (std::size_t i = 1; i < c.size(); ++i) sum += c[i] / (w + static_cast<double>(i));
  const std::complex<double> t = w + g + 0.5;
  const std::complex<double> lg =
      0.5 * std::log(2.0 * std::numbers::pi) + (w + 0.5) * std::log(t) - t + std::log(sum);
  return lg.real();
}

}  // namespace kmsdpp::detail

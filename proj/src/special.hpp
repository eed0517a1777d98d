// Copyright 2026 The kmsdpp Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <complex>

namespace kmsdpp::detail {

/// Signed logarithm of a product: value = sign · exp(log_abs).
struct SignedLog {
  int sign = 1;
  double log_abs = 0.0;

  SignedLog& operator+=(const SignedLog& other) noexcept {
    sign *= other.sign;
    log_abs += other.log_abs;
    return *this;
  }
  SignedLog& operator-=(const SignedLog& other) noexcept {
    sign *= other.sign;
    log_abs -= other.log_abs;
    return *this;
  }
};

/// (a)_n = a(a+1)...(a+n-1) as a signed log; sign 0 if a factor vanishes.
[[nodiscard]] SignedLog pochhammer(double a, int n) noexcept;

/// log|Γ(x)| for real x.
[[nodiscard]] double log_abs_gamma(double x) noexcept;

/// log|Γ(z)| for complex z (Lanczos, g = 7).
[[nodiscard]] double log_abs_gamma(std::complex<double> z) noexcept;

}  // namespace kmsdpp::detail

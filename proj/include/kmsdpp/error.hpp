// Copyright 2026 The kmsdpp Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <stdexcept>
#include <string>

namespace kmsdpp {

/// Broad failure category; the CLI maps each to an exit code.
enum class ErrorKind {
  Config,        ///< malformed or out-of-range configuration
  Precondition,  ///< caller violated a documented contract
  Validity,      ///< mathematical validity failure (rates, certificates)
  Numerical,     ///< solver or quadrature did not reach tolerance
  Size,          ///< problem exceeds a memory or enumeration guard
};

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what) : std::runtime_error(what), kind_(kind) {}
  [[nodiscard]] ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

class ConfigError : public Error {
 public:
  explicit ConfigError(const std::string& what) : Error(ErrorKind::Config, what) {}
};

class PreconditionError : public Error {
 public:
  explicit PreconditionError(const std::string& what) : Error(ErrorKind::Precondition, what) {}
};

class ValidityError : public Error {
 public:
  explicit ValidityError(const std::string& what) : Error(ErrorKind::Validity, what) {}
};

class SizeError : public Error {
 public:
  explicit SizeError(const std::string& what) : Error(ErrorKind::Size, what) {}
};

class NumericalError : public Error {
 public:
  NumericalError(const std::string& what, double residual)
      : Error(ErrorKind::Numerical, what + " (residual " + std::to_string(residual) + ")"),
        residual_(residual) {}
  [[nodiscard]] double residual() const noexcept { return residual_; }

 private:
  double residual_;
};

/// Spectrum too close to zero for a sharp projection.
class GapError : public PreconditionError {
 public:
  using PreconditionError::PreconditionError;
};

/// Window captures too little weight mass.
class WindowTooSmallError : public PreconditionError {
 public:
  WindowTooSmallError(const std::string& what, double mass)
      : PreconditionError(what + " (captured mass " + std::to_string(mass) + ")"), mass_(mass) {}
  [[nodiscard]] double captured_mass() const noexcept { return mass_; }

 private:
  double mass_;
};

/// Evaluation outside the imaginary-time domain.
class DomainError : public PreconditionError {
 public:
  using PreconditionError::PreconditionError;
};

}  // namespace kmsdpp

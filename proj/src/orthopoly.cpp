// Copyright 2026 The kmsdpp Authors
// SPDX-License-Identifier: Apache-2.0

#include "kmsdpp/orthopoly.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <numbers>
#include <sstream>

#include "special.hpp"

namespace kmsdpp::orthopoly {
namespace {

template <class... Ts>
struct Overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
Overloaded(Ts...) -> Overloaded<Ts...>;

bool is_integer(double x) { return std::isfinite(x) && x == std::floor(x); }

std::string site_str(double x) {
  std::ostringstream os;
  os << x;
  return os.str();
}

// (z+k)(z'+k) for a pair shifted by the real k.
double pair_product(const ParameterPair& pair, double k) {
  return ((pair.first + k) * (pair.second + k)).real();
}

// log |Γ(z)Γ(z')| for an admissible pair; the product is positive.
double log_gamma_pair(const ParameterPair& pair, double shift) {
  const std::complex<double> z = pair.first + shift;
  const std::complex<double> zp = pair.second + shift;
  if (z.imag() == 0.0 && zp.imag() == 0.0) {
    return detail::log_abs_gamma(z.real()) + detail::log_abs_gamma(zp.real());
  }
  return 2.0 * detail::log_abs_gamma(z);
}

void require(bool ok, const std::string& family, const std::string& what) {
  if (!ok) throw ValidityError(family + ": " + what);
}

double racah_death(const Racah& f, double x) {
  if (x == 0.0) return 0.0;
  const double gd = f.gamma + f.delta;
  return x * (x + f.delta) * (f.beta - f.gamma - x) * (x - f.alpha + gd) /
         ((2.0 * x + gd + 1.0) * (2.0 * x + gd));
}

double racah_birth(const Racah& f, double x) {
  const double gd = f.gamma + f.delta;
  return (-f.alpha - 1.0 - x) * (x + f.gamma + 1.0) * (x + gd + 1.0) * (x + f.beta + f.delta + 1.0) /
         ((2.0 * x + gd + 1.0) * (2.0 * x + gd + 2.0));
}

int finite_size(const FamilySpec& family) {
  return std::visit(Overloaded{[](const Krawtchouk& f) { return f.M; },
                               [](const Hahn& f) { return f.M; },
                               [](const Racah& f) { return f.M; },
                               [](const auto&) { return -1; }},
                    family);
}

// log Σ exp(v) over a list.
double log_sum_exp(const std::vector<double>& v) {
  if (v.empty()) return -std::numeric_limits<double>::infinity();
  const double m = *std::max_element(v.begin(), v.end());
  if (!std::isfinite(m)) return m;
  double s = 0.0;
  for (double t : v) s += std::exp(t - m);
  return m + std::log(s);
}

// Log-weights outward from `start` in direction `step` until negligible.
std::vector<double> tail_log_weights(const FamilySpec& family, double start, double step,
                                     double reference) {
  std::vector<double> out;
  constexpr int kCap = 2'000'000;
  for (int i = 0; i < kCap; ++i) {
    const double x = start + step * i;
    if (!in_lattice(family, x)) break;
    const double lw = log_weight(family, x);
    out.push_back(lw);
    if (lw < reference - 60.0 && i > 8) break;
  }
  return out;
}

}  // namespace

Racah racah_from_jacobi(int M, double a, double b) {
  return Racah{M, -static_cast<double>(M) - 1.0, static_cast<double>(M) + a + 1.0, a, b};
}

std::string family_name(const FamilySpec& family) {
  return std::visit(Overloaded{[](const Meixner&) { return std::string("meixner"); },
                               [](const Charlier&) { return std::string("charlier"); },
                               [](const Krawtchouk&) { return std::string("krawtchouk"); },
                               [](const Hahn&) { return std::string("hahn"); },
                               [](const Racah&) { return std::string("racah"); },
                               [](const Hermite&) { return std::string("hermite"); },
                               [](const Laguerre&) { return std::string("laguerre"); },
                               [](const Jacobi&) { return std::string("jacobi"); },
                               [](const AskeyLesky&) { return std::string("askey_lesky"); },
                               [](const DiscreteHypergeometric&) {
                                 return std::string("discrete_hypergeometric");
                               }},
                    family);
}

bool is_admissible_pair(const ParameterPair& pair) noexcept {
  const auto z = pair.first;
  const auto zp = pair.second;
  if (z.imag() != 0.0 || zp.imag() != 0.0) {
    return z.imag() != 0.0 && std::abs(z - std::conj(zp)) == 0.0;
  }
  const double k = std::floor(z.real());
  return z.real() > k && zp.real() > k && z.real() < k + 1.0 && zp.real() < k + 1.0;
}

void validate(const FamilySpec& family) {
  const std::string name = family_name(family);
  std::visit(
      Overloaded{
          [&](const Meixner& f) {
            require(f.c > 0.0, name, "c must be positive");
            require(f.xi > 0.0 && f.xi < 1.0, name, "xi must lie in (0,1)");
          },
          [&](const Charlier& f) { require(f.mu > 0.0, name, "mu must be positive"); },
          [&](const Krawtchouk& f) {
            require(f.M >= 1, name, "M must be a positive integer");
            require(f.p > 0.0 && f.p < 1.0, name, "p must lie in (0,1)");
          },
          [&](const Hahn& f) {
            require(f.M >= 1, name, "M must be a positive integer");
            require(f.a > -1.0 && f.b > -1.0, name, "a and b must exceed -1");
          },
          [&](const Racah& f) {
            require(f.M >= 1, name, "M must be a positive integer");
            const double m = -static_cast<double>(f.M);
            const bool finite = std::abs(f.alpha + 1.0 - m) < 1e-12 ||
                                std::abs(f.beta + f.delta + 1.0 - m) < 1e-12 ||
                                std::abs(f.gamma + 1.0 - m) < 1e-12;
            require(finite, name, "requires alpha+1=-M or beta+delta+1=-M or gamma+1=-M");
            for (int x = 0; x <= f.M; ++x) {
              if (x < f.M) {
                require(racah_birth(f, x) > 0.0, name,
                        "birth rate not positive at site " + std::to_string(x));
              }
              if (x > 0) {
                require(racah_death(f, x) > 0.0, name,
                        "death rate not positive at site " + std::to_string(x));
              }
            }
          },
          [&](const Hermite&) {},
          [&](const Laguerre& f) { require(f.c > 0.0, name, "c must be positive"); },
          [&](const Jacobi& f) {
            require(f.a > -1.0 && f.b > -1.0, name, "a and b must exceed -1");
          },
          [&](const AskeyLesky& f) {
            require(is_admissible_pair(f.u), name, "(u,u') must be principal or complementary");
            require(is_admissible_pair(f.w), name, "(w,w') must be principal or complementary");
          },
          [&](const DiscreteHypergeometric& f) {
            require(is_admissible_pair(f.z), name, "(z,z') must be principal or complementary");
            require(f.xi > 0.0 && f.xi < 1.0, name, "xi must lie in (0,1)");
          }},
      family);
}

bool is_continuous(const FamilySpec& family) noexcept {
  return std::holds_alternative<Hermite>(family) || std::holds_alternative<Laguerre>(family) ||
         std::holds_alternative<Jacobi>(family);
}

bool is_hypergeometric_type(const FamilySpec& family) noexcept {
  return !is_continuous(family) && !std::holds_alternative<DiscreteHypergeometric>(family);
}

Lattice natural_lattice(const FamilySpec& family) {
  return std::visit(
      Overloaded{[](const Meixner&) { return Lattice::NonNegative; },
                 [](const Charlier&) { return Lattice::NonNegative; },
                 [](const Krawtchouk&) { return Lattice::Finite; },
                 [](const Hahn&) { return Lattice::Finite; },
                 [](const Racah&) { return Lattice::Finite; },
                 [](const AskeyLesky&) { return Lattice::Integers; },
                 [](const DiscreteHypergeometric&) { return Lattice::HalfIntegers; },
                 [](const auto&) -> Lattice {
                   throw PreconditionError("continuous families have no lattice");
                 }},
      family);
}

SiteWindow::SiteWindow(Lattice lattice, double lo, double hi, int M)
    : lattice_(lattice), lo_(lo), hi_(hi) {
  if (!(lo <= hi)) throw PreconditionError("SiteWindow: lo must not exceed hi");
  const bool half = lattice == Lattice::HalfIntegers;
  const double offset = half ? 0.5 : 0.0;
  if (!is_integer(lo - offset) || !is_integer(hi - offset)) {
    throw PreconditionError("SiteWindow: bounds " + site_str(lo) + ", " + site_str(hi) +
                            " are not lattice points");
  }
  if ((lattice == Lattice::NonNegative || lattice == Lattice::Finite) && lo < 0.0) {
    throw PreconditionError("SiteWindow: lattice starts at 0");
  }
  if (lattice == Lattice::Finite && (M < 0 || hi > M)) {
    throw PreconditionError("SiteWindow: window exceeds {0..M}");
  }
  const auto count = static_cast<std::size_t>(hi - lo) + 1;
  sites_.reserve(count);
  for (std::size_t i = 0; i < count; ++i) sites_.push_back(lo + static_cast<double>(i));
}

bool SiteWindow::contains(double x) const noexcept {
  return x >= lo_ && x <= hi_ && std::binary_search(sites_.begin(), sites_.end(), x);
}

bool in_lattice(const FamilySpec& family, double x) {
  switch (natural_lattice(family)) {
    case Lattice::NonNegative: return is_integer(x) && x >= 0.0;
    case Lattice::Integers: return is_integer(x);
    case Lattice::HalfIntegers: return is_integer(x - 0.5);
    case Lattice::Finite: return is_integer(x) && x >= 0.0 && x <= finite_size(family);
  }
  return false;
}

SiteWindow make_window(const FamilySpec& family, double lo, double hi) {
  validate(family);
  const Lattice lattice = natural_lattice(family);
  if (!in_lattice(family, lo) || !in_lattice(family, hi)) {
    throw PreconditionError("window [" + site_str(lo) + ", " + site_str(hi) +
                            "] is not contained in the lattice of " + family_name(family));
  }
  return SiteWindow(lattice, lo, hi, finite_size(family));
}

SiteWindow full_window(const FamilySpec& family) {
  const int M = finite_size(family);
  if (M < 0) throw PreconditionError(family_name(family) + " is not a finite family");
  return make_window(family, 0.0, static_cast<double>(M));
}

double log_weight(const FamilySpec& family, double x) {
  if (!is_continuous(family) && !in_lattice(family, x)) {
    throw PreconditionError("site " + site_str(x) + " is outside the lattice of " +
                            family_name(family));
  }
  return std::visit(
      Overloaded{
          [&](const Meixner& f) {
            return std::lgamma(f.c + x) - std::lgamma(f.c) + x * std::log(f.xi) +
                   -f.c * std::log1p(-f.xi) - std::lgamma(x + 1.0);
          },
          [&](const Charlier& f) { return -f.mu + x * std::log(f.mu) - std::lgamma(x + 1.0); },
          [&](const Krawtchouk& f) {
            const double M = f.M;
            return std::lgamma(M + 1.0) - std::lgamma(x + 1.0) - std::lgamma(M - x + 1.0) +
                   x * std::log(f.p) + (M - x) * std::log1p(-f.p);
          },
          [&](const Hahn& f) {
            const double M = f.M;
            return std::lgamma(f.a + x + 1.0) - std::lgamma(x + 1.0) - std::lgamma(f.a + 1.0) +
                   std::lgamma(M + f.b - x + 1.0) - std::lgamma(M - x + 1.0) -
                   std::lgamma(f.b + 1.0);
          },
          [&](const Racah& f) {
            const int n = static_cast<int>(x);
            const double gd = f.gamma + f.delta;
            detail::SignedLog acc;
            acc += detail::pochhammer(gd + 1.0, n);
            acc += detail::pochhammer((gd + 3.0) / 2.0, n);
            acc += detail::pochhammer(f.alpha + 1.0, n);
            acc += detail::pochhammer(f.beta + f.delta + 1.0, n);
            acc += detail::pochhammer(f.gamma + 1.0, n);
            acc -= detail::pochhammer(1.0, n);
            acc -= detail::pochhammer((gd + 1.0) / 2.0, n);
            acc -= detail::pochhammer(gd - f.alpha + 1.0, n);
            acc -= detail::pochhammer(f.gamma - f.beta + 1.0, n);
            acc -= detail::pochhammer(f.delta + 1.0, n);
            if (acc.sign <= 0) {
              throw ValidityError("racah: weight not positive at site " + site_str(x));
            }
            return acc.log_abs;
          },
          [&](const Hermite&) { return -x * x; },
          [&](const Laguerre& f) {
            if (x < 0.0) throw PreconditionError("laguerre: weight support is [0, inf)");
            return (f.c - 1.0) * std::log(x) - x;
          },
          [&](const Jacobi& f) {
            if (x < -1.0 || x > 1.0) throw PreconditionError("jacobi: weight support is [-1, 1]");
            return f.a * std::log1p(-x) + f.b * std::log1p(x);
          },
          [&](const AskeyLesky& f) {
            return -log_gamma_pair(f.u, 1.0 - x) - log_gamma_pair(f.w, x + 1.0);
          },
          [&](const DiscreteHypergeometric&) -> double {
            throw ConfigError(
                "discrete_hypergeometric: no weight function; the kernel is defined by the "
                "operator only");
          }},
      family);
}

double weight(const FamilySpec& family, double x) { return std::exp(log_weight(family, x)); }

double birth_rate(const FamilySpec& family, double x) {
  return std::visit(
      Overloaded{[&](const Meixner& f) { return f.xi * (x + f.c); },
                 [&](const Charlier& f) { return f.mu; },
                 [&](const Krawtchouk& f) { return f.p * (f.M - x); },
                 [&](const Hahn& f) { return (x + f.a + 1.0) * (f.M - x); },
                 [&](const Racah& f) { return racah_birth(f, x); },
                 [&](const AskeyLesky& f) {
                   return pair_product(ParameterPair{-f.u.first, -f.u.second}, x);
                 },
                 [&](const auto&) -> double {
                   throw PreconditionError(family_name(family) + " has no birth/death rates");
                 }},
      family);
}

double death_rate(const FamilySpec& family, double x) {
  return std::visit(
      Overloaded{[&](const Meixner&) { return x; },
                 [&](const Charlier&) { return x; },
                 [&](const Krawtchouk& f) { return (1.0 - f.p) * x; },
                 [&](const Hahn& f) { return x * (f.M + f.b + 1.0 - x); },
                 [&](const Racah& f) { return racah_death(f, x); },
                 [&](const AskeyLesky& f) { return pair_product(f.w, x); },
                 [&](const auto&) -> double {
                   throw PreconditionError(family_name(family) + " has no birth/death rates");
                 }},
      family);
}

double abscissa(const FamilySpec& family, double x) {
  if (const auto* r = std::get_if<Racah>(&family)) return x * (x + r->gamma + r->delta + 1.0);
  return x;
}

std::optional<double> eigenvalue_law(const FamilySpec& family, int n) {
  const double k = n;
  return std::visit(
      Overloaded{[&](const Meixner& f) -> std::optional<double> { return -(1.0 - f.xi) * k; },
                 [&](const Charlier&) -> std::optional<double> { return -k; },
                 [&](const Krawtchouk& f) -> std::optional<double> {
                   if (n > f.M) return std::nullopt;
                   return -k;
                 },
                 [&](const Hahn& f) -> std::optional<double> {
                   if (n > f.M) return std::nullopt;
                   return -k * (k + f.a + f.b + 1.0);
                 },
                 [&](const Racah& f) -> std::optional<double> {
                   if (n > f.M) return std::nullopt;
                   return -k * (k + f.alpha + f.beta + 1.0);
                 },
                 [&](const auto&) -> std::optional<double> { return std::nullopt; }},
      family);
}

double captured_mass(const FamilySpec& family, const SiteWindow& window) {
  const Lattice lattice = natural_lattice(family);
  if (lattice == Lattice::Finite) return 1.0;
  std::vector<double> inside;
  inside.reserve(static_cast<std::size_t>(window.size()));
  for (double x : window.sites()) inside.push_back(log_weight(family, x));
  const double log_in = log_sum_exp(inside);
  const double ref = *std::max_element(inside.begin(), inside.end());
  std::vector<double> outside = tail_log_weights(family, window.hi() + 1.0, 1.0, ref);
  if (lattice == Lattice::Integers || window.lo() > 0.0) {
    const auto left = tail_log_weights(family, window.lo() - 1.0, -1.0, ref);
    outside.insert(outside.end(), left.begin(), left.end());
  }
  const double log_out = log_sum_exp(outside);
  if (!std::isfinite(log_out)) return 1.0;
  // 1 - out/(in+out) keeps precision near 1.
  const double ratio = std::exp(log_out - log_in);
  return 1.0 - ratio / (1.0 + ratio);
}

SiteWindow choose_window(const FamilySpec& family) {
  validate(family);
  const Lattice lattice = natural_lattice(family);
  if (lattice == Lattice::Finite) return full_window(family);
  if (lattice == Lattice::HalfIntegers) {
    throw ConfigError("discrete_hypergeometric: window must be given explicitly");
  }
  constexpr int kCap = 10'000;
  // Mode of the weight; windows grow outward from it.
  double lo = 0.0;
  if (lattice == Lattice::Integers) {
    double best = -std::numeric_limits<double>::infinity();
    for (int x = -kCap / 2; x <= kCap / 2; ++x) {
      const double lw = log_weight(family, x);
      if (lw > best) {
        best = lw;
        lo = x;
      }
    }
  }
  double hi = lo;
  while (true) {
    const SiteWindow window = make_window(family, lo, hi);
    if (captured_mass(family, window) >= 1.0 - 1e-12 || window.size() >= kCap) return window;
    hi += 1.0;
    if (lattice == Lattice::Integers) lo -= 1.0;
  }
}

PolynomialTable polynomial_table(const FamilySpec& family, const SiteWindow& window, int N) {
  if (is_continuous(family)) {
    throw PreconditionError("polynomial_table: " + family_name(family) +
                            " is continuous; discrete lattices only");
  }
  validate(family);
  const Eigen::Index m = window.size();
  if (N < 1 || N > m) throw PreconditionError("polynomial_table: need 1 <= N <= |window|");
  const double mass = captured_mass(family, window);
  if (natural_lattice(family) != Lattice::Finite && mass < 0.999) {
    throw WindowTooSmallError("polynomial_table: window too small for " + family_name(family),
                              mass);
  }

  linalg::Vector logw(m);
  linalg::Vector v(m);
  for (Eigen::Index i = 0; i < m; ++i) {
    const double x = window.sites()[static_cast<std::size_t>(i)];
    logw(i) = log_weight(family, x);
    v(i) = abscissa(family, x);
  }
  const double ref = logw.maxCoeff();
  linalg::Vector q0 = (0.5 * (logw.array() - ref)).exp().matrix();
  q0.normalize();

  // Lanczos on diag(v) from √w with full reorthogonalization: the discrete Stieltjes procedure.
  linalg::Matrix q(N, m);
  linalg::Vector diag(N);
  linalg::Vector off(std::max(N - 1, 0));
  q.row(0) = q0.transpose();
  const double scale = 1.0 + v.cwiseAbs().maxCoeff();
  for (int n = 0; n < N; ++n) {
    linalg::Vector r = v.cwiseProduct(q.row(n).transpose());
    diag(n) = q.row(n).dot(r);
    if (n + 1 == N) break;
    for (int pass = 0; pass < 2; ++pass) {
      for (int j = 0; j <= n; ++j) r -= q.row(j).dot(r) * q.row(j).transpose();
    }
    const double norm = r.norm();
    if (!(norm > 1e-13 * scale)) {
      throw NumericalError("polynomial_table: recurrence norm lost positivity at degree " +
                               std::to_string(n + 1),
                           norm);
    }
    off(n) = norm;
    q.row(n + 1) = (r / norm).transpose();
  }
  return PolynomialTable{family, window, N, q, mass, diag, off};
}

linalg::SymmetricOperator difference_operator(const FamilySpec& family, const SiteWindow& window) {
  validate(family);
  const Eigen::Index m = window.size();
  const auto& sites = window.sites();
  for (double x : sites) {
    if (!in_lattice(family, x)) {
      throw PreconditionError("difference_operator: window outside the lattice of " +
                              family_name(family));
    }
  }
  linalg::Matrix d = linalg::Matrix::Zero(m, m);

  if (const auto* dh = std::get_if<DiscreteHypergeometric>(&family)) {
    const double s = 1.0 - dh->xi;
    const double zsum = (dh->z.first + dh->z.second).real();
    for (Eigen::Index i = 0; i < m; ++i) {
      const double x = sites[static_cast<std::size_t>(i)];
      d(i, i) = -(x + dh->xi * (zsum + x)) / s;
      if (i + 1 < m) {
        const double prod = pair_product(dh->z, x + 0.5);
        if (!(prod > 0.0)) {
          throw ValidityError("discrete_hypergeometric: rate not positive at site " + site_str(x));
        }
        d(i, i + 1) = d(i + 1, i) = std::sqrt(dh->xi * prod) / s;
      }
    }
    return linalg::SymmetricOperator(d, sites);
  }
  if (!is_hypergeometric_type(family)) {
    throw PreconditionError("difference_operator: " + family_name(family) +
                            " is not a discrete family");
  }
  const int M = finite_size(family);
  if (M >= 0 && (window.lo() != 0.0 || window.hi() != M)) {
    throw PreconditionError("difference_operator: finite families need the full window {0..M}");
  }
  for (Eigen::Index i = 0; i < m; ++i) {
    const double x = sites[static_cast<std::size_t>(i)];
    const double lam = birth_rate(family, x);
    const double mu = death_rate(family, x);
    d(i, i) = -(mu + lam);
    if (i + 1 < m) {
      const double mu_next = death_rate(family, x + 1.0);
      if (!(lam > 0.0)) {
        throw ValidityError(family_name(family) + ": birth rate not positive at site " +
                            site_str(x));
      }
      if (!(mu_next > 0.0)) {
        throw ValidityError(family_name(family) + ": death rate not positive at site " +
                            site_str(x + 1.0));
      }
      d(i, i + 1) = d(i + 1, i) = std::sqrt(mu_next * lam);
    }
  }
  return linalg::SymmetricOperator(d, sites);
}

Recurrence recurrence(const FamilySpec& family, Eigen::Index dim) {
  validate(family);
  if (dim < 1) throw PreconditionError("recurrence: dim must be positive");
  Recurrence rec{linalg::Vector::Zero(dim), linalg::Vector::Zero(std::max<Eigen::Index>(dim - 1, 0)),
                 0.0};
  std::visit(
      Overloaded{
          [&](const Hermite&) {
            for (Eigen::Index x = 0; x + 1 < dim; ++x) rec.offdiagonal(x) = std::sqrt((x + 1.0) / 2.0);
            rec.total_mass = std::sqrt(std::numbers::pi);
          },
          [&](const Laguerre& f) {
            for (Eigen::Index x = 0; x < dim; ++x) rec.diagonal(x) = 2.0 * x + f.c;
            for (Eigen::Index x = 0; x + 1 < dim; ++x) {
              rec.offdiagonal(x) = std::sqrt((x + 1.0) * (x + f.c));
            }
            rec.total_mass = std::tgamma(f.c);
          },
          [&](const Jacobi& f) {
            const double a = f.a;
            const double b = f.b;
            const double s = a + b;
            for (Eigen::Index i = 0; i < dim; ++i) {
              const double x = static_cast<double>(i);
              rec.diagonal(i) = i == 0 ? (b - a) / (s + 2.0)
                                       : (b * b - a * a) / ((2.0 * x + s) * (2.0 * x + s + 2.0));
            }
            for (Eigen::Index i = 0; i + 1 < dim; ++i) {
              const double x = static_cast<double>(i);
              if (i == 0) {
                rec.offdiagonal(i) = 2.0 / (s + 2.0) * std::sqrt((a + 1.0) * (b + 1.0) / (s + 3.0));
              } else {
                rec.offdiagonal(i) =
                    2.0 / (2.0 * x + s + 2.0) *
                    std::sqrt((x + 1.0) * (x + a + 1.0) * (x + b + 1.0) * (x + s + 1.0) /
                              ((2.0 * x + s + 1.0) * (2.0 * x + s + 3.0)));
              }
            }
            rec.total_mass = std::exp((s + 1.0) * std::log(2.0) + std::lgamma(a + 1.0) +
                                      std::lgamma(b + 1.0) - std::lgamma(s + 2.0));
          },
          [&](const auto&) {
            throw PreconditionError("recurrence: " + family_name(family) +
                                    " is not a continuous family");
          }},
      family);
  return rec;
}

linalg::SymmetricOperator jacobi_operator(const FamilySpec& family, Eigen::Index dim) {
  if (dim < 2) throw PreconditionError("jacobi_operator: dim must be at least 2");
  const Recurrence rec = recurrence(family, dim);
  linalg::Matrix t = rec.diagonal.asDiagonal();
  for (Eigen::Index x = 0; x + 1 < dim; ++x) t(x, x + 1) = t(x + 1, x) = rec.offdiagonal(x);
  return linalg::SymmetricOperator(t);
}

Support support(const FamilySpec& family) {
  constexpr double inf = std::numeric_limits<double>::infinity();
  if (std::holds_alternative<Hermite>(family)) return {-inf, inf};
  if (std::holds_alternative<Laguerre>(family)) return {0.0, inf};
  if (std::holds_alternative<Jacobi>(family)) return {-1.0, 1.0};
  throw PreconditionError("support: " + family_name(family) + " is not a continuous family");
}

linalg::SymmetricOperator sign_flip(const linalg::SymmetricOperator& a) {
  linalg::Matrix m = a.matrix();
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    for (Eigen::Index j = 0; j < m.cols(); ++j) {
      if ((i + j) % 2 != 0) m(i, j) = -m(i, j);
    }
  }
  return linalg::SymmetricOperator(m, a.sites());
}

Block central_subwindow(Eigen::Index dim) noexcept {
  const Eigen::Index begin = dim / 3;
  const Eigen::Index end = (2 * dim) / 3;
  return {begin, end - begin};
}

}  // namespace kmsdpp::orthopoly

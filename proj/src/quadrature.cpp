// Copyright 2026 The kmsdpp Authors
// SPDX-License-Identifier: Apache-2.0

// Integral kernels of continuous families by composite Gauss quadrature.
// Panels touching a singular endpoint of the weight use a Gauss-Jacobi rule
// carrying the endpoint power; every other panel uses Gauss-Legendre.

#include <algorithm>
#include <cmath>
#include <vector>

#include "kmsdpp/kernels.hpp"

namespace kmsdpp::kernels {
namespace {

using linalg::Matrix;
using linalg::Vector;

constexpr Eigen::Index kPanelOrder = 48;
constexpr int kInitialPanels = 2;
constexpr int kMaxPanels = 1024;
constexpr double kStabilization = 1e-8;

struct Rule {
  Vector nodes;    // on [-1, 1]
  Vector weights;  // for the rule's own weight
};

// Golub-Welsch on the Jacobi matrix of (1-s)^a (1+s)^b.
Rule gauss_jacobi(double a, double b) {
  const orthopoly::Jacobi family{a, b};
  const auto dec = linalg::eig_sym(orthopoly::jacobi_operator(family, kPanelOrder));
  const double mass = orthopoly::recurrence(family, 1).total_mass;
  return {dec.eigenvalues, mass * dec.eigenvectors.row(0).transpose().array().square().matrix()};
}

struct Endpoint {
  double where;
  double power;  // weight ~ |u - where|^power
};

struct Setup {
  double lo;
  double hi;
  std::vector<double> breaks;
  std::vector<Endpoint> singular;
};

Setup make_setup(const orthopoly::FamilySpec& family, Interval interval, Eigen::Index m, double beta,
                 double r) {
  const orthopoly::Support sup = orthopoly::support(family);
  if (!(interval.lo < interval.hi)) throw PreconditionError("integral_kernel: empty interval");
  if (interval.lo < sup.lo || interval.hi > sup.hi) {
    throw PreconditionError("integral_kernel: interval leaves the support of the weight");
  }
  const double md = static_cast<double>(m);
  double cut_lo = sup.lo;
  double cut_hi = sup.hi;
  std::vector<Endpoint> singular;
  if (std::holds_alternative<orthopoly::Hermite>(family)) {
    const double u = std::sqrt(2.0 * md + 1.0) + 10.0;
    cut_lo = -u;
    cut_hi = u;
  } else if (const auto* f = std::get_if<orthopoly::Laguerre>(&family)) {
    cut_hi = 4.0 * md + 2.0 * f->c + 100.0;
    if (f->c != 1.0) singular.push_back({0.0, f->c - 1.0});
  } else if (const auto* f = std::get_if<orthopoly::Jacobi>(&family)) {
    if (f->b != 0.0) singular.push_back({-1.0, f->b});
    if (f->a != 0.0) singular.push_back({1.0, f->a});
  }

  Setup s;
  if (std::isinf(beta)) {
    s.lo = std::max(interval.lo, cut_lo);
    s.hi = std::min(interval.hi, cut_hi);
  } else {
    s.lo = cut_lo;
    s.hi = cut_hi;
  }
  if (!(s.lo < s.hi)) throw PreconditionError("integral_kernel: interval misses the effective support");
  s.breaks = {s.lo, s.hi};
  if (std::isfinite(beta) && r > s.lo && r < s.hi) s.breaks.push_back(r);
  // A single panel must not carry both endpoint singularities.
  if (singular.size() == 2 && s.lo == -1.0 && s.hi == 1.0) s.breaks.push_back(0.0);
  std::sort(s.breaks.begin(), s.breaks.end());
  s.singular = std::move(singular);
  return s;
}

}  // namespace

CorrelationKernel integral_kernel(const orthopoly::FamilySpec& family, Interval interval,
                                  Eigen::Index m, double beta, double r) {
  if (!orthopoly::is_continuous(family)) {
    throw PreconditionError("integral_kernel: " + orthopoly::family_name(family) +
                            " is not a continuous family");
  }
  orthopoly::validate(family);
  if (m < 1) throw PreconditionError("integral_kernel: window must be nonempty");
  if (!(beta > 0.0)) throw PreconditionError("integral_kernel: beta must be positive");

  const Setup setup = make_setup(family, interval, m, beta, r);
  const orthopoly::Support sup = orthopoly::support(family);
  const bool upper = interval.hi >= sup.hi;
  const orthopoly::Recurrence rec = orthopoly::recurrence(family, m);
  const Rule legendre = gauss_jacobi(0.0, 0.0);

  auto occupation = [&](double u) {
    if (std::isinf(beta)) return 1.0;
    return upper ? linalg::fermi(beta, r - u) : linalg::fermi(beta, u - r);
  };

  auto accumulate = [&](Matrix& k, double u, double quad_weight) {
    const double w = quad_weight * occupation(u);
    if (!(w > 0.0)) return;
    // ψ_x = p̃_x √w, by the orthonormal recurrence started at √(w/μ₀).
    Vector psi(m);
    psi(0) = std::sqrt(w / rec.total_mass);
    if (m > 1) psi(1) = (u - rec.diagonal(0)) * psi(0) / rec.offdiagonal(0);
    for (Eigen::Index x = 1; x + 1 < m; ++x) {
      psi(x + 1) = ((u - rec.diagonal(x)) * psi(x) - rec.offdiagonal(x - 1) * psi(x - 1)) /
                   rec.offdiagonal(x);
    }
    k.selfadjointView<Eigen::Lower>().rankUpdate(psi);
  };

  auto integrate = [&](int panels) {
    Matrix k = Matrix::Zero(m, m);
    for (std::size_t seg = 0; seg + 1 < setup.breaks.size(); ++seg) {
      const double a = setup.breaks[seg];
      const double b = setup.breaks[seg + 1];
      const double h = (b - a) / panels;
      for (int p = 0; p < panels; ++p) {
        const double pa = a + p * h;
        const double pb = p + 1 == panels ? b : pa + h;
        const double half = 0.5 * (pb - pa);
        const Endpoint* end = nullptr;
        for (const auto& e : setup.singular) {
          if ((p == 0 && e.where == pa) || (p + 1 == panels && e.where == pb)) end = &e;
        }
        if (end == nullptr) {
          for (Eigen::Index i = 0; i < kPanelOrder; ++i) {
            const double u = pa + half * (legendre.nodes(i) + 1.0);
            accumulate(k, u, half * legendre.weights(i) * orthopoly::weight(family, u));
          }
          continue;
        }
        // |u - e|^γ = half^γ (1 ± s)^γ is absorbed by the rule; the rest of w is smooth here.
        const bool left = end->where == pa;
        const Rule rule = left ? gauss_jacobi(0.0, end->power) : gauss_jacobi(end->power, 0.0);
        const double scale = std::pow(half, end->power + 1.0);
        for (Eigen::Index i = 0; i < kPanelOrder; ++i) {
          const double u = pa + half * (rule.nodes(i) + 1.0);
          const double dist = std::abs(u - end->where);
          const double smooth =
              std::exp(orthopoly::log_weight(family, u) - end->power * std::log(dist));
          accumulate(k, u, scale * rule.weights(i) * smooth);
        }
      }
    }
    k.triangularView<Eigen::StrictlyUpper>() = k.transpose();
    return k;
  };

  Matrix previous = integrate(kInitialPanels);
  for (int panels = 2 * kInitialPanels; panels <= kMaxPanels; panels *= 2) {
    Matrix current = integrate(panels);
    const double change = (current - previous).cwiseAbs().maxCoeff();
    if (change <= kStabilization) {
      return CorrelationKernel(std::move(current), linalg::default_labels(m), Provenance::Integral);
    }
    previous = std::move(current);
  }
  throw NumericalError("integral_kernel: quadrature did not stabilize within the panel cap",
                       kStabilization);
}

}  // namespace kmsdpp::kernels

// Copyright 2026 The kmsdpp Authors
// SPDX-License-Identifier: Apache-2.0

#include "kmsdpp/cyclic_chain.hpp"

#include <cmath>
#include <string>

namespace kmsdpp {

using linalg::Matrix;
using linalg::Vector;

CyclicChain::CyclicChain(std::vector<Matrix> transfers) : transfers_(std::move(transfers)) {
  if (transfers_.empty()) throw PreconditionError("CyclicChain: need at least one transfer");
  const Eigen::Index s = transfers_.front().rows();
  for (const auto& t : transfers_) {
    if (t.rows() != s || t.cols() != s) throw PreconditionError("CyclicChain: transfer shape mismatch");
    if (!t.allFinite()) throw NumericalError("CyclicChain: non-finite transfer entry", 0.0);
    if (t.minCoeff() < 0.0) throw ValidityError("CyclicChain: negative transfer entry");
  }
  const std::size_t n = transfers_.size();
  suffix_.resize(n);
  suffix_[n - 1] = transfers_[n - 1];
  for (std::size_t i = n - 1; i-- > 0;) suffix_[i] = transfers_[i] * suffix_[i + 1];
  trace_ = suffix_[0].trace();
  if (!(trace_ > 0.0) || !std::isfinite(trace_)) {
    throw NumericalError("CyclicChain: trace underflow or overflow", trace_);
  }
}

double CyclicChain::probability(std::span<const Eigen::Index> path) const {
  const std::size_t n = transfers_.size();
  if (path.size() != n) throw PreconditionError("CyclicChain: path length mismatch");
  double p = 1.0;
  for (std::size_t i = 0; i < n; ++i) {
    p *= transfers_[i](path[i], path[(i + 1) % n]);
    if (p == 0.0) return 0.0;
  }
  return p / trace_;
}

Vector CyclicChain::marginal(std::size_t i) const {
  const std::size_t n = transfers_.size();
  if (i >= n) throw PreconditionError("CyclicChain: time index out of range");
  // diag(T_i ⋯ T_n T_1 ⋯ T_{i-1}) = diag(R_i · P_{i-1}) with P the prefix product.
  Matrix prefix = Matrix::Identity(states(), states());
  for (std::size_t j = 0; j < i; ++j) prefix = prefix * transfers_[j];
  const Matrix& r = suffix_[i];
  Vector m(states());
  for (Eigen::Index x = 0; x < states(); ++x) m(x) = r.row(x).dot(prefix.col(x));
  return (m.array().max(0.0) / trace_).matrix();
}

std::vector<Eigen::Index> CyclicChain::sample(random::Stream& stream) const {
  const std::size_t n = transfers_.size();
  const Eigen::Index s = states();
  std::vector<Eigen::Index> path(n);
  std::vector<double> w(static_cast<std::size_t>(s));

  double total = 0.0;
  for (Eigen::Index x = 0; x < s; ++x) {
    w[static_cast<std::size_t>(x)] = std::max(suffix_[0](x, x), 0.0);
    total += w[static_cast<std::size_t>(x)];
  }
  path[0] = static_cast<Eigen::Index>(stream.categorical(w, total));
  const Eigen::Index first = path[0];

  for (std::size_t i = 1; i < n; ++i) {
    const Eigen::Index prev = path[i - 1];
    total = 0.0;
    for (Eigen::Index x = 0; x < s; ++x) {
      const double v = transfers_[i - 1](prev, x) * suffix_[i](x, first);
      w[static_cast<std::size_t>(x)] = v > 0.0 ? v : 0.0;
      total += w[static_cast<std::size_t>(x)];
    }
    if (!(total > 0.0)) throw NumericalError("CyclicChain: conditional mass vanished", total);
    path[i] = static_cast<Eigen::Index>(stream.categorical(w, total));
  }
  return path;
}

}  // namespace kmsdpp

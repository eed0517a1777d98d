// Copyright 2026 The kmsdpp Authors
// SPDX-License-Identifier: Apache-2.0

#include "kmsdpp/fock.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <map>
#include <optional>
#include <queue>
#include <sstream>
#include <unordered_map>

namespace kmsdpp::fock {

using linalg::Matrix;
using linalg::Vector;

FockSpace::FockSpace(linalg::SiteLabels sites) : labels_(std::move(sites)) {
  if (labels_.size() > static_cast<std::size_t>(kMaxSites)) {
    throw SizeError("FockSpace: " + std::to_string(labels_.size()) + " sites exceed the cap of " +
                    std::to_string(kMaxSites));
  }
  for (std::size_t i = 1; i < labels_.size(); ++i) {
    if (!(labels_[i - 1] < labels_[i])) throw PreconditionError("FockSpace: sites must ascend");
  }
}

FockOperator::FockOperator(FockSpace space, Matrix entries)
    : space_(std::move(space)), entries_(std::move(entries)) {
  if (entries_.rows() != space_.dim() || entries_.cols() != space_.dim()) {
    throw PreconditionError("FockOperator: matrix does not match the Fock dimension");
  }
  if (!entries_.allFinite()) throw NumericalError("FockOperator: non-finite entry", 0.0);
}

namespace {

void require_same_space(const FockOperator& a, const FockOperator& b) {
  if (!(a.space() == b.space())) throw PreconditionError("FockOperator: operands act on different spaces");
}

}  // namespace

FockOperator operator*(const FockOperator& a, const FockOperator& b) {
  require_same_space(a, b);
  return {a.space_, a.entries_ * b.entries_};
}

FockOperator operator+(const FockOperator& a, const FockOperator& b) {
  require_same_space(a, b);
  return {a.space_, a.entries_ + b.entries_};
}

FockOperator operator-(const FockOperator& a, const FockOperator& b) {
  require_same_space(a, b);
  return {a.space_, a.entries_ - b.entries_};
}

FockOperator operator*(double c, const FockOperator& a) { return {a.space_, c * a.entries_}; }

FockOperator identity(const FockSpace& space) {
  return {space, Matrix::Identity(space.dim(), space.dim())};
}

FockOperator anticommutator(const FockOperator& a, const FockOperator& b) { return a * b + b * a; }

namespace {

Matrix creation_matrix(const FockSpace& space, int x) {
  const Eigen::Index d = space.dim();
  Matrix c = Matrix::Zero(d, d);
  const Mask bit = Mask{1} << x;
  for (Eigen::Index col = 0; col < d; ++col) {
    const auto mask = static_cast<Mask>(col);
    if ((mask & bit) != 0U) continue;
    c(static_cast<Eigen::Index>(mask | bit), col) = jordan_wigner_sign(mask, x);
  }
  return c;
}

}  // namespace

CarOperators car_operators(const FockSpace& space) {
  CarOperators ops;
  for (int x = 0; x < space.sites(); ++x) {
    Matrix c = creation_matrix(space, x);
    Matrix a = c.transpose();
    Matrix rho = c * a;
    ops.create.emplace_back(space, std::move(c));
    ops.annihilate.emplace_back(space, std::move(a));
    ops.density.emplace_back(space, std::move(rho));
  }
  return ops;
}

FockOperator creation(const FockSpace& space, const Vector& h) {
  if (h.size() != space.sites()) throw PreconditionError("creation: coefficient size mismatch");
  Matrix c = Matrix::Zero(space.dim(), space.dim());
  for (int x = 0; x < space.sites(); ++x) {
    if (h(x) != 0.0) c += h(x) * creation_matrix(space, x);
  }
  return {space, std::move(c)};
}

FockOperator annihilation(const FockSpace& space, const Vector& k) {
  return creation(space, k).adjoint();
}

FockOperator configuration_projector(const FockSpace& space, Mask omega) {
  if (static_cast<Eigen::Index>(omega) >= space.dim()) {
    throw PreconditionError("configuration_projector: mask outside the window");
  }
  Matrix p = Matrix::Zero(space.dim(), space.dim());
  p(omega, omega) = 1.0;
  return {space, std::move(p)};
}

FockOperator second_quantization(const FockSpace& space, const linalg::SymmetricOperator& h) {
  if (h.sites() != space.labels()) {
    throw PreconditionError("second_quantization: operator window differs from the Fock window");
  }
  const int m = space.sites();
  const Eigen::Index d = space.dim();
  Matrix l = Matrix::Zero(d, d);
  for (Eigen::Index col = 0; col < d; ++col) {
    const auto mask = static_cast<Mask>(col);
    for (int y = 0; y < m; ++y) {
      if ((mask & (Mask{1} << y)) == 0U) continue;
      l(col, col) += h(y, y);
      const Mask removed = mask & ~(Mask{1} << y);
      const int sy = jordan_wigner_sign(mask, y);
      for (int x = 0; x < m; ++x) {
        if (x == y || (removed & (Mask{1} << x)) != 0U || h(x, y) == 0.0) continue;
        const Mask added = removed | (Mask{1} << x);
        l(static_cast<Eigen::Index>(added), col) += h(x, y) * sy * jordan_wigner_sign(removed, x);
      }
    }
  }
  return {space, std::move(l)};
}

ThermalState::ThermalState(const FockOperator& l, double beta) : space_(l.space()), beta_(beta) {
  if (!(beta_ > 0.0) || !std::isfinite(beta_)) {
    throw PreconditionError("ThermalState: beta must be positive and finite");
  }
  const Matrix& a = l.matrix();
  const double asym = (a - a.transpose()).cwiseAbs().maxCoeff();
  if (asym > 1e-12 * (1.0 + a.cwiseAbs().maxCoeff())) {
    throw PreconditionError("ThermalState: L is not self-adjoint");
  }
  const Eigen::Index d = space_.dim();
  sector_of_.assign(static_cast<std::size_t>(d), 0);
  for (Eigen::Index i = 0; i < d; ++i) sector_of_[static_cast<std::size_t>(i)] = __builtin_popcount(static_cast<Mask>(i));
  if (!block_diagonal(a)) std::fill(sector_of_.begin(), sector_of_.end(), 0);
  const int count = *std::max_element(sector_of_.begin(), sector_of_.end()) + 1;
  sectors_.resize(static_cast<std::size_t>(count));
  for (Eigen::Index i = 0; i < d; ++i) sectors_[static_cast<std::size_t>(sector_of_[static_cast<std::size_t>(i)])].states.push_back(i);

  e_min_ = std::numeric_limits<double>::infinity();
  for (auto& s : sectors_) {
    const Matrix sub = block(a, s);
    Eigen::SelfAdjointEigenSolver<Matrix> solver(0.5 * (sub + sub.transpose()));
    if (solver.info() != Eigen::Success) throw NumericalError("ThermalState: eigensolver failed", 0.0);
    s.energies = solver.eigenvalues();
    s.vectors = solver.eigenvectors();
    e_min_ = std::min(e_min_, s.energies.minCoeff());
  }
  z_shifted_ = 0.0;
  for (const auto& s : sectors_) z_shifted_ += decay(s, beta_).sum();
}

bool ThermalState::block_diagonal(const Matrix& a) const {
  for (Eigen::Index j = 0; j < a.cols(); ++j) {
    for (Eigen::Index i = 0; i < a.rows(); ++i) {
      if (a(i, j) != 0.0 && sector_of_[static_cast<std::size_t>(i)] != sector_of_[static_cast<std::size_t>(j)]) {
        return false;
      }
    }
  }
  return true;
}

Vector ThermalState::decay(const Sector& s, double tau) const {
  return (-std::max(tau, 0.0) * (s.energies.array() - e_min_)).exp().matrix();
}

Matrix ThermalState::block(const Matrix& a, const Sector& s) {
  const auto n = static_cast<Eigen::Index>(s.states.size());
  Matrix out(n, n);
  for (Eigen::Index j = 0; j < n; ++j) {
    for (Eigen::Index i = 0; i < n; ++i) out(i, j) = a(s.states[static_cast<std::size_t>(i)], s.states[static_cast<std::size_t>(j)]);
  }
  return out;
}

Vector ThermalState::energies() const {
  std::vector<double> all;
  for (const auto& s : sectors_) all.insert(all.end(), s.energies.data(), s.energies.data() + s.energies.size());
  std::sort(all.begin(), all.end());
  return Eigen::Map<const Vector>(all.data(), static_cast<Eigen::Index>(all.size()));
}

double ThermalState::log_partition() const noexcept { return -beta_ * e_min_ + std::log(z_shifted_); }

Matrix ThermalState::heat_kernel(double tau) const {
  const Eigen::Index d = space_.dim();
  Matrix out = Matrix::Zero(d, d);
  for (const auto& s : sectors_) {
    const Matrix k = s.vectors * decay(s, tau).asDiagonal() * s.vectors.transpose();
    for (std::size_t j = 0; j < s.states.size(); ++j) {
      for (std::size_t i = 0; i < s.states.size(); ++i) {
        out(s.states[i], s.states[j]) = k(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j));
      }
    }
  }
  return out;
}

double ThermalState::expectation(const FockOperator& a) const {
  if (!(a.space() == space_)) throw PreconditionError("expectation: operator acts on another space");
  // e^{-βL} is block diagonal, so only the diagonal blocks of A reach the trace.
  double acc = 0.0;
  for (const auto& s : sectors_) {
    const Matrix rotated = s.vectors.transpose() * block(a.matrix(), s) * s.vectors;
    acc += decay(s, beta_).dot(rotated.diagonal());
  }
  return acc / z_shifted_;
}

double ThermalState::schwinger(std::span<const FockOperator> ops, std::span<const double> times) const {
  if (ops.empty() || ops.size() != times.size()) {
    throw PreconditionError("schwinger: need one time per operator and at least one operator");
  }
  const double half = 0.5 * beta_;
  bool conserving = true;
  for (std::size_t i = 0; i < times.size(); ++i) {
    if (std::abs(times[i]) > half * (1.0 + 1e-12)) throw DomainError("schwinger: time outside [-beta/2, beta/2]");
    if (i > 0 && times[i] < times[i - 1]) throw PreconditionError("schwinger: times must be nondecreasing");
    if (!(ops[i].space() == space_)) throw PreconditionError("schwinger: operator acts on another space");
    conserving = conserving && block_diagonal(ops[i].matrix());
  }
  auto gap_after = [&](std::size_t i) { return i + 1 < ops.size() ? times[i + 1] - times[i] : half - times[i]; };

  if (conserving) {
    double acc = 0.0;
    for (const auto& s : sectors_) {
      Matrix m = decay(s, times.front() + half).asDiagonal();
      for (std::size_t i = 0; i < ops.size(); ++i) {
        m = m * (s.vectors.transpose() * block(ops[i].matrix(), s) * s.vectors);
        m = m * decay(s, gap_after(i)).asDiagonal();
      }
      acc += m.trace();
    }
    return acc / z_shifted_;
  }

  // General operators: heat kernels in the occupation basis.
  Matrix m = heat_kernel(times.front() + half);
  for (std::size_t i = 0; i < ops.size(); ++i) m = m * ops[i].matrix() * heat_kernel(gap_after(i));
  return m.trace() / z_shifted_;
}

double gibbs_expectation(const FockOperator& l, double beta, const FockOperator& a) {
  return ThermalState(l, beta).expectation(a);
}

double schwinger(const FockOperator& l, double beta, std::span<const FockOperator> ops,
                 std::span<const double> times) {
  return ThermalState(l, beta).schwinger(ops, times);
}

std::vector<int> sign_gauge(const linalg::SymmetricOperator& h, bool* found) {
  const Eigen::Index m = h.dim();
  std::vector<int> s(static_cast<std::size_t>(m), 0);
  bool ok = true;
  for (Eigen::Index root = 0; root < m; ++root) {
    if (s[static_cast<std::size_t>(root)] != 0) continue;
    s[static_cast<std::size_t>(root)] = 1;
    std::queue<Eigen::Index> queue;
    queue.push(root);
    while (!queue.empty()) {
      const Eigen::Index x = queue.front();
      queue.pop();
      for (Eigen::Index y = 0; y < m; ++y) {
        if (y == x || h(x, y) == 0.0) continue;
        // s_x s_y H(x,y) ≤ 0
        const int want = h(x, y) > 0.0 ? -s[static_cast<std::size_t>(x)] : s[static_cast<std::size_t>(x)];
        int& sy = s[static_cast<std::size_t>(y)];
        if (sy == 0) {
          sy = want;
          queue.push(y);
        } else if (sy != want) {
          ok = false;
        }
      }
    }
  }
  if (!ok) std::fill(s.begin(), s.end(), 1);
  if (found != nullptr) *found = ok;
  return s;
}

namespace {

linalg::SymmetricOperator apply_gauge(const linalg::SymmetricOperator& h, const std::vector<int>& s) {
  Matrix g = h.matrix();
  for (Eigen::Index i = 0; i < g.rows(); ++i) {
    for (Eigen::Index j = 0; j < g.cols(); ++j) {
      g(i, j) *= s[static_cast<std::size_t>(i)] * s[static_cast<std::size_t>(j)];
    }
  }
  return linalg::SymmetricOperator(g, h.sites());
}

double binomial(int n, int k) {
  double b = 1.0;
  for (int i = 1; i <= k; ++i) b = b * (n - k + i) / i;
  return b;
}

// Small dense determinant by partial pivoting, k ≤ kMaxMinorOrder.
double small_det(std::array<double, kMaxMinorOrder * kMaxMinorOrder> a, int k) {
  double det = 1.0;
  for (int c = 0; c < k; ++c) {
    int piv = c;
    for (int r = c + 1; r < k; ++r) {
      if (std::abs(a[r * k + c]) > std::abs(a[piv * k + c])) piv = r;
    }
    if (a[piv * k + c] == 0.0) return 0.0;
    if (piv != c) {
      for (int j = 0; j < k; ++j) std::swap(a[c * k + j], a[piv * k + j]);
      det = -det;
    }
    const double p = a[c * k + c];
    det *= p;
    for (int r = c + 1; r < k; ++r) {
      const double f = a[r * k + c] / p;
      for (int j = c + 1; j < k; ++j) a[r * k + j] -= f * a[c * k + j];
    }
  }
  return det;
}

// Advances a sorted k-combination of {0..m-1}; false after the last one.
bool next_combination(std::vector<Eigen::Index>& c, Eigen::Index m) {
  const auto k = static_cast<Eigen::Index>(c.size());
  for (Eigen::Index i = k - 1; i >= 0; --i) {
    if (c[static_cast<std::size_t>(i)] < m - k + i) {
      ++c[static_cast<std::size_t>(i)];
      for (Eigen::Index j = i + 1; j < k; ++j) {
        c[static_cast<std::size_t>(j)] = c[static_cast<std::size_t>(j - 1)] + 1;
      }
      return true;
    }
  }
  return false;
}

MinorWitness min_minor(const Matrix& e, int max_order) {
  const Eigen::Index m = e.rows();
  MinorWitness best;
  best.value = std::numeric_limits<double>::infinity();
  for (int k = 1; k <= max_order; ++k) {
    std::vector<Eigen::Index> rows(static_cast<std::size_t>(k));
    for (int i = 0; i < k; ++i) rows[static_cast<std::size_t>(i)] = i;
    do {
      std::vector<Eigen::Index> cols(static_cast<std::size_t>(k));
      for (int i = 0; i < k; ++i) cols[static_cast<std::size_t>(i)] = i;
      do {
        std::array<double, kMaxMinorOrder * kMaxMinorOrder> a{};
        for (int i = 0; i < k; ++i) {
          for (int j = 0; j < k; ++j) {
            a[static_cast<std::size_t>(i * k + j)] =
                e(rows[static_cast<std::size_t>(i)], cols[static_cast<std::size_t>(j)]);
          }
        }
        const double v = small_det(a, k);
        if (v < best.value) best = {k, rows, cols, v};
      } while (next_combination(cols, m));
    } while (next_combination(rows, m));
  }
  return best;
}

constexpr double kMaxMinorCount = 5e8;
constexpr int kFockReportSites = 10;

}  // namespace

CertificateReport positivity_certificate(const linalg::SymmetricOperator& h, double beta,
                                         std::span<const double> grid) {
  if (!(beta > 0.0)) throw PreconditionError("positivity_certificate: beta must be positive");
  for (double t : grid) {
    if (!(t > 0.0) || t > beta * (1.0 + 1e-12)) {
      throw PreconditionError("positivity_certificate: grid times must lie in (0, beta]");
    }
  }
  const Eigen::Index m = h.dim();
  const int order = static_cast<int>(std::min<Eigen::Index>(m, kMaxMinorOrder));
  double count = 0.0;
  for (int k = 1; k <= order; ++k) count += binomial(static_cast<int>(m), k) * binomial(static_cast<int>(m), k);
  if (count * static_cast<double>(grid.size()) > kMaxMinorCount) {
    throw SizeError("positivity_certificate: minor scan exceeds the work cap");
  }

  CertificateReport report;
  report.gauge = sign_gauge(h, &report.gauge_found);
  const linalg::SymmetricOperator gauged = apply_gauge(h, report.gauge);
  const auto dec = linalg::eig_sym(gauged);
  const double lambda_min = dec.eigenvalues.minCoeff();

  std::optional<ThermalState> many_body;
  if (m <= kFockReportSites) {
    const FockSpace space(h.sites());
    many_body.emplace(second_quantization(space, gauged), beta);
  }

  report.pass = true;
  for (double t : grid) {
    const Vector f = (-t * (dec.eigenvalues.array() - lambda_min)).exp().matrix();
    const Matrix e = dec.eigenvectors * f.asDiagonal() * dec.eigenvectors.transpose();
    MinorWitness w = min_minor(e, order);
    const bool pass = w.value >= kMinorThreshold;
    report.pass = report.pass && pass;
    const double fock_min = many_body ? many_body->heat_kernel(t).minCoeff() : std::numeric_limits<double>::quiet_NaN();
    report.rows.push_back({t, w.order, w.value, pass, std::move(w), fock_min});
  }
  return report;
}

namespace {

std::vector<double> validated_grid(std::vector<double> grid, double beta) {
  if (!(beta > 0.0) || !std::isfinite(beta)) throw PreconditionError("PathLaw: beta must be positive and finite");
  if (grid.empty()) throw PreconditionError("PathLaw: grid must be nonempty");
  for (std::size_t i = 0; i < grid.size(); ++i) {
    if (std::abs(grid[i]) > 0.5 * beta * (1.0 + 1e-12)) {
      throw DomainError("PathLaw: grid time outside [-beta/2, beta/2]");
    }
    if (i > 0 && !(grid[i] > grid[i - 1])) throw PreconditionError("PathLaw: grid must be strictly increasing");
  }
  return grid;
}

std::vector<double> gaps(const std::vector<double>& grid, double beta) {
  std::vector<double> g;
  for (std::size_t i = 0; i + 1 < grid.size(); ++i) g.push_back(grid[i + 1] - grid[i]);
  g.push_back(std::max(beta - (grid.back() - grid.front()), 0.0));
  return g;
}

CertificateReport certify(const linalg::SymmetricOperator& h, double beta, const std::vector<double>& grid) {
  std::vector<double> ts;
  for (double g : gaps(grid, beta)) {
    if (g > 0.0 && std::find(ts.begin(), ts.end(), g) == ts.end()) ts.push_back(g);
  }
  CertificateReport report = positivity_certificate(h, beta, ts);
  if (!report.pass) {
    std::ostringstream os;
    os << "PathLaw: stochastic positivity not certified";
    for (const auto& row : report.rows) {
      if (!row.pass) os << "; t=" << row.t << " minor of order " << row.min_minor_order << " = " << row.min_minor_value;
    }
    throw ValidityError(os.str());
  }
  return report;
}

struct Transfers {
  std::vector<Matrix> matrices;
  double log_z;
};

Transfers build_transfers(const linalg::SymmetricOperator& h, const FockSpace& space, double beta,
                          const std::vector<double>& grid, const std::vector<int>& gauge) {
  const ThermalState state(second_quantization(space, apply_gauge(h, gauge)), beta);
  std::map<double, Matrix> cache;
  Transfers out{{}, state.log_partition()};
  for (double g : gaps(grid, beta)) {
    auto it = cache.find(g);
    if (it == cache.end()) {
      Matrix k = state.heat_kernel(g);
      const double lo = k.minCoeff();
      if (lo < kTransferClamp) {
        throw ValidityError("PathLaw: transfer entry " + std::to_string(lo) + " below the clamp threshold");
      }
      k = k.cwiseMax(0.0);
      it = cache.emplace(g, std::move(k)).first;
    }
    out.matrices.push_back(it->second);
  }
  return out;
}

}  // namespace

PathLaw::PathLaw(const linalg::SymmetricOperator& h, double beta, std::vector<double> grid)
    : space_(h.sites()),
      beta_(beta),
      grid_(validated_grid(std::move(grid), beta)),
      certificate_(certify(h, beta, grid_)),
      log_z_(0.0),
      chain_([&] {
        Transfers t = build_transfers(h, space_, beta_, grid_, certificate_.gauge);
        log_z_ = t.log_z;
        return CyclicChain(std::move(t.matrices));
      }()) {}

double PathLaw::probability(std::span<const Mask> path) const {
  std::vector<Eigen::Index> idx(path.begin(), path.end());
  for (auto i : idx) {
    if (i < 0 || i >= space_.dim()) throw PreconditionError("PathLaw: mask outside the window");
  }
  return chain_.probability(idx);
}

std::vector<Trajectory> sample_trajectory(const PathLaw& law, std::uint64_t seed, std::size_t count,
                                          int threads) {
  std::vector<Trajectory> out(count);
  random::for_each_chunk(count, threads, [&](std::size_t chunk, std::size_t begin, std::size_t end) {
    random::Stream stream(seed, chunk);
    for (std::size_t i = begin; i < end; ++i) {
      const auto path = law.chain().sample(stream);
      out[i].assign(path.begin(), path.end());
    }
  });
  return out;
}

namespace {

constexpr double kMaxEnumeratedPaths = 1e7;

}  // namespace

std::vector<std::pair<Trajectory, double>> enumerate_paths(const PathLaw& law) {
  const auto n = law.grid().size();
  const auto s = static_cast<std::uint64_t>(law.space().dim());
  if (std::pow(static_cast<double>(s), static_cast<double>(n)) > kMaxEnumeratedPaths) {
    throw SizeError("enumerate_paths: too many grid paths");
  }
  std::vector<std::pair<Trajectory, double>> out;
  Trajectory path(n, 0);
  while (true) {
    out.emplace_back(path, law.probability(path));
    std::size_t i = n;
    while (i > 0) {
      --i;
      if (++path[i] < s) break;
      path[i] = 0;
      if (i == 0) return out;
    }
  }
}

double markov_residual(const PathLaw& law) {
  const auto paths = enumerate_paths(law);
  const std::size_t n = law.grid().size();
  const auto s = static_cast<std::uint64_t>(law.space().dim());
  auto key = [&](const Trajectory& p, auto&& keep) {
    std::uint64_t k = 0;
    for (std::size_t t = 0; t < n; ++t) k = k * (s + 1) + (keep(t) ? p[t] + 1 : 0);
    return k;
  };
  double worst = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) {
      auto ends = [&](std::size_t t) { return t == i || t == j; };
      auto inner = [&](std::size_t t) { return t >= i && t <= j; };
      auto outer = [&](std::size_t t) { return t <= i || t >= j; };
      std::unordered_map<std::uint64_t, double> p_ends;
      std::unordered_map<std::uint64_t, double> p_inner;
      std::unordered_map<std::uint64_t, double> p_outer;
      for (const auto& [p, v] : paths) {
        p_ends[key(p, ends)] += v;
        p_inner[key(p, inner)] += v;
        p_outer[key(p, outer)] += v;
      }
      for (const auto& [p, v] : paths) {
        const double lhs = v * p_ends[key(p, ends)];
        const double rhs = p_inner[key(p, inner)] * p_outer[key(p, outer)];
        worst = std::max(worst, std::abs(lhs - rhs));
      }
    }
  }
  return worst;
}

}  // namespace kmsdpp::fock

// Copyright 2026 The kmsdpp Authors
// SPDX-License-Identifier: Apache-2.0

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <ctime>
#include <fstream>
#include <iostream>
#include <set>

#include "kmsdpp/cli.hpp"
#include "kmsdpp/dpp.hpp"
#include "kmsdpp/fock.hpp"
#include "kmsdpp/kernels.hpp"
#include "kmsdpp/random.hpp"
#include "kmsdpp/schur.hpp"

#ifndef KMSDPP_VERSION
#define KMSDPP_VERSION "unknown"
#endif

namespace kmsdpp::cli {
namespace {

using linalg::Matrix;
using linalg::SymmetricOperator;
using linalg::Vector;
using nlohmann::json;
namespace fs = std::filesystem;

constexpr double kTraceTolerance = 1e-9;
constexpr double kStaticTolerance = 1e-8;
constexpr int kProtectedMargin = 4;
constexpr double kDefaultLadderBeta = 1.0;
constexpr std::size_t kDefaultDraws = 1000;
constexpr int kMaxVerifySites = 6;
constexpr int kMaxVerifyPoints = 4;
constexpr int kMaxDynamicsPoints = 3;

std::string num(double x) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

std::string join(const std::vector<double>& xs) {
  std::string s;
  for (std::size_t i = 0; i < xs.size(); ++i) s += (i > 0 ? " " : "") + num(xs[i]);
  return s;
}

/// Comma-separated rows; fields never contain commas or quotes.
class Csv {
 public:
  Csv(const fs::path& path, std::string_view header) : out_(path) {
    if (!out_) throw PreconditionError("cannot write " + path.string());
    out_ << header << '\n';
  }
  void row(std::initializer_list<std::string> fields) {
    bool first = true;
    for (const auto& f : fields) {
      if (!first) out_ << ',';
      out_ << f;
      first = false;
    }
    out_ << '\n';
  }

 private:
  std::ofstream out_;
};

std::string bits(std::span<const Eigen::Index> occupied, std::size_t m) {
  std::string s(m, '0');
  for (auto i : occupied) s[static_cast<std::size_t>(i)] = '1';
  return s;
}

std::string bits(fock::Mask mask, int m) {
  std::string s(static_cast<std::size_t>(m), '0');
  for (int i = 0; i < m; ++i) {
    if ((mask >> i) & 1U) s[static_cast<std::size_t>(i)] = '1';
  }
  return s;
}

struct Report {
  fs::path dir;
  std::vector<Failure> failures;

  void check(bool ok, const std::string& what) {
    if (!ok) failures.push_back({"numerical", what});
  }
};

// Discrete problems: window, H = -(D + μ) and the correlation kernel.
struct DiscreteProblem {
  orthopoly::SiteWindow window;
  SymmetricOperator h;
};

orthopoly::SiteWindow resolve_window(const ExperimentConfig& c) {
  return c.window ? orthopoly::make_window(*c.family, (*c.window)[0], (*c.window)[1])
                  : orthopoly::choose_window(*c.family);
}

DiscreteProblem discrete_problem(const ExperimentConfig& c) {
  orthopoly::SiteWindow window = resolve_window(c);
  const SymmetricOperator d = orthopoly::difference_operator(*c.family, window);
  const Eigen::Index m = d.dim();
  Matrix h = -(d.matrix() + c.mu * Matrix::Identity(m, m));
  return {window, SymmetricOperator(std::move(h), window.sites())};
}

/// Continuous families: T truncated to degrees 0..m-1 and H = -(T - μ).
SymmetricOperator continuous_hamiltonian(const ExperimentConfig& c) {
  const auto m = static_cast<Eigen::Index>((*c.window)[1]) + 1;
  const Matrix t = orthopoly::jacobi_operator(*c.family, m).matrix();
  return SymmetricOperator(-(t - c.mu * Matrix::Identity(m, m)));
}

struct KernelBundle {
  kernels::CorrelationKernel kernel;
  SymmetricOperator h;
};

KernelBundle build_kernel(const ExperimentConfig& c) {
  const double beta = c.beta.value_or(kernels::kInfinity);
  if (orthopoly::is_continuous(*c.family)) {
    const auto m = static_cast<Eigen::Index>((*c.window)[1]) + 1;
    const orthopoly::Support sup = orthopoly::support(*c.family);
    return {kernels::integral_kernel(*c.family, {c.mu, sup.hi}, m, beta, c.mu), continuous_hamiltonian(c)};
  }
  DiscreteProblem p = discrete_problem(c);
  if (std::isfinite(beta)) return {kernels::fermi_kernel(p.h, beta), p.h};
  if (c.N) {
    return {kernels::cd_kernel(orthopoly::polynomial_table(*c.family, p.window, *c.N)), p.h};
  }
  return {kernels::negative_projection(p.h), p.h};
}

kernels::SpaceTimeKernel build_space_time(const SymmetricOperator& h, double beta, std::optional<int> N) {
  if (std::isfinite(beta) || !N) return kernels::space_time_kernel(h, beta);
  const linalg::SpectralDecomposition dec = linalg::eig_sym(h);
  std::vector<bool> occupied(static_cast<std::size_t>(h.dim()), false);
  for (int n = 0; n < *N; ++n) occupied[static_cast<std::size_t>(n)] = true;
  return kernels::SpaceTimeKernel(dec.eigenvalues, dec.eigenvectors, dec.sites, beta, occupied);
}

void write_kernel(const fs::path& path, const kernels::CorrelationKernel& k) {
  Csv csv(path, "x,y,value");
  const auto& s = k.sites();
  for (Eigen::Index i = 0; i < k.size(); ++i) {
    for (Eigen::Index j = 0; j < k.size(); ++j) csv.row({num(s[i]), num(s[j]), num(k(i, j))});
  }
}

std::vector<double> chosen_sites(const ExperimentConfig& c, const linalg::SiteLabels& all) {
  return c.sites.empty() ? std::vector<double>(all.begin(), all.end()) : c.sites;
}

void run_kernel(const ExperimentConfig& c, Report& r) {
  const KernelBundle b = build_kernel(c);
  write_kernel(r.dir / "kernel.csv", b.kernel);
  if (c.times.empty()) return;
  const kernels::SpaceTimeKernel stk = build_space_time(b.h, *c.beta, c.N);
  const std::vector<double> sites = chosen_sites(c, b.kernel.sites());
  Csv csv(r.dir / "spacetime.csv", "x,t,y,s,value");
  for (double x : sites) {
    for (double t : c.times) {
      for (double y : sites) {
        for (double s : c.times) csv.row({num(x), num(t), num(y), num(s), num(stk.evaluate({x, t}, {y, s}))});
      }
    }
  }
}

void run_ensemble(const ExperimentConfig& c, Report& r) {
  const orthopoly::SiteWindow window = resolve_window(c);
  const dpp::ExplicitLaw law = dpp::explicit_law(dpp::OpEnsemble{*c.family, window, *c.N});
  const kernels::CorrelationKernel k = kernels::cd_kernel(orthopoly::polynomial_table(*c.family, window, *c.N));
  write_kernel(r.dir / "kernel.csv", k);
  {
    Csv csv(r.dir / "probabilities.csv", "bitstring,probability");
    for (const auto& atom : law.atoms()) csv.row({bits(atom.occupied, window.sites().size()), num(atom.probability)});
  }
  const std::vector<double> sites = chosen_sites(c, window.sites());
  Csv csv(r.dir / "correlations.csv", "sites,enumerated,kernel,abs_err");
  double worst = 0.0;
  auto emit = [&](std::vector<double> pts) {
    const double e = dpp::enumerate_correlations(law, pts);
    const double d = dpp::kernel_correlation(k, pts);
    worst = std::max(worst, std::abs(e - d));
    csv.row({join(pts), num(e), num(d), num(std::abs(e - d))});
  };
  for (std::size_t i = 0; i < sites.size(); ++i) emit({sites[i]});
  for (std::size_t i = 0; i < sites.size(); ++i) {
    for (std::size_t j = i + 1; j < sites.size(); ++j) emit({sites[i], sites[j]});
  }
  r.check(worst <= kStaticTolerance, "correlation mismatch " + num(worst) + " exceeds " + num(kStaticTolerance));
}

void run_sample(const ExperimentConfig& c, Report& r) {
  const KernelBundle b = build_kernel(c);
  const auto draws = dpp::sample_dpp(b.kernel, c.seed, *c.samples, c.threads);
  Csv csv(r.dir / "samples.csv", "sample_id,bitstring");
  for (std::size_t i = 0; i < draws.size(); ++i) csv.row({std::to_string(i), draws[i].bitstring()});
}

/// Distinct positive transfer lengths of a periodic grid of period β.
std::vector<double> grid_gaps(const std::vector<double>& grid, double beta) {
  std::set<double> gaps;
  for (std::size_t i = 0; i + 1 < grid.size(); ++i) {
    if (grid[i + 1] > grid[i]) gaps.insert(grid[i + 1] - grid[i]);
  }
  const double wrap = beta - (grid.back() - grid.front());
  if (wrap > 0.0) gaps.insert(wrap);
  return {gaps.begin(), gaps.end()};
}

struct VerifyCase {
  int n;
  std::vector<double> sites;
  std::vector<double> times;
  double det_value;
  double trace_value;
};

/// Draws n distinct (site, time) points, sorted by time, and compares both sides.
VerifyCase verify_case(random::Stream& rng, const SymmetricOperator& h, const fock::ThermalState& state,
                       const fock::CarOperators& car, const kernels::SpaceTimeKernel& stk,
                       const std::vector<double>& sites, const std::vector<double>& times, int max_points) {
  const auto pick = [&](std::size_t size) {
    return std::min(size - 1, static_cast<std::size_t>(rng.uniform() * static_cast<double>(size)));
  };
  const int cap = std::min<int>(max_points, static_cast<int>(sites.size() * times.size()));
  const int n = 1 + static_cast<int>(pick(static_cast<std::size_t>(cap)));
  std::vector<std::pair<double, double>> pts;  // (time, site)
  while (static_cast<int>(pts.size()) < n) {
    const std::pair<double, double> p{times[pick(times.size())], sites[pick(sites.size())]};
    if (std::find(pts.begin(), pts.end(), p) == pts.end()) pts.push_back(p);
  }
  std::stable_sort(pts.begin(), pts.end(), [](const auto& a, const auto& b) { return a.first < b.first; });
  VerifyCase out{n, {}, {}, 0.0, 0.0};
  std::vector<kernels::SpaceTimePoint> points;
  std::vector<fock::FockOperator> ops;
  for (const auto& [t, x] : pts) {
    out.sites.push_back(x);
    out.times.push_back(t);
    points.push_back({x, t});
    ops.push_back(car.density[static_cast<std::size_t>(h.index_of(x))]);
  }
  out.det_value = kernels::dynamical_correlation(stk, points);
  out.trace_value = state.schwinger(ops, out.times);
  return out;
}

void write_case(Csv& csv, std::size_t id, const VerifyCase& v) {
  csv.row({std::to_string(id), std::to_string(v.n), join(v.sites), join(v.times), num(v.det_value),
           num(v.trace_value), num(std::abs(v.det_value - v.trace_value))});
}

constexpr std::string_view kVerifyHeader = "case_id,n,sites,times,det_value,trace_value,abs_err";
// Separates the verification stream from the sampling streams of the same seed.
constexpr std::uint64_t kVerifyStream = 0x7665726966790000ULL;

void run_dynamics(const ExperimentConfig& c, Report& r) {
  const DiscreteProblem p = discrete_problem(c);
  const double beta = *c.beta;
  const int m = static_cast<int>(p.h.dim());

  const fock::CertificateReport cert = fock::positivity_certificate(p.h, beta, grid_gaps(c.times, beta));
  {
    Csv csv(r.dir / "certificate.csv", "t,min_minor_order,min_minor_value,pass");
    for (const auto& row : cert.rows) {
      csv.row({num(row.t), std::to_string(row.min_minor_order), num(row.min_minor_value), row.pass ? "true" : "false"});
    }
  }
  if (!cert.pass) throw ValidityError("positivity certificate failed; see certificate.csv");

  const fock::PathLaw law(p.h, beta, c.times);
  const auto draws = fock::sample_trajectory(law, c.seed, c.samples.value_or(kDefaultDraws), c.threads);
  {
    Csv csv(r.dir / "trajectory.csv", "draw_id,step,time,bitstring");
    for (std::size_t d = 0; d < draws.size(); ++d) {
      for (std::size_t i = 0; i < draws[d].size(); ++i) {
        csv.row({std::to_string(d), std::to_string(i), num(c.times[i]), bits(draws[d][i], m)});
      }
    }
  }

  const fock::FockSpace space(p.window.sites());
  const fock::ThermalState state(fock::second_quantization(space, p.h), beta);
  const fock::CarOperators car = fock::car_operators(space);
  const kernels::SpaceTimeKernel stk = kernels::space_time_kernel(p.h, beta);
  const std::vector<double> sites = chosen_sites(c, p.window.sites());
  random::Stream rng(c.seed ^ kVerifyStream, 0);
  Csv csv(r.dir / "verify.csv", kVerifyHeader);
  double worst = 0.0;
  for (int id = 0; id < c.cases; ++id) {
    const VerifyCase v = verify_case(rng, p.h, state, car, stk, sites, c.times, kMaxDynamicsPoints);
    worst = std::max(worst, std::abs(v.det_value - v.trace_value));
    write_case(csv, static_cast<std::size_t>(id), v);
  }
  r.check(worst <= kTraceTolerance, "trace-vs-det mismatch " + num(worst) + " exceeds " + num(kTraceTolerance));
}

void run_verify(const ExperimentConfig& c, Report& r) {
  random::Stream rng(c.seed ^ kVerifyStream, 0);
  Csv csv(r.dir / "verify.csv", kVerifyHeader);
  double worst = 0.0;
  for (int id = 0; id < c.cases; ++id) {
    const int m = 1 + std::min(kMaxVerifySites - 1, static_cast<int>(rng.uniform() * kMaxVerifySites));
    const double beta = (id % 2 == 0) ? 0.5 : 2.0;
    Matrix a(m, m);
    for (int i = 0; i < m; ++i) {
      for (int j = 0; j <= i; ++j) a(i, j) = a(j, i) = 2.0 * rng.uniform() - 1.0;
    }
    // Every other pair of cases is tridiagonal: a gauged birth-death H the certificate accepts.
    if ((id / 2) % 2 == 1) {
      for (int i = 0; i < m; ++i) {
        for (int j = 0; j < m; ++j) {
          if (std::abs(i - j) > 1) a(i, j) = 0.0;
        }
      }
    }
    const SymmetricOperator h(a);
    std::vector<double> times;
    for (int k = 0; k < kMaxVerifyPoints; ++k) times.push_back(beta * (rng.uniform() - 0.5));
    std::sort(times.begin(), times.end());
    const fock::FockSpace space(m);
    const fock::ThermalState state(fock::second_quantization(space, h), beta);
    const VerifyCase v = verify_case(rng, h, state, fock::car_operators(space), kernels::space_time_kernel(h, beta),
                                     h.sites(), times, kMaxVerifyPoints);
    worst = std::max(worst, std::abs(v.det_value - v.trace_value));
    write_case(csv, static_cast<std::size_t>(id), v);
  }
  r.check(worst <= kTraceTolerance, "trace-vs-det mismatch " + num(worst) + " exceeds " + num(kTraceTolerance));
}

void run_limits(const ExperimentConfig& c, Report& r) {
  std::vector<orthopoly::Regime> regimes;
  if (!c.regime || *c.regime == "all") {
    regimes = orthopoly::all_regimes();
  } else {
    regimes.push_back(orthopoly::parse_regime(*c.regime));
  }
  const double beta = c.beta.value_or(kDefaultLadderBeta);
  Csv ops(r.dir / "limits.csv", "regime,ladder_k,scale_param,sup_entry_error");
  Csv ks(r.dir / "limits_kernel.csv", "regime,ladder_k,scale_param,sup_entry_error");
  for (auto regime : regimes) {
    const std::vector<LadderRow> rows = ladder_table(regime, c.ladder, beta);
    std::vector<double> op_err;
    std::vector<double> k_err;
    for (const auto& row : rows) {
      const std::string name = orthopoly::regime_name(regime);
      ops.row({name, std::to_string(row.k), num(row.scale_param), num(row.operator_error)});
      ks.row({name, std::to_string(row.k), num(row.scale_param), num(row.kernel_error)});
      op_err.push_back(row.operator_error);
      k_err.push_back(row.kernel_error);
    }
    const std::string name = orthopoly::regime_name(regime);
    r.check(ladder_converges(op_err, 1.0), name + ": operator ladder is not strictly decreasing");
    r.check(ladder_converges(k_err, 1.0), name + ": kernel ladder is not strictly decreasing");
  }
}

void run_cylindric(const ExperimentConfig& c, Report& r) {
  const schur::PartitionSpace space(*c.n_max);
  const double beta = *c.beta;
  const double theta = *c.theta;
  const std::vector<double> grid = c.times.empty() ? std::vector<double>{0.0, beta / 2.0} : c.times;
  const std::vector<double> gaps = grid_gaps(grid, beta);

  {
    Csv csv(r.dir / "cylindric.csv", "lambda,mu,t,entry");
    for (double t : gaps) {
      const schur::TransitionMatrix tm = schur::transition_matrix(space, theta, t);
      r.check(tm.entries.minCoeff() >= 0.0, "negative transition entry at t = " + num(t));
      for (Eigen::Index i = 0; i < space.size(); ++i) {
        for (Eigen::Index j = 0; j < space.size(); ++j) {
          csv.row({space.at(i).to_string(), space.at(j).to_string(), num(t), num(tm.entries(i, j))});
        }
      }
    }
  }
  {
    Csv csv(r.dir / "semigroup.csv", "t,s,residual,bound");
    std::vector<double> steps = gaps;
    steps.push_back(beta / 4.0);
    for (double t : steps) {
      for (double s : steps) {
        const schur::SemigroupReport rep = schur::semigroup_check(space, theta, t, s, kProtectedMargin);
        csv.row({num(t), num(s), num(rep.residual), num(rep.bound)});
        r.check(rep.residual <= rep.bound, "semigroup residual above its tail bound at t = " + num(t));
      }
    }
  }
  const schur::CylindricLaw law(space, theta, beta, grid);
  const auto paths = schur::sample_cylindric(law, c.seed, c.samples.value_or(kDefaultDraws), c.threads);
  const linalg::SiteLabels window = schur::maya_window(std::max(*c.n_max, 1));
  Csv csv(r.dir / "trajectory.csv", "draw_id,step,time,bitstring");
  for (std::size_t d = 0; d < paths.size(); ++d) {
    for (std::size_t i = 0; i < paths[d].size(); ++i) {
      const auto config = schur::maya_configuration(space.at(paths[d][i]), window);
      csv.row({std::to_string(d), std::to_string(i), num(grid[i]), config.bitstring()});
    }
  }
}

std::string kind_name(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::Config: return "config";
    case ErrorKind::Precondition: return "precondition";
    case ErrorKind::Validity: return "validity";
    case ErrorKind::Numerical: return "numerical";
    case ErrorKind::Size: return "size";
  }
  return "unknown";
}

std::string utc_now() {
  const std::time_t now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&now, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

}  // namespace

std::vector<LadderRow> ladder_table(orthopoly::Regime regime, int rungs, double beta) {
  std::vector<LadderRow> rows;
  for (int k = 0; k < rungs; ++k) {
    const orthopoly::LimitRung rung = orthopoly::limit_regime(regime, k);
    const orthopoly::Block b = orthopoly::central_subwindow(rung.scaled.dim());
    const auto block = [&](const Matrix& a) { return a.block(b.begin, b.begin, b.size, b.size); };
    const double op = (block(rung.scaled.matrix()) - block(rung.target.matrix())).cwiseAbs().maxCoeff();
    const double ker = (block(kernels::fermi_kernel(rung.scaled, beta).matrix()) -
                        block(kernels::fermi_kernel(rung.target, beta).matrix()))
                           .cwiseAbs()
                           .maxCoeff();
    rows.push_back({regime, k, rung.scale_param, op, ker});
  }
  return rows;
}

bool ladder_converges(const std::vector<double>& errors, double ratio) {
  if (errors.size() < 2) return false;
  for (std::size_t i = 1; i < errors.size(); ++i) {
    if (!(errors[i] < errors[i - 1])) return false;
  }
  return errors.back() <= ratio * errors.front();
}

void write_manifest(const fs::path& out_dir, const json& config, const std::string& started, double elapsed_s,
                    const RunResult& result) {
  json failures = json::array();
  for (const auto& f : result.failures) failures.push_back({{"kind", f.kind}, {"message", f.message}});
  const json manifest = {{"config", config},
                         {"version", KMSDPP_VERSION},
                         {"started", started},
                         {"elapsed_s", elapsed_s},
                         {"status", result.exit_code == kExitSuccess ? "success" : "failure"},
                         {"failures", failures}};
  fs::create_directories(out_dir);
  const fs::path tmp = out_dir / "manifest.json.tmp";
  {
    std::ofstream out(tmp);
    out << manifest.dump(2) << '\n';
    if (!out) throw PreconditionError("cannot write " + tmp.string());
  }
  fs::rename(tmp, out_dir / "manifest.json");
}

RunResult run(const ExperimentConfig& config) {
  const auto t0 = std::chrono::steady_clock::now();
  const std::string started = utc_now();
  Report report{fs::path(config.out_dir), {}};
  RunResult result;
  try {
    fs::create_directories(report.dir);
    const std::string& e = config.experiment;
    if (e == "kernel") run_kernel(config, report);
    else if (e == "ensemble") run_ensemble(config, report);
    else if (e == "sample") run_sample(config, report);
    else if (e == "dynamics") run_dynamics(config, report);
    else if (e == "verify") run_verify(config, report);
    else if (e == "limits") run_limits(config, report);
    else if (e == "cylindric") run_cylindric(config, report);
    result.failures = report.failures;
    if (!result.failures.empty()) result.exit_code = kExitNumerical;
  } catch (const Error& err) {
    result.failures = report.failures;
    result.failures.push_back({kind_name(err.kind()), err.what()});
    result.exit_code = exit_code(err.kind());
  } catch (const fs::filesystem_error& err) {
    result.failures.push_back({"precondition", err.what()});
    result.exit_code = kExitValidity;
  }
  const double elapsed = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  write_manifest(report.dir, config.raw, started, elapsed, result);
  return result;
}

int execute(const fs::path& config_path, const Overrides& overrides) {
  ExperimentConfig config;
  try {
    config = parse_config_file(config_path, overrides);
  } catch (const ConfigError& err) {
    std::cerr << "config error: " << err.what() << '\n';
    std::optional<std::string> out = overrides.out_dir;
    json raw;
    try {
      std::ifstream in(config_path);
      raw = json::parse(in);
      if (!out && raw.is_object() && raw.contains("out_dir") && raw["out_dir"].is_string()) {
        out = raw["out_dir"].get<std::string>();
      }
    } catch (const std::exception&) {
      raw = nullptr;
    }
    if (out && !out->empty()) {
      RunResult failed{kExitConfig, {{"config", err.what()}}};
      try {
        write_manifest(*out, raw, utc_now(), 0.0, failed);
      } catch (const std::exception&) {
        // The config error is the primary report.
      }
    }
    return kExitConfig;
  }
  const RunResult result = run(config);
  for (const auto& f : result.failures) std::cerr << f.kind << ": " << f.message << '\n';
  if (result.exit_code == kExitSuccess) std::cout << "wrote " << config.out_dir << '\n';
  return result.exit_code;
}

}  // namespace kmsdpp::cli

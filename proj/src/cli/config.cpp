// Copyright 2026 The kmsdpp Authors
// SPDX-License-Identifier: Apache-2.0

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <set>
#include <sstream>

#include "kmsdpp/cli.hpp"
#include "kmsdpp/fock.hpp"

namespace kmsdpp::cli {
namespace {

using nlohmann::json;

[[noreturn]] void fail(const std::string& path, const std::string& what) { throw ConfigError(path + ": " + what); }

void reject_unknown(const json& obj, const std::set<std::string>& allowed, const std::string& prefix) {
  for (const auto& [key, value] : obj.items()) {
    if (!allowed.contains(key)) {
      std::string valid;
      for (const auto& k : allowed) valid += (valid.empty() ? "" : ", ") + k;
      fail(prefix + key, "unknown key (allowed: " + valid + ")");
    }
  }
}

double number(const json& v, const std::string& path) {
  if (!v.is_number()) fail(path, "must be a number");
  const double x = v.get<double>();
  if (!std::isfinite(x)) fail(path, "must be finite");
  return x;
}

long long integer(const json& v, const std::string& path) {
  if (v.is_number_integer()) return v.get<long long>();
  if (v.is_number_float()) {
    const double x = v.get<double>();
    if (std::isfinite(x) && x == std::floor(x) && std::abs(x) < 9e15) return static_cast<long long>(x);
  }
  fail(path, "must be an integer");
}

int positive_int(const json& v, const std::string& path) {
  const long long n = integer(v, path);
  if (n < 1 || n > std::numeric_limits<int>::max()) fail(path, "must be a positive integer");
  return static_cast<int>(n);
}

std::vector<double> number_list(const json& v, const std::string& path) {
  if (!v.is_array()) fail(path, "must be a list of numbers");
  std::vector<double> out;
  for (std::size_t i = 0; i < v.size(); ++i) out.push_back(number(v[i], path + "[" + std::to_string(i) + "]"));
  return out;
}

std::complex<double> complex_value(const json& v, const std::string& path) {
  if (v.is_number()) return {number(v, path), 0.0};
  if (v.is_array() && v.size() == 2) return {number(v[0], path + "[0]"), number(v[1], path + "[1]")};
  fail(path, "must be a real number or [re, im]");
}

const json& required(const json& obj, const std::string& key, const std::string& prefix) {
  if (!obj.contains(key)) fail(prefix + key, "required key is missing");
  return obj.at(key);
}

orthopoly::FamilySpec parse_family(const json& f) {
  using namespace orthopoly;
  if (!f.is_object()) fail("family", "must be an object with a \"name\" key");
  const json& name_v = required(f, "name", "family.");
  if (!name_v.is_string()) fail("family.name", "must be a string");
  const std::string name = name_v.get<std::string>();
  auto num = [&](const char* key) { return number(required(f, key, "family."), std::string("family.") + key); };
  auto pos = [&](const char* key) { return positive_int(required(f, key, "family."), std::string("family.") + key); };
  auto cpx = [&](const char* key) {
    return complex_value(required(f, key, "family."), std::string("family.") + key);
  };

  FamilySpec spec;
  if (name == "meixner") {
    reject_unknown(f, {"name", "c", "xi"}, "family.");
    spec = Meixner{num("c"), num("xi")};
  } else if (name == "charlier") {
    reject_unknown(f, {"name", "mu"}, "family.");
    spec = Charlier{num("mu")};
  } else if (name == "krawtchouk") {
    reject_unknown(f, {"name", "M", "p"}, "family.");
    spec = Krawtchouk{pos("M"), num("p")};
  } else if (name == "hahn") {
    reject_unknown(f, {"name", "M", "a", "b"}, "family.");
    spec = Hahn{pos("M"), num("a"), num("b")};
  } else if (name == "racah") {
    reject_unknown(f, {"name", "M", "a", "b", "alpha", "beta", "gamma", "delta"}, "family.");
    if (f.contains("a") || f.contains("b")) {
      if (f.contains("alpha") || f.contains("beta") || f.contains("gamma") || f.contains("delta")) {
        fail("family", "give either (a, b) or (alpha, beta, gamma, delta), not both");
      }
      spec = racah_from_jacobi(pos("M"), num("a"), num("b"));
    } else {
      spec = Racah{pos("M"), num("alpha"), num("beta"), num("gamma"), num("delta")};
    }
  } else if (name == "hermite") {
    reject_unknown(f, {"name"}, "family.");
    spec = Hermite{};
  } else if (name == "laguerre") {
    reject_unknown(f, {"name", "c"}, "family.");
    spec = Laguerre{num("c")};
  } else if (name == "jacobi") {
    reject_unknown(f, {"name", "a", "b"}, "family.");
    spec = Jacobi{num("a"), num("b")};
  } else if (name == "askey_lesky") {
    reject_unknown(f, {"name", "u", "u_prime", "w", "w_prime"}, "family.");
    spec = AskeyLesky{{cpx("u"), cpx("u_prime")}, {cpx("w"), cpx("w_prime")}};
  } else if (name == "discrete_hypergeometric") {
    reject_unknown(f, {"name", "z", "z_prime", "xi"}, "family.");
    spec = DiscreteHypergeometric{{cpx("z"), cpx("z_prime")}, num("xi")};
  } else {
    fail("family.name",
         "unknown family '" + name +
             "' (valid: meixner, charlier, krawtchouk, hahn, racah, hermite, laguerre, jacobi, askey_lesky, "
             "discrete_hypergeometric)");
  }
  try {
    validate(spec);
  } catch (const Error& e) {
    fail("family", e.what());
  }
  return spec;
}

double parse_beta(const json& v) {
  if (v.is_string()) {
    if (v.get<std::string>() == "inf") return std::numeric_limits<double>::infinity();
    fail("beta", "beta must be positive or \"inf\"");
  }
  if (!v.is_number() || !(v.get<double>() > 0.0) || !std::isfinite(v.get<double>())) {
    fail("beta", "beta must be positive or \"inf\"");
  }
  return v.get<double>();
}

std::string experiment_list() {
  std::string s;
  for (auto e : kExperiments) s += (s.empty() ? "" : ", ") + std::string(e);
  return s;
}

void require_keys(const ExperimentConfig& c, std::initializer_list<std::pair<const char*, bool>> keys) {
  for (const auto& [key, present] : keys) {
    if (!present) fail(key, "required for experiment '" + c.experiment + "'");
  }
}

bool finite_beta(const ExperimentConfig& c) { return c.beta && std::isfinite(*c.beta); }

void check_times_symmetric(const ExperimentConfig& c) {
  const double half = *c.beta / 2.0;
  for (std::size_t i = 0; i < c.times.size(); ++i) {
    if (std::abs(c.times[i]) > half) {
      fail("times[" + std::to_string(i) + "]", "must lie in [-beta/2, beta/2]");
    }
  }
}

/// Sites of the configured window without building kernels.
Eigen::Index window_size(const ExperimentConfig& c) {
  if (orthopoly::is_continuous(*c.family)) return static_cast<Eigen::Index>((*c.window)[1]) + 1;
  try {
    if (!c.window) return orthopoly::choose_window(*c.family).size();
    return orthopoly::make_window(*c.family, (*c.window)[0], (*c.window)[1]).size();
  } catch (const ConfigError&) {
    throw;
  } catch (const Error& e) {
    fail("window", e.what());
  }
}

void validate_experiment(const ExperimentConfig& c) {
  const std::string& e = c.experiment;
  const bool has_family = c.family.has_value();
  const bool has_window = c.raw.contains("window");
  if (e == "kernel" || e == "ensemble" || e == "sample" || e == "dynamics") {
    require_keys(c, {{"family", has_family}, {"window", has_window}});
    const bool continuous = orthopoly::is_continuous(*c.family);
    if (continuous) {
      if (e == "ensemble" || e == "dynamics") fail("family", "experiment '" + e + "' needs a discrete family");
      if (!c.window) fail("window", "continuous families need an explicit degree window [0, m-1]");
      if ((*c.window)[0] != 0.0 || (*c.window)[1] != std::floor((*c.window)[1])) {
        fail("window", "continuous families index degrees: use [0, m-1]");
      }
    }
    const Eigen::Index m = window_size(c);
    if (c.N && *c.N > m) fail("N", "exceeds the number of window sites (" + std::to_string(m) + ")");
    for (std::size_t i = 0; i < c.sites.size(); ++i) {
      const double x = c.sites[i];
      const bool inside = continuous ? (x >= 0.0 && x < static_cast<double>(m) && x == std::floor(x))
                                     : orthopoly::in_lattice(*c.family, x) &&
                                           (!c.window || (x >= (*c.window)[0] && x <= (*c.window)[1]));
      if (!inside) fail("sites[" + std::to_string(i) + "]", "is not a window site");
    }
    if (e == "dynamics" && m > fock::kMaxSites) {
      fail("window", "dynamics needs at most " + std::to_string(fock::kMaxSites) + " sites (Fock space)");
    }
  }
  if (e == "kernel") {
    require_keys(c, {{"beta", c.beta.has_value()}});
    if (!c.times.empty()) check_times_symmetric(c);
    if (!std::isfinite(*c.beta) && c.N && orthopoly::is_continuous(*c.family)) {
      fail("N", "not used for continuous families");
    }
  } else if (e == "ensemble") {
    require_keys(c, {{"N", c.N.has_value()}});
  } else if (e == "sample") {
    require_keys(c, {{"beta or N", c.beta.has_value() || c.N.has_value()}, {"samples", c.samples.has_value()}});
    if (c.N && c.beta && std::isfinite(*c.beta)) fail("N", "only used at beta = \"inf\"");
  } else if (e == "dynamics") {
    require_keys(c, {{"beta", finite_beta(c)}, {"times", !c.times.empty()}});
    check_times_symmetric(c);
    for (std::size_t i = 1; i < c.times.size(); ++i) {
      if (!(c.times[i] > c.times[i - 1])) fail("times[" + std::to_string(i) + "]", "times must strictly increase");
    }
  } else if (e == "limits") {
    if (c.beta && !std::isfinite(*c.beta)) fail("beta", "limits compare fermi kernels at finite beta");
    if (c.ladder < 2) fail("ladder", "needs at least 2 rungs");
    if (c.regime && *c.regime != "all") {
      try {
        (void)orthopoly::parse_regime(*c.regime);
      } catch (const Error& err) {
        fail("regime", err.what());
      }
    }
  } else if (e == "cylindric") {
    require_keys(c, {{"theta", c.theta.has_value()}, {"beta", finite_beta(c)}, {"n_max", c.n_max.has_value()}});
    for (std::size_t i = 0; i < c.times.size(); ++i) {
      const std::string path = "times[" + std::to_string(i) + "]";
      if (c.times[i] < 0.0 || c.times[i] > *c.beta) fail(path, "must lie in [0, beta]");
      if (i > 0 && c.times[i] < c.times[i - 1]) fail(path, "times must be nondecreasing");
    }
  }
}

}  // namespace

ExperimentConfig parse_config(const json& doc_in, const Overrides& overrides) {
  if (!doc_in.is_object()) fail("(root)", "config must be a JSON object");
  json doc = doc_in;
  if (overrides.out_dir) doc["out_dir"] = *overrides.out_dir;
  if (overrides.seed) doc["seed"] = *overrides.seed;

  reject_unknown(doc,
                 {"experiment", "family", "window", "beta", "mu", "N", "times", "sites", "samples", "seed",
                  "n_max", "theta", "out_dir", "threads", "regime", "ladder", "cases"},
                 "");
  ExperimentConfig c;
  c.raw = doc;

  const json& exp = required(doc, "experiment", "");
  if (!exp.is_string() ||
      std::find(kExperiments.begin(), kExperiments.end(), exp.get<std::string>()) == kExperiments.end()) {
    fail("experiment", "must be one of: " + experiment_list());
  }
  c.experiment = exp.get<std::string>();

  const json& out = required(doc, "out_dir", "");
  if (!out.is_string() || out.get<std::string>().empty()) fail("out_dir", "must be a nonempty string");
  c.out_dir = out.get<std::string>();

  if (doc.contains("family")) c.family = parse_family(doc["family"]);
  if (doc.contains("window")) {
    const json& w = doc["window"];
    if (w.is_string() && w.get<std::string>() == "auto") {
      if (!c.family) fail("window", "\"auto\" needs a family");
    } else {
      if (!w.is_array() || w.size() != 2) fail("window", "must be [lo, hi] or \"auto\"");
      c.window = std::array<double, 2>{number(w[0], "window[0]"), number(w[1], "window[1]")};
      if ((*c.window)[0] > (*c.window)[1]) fail("window", "lo must not exceed hi");
    }
  }
  if (doc.contains("beta")) c.beta = parse_beta(doc["beta"]);
  if (doc.contains("mu")) c.mu = number(doc["mu"], "mu");
  if (doc.contains("N")) c.N = positive_int(doc["N"], "N");
  if (doc.contains("times")) c.times = number_list(doc["times"], "times");
  if (doc.contains("sites")) c.sites = number_list(doc["sites"], "sites");
  if (doc.contains("samples")) c.samples = static_cast<std::size_t>(positive_int(doc["samples"], "samples"));
  if (doc.contains("seed")) {
    const json& s = doc["seed"];
    if (s.is_number_unsigned()) {
      c.seed = s.get<std::uint64_t>();
    } else {
      const long long v = integer(s, "seed");
      if (v < 0) fail("seed", "must be a nonnegative integer");
      c.seed = static_cast<std::uint64_t>(v);
    }
  }
  if (doc.contains("n_max")) {
    const long long n = integer(doc["n_max"], "n_max");
    if (n < 0 || n > 40) fail("n_max", "must lie in [0, 40]");
    c.n_max = static_cast<int>(n);
  }
  if (doc.contains("theta")) {
    c.theta = number(doc["theta"], "theta");
    if (*c.theta < 0.0) fail("theta", "must be nonnegative");
  }
  if (doc.contains("threads")) c.threads = positive_int(doc["threads"], "threads");
  if (doc.contains("regime")) {
    if (!doc["regime"].is_string()) fail("regime", "must be a string");
    c.regime = doc["regime"].get<std::string>();
  }
  if (doc.contains("ladder")) c.ladder = positive_int(doc["ladder"], "ladder");
  if (doc.contains("cases")) c.cases = positive_int(doc["cases"], "cases");

  validate_experiment(c);
  return c;
}

ExperimentConfig parse_config_text(std::string_view text, const Overrides& overrides) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error& e) {
    fail("(root)", std::string("not valid JSON: ") + e.what());
  }
  return parse_config(doc, overrides);
}

ExperimentConfig parse_config_file(const std::filesystem::path& path, const Overrides& overrides) {
  std::ifstream in(path);
  if (!in) fail("--config", "cannot open '" + path.string() + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_config_text(buf.str(), overrides);
}

int exit_code(ErrorKind kind) noexcept {
  switch (kind) {
    case ErrorKind::Config: return kExitConfig;
    case ErrorKind::Precondition:
    case ErrorKind::Validity:
    case ErrorKind::Size: return kExitValidity;
    case ErrorKind::Numerical: return kExitNumerical;
  }
  return kExitNumerical;
}

}  // namespace kmsdpp::cli

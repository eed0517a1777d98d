// Copyright 2026 The kmsdpp Authors
// SPDX-License-Identifier: Apache-2.0

#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include "kmsdpp/cli.hpp"

using namespace kmsdpp;
using namespace kmsdpp::cli;
namespace fs = std::filesystem;

namespace {

fs::path scratch(const std::string& name) {
  const fs::path p = fs::temp_directory_path() / ("kmsdpp_cli_test_" + name);
  fs::remove_all(p);
  return p;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::string config_error(std::string_view text) {
  try {
    (void)parse_config_text(text);
  } catch (const ConfigError& e) {
    return e.what();
  }
  return {};
}

}  // namespace

TEST_SUITE("cli") {
  TEST_CASE("parse a kernel config") {
    const auto c = parse_config_text(
        R"({"experiment":"kernel","family":{"name":"charlier","mu":2.0},"window":[0,40],"beta":3.0,"out_dir":"x"})");
    CHECK(c.experiment == "kernel");
    REQUIRE(c.family.has_value());
    CHECK(std::holds_alternative<orthopoly::Charlier>(*c.family));
    CHECK((*c.window)[1] == 40.0);
    CHECK(*c.beta == 3.0);
    const auto inf = parse_config_text(
        R"({"experiment":"kernel","family":{"name":"krawtchouk","M":6,"p":0.4},"window":[0,6],"beta":"inf","N":3,"out_dir":"x"})");
    CHECK(std::isinf(*inf.beta));
    const auto overridden = parse_config_text(R"({"experiment":"verify","out_dir":"a","seed":1})", Overrides{"b", 9});
    CHECK(overridden.out_dir == "b");
    CHECK(overridden.seed == 9);
    CHECK(overridden.raw["seed"] == 9);
  }

  TEST_CASE("config errors name the key") {
    CHECK(config_error(R"({"experiment":"verify","out_dir":"x","colour":1})").find("colour") != std::string::npos);
    const auto unknown = config_error(R"({"experiment":"frobnicate","out_dir":"x"})");
    for (auto name : kExperiments) CHECK(unknown.find(name) != std::string::npos);
    CHECK(config_error(
              R"({"experiment":"kernel","family":{"name":"charlier","mu":2.0},"window":[0,40],"beta":-1,"out_dir":"x"})")
              .find("beta must be positive or \"inf\"") != std::string::npos);
    CHECK(config_error(
              R"({"experiment":"kernel","family":{"name":"charlier","mu":-2.0},"window":[0,40],"beta":1,"out_dir":"x"})")
              .find("family") != std::string::npos);
    CHECK_FALSE(config_error(R"({"experiment":"ensemble","family":{"name":"krawtchouk","M":6,"p":0.4},"window":[0,6],"N":9,"out_dir":"x"})")
                    .empty());
    CHECK_FALSE(config_error("not json").empty());
  }

  TEST_CASE("exit codes") {
    CHECK(exit_code(ErrorKind::Config) == kExitConfig);
    CHECK(exit_code(ErrorKind::Validity) == kExitValidity);
    CHECK(exit_code(ErrorKind::Precondition) == kExitValidity);
    CHECK(exit_code(ErrorKind::Numerical) == kExitNumerical);
  }

  TEST_CASE("runs are reproducible byte for byte") {
    const std::string text =
        R"({"experiment":"sample","family":{"name":"krawtchouk","M":6,"p":0.4},"window":[0,6],"N":3,"beta":"inf","samples":200,"seed":5,"out_dir":"x"})";
    const auto a = scratch("a");
    const auto b = scratch("b");
    CHECK(run(parse_config_text(text, Overrides{a.string(), {}})).exit_code == kExitSuccess);
    CHECK(run(parse_config_text(text, Overrides{b.string(), {}})).exit_code == kExitSuccess);
    CHECK(slurp(a / "samples.csv") == slurp(b / "samples.csv"));
    CHECK(fs::exists(a / "manifest.json"));
    const auto manifest = nlohmann::json::parse(slurp(a / "manifest.json"));
    CHECK(manifest["status"] == "success");
    CHECK(manifest["config"]["seed"] == 5);
    fs::remove_all(a);
    fs::remove_all(b);
  }

  TEST_CASE("config errors still leave a manifest") {
    const auto dir = scratch("bad");
    fs::create_directories(dir);
    const fs::path cfg = dir / "bad.json";
    std::ofstream(cfg) << R"({"experiment":"kernel","family":{"name":"charlier","mu":2.0},"window":[0,40],"beta":-1})";
    const auto out = dir / "out";
    CHECK(execute(cfg, Overrides{out.string(), {}}) == kExitConfig);
    const auto manifest = nlohmann::json::parse(slurp(out / "manifest.json"));
    CHECK(manifest["status"] != "success");
    CHECK(manifest["failures"].size() == 1);
    fs::remove_all(dir);
  }

  TEST_CASE("ladder convergence predicate") {
    CHECK(ladder_converges({1.0, 0.5, 0.01}, 0.05));
    CHECK_FALSE(ladder_converges({1.0, 0.5, 0.1}, 0.05));
    CHECK_FALSE(ladder_converges({1.0, 1.2, 0.01}, 0.05));
  }
}

// Copyright 2026 The kmsdpp Authors
// SPDX-License-Identifier: Apache-2.0

#include <CLI11.hpp>

#include "kmsdpp/cli.hpp"

int main(int argc, char** argv) {
  CLI::App app{"Determinantal point processes from operator truncations"};
  std::string config;
  std::string out;
  std::uint64_t seed = 0;
  app.add_option("--config", config, "experiment config (JSON)")->required()->check(CLI::ExistingFile);
  auto* out_opt = app.add_option("--out", out, "output directory; overrides out_dir");
  auto* seed_opt = app.add_option("--seed", seed, "overrides seed");
  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kmsdpp::cli::kExitConfig;
  }
  kmsdpp::cli::Overrides overrides;
  if (*out_opt) overrides.out_dir = out;
  if (*seed_opt) overrides.seed = seed;
  return kmsdpp::cli::execute(config, overrides);
}

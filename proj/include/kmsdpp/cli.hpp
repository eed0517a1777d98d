// Copyright 2026 The kmsdpp Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "kmsdpp/error.hpp"
#include "kmsdpp/orthopoly.hpp"

namespace kmsdpp::cli {

inline constexpr std::array<std::string_view, 7> kExperiments = {
    "kernel", "ensemble", "sample", "dynamics", "verify", "limits", "cylindric"};

/// Validated experiment description; `raw` is the echoed config after overrides.
struct ExperimentConfig {
  nlohmann::json raw;
  std::string experiment;
  std::optional<orthopoly::FamilySpec> family;
  std::optional<std::array<double, 2>> window;  ///< nullopt with family: chosen by captured mass
  std::optional<double> beta;                   ///< +inf for "inf"
  double mu = 0.0;
  std::optional<int> N;
  std::vector<double> times;
  std::vector<double> sites;
  std::optional<std::size_t> samples;
  std::uint64_t seed = 0;
  std::optional<int> n_max;
  std::optional<double> theta;
  std::string out_dir;
  int threads = 1;
  std::optional<std::string> regime;
  int ladder = 6;
  int cases = 200;
};

struct Overrides {
  std::optional<std::string> out_dir;
  std::optional<std::uint64_t> seed;
};

/// ConfigError messages name the offending key path.
[[nodiscard]] ExperimentConfig parse_config(const nlohmann::json& doc, const Overrides& overrides = {});
[[nodiscard]] ExperimentConfig parse_config_text(std::string_view text, const Overrides& overrides = {});
[[nodiscard]] ExperimentConfig parse_config_file(const std::filesystem::path& path,
                                                 const Overrides& overrides = {});

inline constexpr int kExitSuccess = 0;
inline constexpr int kExitConfig = 2;
inline constexpr int kExitValidity = 3;
inline constexpr int kExitNumerical = 4;

[[nodiscard]] int exit_code(ErrorKind kind) noexcept;

struct Failure {
  std::string kind;
  std::string message;
};

struct RunResult {
  int exit_code = kExitSuccess;
  std::vector<Failure> failures;
};

/**
 * @brief Runs one experiment into config.out_dir.
 *
 * Library errors and failed verifications become failure records; the
 * manifest is written last in every case.
 */
RunResult run(const ExperimentConfig& config);

/// Writes manifest.json via a temporary file and rename.
void write_manifest(const std::filesystem::path& out_dir, const nlohmann::json& config, const std::string& started,
                    double elapsed_s, const RunResult& result);

/**
 * @brief Parse, run and report; returns the process exit code.
 *
 * A config error still gets a failure manifest when an output directory is
 * known from --out or a string out_dir key.
 */
int execute(const std::filesystem::path& config_path, const Overrides& overrides);

struct LadderRow {
  orthopoly::Regime regime;
  int k;
  double scale_param;
  double operator_error;  ///< central-subwindow sup-entry distance of the operators
  double kernel_error;    ///< the same for their fermi kernels
};

/// Rungs 0..rungs-1 of one regime; kernels at inverse temperature beta.
[[nodiscard]] std::vector<LadderRow> ladder_table(orthopoly::Regime regime, int rungs, double beta);

/// Strictly decreasing and last ≤ ratio · first.
[[nodiscard]] bool ladder_converges(const std::vector<double>& errors, double ratio);

}  // namespace kmsdpp::cli

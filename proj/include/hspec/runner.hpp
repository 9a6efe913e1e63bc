#pragma once

#include "hspec/config.hpp"
#include "hspec/spectra.hpp"

#include <json.hpp>

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

namespace hspec {

enum ExitCode : int { kExitOk = 0, kExitSelftestFailed = 1, kExitConfig = 2, kExitComputation = 3 };

struct RunReport {
  std::string command;
  std::string digest;  // FNV-1a of the canonical config text
  std::optional<double> elapsed_seconds;
  std::vector<std::string> files;  // sorted, relative to the output directory
  nlohmann::json summary = nlohmann::json::object();
  std::vector<std::string> warnings;
  bool selftest_passed = true;
};

// Fixed notation with 12 significant digits; "nan", "inf", "-inf" otherwise.
std::string format_number(double v);

// JSON text with every floating value written by format_number.
std::string dump_json(const nlohmann::json& j);

std::string fnv1a_hex(const std::string& bytes);

// Step-plus-marker plot of D_u over t. Requires at least one sample.
std::string curve_svg(const DimensionCurve& curve);
std::string curve_csv(const DimensionCurve& curve);

// Runs `command` and writes its artifacts plus report.json into out_dir.
// Throws ConfigError for missing inputs and hspec::Error for failed
// computations.
RunReport run(const std::string& command, const RunConfig& config, const std::filesystem::path& out_dir);

// Maps a command outcome to the process exit code, writing diagnostics to stderr.
int run_and_report(const std::string& command, const std::string& config_path,
                   const std::optional<std::string>& out_dir);

}  // namespace hspec

#pragma once

#include "hspec/cantor.hpp"
#include "hspec/spectra.hpp"
#include "hspec/suspension.hpp"
#include "hspec/symbolic.hpp"

#include <cstdint>
#include <optional>
#include <string>
#include <variant>
#include <vector>

namespace hspec {

inline constexpr int kSchemaVersion = 1;

struct SystemSpec {
  int alphabet_size = 0;
  std::vector<std::vector<int>> transitions;

  bool operator==(const SystemSpec&) const = default;
};

struct AffineSpec {
  std::vector<double> ratios;
  std::vector<double> offsets;
  bool operator==(const AffineSpec&) const = default;
};

struct GaussSpec {
  std::vector<int> digits;
  bool operator==(const GaussSpec&) const = default;
};

using ModelSpec = std::variant<AffineSpec, GaussSpec>;

struct WindowValue {
  Word window;
  double value = 0;
  bool operator==(const WindowValue&) const = default;
};

struct TableHeight {
  int radius = 0;
  std::vector<WindowValue> entries;
  bool operator==(const TableHeight&) const = default;
};

struct AdditiveHeight {
  int radius = 0;
  std::vector<double> weights;
  bool operator==(const AdditiveHeight&) const = default;
};

struct EmbeddedHeight {
  int radius = 0;
  HeightMap map;
  bool operator==(const EmbeddedHeight&) const = default;
};

struct FiberEntry {
  Word window;
  FiberCoefficients coefficients;
  bool operator==(const FiberEntry&) const = default;
};

struct SuspensionHeight {
  // Either `uniform` or one entry per admissible window of `profile_radius`.
  std::optional<FiberCoefficients> uniform;
  int profile_radius = 0;
  std::vector<FiberEntry> profile;
  // Roof: one tau per symbol (a single value means constant).
  std::vector<double> roof;
  int output_radius = 0;
  bool operator==(const SuspensionHeight&) const = default;
};

using HeightSpec = std::variant<TableHeight, AdditiveHeight, EmbeddedHeight, SuspensionHeight>;

struct Tolerances {
  double eta = 1e-6;      // regularity margin
  double tau = 1e-9;      // flow/map agreement
  double delta = 0.1;     // perturbation and tilt bound
  double epsilon = 0.01;  // transversality margin
  bool operator==(const Tolerances&) const = default;
};

struct RunSpec {
  std::string command;
  std::vector<double> t_grid;
  std::optional<double> threshold;
  int max_period = 8;
  int middle_bound = 2;
  int depth = 8;
  int r_min = 4;
  int r_max = 14;
  std::vector<double> resolutions;
  std::uint64_t seed = 1;
  Tolerances tolerances;
  std::vector<Word> forbidden;
  int r0 = 6;
  int trials = 100;
  std::string output_dir = "out";
  bool record_elapsed = false;
  bool operator==(const RunSpec&) const = default;
};

struct RunConfig {
  int schema_version = kSchemaVersion;
  SystemSpec system;
  ModelSpec model_u;
  std::optional<ModelSpec> model_s;
  std::optional<HeightSpec> height;
  RunSpec run;

  bool operator==(const RunConfig&) const = default;
};

// Parse and validate; throws ConfigError naming the offending field path.
RunConfig parse_config(const std::string& text);
RunConfig load_config(const std::string& path);
// Canonical JSON text (sorted keys, two-space indent).
std::string emit_config(const RunConfig& config);

/// Domain objects built from a validated config.
struct BuiltSystem {
  Sft sft;
  CantorModel model_u;
  CantorModel model_s;
  std::optional<HeightTable> table;
  std::optional<FiberProfile> profile;
  std::optional<RoofFunction> roof;
};

// Throws ConfigError on cross-field inconsistencies.
BuiltSystem build_system(const RunConfig& config);

}  // namespace hspec

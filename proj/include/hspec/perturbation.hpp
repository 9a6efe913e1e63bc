#pragma once

#include "hspec/cantor.hpp"
#include "hspec/spectra.hpp"
#include "hspec/suspension.hpp"

#include <cstdint>
#include <string>
#include <vector>

namespace hspec {

inline constexpr double kDefaultPerturbationBound = 0.1;

// f_{a,b,c} = f - a s - b s^2/2 - c s^3/6 along the flow direction.
struct PerturbationParams {
  double a = 0;
  double b = 0;
  double c = 0;

  bool operator==(const PerturbationParams&) const = default;
};

// Throws BoundExceeded when any |param| > bound.
FiberProfile perturb_fiber(const FiberProfile& profile, const PerturbationParams& params,
                           double bound = kDefaultPerturbationBound);

struct ConditionMargin {
  std::string name;  // "i", "ii", "iii.a", "iii.b", "iv.a", "iv.b"
  double margin = 0;
  bool vacuous = false;
  bool pass = false;
};

/// Nondegeneracy margins of the fiber derivatives f', f'', f''' (the four
/// regular-value conditions, the two-part ones split into .a/.b).
struct RegularityReport {
  std::vector<ConditionMargin> conditions;
  double tolerance = 1e-6;

  bool passes() const;
  // Minimum over non-vacuous conditions; +inf when all are vacuous.
  double min_margin() const;
  const ConditionMargin& condition(const std::string& name) const;
};

// grid_density: samples per unit fiber length, at least 64.
RegularityReport regularity_scan(const FiberProfile& profile, const RoofFunction& roof, int grid_density = 64,
                                 double tolerance = 1e-6);

struct RegularParamsResult {
  PerturbationParams params;
  RegularityReport report;
};

// Best of `trials` seeded draws, sampled c first, then b, then a.
RegularParamsResult find_regular_params(const FiberProfile& profile, const RoofFunction& roof, int trials,
                                        std::uint64_t seed, double bound = kDefaultPerturbationBound,
                                        int grid_density = 64);

struct TransversalityPoint {
  Word past;    // time order, last symbol adjacent to the origin
  Word future;  // starts at the origin
  double xs = 0;
  double xu = 0;
  double d_stable = 0;    // dF/dx^s
  double d_unstable = 0;  // dF/dx^u
  double margin = 0;
  bool pass = false;
};

struct TransversalityReport {
  std::vector<TransversalityPoint> points;
  double epsilon = 0;

  std::size_t failures() const;
  bool all_pass() const { return failures() == 0; }
  double min_margin() const;
};

// F is spread over [0,1]^2 by placing each window value at its cylinder
// center (x^s, x^u) and interpolating linearly along each axis; partials are
// central differences at every depth-`depth` point with step half the
// local cylinder length.
TransversalityReport transversality_scan(const Sft& sft, const CantorModel& model_u, const CantorModel& model_s,
                                         const HeightTable& table, int depth, double epsilon);

// F - v1 * x^s - v2 * x^u at window centers.
HeightTable tilt_table(const Sft& sft, const CantorModel& model_u, const CantorModel& model_s,
                       const HeightTable& table, double v1, double v2);

struct TiltResult {
  double v1 = 0;
  double v2 = 0;
  TransversalityReport report;
};

// Seeded search for a small tilt |v| <= bound that makes the scan pass;
// returns the best found.
TiltResult find_transverse_tilt(const Sft& sft, const CantorModel& model_u, const CantorModel& model_s,
                                const HeightTable& table, int depth, double epsilon, double bound, int trials,
                                std::uint64_t seed);

// Fraction of sampled windows whose fiber maximum is attained once.
double unique_maximizer_fraction(const FiberProfile& profile, const RoofFunction& roof, const Sft& sft,
                                 int samples);

}  // namespace hspec

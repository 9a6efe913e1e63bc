#pragma once

#include "hspec/cantor.hpp"
#include "hspec/spectra.hpp"
#include "hspec/symbolic.hpp"

#include <array>
#include <functional>
#include <numbers>
#include <vector>

namespace hspec {

inline constexpr double kMaxFiberFrequency = 16 * std::numbers::pi;

// f(s) = c0 + c1 s + c2 s^2/2 + c3 s^3/6 + amplitude * sin(omega s + phase)
struct FiberCoefficients {
  double c0 = 0;
  double c1 = 0;
  double c2 = 0;
  double c3 = 0;
  double amplitude = 0;
  double omega = 0;
  double phase = 0;

  bool operator==(const FiberCoefficients&) const = default;
};

/// Restriction of f to one fiber [0, tau].
struct FiberFunction {
  FiberCoefficients coefficients;
  double tau = 1;

  double value(double s) const { return derivative(s, 0); }
  // order in 0..4
  double derivative(double s, int order) const;
  bool is_constant() const;
};

/// Return-time function: positive, one value per window of length 2m+1.
class RoofFunction {
 public:
  RoofFunction(const Sft& sft, int radius, std::vector<double> values);
  static RoofFunction constant(const Sft& sft, double tau);
  // Roof depends on the current symbol only.
  static RoofFunction per_symbol(const Sft& sft, const std::vector<double>& taus);

  int radius() const { return table_.radius(); }
  const Sft& sft() const { return sft_; }
  const HeightTable& table() const { return table_; }
  double min_value() const { return table_.min_value(); }
  // Roof at the window of radius radius() centered in `context`.
  double at(const Word& context) const;

 private:
  Sft sft_;
  HeightTable table_;
};

/// Fiber profile: coefficients per window of radius m plus an accumulated
/// cubic shift (a, b, c) subtracted as -a s - b s^2/2 - c s^3/6.
class FiberProfile {
 public:
  FiberProfile(const Sft& sft, int radius, std::vector<FiberCoefficients> coefficients);
  static FiberProfile uniform(const Sft& sft, const FiberCoefficients& c);
  static FiberProfile from_function(const Sft& sft, int radius,
                                    const std::function<FiberCoefficients(const Word&)>& fn);

  int radius() const { return radius_; }
  const Sft& sft() const { return sft_; }
  const std::vector<Word>& windows() const { return windows_; }
  const std::vector<FiberCoefficients>& raw_coefficients() const { return coefficients_; }
  const std::array<double, 3>& shift() const { return shift_; }

  // Coefficients with the shift applied, at the window centered in `context`.
  FiberCoefficients effective(const Word& context) const;
  FiberCoefficients effective_at(std::size_t index) const;

  FiberProfile with_added_shift(double a, double b, double c) const;

  bool operator==(const FiberProfile& o) const {
    return radius_ == o.radius_ && windows_ == o.windows_ && coefficients_ == o.coefficients_ && shift_ == o.shift_;
  }

 private:
  Sft sft_;
  int radius_ = 0;
  std::vector<Word> windows_;
  std::vector<FiberCoefficients> coefficients_;
  std::array<double, 3> shift_{0, 0, 0};
};

struct FiberMax {
  double value = 0;
  double argmax = 0;
  bool unique = false;
};

// Global maximum on [0, tau]: grid of `grid` intervals per unit of tau
// (at least `grid`), golden-section refinement of every grid-local maximum.
FiberMax fiber_max(const FiberFunction& f, int grid = 256);
// Context is a window of radius >= max(profile radius, roof radius).
FiberMax fiber_max(const FiberProfile& profile, const RoofFunction& roof, const Word& context, int grid = 256);

int context_radius(const FiberProfile& profile, const RoofFunction& roof);

HeightTable height_table_from_suspension(const FiberProfile& profile, const RoofFunction& roof, const Sft& sft,
                                         int m_out);

// Follows the suspension flow from the origin for `horizon` returns and
// returns the limsup of f along the flow line.
double flow_lagrange(const FiberProfile& profile, const RoofFunction& roof, const TwoSidedPoint& x, int horizon);

// Smallest horizon that covers one full period of the right tail.
int minimal_horizon(const TwoSidedPoint& x, int context_radius);

struct SuspensionPoint {
  TwoSidedPoint base;
  double s = 0;
};

struct SuspensionDimensionCheck {
  DimensionEstimate dim_k;
  DimensionEstimate dim_lambda;
  double residual = 0;
};

// Box dimensions of the base cloud {(x^s, x^u)} and the mapping-torus
// cloud {(x^s, x^u, s)} at the given cylinder depth. Empty `resolutions`
// selects dyadic scales down to twice the coarsest depth cylinder.
SuspensionDimensionCheck suspension_dimension_check(const CantorModel& model, const RoofFunction& roof, int depth,
                                                    std::span<const double> resolutions = {});

}  // namespace hspec

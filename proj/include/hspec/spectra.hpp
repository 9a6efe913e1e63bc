#pragma once

#include "hspec/cantor.hpp"
#include "hspec/symbolic.hpp"

#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <unordered_map>
#include <vector>

namespace hspec {

/// Locally constant height function: one value per admissible window of
/// length 2*radius+1, stored in lexicographic window order.
class HeightTable {
 public:
  HeightTable(const Sft& sft, int radius, std::vector<double> values);

  static HeightTable from_function(const Sft& sft, int radius, const std::function<double(const Word&)>& fn);
  // F(window) = sum of per-symbol weights over the window.
  static HeightTable additive(const Sft& sft, int radius, const std::vector<double>& weights);
  // F(window) = H(x^s, x^u) at the window's cylinder centers.
  static HeightTable embedded(const Sft& sft, int radius, const CantorModel& model_s, const CantorModel& model_u,
                              const HeightMap& h = {});

  int radius() const { return radius_; }
  int width() const { return 2 * radius_ + 1; }
  const std::vector<Word>& windows() const { return windows_; }
  const std::vector<double>& values() const { return values_; }

  int index_of(const Word& window) const;
  // Value at window [pos, pos + width) of `sequence`.
  double at(const Symbol* first) const;
  double operator()(const Word& window) const;

  // Same function on the time-reversed system.
  HeightTable reversed(const Sft& reversed_sft) const;

  double min_value() const;
  double max_value() const;

 private:
  int radius_ = 0;
  int alphabet_ = 0;
  std::vector<Word> windows_;
  std::vector<double> values_;
  std::vector<int> dense_;  // radix code -> index, when small
  std::unordered_map<std::uint64_t, int> sparse_;
};

/// Eventually periodic bi-infinite sequence left^inf . middle . right^inf.
struct TwoSidedPoint {
  PeriodicOrbit left;
  Word middle;
  PeriodicOrbit right;
  int origin = 0;

  // Throws InadmissibleWord when a junction or a cycle is inadmissible.
  void validate(const Sft& sft) const;
  TwoSidedPoint shifted(int steps) const;
  // left^reps . middle . right^reps, enough to see every window.
  Word unfold(int left_reps, int right_reps) const;

  static TwoSidedPoint periodic(const PeriodicOrbit& orbit) { return {orbit, {}, orbit, 0}; }
};

// sup over n in Z of F(sigma^n x).
double markov_value(const Sft& sft, const HeightTable& table, const TwoSidedPoint& x);
// limsup as n -> +inf of F(sigma^n x): the maximum over the right cycle.
double lagrange_value(const Sft& sft, const HeightTable& table, const TwoSidedPoint& x);
// Maximum of F over the windows of cycle^inf.
double cycle_maximum(const HeightTable& table, const Word& cycle);

struct ComponentSummary {
  Component component;
  DimensionEstimate dimension;
};

/// K_t as the masked higher-block graph of windows with F <= t.
struct PrunedSystem {
  double threshold = 0;
  std::shared_ptr<const BlockGraph> graph;
  CantorModel model;
  VertexMask mask;                          // trimmed
  std::vector<ComponentSummary> components;  // nontrivial SCCs only
  int selected = -1;                        // index into components

  const ComponentSummary& selected_component() const { return components.at(selected); }
  double dimension() const { return selected_component().dimension.value; }
  VertexMask selected_mask() const;
};

// Throws EmptyPrune when K_t contains no cycle.
PrunedSystem prune_below(const Sft& sft, const CantorModel& model, const HeightTable& table, double t,
                         const PressureOptions& options = {});
PrunedSystem prune_below(std::shared_ptr<const BlockGraph> graph, const CantorModel& model,
                         const HeightTable& table, double t, const PressureOptions& options = {});

// Mask of windows with F <= t before trimming.
VertexMask threshold_mask(const HeightTable& table, double t);

struct CurveSample {
  double t = 0;
  double du = 0;
  double ds = 0;
  DimensionMethod method = DimensionMethod::PressureRoot;
  double error = 0;
};

struct DimensionCurve {
  std::vector<CurveSample> samples;
};

DimensionCurve du_curve(const Sft& sft, const CantorModel& model_u, const CantorModel& model_s,
                        const HeightTable& table, const std::vector<double>& t_grid,
                        const PressureOptions& options = {});

enum class SpectrumKind { Markov, Lagrange };

std::string to_string(SpectrumKind kind);

struct SpectrumSlice {
  SpectrumKind kind = SpectrumKind::Markov;
  double threshold = 0;
  std::vector<double> values;  // sorted, deduplicated at 1e-12
  int max_period = 1;
  int middle_bound = 0;
};

SpectrumSlice spectrum_slice(const Sft& sft, const HeightTable& table, SpectrumKind kind, double t, int max_period,
                             int middle_bound);

// Sorts and merges values closer than `resolution` to their predecessor.
std::vector<double> dedup_sorted(std::vector<double> values, double resolution = 1e-12);

DimensionEstimate slice_dimension(const SpectrumSlice& slice, std::span<const double> resolutions);

struct SubhorseshoeSelection {
  PrunedSystem system;
  std::size_t count_before = 0;  // #P_{r0} on the pruned system
  std::size_t count_after = 0;   // #P_{r0} on the selected component
  double counting_loss = 0;      // (ln count_before - ln count_after) / r0
};

// Re-mask without the forbidden windows, trim, and keep the largest
// component. Throws EmptyPrune when nothing survives.
SubhorseshoeSelection select_subhorseshoe(const PrunedSystem& pruned, const std::vector<Word>& forbidden, int r0,
                                          const PressureOptions& options = {});

}  // namespace hspec

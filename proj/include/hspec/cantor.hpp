#pragma once

#include "hspec/symbolic.hpp"

#include <Eigen/Dense>

#include <cstdint>
#include <span>
#include <string>
#include <utility>
#include <variant>
#include <vector>

namespace hspec {

// Symbol a acts as x -> offset_a + ratio_a * x on [0, 1].
struct AffineModel {
  std::vector<double> ratios;
  std::vector<double> offsets;
  bool operator==(const AffineModel&) const = default;
};

// Symbol a stands for continued-fraction digit digits[a].
struct GaussModel {
  std::vector<int> digits;
  bool operator==(const GaussModel&) const = default;
};

/// Geometric realization of an unstable (or stable) Cantor set.
class CantorModel {
 public:
  static CantorModel affine(std::vector<double> ratios, std::vector<double> offsets);
  // Equal ratios, images spread evenly with the first at 0 and the last at 1.
  static CantorModel uniform_affine(int n, double ratio);
  static CantorModel gauss(std::vector<int> digits);

  int alphabet_size() const;
  bool is_gauss() const { return std::holds_alternative<GaussModel>(variant_); }
  const AffineModel& as_affine() const { return std::get<AffineModel>(variant_); }
  const GaussModel& as_gauss() const { return std::get<GaussModel>(variant_); }

  bool operator==(const CantorModel&) const = default;

 private:
  explicit CantorModel(std::variant<AffineModel, GaussModel> v) : variant_(std::move(v)) {}
  std::variant<AffineModel, GaussModel> variant_;
};

struct CylinderInterval {
  Word word;
  double left = 0;
  double right = 1;
  // Computed from the ratio product (affine) or 1/(q_k (q_k + q_{k-1}))
  // (Gauss) rather than right - left, which cancels badly at depth.
  double length = 1;
  int scale = 0;

  double center() const { return 0.5 * (left + right); }
};

// p_k, q_k and p_{k-1}, q_{k-1} of [0; d_1, ..., d_k].
struct Continuants {
  std::int64_t p = 0;
  std::int64_t q = 1;
  std::int64_t p_prev = 1;
  std::int64_t q_prev = 0;
};

Continuants gauss_continuants(const GaussModel& model, const Word& word);

// floor(ln(1 / length)). Throws DomainError outside (0, 1].
int unstable_scale(double length);

CylinderInterval cylinder_interval(const CantorModel& model, const Word& word);
// Also rejects words inadmissible in `sft`.
CylinderInterval cylinder_interval(const CantorModel& model, const Sft& sft, const Word& word);

// Minimal words of the masked system whose scale first reaches r (the
// scale front P_r). Words are symbol words of masked paths and their
// prefixes; the empty word has scale -1. Lexicographic output.
std::vector<Word> scale_front(const CantorModel& model, const BlockGraph& graph, int r, const VertexMask& mask);

enum class DimensionMethod { PressureRoot, CountingSlope, BoxCount };

std::string to_string(DimensionMethod method);

struct DimensionEstimate {
  double value = 0;
  DimensionMethod method = DimensionMethod::PressureRoot;
  double error_bound = 0;
  // Depth for pressure (Gauss weights), scale range for counting, number
  // of resolutions for box counting.
  int depth = 0;
  int scale_min = 0;
  int scale_max = 0;
};

struct PressureOptions {
  int gauss_depth = 8;
  double bracket_tolerance = 1e-10;
  double radius_tolerance = 1e-12;
};

// Root s of rho(M_s) = 1 over each nontrivial SCC of the masked graph,
// maximized over components. Throws NoCycle when there is none.
DimensionEstimate dimension_pressure(const CantorModel& model, const BlockGraph& graph, const VertexMask& mask,
                                     const PressureOptions& options = {});

// Pressure root of a single strongly connected vertex set.
DimensionEstimate component_dimension(const CantorModel& model, const BlockGraph& graph,
                                      const std::vector<int>& component, const PressureOptions& options = {});

DimensionEstimate dimension_counting(const CantorModel& model, const BlockGraph& graph, const VertexMask& mask,
                                     int r_min, int r_max);

struct Interval {
  double left = 0;
  double right = 0;
};

// 2^-coarse, 2^-(coarse+1), ..., 2^-fine.
std::vector<double> dyadic_resolutions(int coarse, int fine);

// Rows are points in R^d, d <= 3. A single distinct point has dimension 0.
DimensionEstimate box_count_dimension(const Eigen::MatrixXd& points, std::span<const double> resolutions);
DimensionEstimate box_count_dimension(std::span<const Interval> intervals, std::span<const double> resolutions);
DimensionEstimate box_count_dimension(std::span<const double> values, std::span<const double> resolutions);

// Occupied boxes of side eps, grid anchored at 0.
std::size_t occupied_boxes(const Eigen::MatrixXd& points, double eps);

/// H(x, y) = ax*x + ay*y + axx*x^2 + ayy*y^2, partials nonvanishing on [0,1]^2.
struct HeightMap {
  double ax = 1;
  double ay = 1;
  double axx = 0;
  double ayy = 0;

  double operator()(double x, double y) const { return ax * x + ay * y + axx * x * x + ayy * y * y; }
  void validate() const;
  bool operator==(const HeightMap&) const = default;
};

// Left endpoints of all depth-`depth` cylinders of the model's full shift.
std::vector<double> cylinder_representatives(const CantorModel& model, int depth);

// Largest cylinder length at the given depth over the full shift.
double max_cylinder_length(const CantorModel& model, int depth);

// Box dimension of {H(x, y)} over depth-`depth` representatives. Empty
// `resolutions` selects dyadic scales from 2^-3 down to just above the
// coarsest depth cylinder.
DimensionEstimate projection_dimension_experiment(const CantorModel& model_s, const CantorModel& model_u,
                                                  const HeightMap& h, int depth,
                                                  std::span<const double> resolutions = {});

// (x^s, x^u) of a window of radius m: centers of the stable cylinder of the
// reversed past half and of the unstable cylinder of the future half.
std::pair<double, double> window_coordinates(const Word& window, int radius, const CantorModel& model_s,
                                             const CantorModel& model_u);

}  // namespace hspec

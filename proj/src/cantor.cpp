#include "hspec/cantor.hpp"

#include "hspec/errors.hpp"
#include "hspec/linalg.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <set>

namespace hspec {

namespace {

constexpr double kMaxRoot = 2.0;

void validate_affine(const AffineModel& m) {
  if (m.ratios.empty()) throw DomainError("affine model: no maps");
  if (m.ratios.size() != m.offsets.size()) throw DomainError("affine model: ratios and offsets differ in length");
  if (m.ratios.size() > 255) throw DomainError("affine model: at most 255 maps");
  std::vector<std::pair<double, double>> images;
  for (std::size_t a = 0; a < m.ratios.size(); ++a) {
    const double r = m.ratios[a];
    const double o = m.offsets[a];
    if (!(r > 0 && r < 1)) throw DomainError("affine model: ratio " + std::to_string(a) + " outside (0,1)");
    if (!(o >= 0 && o < 1)) throw DomainError("affine model: offset " + std::to_string(a) + " outside [0,1)");
    if (o + r > 1 + 1e-15) throw DomainError("affine model: image " + std::to_string(a) + " leaves [0,1]");
    images.emplace_back(o, o + r);
  }
  std::sort(images.begin(), images.end());
  for (std::size_t i = 1; i < images.size(); ++i)
    if (images[i].first <= images[i - 1].second)
      throw DomainError("affine model: images must be pairwise disjoint");
}

void validate_gauss(const GaussModel& m) {
  if (m.digits.empty()) throw DomainError("gauss model: empty digit set");
  if (m.digits.size() > 255) throw DomainError("gauss model: at most 255 digits");
  std::set<int> seen;
  for (int d : m.digits) {
    if (d < 1) throw DomainError("gauss model: digits must be >= 1");
    if (!seen.insert(d).second) throw DomainError("gauss model: repeated digit " + std::to_string(d));
  }
}

// Incremental cylinder state: supports appending one symbol at a time.
struct CylinderState {
  // Affine: left endpoint and product of ratios.
  double left = 0;
  double length = 1;
  double right = 1;
  // Gauss: continuants in floating point.
  double p = 0, q = 1, p_prev = 1, q_prev = 0;
};

CylinderState extend(const CantorModel& model, const CylinderState& s, Symbol a) {
  CylinderState n;
  if (!model.is_gauss()) {
    const auto& m = model.as_affine();
    n.left = std::max(s.left, s.left + s.length * m.offsets[a]);
    n.length = s.length * m.ratios[a];
    n.right = std::min(s.right, n.left + n.length);
    return n;
  }
  const double d = model.as_gauss().digits[a];
  n.p = d * s.p + s.p_prev;
  n.q = d * s.q + s.q_prev;
  n.p_prev = s.p;
  n.q_prev = s.q;
  const double e1 = n.p / n.q;
  const double e2 = (n.p + n.p_prev) / (n.q + n.q_prev);
  n.left = std::min(e1, e2);
  n.right = std::max(e1, e2);
  n.length = 1.0 / (n.q * (n.q + n.q_prev));
  return n;
}

void check_symbols(const CantorModel& model, const Word& word) {
  for (Symbol s : word)
    if (s >= model.alphabet_size())
      throw InadmissibleWord("cylinder_interval: symbol " + std::to_string(int(s)) + " outside the model alphabet");
}

}  // namespace

CantorModel CantorModel::affine(std::vector<double> ratios, std::vector<double> offsets) {
  AffineModel m{std::move(ratios), std::move(offsets)};
  validate_affine(m);
  return CantorModel(m);
}

CantorModel CantorModel::uniform_affine(int n, double ratio) {
  if (n < 1) throw DomainError("uniform_affine: n must be >= 1");
  std::vector<double> ratios(n, ratio);
  std::vector<double> offsets(n, 0.0);
  for (int a = 1; a < n; ++a) offsets[a] = a * (1.0 - ratio) / (n - 1);
  return affine(std::move(ratios), std::move(offsets));
}

CantorModel CantorModel::gauss(std::vector<int> digits) {
  GaussModel m{std::move(digits)};
  validate_gauss(m);
  return CantorModel(m);
}

int CantorModel::alphabet_size() const {
  return is_gauss() ? static_cast<int>(as_gauss().digits.size()) : static_cast<int>(as_affine().ratios.size());
}

Continuants gauss_continuants(const GaussModel& model, const Word& word) {
  Continuants c;
  constexpr auto kMax = std::numeric_limits<std::int64_t>::max() / 4;
  for (Symbol s : word) {
    if (s >= model.digits.size()) throw InadmissibleWord("gauss_continuants: symbol outside digit set");
    const std::int64_t d = model.digits[s];
    if (c.q > kMax / std::max<std::int64_t>(d, 1)) throw DomainError("gauss_continuants: overflow");
    const std::int64_t p = d * c.p + c.p_prev;
    const std::int64_t q = d * c.q + c.q_prev;
    c.p_prev = c.p;
    c.q_prev = c.q;
    c.p = p;
    c.q = q;
  }
  return c;
}

int unstable_scale(double length) {
  if (!(length > 0) || length > 1) throw DomainError("unstable_scale: length must lie in (0, 1]");
  return static_cast<int>(std::floor(std::log(1.0 / length)));
}

CylinderInterval cylinder_interval(const CantorModel& model, const Word& word) {
  check_symbols(model, word);
  CylinderState s;
  for (Symbol a : word) s = extend(model, s, a);
  return CylinderInterval{word, s.left, s.right, s.length, unstable_scale(s.length)};
}

CylinderInterval cylinder_interval(const CantorModel& model, const Sft& sft, const Word& word) {
  if (model.alphabet_size() != sft.size())
    throw InadmissibleWord("cylinder_interval: model and system alphabets differ");
  if (!sft.admissible(word)) throw InadmissibleWord("cylinder_interval: word " + to_string(word) + " inadmissible");
  return cylinder_interval(model, word);
}

namespace {

// Depth-first walk over the prefix-closed language of the masked graph.
// `visit(word, parent_scale, scale)` returns true to descend further.
template <typename Visit>
void walk_language(const CantorModel& model, const BlockGraph& graph, const VertexMask& mask, Visit&& visit) {
  if (model.alphabet_size() != graph.alphabet_size)
    throw DomainError("scale_front: model and graph alphabets differ");
  std::vector<int> masked;
  for (int v = 0; v < graph.size(); ++v)
    if (mask[v]) masked.push_back(v);
  const int w = graph.width;

  Word word;
  std::vector<CylinderState> states{CylinderState{}};

  // Vertices [lo, hi) of `masked` share the current prefix (length < w),
  // or `vertex` is the current last window (length >= w).
  auto descend = [&](auto&& self, std::size_t lo, std::size_t hi, int vertex, int parent_scale) -> void {
    auto child = [&](Symbol a, std::size_t clo, std::size_t chi, int cv) {
      word.push_back(a);
      states.push_back(extend(model, states.back(), a));
      const int scale = unstable_scale(states.back().length);
      if (visit(word, parent_scale, scale)) self(self, clo, chi, cv, scale);
      states.pop_back();
      word.pop_back();
    };
    const std::size_t len = word.size();
    if (static_cast<int>(len) < w) {
      std::size_t i = lo;
      while (i < hi) {
        const Symbol a = graph.vertices[masked[i]][len];
        std::size_t j = i;
        while (j < hi && graph.vertices[masked[j]][len] == a) ++j;
        const int cv = static_cast<int>(len) + 1 == w ? masked[i] : -1;
        child(a, i, j, cv);
        i = j;
      }
      return;
    }
    for (int next : graph.successors[vertex]) {
      if (!mask[next]) continue;
      child(graph.vertices[next].back(), 0, 0, next);
    }
  };
  descend(descend, 0, masked.size(), -1, -1);
}

}  // namespace

std::vector<Word> scale_front(const CantorModel& model, const BlockGraph& graph, int r, const VertexMask& mask) {
  if (r < 0) throw DomainError("scale_front: r must be >= 0");
  std::vector<Word> out;
  walk_language(model, graph, mask, [&](const Word& word, int, int scale) {
    if (scale >= r) {
      out.push_back(word);
      return false;
    }
    return true;
  });
  return out;
}

std::string to_string(DimensionMethod method) {
  switch (method) {
    case DimensionMethod::PressureRoot: return "pressure-root";
    case DimensionMethod::CountingSlope: return "counting-slope";
    case DimensionMethod::BoxCount: return "box-count";
  }
  return "unknown";
}

namespace {

struct WeightedGraph {
  int size = 0;
  std::vector<Eigen::Triplet<double>> edges;  // value = contraction ratio
};

// Extended words of length `depth` along paths inside the component.
std::vector<Word> component_paths(const BlockGraph& graph, const std::vector<int>& component, int depth) {
  std::vector<bool> in(graph.size(), false);
  for (int v : component) in[v] = true;
  std::vector<Word> out;
  Word word;
  auto grow = [&](auto&& self, int vertex) -> void {
    if (static_cast<int>(word.size()) == depth) {
      out.push_back(word);
      return;
    }
    for (int next : graph.successors[vertex]) {
      if (!in[next]) continue;
      word.push_back(graph.vertices[next].back());
      self(self, next);
      word.pop_back();
    }
  };
  for (int v : component) {
    word = graph.vertices[v];
    grow(grow, v);
  }
  std::sort(out.begin(), out.end());
  return out;
}

WeightedGraph affine_weights(const AffineModel& m, const BlockGraph& graph, const std::vector<int>& component) {
  WeightedGraph g;
  g.size = static_cast<int>(component.size());
  std::vector<int> local(graph.size(), -1);
  for (int i = 0; i < g.size; ++i) local[component[i]] = i;
  for (int i = 0; i < g.size; ++i) {
    const int u = component[i];
    for (int v : graph.successors[u])
      if (local[v] >= 0) g.edges.emplace_back(i, local[v], m.ratios[graph.vertices[u].front()]);
  }
  return g;
}

// Edge u -> v carries |I(u v_last)| / |I(v)|: the contraction of prepending
// u's first symbol, frozen on the depth-`depth` cylinder of v.
WeightedGraph gauss_weights(const CantorModel& model, const BlockGraph& graph, const std::vector<int>& component,
                            int depth) {
  const int d = std::max(depth, graph.width);
  const std::vector<Word> paths = component_paths(graph, component, d);
  WeightedGraph g;
  g.size = static_cast<int>(paths.size());
  std::vector<double> lengths(paths.size());
  for (std::size_t i = 0; i < paths.size(); ++i) lengths[i] = cylinder_interval(model, paths[i]).length;

  Word next;
  for (std::size_t i = 0; i < paths.size(); ++i) {
    const Word& u = paths[i];
    Word tail(u.end() - graph.width, u.end());
    const int last = graph.index_of(tail);
    for (int nv : graph.successors[last]) {
      next.assign(u.begin() + 1, u.end());
      next.push_back(graph.vertices[nv].back());
      auto it = std::lower_bound(paths.begin(), paths.end(), next);
      if (it == paths.end() || *it != next) continue;
      Word extended = u;
      extended.push_back(next.back());
      const double ratio = cylinder_interval(model, extended).length / lengths[it - paths.begin()];
      g.edges.emplace_back(static_cast<int>(i), static_cast<int>(it - paths.begin()), ratio);
    }
  }
  return g;
}

double pressure_root(const WeightedGraph& g, const PressureOptions& options) {
  SparseRows<double> m(g.size, g.size);
  std::vector<Eigen::Triplet<double>> powered(g.edges.size());
  auto excess = [&](double s) {
    for (std::size_t i = 0; i < g.edges.size(); ++i)
      powered[i] = Eigen::Triplet<double>(g.edges[i].row(), g.edges[i].col(), std::pow(g.edges[i].value(), s));
    m.setFromTriplets(powered.begin(), powered.end());
    return spectral_radius(m, options.radius_tolerance) - 1.0;
  };
  const double at_zero = excess(0.0);
  if (at_zero <= options.radius_tolerance) return 0.0;
  if (excess(kMaxRoot) >= 0) throw DomainError("dimension_pressure: no sign change on [0, 2]");
  double lo = 0.0;
  double hi = kMaxRoot;
  while (hi - lo >= options.bracket_tolerance) {
    const double mid = 0.5 * (lo + hi);
    (excess(mid) > 0 ? lo : hi) = mid;
  }
  return 0.5 * (lo + hi);
}

}  // namespace

DimensionEstimate component_dimension(const CantorModel& model, const BlockGraph& graph,
                                      const std::vector<int>& component, const PressureOptions& options) {
  if (model.alphabet_size() != graph.alphabet_size)
    throw DomainError("dimension_pressure: model and graph alphabets differ");
  DimensionEstimate est;
  est.method = DimensionMethod::PressureRoot;
  if (!model.is_gauss()) {
    est.value = pressure_root(affine_weights(model.as_affine(), graph, component), options);
    est.error_bound = options.bracket_tolerance;
    est.depth = graph.width;
    return est;
  }
  const double coarse = pressure_root(gauss_weights(model, graph, component, options.gauss_depth), options);
  const double fine = pressure_root(gauss_weights(model, graph, component, options.gauss_depth + 2), options);
  est.value = coarse;
  est.error_bound = std::abs(fine - coarse) + options.bracket_tolerance;
  est.depth = std::max(options.gauss_depth, graph.width);
  return est;
}

DimensionEstimate dimension_pressure(const CantorModel& model, const BlockGraph& graph, const VertexMask& mask,
                                     const PressureOptions& options) {
  const VertexMask trimmed = trim_mask(graph, mask);
  std::optional<DimensionEstimate> best;
  for (const Component& c : scc_decompose(graph, trimmed)) {
    if (!c.nontrivial) continue;
    DimensionEstimate est = component_dimension(model, graph, c.vertices, options);
    if (!best || est.value > best->value) best = est;
  }
  if (!best) throw NoCycle("dimension_pressure: masked graph has no cycle");
  return *best;
}

DimensionEstimate dimension_counting(const CantorModel& model, const BlockGraph& graph, const VertexMask& mask,
                                     int r_min, int r_max) {
  if (r_min < 1 || r_max <= r_min) throw DomainError("dimension_counting: need r_max > r_min >= 1");
  // A word lies in the front P_r exactly when parent_scale < r <= scale.
  std::vector<double> counts(r_max + 1, 0.0);
  walk_language(model, graph, mask, [&](const Word&, int parent_scale, int scale) {
    for (int r = std::max(parent_scale + 1, 0); r <= std::min(scale, r_max); ++r) counts[r] += 1;
    return scale < r_max;
  });
  const int n = r_max - r_min + 1;
  Eigen::VectorXd x(n), y(n);
  for (int i = 0; i < n; ++i) {
    const int r = r_min + i;
    if (counts[r] < 1) throw NoCycle("dimension_counting: empty scale front at r = " + std::to_string(r));
    x(i) = r;
    y(i) = std::log(counts[r]);
  }
  const auto fit = fit_line(x, y);
  DimensionEstimate est;
  est.value = std::max(0.0, fit.slope);
  est.method = DimensionMethod::CountingSlope;
  est.error_bound = fit.max_residual / r_min;
  est.scale_min = r_min;
  est.scale_max = r_max;
  return est;
}

std::vector<double> dyadic_resolutions(int coarse, int fine) {
  std::vector<double> out;
  for (int k = coarse; k <= fine; ++k) out.push_back(std::ldexp(1.0, -k));
  return out;
}

namespace {

void check_resolutions(std::span<const double> resolutions) {
  std::set<double> distinct(resolutions.begin(), resolutions.end());
  if (distinct.size() < 2) throw DomainError("box_count_dimension: need at least two distinct resolutions");
  for (double e : distinct)
    if (!(e > 0)) throw DomainError("box_count_dimension: resolutions must be positive");
}

DimensionEstimate slope_estimate(std::span<const double> resolutions, const std::vector<double>& counts) {
  const auto n = static_cast<Eigen::Index>(resolutions.size());
  Eigen::VectorXd x(n), y(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    x(i) = std::log(1.0 / resolutions[i]);
    y(i) = std::log(counts[i]);
  }
  DimensionEstimate est;
  est.method = DimensionMethod::BoxCount;
  est.depth = static_cast<int>(n);
  if ((y.array() == y(0)).all()) return est;  // constant counts: slope exactly 0
  const auto fit = fit_line(x, y);
  est.value = std::max(0.0, fit.slope);
  est.error_bound = fit.slope_stderr;
  return est;
}

}  // namespace

std::size_t occupied_boxes(const Eigen::MatrixXd& points, double eps) {
  const Eigen::Index dims = points.cols();
  if (dims < 1 || dims > 3) throw DomainError("box counting supports 1 to 3 dimensions");
  std::vector<std::array<std::int64_t, 3>> keys(points.rows());
  for (Eigen::Index i = 0; i < points.rows(); ++i) {
    std::array<std::int64_t, 3> k{0, 0, 0};
    for (Eigen::Index d = 0; d < dims; ++d) k[d] = static_cast<std::int64_t>(std::floor(points(i, d) / eps));
    keys[i] = k;
  }
  std::sort(keys.begin(), keys.end());
  return static_cast<std::size_t>(std::unique(keys.begin(), keys.end()) - keys.begin());
}

DimensionEstimate box_count_dimension(const Eigen::MatrixXd& points, std::span<const double> resolutions) {
  if (points.rows() == 0) throw DegenerateSet("box_count_dimension: empty set");
  check_resolutions(resolutions);
  std::vector<double> counts;
  for (double e : resolutions) counts.push_back(static_cast<double>(occupied_boxes(points, e)));
  return slope_estimate(resolutions, counts);
}

DimensionEstimate box_count_dimension(std::span<const double> values, std::span<const double> resolutions) {
  if (values.empty()) throw DegenerateSet("box_count_dimension: empty set");
  check_resolutions(resolutions);
  std::vector<double> counts;
  std::vector<std::int64_t> keys(values.size());
  for (double e : resolutions) {
    for (std::size_t i = 0; i < values.size(); ++i) keys[i] = static_cast<std::int64_t>(std::floor(values[i] / e));
    std::sort(keys.begin(), keys.end());
    counts.push_back(static_cast<double>(std::unique(keys.begin(), keys.end()) - keys.begin()));
  }
  return slope_estimate(resolutions, counts);
}

DimensionEstimate box_count_dimension(std::span<const Interval> intervals, std::span<const double> resolutions) {
  if (intervals.empty()) throw DegenerateSet("box_count_dimension: empty set");
  check_resolutions(resolutions);
  std::vector<double> counts;
  std::vector<std::pair<std::int64_t, std::int64_t>> ranges(intervals.size());
  for (double e : resolutions) {
    for (std::size_t i = 0; i < intervals.size(); ++i)
      ranges[i] = {static_cast<std::int64_t>(std::floor(intervals[i].left / e)),
                   static_cast<std::int64_t>(std::floor(intervals[i].right / e))};
    std::sort(ranges.begin(), ranges.end());
    double total = 0;
    std::int64_t covered_to = std::numeric_limits<std::int64_t>::min();
    for (const auto& [lo, hi] : ranges) {
      const std::int64_t start = std::max(lo, covered_to + 1);
      if (hi >= start) {
        total += static_cast<double>(hi - start + 1);
        covered_to = hi;
      }
    }
    counts.push_back(total);
  }
  return slope_estimate(resolutions, counts);
}

void HeightMap::validate() const {
  auto same_sign = [](double a, double b) { return (a > 0 && b > 0) || (a < 0 && b < 0); };
  if (!same_sign(ax, ax + 2 * axx)) throw DomainError("height map: dH/dx vanishes on [0,1]^2");
  if (!same_sign(ay, ay + 2 * ayy)) throw DomainError("height map: dH/dy vanishes on [0,1]^2");
}

std::vector<double> cylinder_representatives(const CantorModel& model, int depth) {
  if (depth < 0) throw DomainError("cylinder_representatives: negative depth");
  std::vector<CylinderState> level{CylinderState{}};
  for (int k = 0; k < depth; ++k) {
    std::vector<CylinderState> next;
    next.reserve(level.size() * model.alphabet_size());
    for (const auto& s : level)
      for (int a = 0; a < model.alphabet_size(); ++a) next.push_back(extend(model, s, static_cast<Symbol>(a)));
    level = std::move(next);
  }
  std::vector<double> out;
  out.reserve(level.size());
  for (const auto& s : level) out.push_back(s.left);
  return out;
}

double max_cylinder_length(const CantorModel& model, int depth) {
  if (!model.is_gauss()) {
    const auto& r = model.as_affine().ratios;
    return std::pow(*std::max_element(r.begin(), r.end()), depth);
  }
  // Continuants grow with every digit, so the smallest digit gives the
  // longest cylinder.
  const auto& d = model.as_gauss().digits;
  const auto a = static_cast<Symbol>(std::min_element(d.begin(), d.end()) - d.begin());
  return cylinder_interval(model, Word(depth, a)).length;
}

DimensionEstimate projection_dimension_experiment(const CantorModel& model_s, const CantorModel& model_u,
                                                  const HeightMap& h, int depth,
                                                  std::span<const double> resolutions) {
  if (depth < 8) throw DomainError("projection_dimension_experiment: depth must be >= 8");
  h.validate();
  const std::vector<double> xs = cylinder_representatives(model_s, depth);
  const std::vector<double> ys = cylinder_representatives(model_u, depth);
  std::vector<double> values;
  values.reserve(xs.size() * ys.size());
  for (double x : xs)
    for (double y : ys) values.push_back(h(x, y));

  std::vector<double> grid(resolutions.begin(), resolutions.end());
  if (grid.empty()) {
    // A one-symbol model contributes a single point and does not limit the grid.
    double coarsest = 0;
    for (const CantorModel* m : {&model_s, &model_u})
      if (m->alphabet_size() > 1) coarsest = std::max(coarsest, max_cylinder_length(*m, depth));
    if (coarsest == 0) coarsest = max_cylinder_length(model_u, depth);
    const int fine = std::max(4, static_cast<int>(std::floor(std::log2(1.0 / coarsest))) - 1);
    grid = dyadic_resolutions(3, fine);
  }
  return box_count_dimension(std::span<const double>(values), grid);
}

std::pair<double, double> window_coordinates(const Word& window, int radius, const CantorModel& model_s,
                                             const CantorModel& model_u) {
  if (static_cast<int>(window.size()) != 2 * radius + 1)
    throw DomainError("window_coordinates: window length must be 2*radius+1");
  const Word past(window.begin(), window.begin() + radius);
  const Word future(window.begin() + radius, window.end());
  return {cylinder_interval(model_s, reversed(past)).center(), cylinder_interval(model_u, future).center()};
}

}  // namespace hspec

#include "hspec/perturbation.hpp"

#include "hspec/errors.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <optional>
#include <random>

namespace hspec {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

// Uniform on [-bound, bound] from the top 53 bits; independent of the
// standard library's distribution implementation.
double draw(std::mt19937_64& rng, double bound) {
  const double unit = static_cast<double>(rng() >> 11) * 0x1.0p-53;
  return bound * (2.0 * unit - 1.0);
}

// Simple zeros of derivative `order` on the sample grid: strict sign
// changes, refined by bisection. Identically vanishing functions have none.
std::vector<double> located_zeros(const FiberFunction& f, int order, const std::vector<double>& grid) {
  std::vector<double> g(grid.size());
  for (std::size_t i = 0; i < grid.size(); ++i) g[i] = f.derivative(grid[i], order);
  std::vector<double> zeros;
  auto bisect = [&](double lo, double hi) {
    double glo = f.derivative(lo, order);
    for (int it = 0; it < 100 && hi - lo > 1e-14; ++it) {
      const double mid = 0.5 * (lo + hi);
      const double gm = f.derivative(mid, order);
      if ((gm < 0) == (glo < 0) && gm != 0) {
        lo = mid;
        glo = gm;
      } else {
        hi = mid;
      }
    }
    return 0.5 * (lo + hi);
  };
  for (std::size_t i = 0; i + 1 < grid.size(); ++i) {
    if (g[i] == 0) {
      if (i > 0 && ((g[i - 1] < 0 && g[i + 1] > 0) || (g[i - 1] > 0 && g[i + 1] < 0))) zeros.push_back(grid[i]);
      continue;
    }
    if ((g[i] < 0 && g[i + 1] > 0) || (g[i] > 0 && g[i + 1] < 0)) zeros.push_back(bisect(grid[i], grid[i + 1]));
  }
  return zeros;
}

struct Accumulator {
  double margin = kInf;
  bool seen = false;

  void add(double m) {
    margin = std::min(margin, m);
    seen = true;
  }
};

}  // namespace

FiberProfile perturb_fiber(const FiberProfile& profile, const PerturbationParams& params, double bound) {
  for (double v : {params.a, params.b, params.c})
    if (!std::isfinite(v) || std::abs(v) > bound)
      throw BoundExceeded("perturb_fiber: parameters must satisfy |a|,|b|,|c| <= " + std::to_string(bound));
  return profile.with_added_shift(params.a, params.b, params.c);
}

bool RegularityReport::passes() const {
  return std::all_of(conditions.begin(), conditions.end(), [](const ConditionMargin& c) { return c.pass; });
}

double RegularityReport::min_margin() const {
  double m = kInf;
  for (const auto& c : conditions)
    if (!c.vacuous) m = std::min(m, c.margin);
  return m;
}

const ConditionMargin& RegularityReport::condition(const std::string& name) const {
  for (const auto& c : conditions)
    if (c.name == name) return c;
  throw DomainError("regularity report: unknown condition " + name);
}

RegularityReport regularity_scan(const FiberProfile& profile, const RoofFunction& roof, int grid_density,
                                 double tolerance) {
  if (grid_density < 64) throw DomainError("regularity_scan: grid density must be >= 64");
  const int m = context_radius(profile, roof);
  // i: f' on the section ends; ii: f''' ; iii.a: f''; iii.b: f'' on {f'''=0};
  // iv.a: f' on {f''=0}; iv.b: f' on {f''=0} and {f'''=0}.
  Accumulator acc[6];
  for (const Word& context : enumerate_words(profile.sft(), 2 * m + 1)) {
    const FiberFunction f{profile.effective(context), roof.at(context)};
    const int n = std::max(grid_density, static_cast<int>(std::ceil(grid_density * f.tau)));
    std::vector<double> grid(n + 1);
    for (int i = 0; i <= n; ++i) grid[i] = i == n ? f.tau : f.tau * i / n;

    acc[0].add(std::min(std::abs(f.derivative(0, 1)), std::abs(f.derivative(f.tau, 1))));
    const auto z3 = located_zeros(f, 3, grid);
    const auto z2 = located_zeros(f, 2, grid);
    for (double z : z3) acc[1].add(std::abs(f.derivative(z, 4)));
    for (double z : z2) acc[2].add(std::abs(f.derivative(z, 3)));
    for (double z : z3) acc[3].add(std::abs(f.derivative(z, 2)));
    for (double z : z2) acc[4].add(std::abs(f.derivative(z, 1)));
    for (double z : z3)
      if (std::abs(f.derivative(z, 2)) <= tolerance) acc[5].add(std::abs(f.derivative(z, 1)));
  }
  static const char* const kNames[6] = {"i", "ii", "iii.a", "iii.b", "iv.a", "iv.b"};
  RegularityReport report;
  report.tolerance = tolerance;
  for (int k = 0; k < 6; ++k) {
    ConditionMargin c;
    c.name = kNames[k];
    c.vacuous = !acc[k].seen;
    c.margin = c.vacuous ? 0.0 : acc[k].margin;
    c.pass = c.vacuous || c.margin >= tolerance;
    report.conditions.push_back(c);
  }
  return report;
}

RegularParamsResult find_regular_params(const FiberProfile& profile, const RoofFunction& roof, int trials,
                                        std::uint64_t seed, double bound, int grid_density) {
  if (trials < 1) throw DomainError("find_regular_params: trials must be >= 1");
  std::mt19937_64 rng(seed);
  std::optional<RegularParamsResult> best;
  auto better = [](const RegularityReport& a, const RegularityReport& b) {
    if (a.passes() != b.passes()) return a.passes();
    return a.min_margin() > b.min_margin();
  };
  for (int t = 0; t < trials; ++t) {
    PerturbationParams p;
    p.c = draw(rng, bound);
    p.b = draw(rng, bound);
    p.a = draw(rng, bound);
    RegularityReport r = regularity_scan(perturb_fiber(profile, p, bound), roof, grid_density);
    if (!best || better(r, best->report)) best = RegularParamsResult{p, std::move(r)};
  }
  return *best;
}

std::size_t TransversalityReport::failures() const {
  return static_cast<std::size_t>(
      std::count_if(points.begin(), points.end(), [](const TransversalityPoint& p) { return !p.pass; }));
}

double TransversalityReport::min_margin() const {
  double m = kInf;
  for (const auto& p : points) m = std::min(m, p.margin);
  return m;
}

namespace {

// Piecewise-linear profile through (center, value) knots, extended
// linearly past the outermost knots.
class AxisProfile {
 public:
  void add(double x, double v) { knots_.emplace_back(x, v); }
  void finish() { std::sort(knots_.begin(), knots_.end()); }

  double operator()(double x) const {
    if (knots_.size() == 1) return knots_.front().second;
    auto it = std::upper_bound(knots_.begin(), knots_.end(), std::make_pair(x, kInf));
    std::size_t hi = static_cast<std::size_t>(it - knots_.begin());
    hi = std::clamp<std::size_t>(hi, 1, knots_.size() - 1);
    const auto& [x0, v0] = knots_[hi - 1];
    const auto& [x1, v1] = knots_[hi];
    return v0 + (v1 - v0) * (x - x0) / (x1 - x0);
  }

 private:
  std::vector<std::pair<double, double>> knots_;
};

}  // namespace

TransversalityReport transversality_scan(const Sft& sft, const CantorModel& model_u, const CantorModel& model_s,
                                         const HeightTable& table, int depth, double epsilon) {
  const int m = table.radius();
  if (depth < 2 * m + 1) throw DomainError("transversality_scan: depth must be >= 2m+1");
  if (model_u.alphabet_size() != sft.size() || model_s.alphabet_size() != sft.size())
    throw DomainError("transversality_scan: model alphabets must match the system");

  // Knots along x^u share the past half of the window; along x^s the future half.
  std::map<Word, AxisProfile> along_u;
  std::map<Word, AxisProfile> along_s;
  for (std::size_t i = 0; i < table.windows().size(); ++i) {
    const Word& w = table.windows()[i];
    const auto [xs, xu] = window_coordinates(w, m, model_s, model_u);
    along_u[Word(w.begin(), w.begin() + m)].add(xu, table.values()[i]);
    along_s[Word(w.begin() + m, w.end())].add(xs, table.values()[i]);
  }
  for (auto& [k, p] : along_u) p.finish();
  for (auto& [k, p] : along_s) p.finish();

  const std::vector<Word> words = enumerate_words(sft, depth);
  TransversalityReport report;
  report.epsilon = epsilon;
  for (const Word& past : words) {
    const CylinderInterval is = cylinder_interval(model_s, reversed(past));
    const AxisProfile* u_profile = nullptr;
    if (auto it = along_u.find(Word(past.end() - m, past.end())); it != along_u.end()) u_profile = &it->second;
    for (const Word& future : words) {
      if (!sft.allows(past.back(), future.front())) continue;
      const CylinderInterval iu = cylinder_interval(model_u, future);
      const AxisProfile& s_profile = along_s.at(Word(future.begin(), future.begin() + m + 1));
      TransversalityPoint p;
      p.past = past;
      p.future = future;
      p.xs = is.center();
      p.xu = iu.center();
      const double hu = 0.5 * iu.length;
      const double hs = 0.5 * is.length;
      p.d_unstable = ((*u_profile)(p.xu + hu) - (*u_profile)(p.xu - hu)) / (2 * hu);
      p.d_stable = (s_profile(p.xs + hs) - s_profile(p.xs - hs)) / (2 * hs);
      p.margin = std::min(std::abs(p.d_unstable), std::abs(p.d_stable));
      p.pass = p.margin >= epsilon;
      report.points.push_back(std::move(p));
    }
  }
  return report;
}

HeightTable tilt_table(const Sft& sft, const CantorModel& model_u, const CantorModel& model_s,
                       const HeightTable& table, double v1, double v2) {
  const int m = table.radius();
  return HeightTable::from_function(sft, m, [&](const Word& w) {
    const auto [xs, xu] = window_coordinates(w, m, model_s, model_u);
    return table(w) - v1 * xs - v2 * xu;
  });
}

TiltResult find_transverse_tilt(const Sft& sft, const CantorModel& model_u, const CantorModel& model_s,
                                const HeightTable& table, int depth, double epsilon, double bound, int trials,
                                std::uint64_t seed) {
  if (trials < 1) throw DomainError("find_transverse_tilt: trials must be >= 1");
  std::mt19937_64 rng(seed);
  std::optional<TiltResult> best;
  for (int t = 0; t < trials; ++t) {
    const double v1 = draw(rng, bound);
    const double v2 = draw(rng, bound);
    TiltResult r{v1, v2,
                 transversality_scan(sft, model_u, model_s, tilt_table(sft, model_u, model_s, table, v1, v2), depth,
                                     epsilon)};
    const bool improves = !best || r.report.failures() < best->report.failures() ||
                          (r.report.failures() == best->report.failures() &&
                           r.report.min_margin() > best->report.min_margin());
    if (improves) best = std::move(r);
  }
  return *best;
}

double unique_maximizer_fraction(const FiberProfile& profile, const RoofFunction& roof, const Sft& sft,
                                 int samples) {
  if (samples < 1) throw DomainError("unique_maximizer_fraction: samples must be >= 1");
  const std::vector<Word> contexts = enumerate_words(sft, 2 * context_radius(profile, roof) + 1);
  const std::size_t total = contexts.size();
  const std::size_t count = std::min<std::size_t>(total, static_cast<std::size_t>(samples));
  std::size_t unique = 0;
  for (std::size_t k = 0; k < count; ++k) {
    const Word& w = contexts[k * total / count];
    if (fiber_max(profile, roof, w).unique) ++unique;
  }
  return static_cast<double>(unique) / static_cast<double>(count);
}

}  // namespace hspec

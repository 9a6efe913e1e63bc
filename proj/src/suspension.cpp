#include "hspec/suspension.hpp"

#include "hspec/errors.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace hspec {

namespace {

Word centered(const Word& context, int radius) {
  const int outer = (static_cast<int>(context.size()) - 1) / 2;
  if (static_cast<int>(context.size()) != 2 * outer + 1 || outer < radius)
    throw DomainError("context window too short for radius " + std::to_string(radius));
  return Word(context.begin() + (outer - radius), context.begin() + (outer + radius + 1));
}

void validate_coefficients(const FiberCoefficients& c) {
  for (double v : {c.c0, c.c1, c.c2, c.c3, c.amplitude, c.omega, c.phase})
    if (!std::isfinite(v)) throw DomainError("fiber profile: coefficients must be finite");
  if (std::abs(c.omega) > kMaxFiberFrequency * (1 + 1e-12))
    throw DomainError("fiber profile: |omega| must not exceed 16*pi");
}

// Maximizes f on [lo, hi] assuming unimodality; returns the best of the
// final bracket ends and midpoint.
std::pair<double, double> golden_section(const FiberFunction& f, double lo, double hi, double tol) {
  constexpr double kInvPhi = 0.6180339887498949;
  double a = lo;
  double b = hi;
  double x1 = b - kInvPhi * (b - a);
  double x2 = a + kInvPhi * (b - a);
  double f1 = f.value(x1);
  double f2 = f.value(x2);
  while (b - a > tol) {
    if (f1 < f2) {
      a = x1;
      x1 = x2;
      f1 = f2;
      x2 = a + kInvPhi * (b - a);
      f2 = f.value(x2);
    } else {
      b = x2;
      x2 = x1;
      f2 = f1;
      x1 = b - kInvPhi * (b - a);
      f1 = f.value(x1);
    }
  }
  std::pair<double, double> best{a, f.value(a)};
  for (double s : {0.5 * (a + b), b}) {
    const double v = f.value(s);
    if (v > best.second) best = {s, v};
  }
  return best;
}

}  // namespace

double FiberFunction::derivative(double s, int order) const {
  const auto& c = coefficients;
  const double w = c.omega;
  const double arg = w * s + c.phase;
  switch (order) {
    case 0: return c.c0 + c.c1 * s + c.c2 * s * s / 2 + c.c3 * s * s * s / 6 + c.amplitude * std::sin(arg);
    case 1: return c.c1 + c.c2 * s + c.c3 * s * s / 2 + c.amplitude * w * std::cos(arg);
    case 2: return c.c2 + c.c3 * s - c.amplitude * w * w * std::sin(arg);
    case 3: return c.c3 - c.amplitude * w * w * w * std::cos(arg);
    case 4: return c.amplitude * w * w * w * w * std::sin(arg);
    default: throw DomainError("fiber derivative: order must be in 0..4");
  }
}

bool FiberFunction::is_constant() const {
  const auto& c = coefficients;
  return c.c1 == 0 && c.c2 == 0 && c.c3 == 0 && (c.amplitude == 0 || c.omega == 0);
}

RoofFunction::RoofFunction(const Sft& sft, int radius, std::vector<double> values)
    : sft_(sft), table_(sft, radius, std::move(values)) {
  if (!(table_.min_value() > 0)) throw DomainError("roof function: return times must be positive");
}

RoofFunction RoofFunction::constant(const Sft& sft, double tau) {
  return RoofFunction(sft, 0, std::vector<double>(sft.size(), tau));
}

RoofFunction RoofFunction::per_symbol(const Sft& sft, const std::vector<double>& taus) {
  if (static_cast<int>(taus.size()) != sft.size()) throw DomainError("roof function: one return time per symbol");
  return RoofFunction(sft, 0, taus);
}

double RoofFunction::at(const Word& context) const {
  const double tau = table_(centered(context, radius()));
  if (!(tau > 0)) throw DomainError("roof function: nonpositive return time");
  return tau;
}

FiberProfile::FiberProfile(const Sft& sft, int radius, std::vector<FiberCoefficients> coefficients)
    : sft_(sft), radius_(radius), coefficients_(std::move(coefficients)) {
  if (radius < 0) throw DomainError("fiber profile: radius must be >= 0");
  windows_ = enumerate_words(sft, 2 * radius + 1);
  if (windows_.size() != coefficients_.size()) throw DomainError("fiber profile: one coefficient set per window");
  for (const auto& c : coefficients_) validate_coefficients(c);
}

FiberProfile FiberProfile::uniform(const Sft& sft, const FiberCoefficients& c) {
  return FiberProfile(sft, 0, std::vector<FiberCoefficients>(sft.size(), c));
}

FiberProfile FiberProfile::from_function(const Sft& sft, int radius,
                                         const std::function<FiberCoefficients(const Word&)>& fn) {
  std::vector<FiberCoefficients> cs;
  for (const Word& w : enumerate_words(sft, 2 * radius + 1)) cs.push_back(fn(w));
  return FiberProfile(sft, radius, std::move(cs));
}

FiberCoefficients FiberProfile::effective_at(std::size_t index) const {
  FiberCoefficients c = coefficients_.at(index);
  c.c1 -= shift_[0];
  c.c2 -= shift_[1];
  c.c3 -= shift_[2];
  return c;
}

FiberCoefficients FiberProfile::effective(const Word& context) const {
  const Word w = centered(context, radius_);
  auto it = std::lower_bound(windows_.begin(), windows_.end(), w);
  if (it == windows_.end() || *it != w) throw InadmissibleWord("fiber profile: window " + to_string(w) + " unknown");
  return effective_at(static_cast<std::size_t>(it - windows_.begin()));
}

FiberProfile FiberProfile::with_added_shift(double a, double b, double c) const {
  FiberProfile out = *this;
  out.shift_[0] += a;
  out.shift_[1] += b;
  out.shift_[2] += c;
  return out;
}

FiberMax fiber_max(const FiberFunction& f, int grid) {
  if (!(f.tau > 0)) throw DomainError("fiber_max: tau must be positive");
  if (grid < 2) throw DomainError("fiber_max: grid must have at least 2 intervals");
  if (f.is_constant()) return FiberMax{f.value(0), 0, false};

  const int n = grid * std::max(1, static_cast<int>(std::ceil(f.tau)));
  std::vector<double> s(n + 1);
  std::vector<double> v(n + 1);
  for (int i = 0; i <= n; ++i) {
    s[i] = i == n ? f.tau : f.tau * i / n;
    v[i] = f.value(s[i]);
  }
  std::vector<std::pair<double, double>> peaks;
  for (int i = 0; i <= n; ++i) {
    const bool left_ok = i == 0 || v[i] >= v[i - 1];
    const bool right_ok = i == n || v[i] >= v[i + 1];
    if (!left_ok || !right_ok) continue;
    auto refined = golden_section(f, s[std::max(i - 1, 0)], s[std::min(i + 1, n)], 1e-10);
    if (v[i] > refined.second) refined = {s[i], v[i]};
    peaks.push_back(refined);
  }
  auto best = *std::max_element(peaks.begin(), peaks.end(),
                                [](const auto& a, const auto& b) { return a.second < b.second; });
  bool unique = true;
  for (const auto& [loc, val] : peaks)
    if (val >= best.second - 1e-9 && std::abs(loc - best.first) > 1e-6) unique = false;
  return FiberMax{best.second, best.first, unique};
}

int context_radius(const FiberProfile& profile, const RoofFunction& roof) {
  return std::max(profile.radius(), roof.radius());
}

FiberMax fiber_max(const FiberProfile& profile, const RoofFunction& roof, const Word& context, int grid) {
  return fiber_max(FiberFunction{profile.effective(context), roof.at(context)}, grid);
}

HeightTable height_table_from_suspension(const FiberProfile& profile, const RoofFunction& roof, const Sft& sft,
                                         int m_out) {
  if (m_out < context_radius(profile, roof))
    throw DomainError("height_table_from_suspension: m_out must cover the profile and roof radii");
  return HeightTable::from_function(sft, m_out, [&](const Word& w) { return fiber_max(profile, roof, w).value; });
}

int minimal_horizon(const TwoSidedPoint& x, int context_radius) {
  // Fibers from `into_tail` on see right-tail contexts only.
  const int into_tail = static_cast<int>(x.middle.size()) - x.origin + context_radius;
  return std::max(0, into_tail) + x.right.period();
}

double flow_lagrange(const FiberProfile& profile, const RoofFunction& roof, const TwoSidedPoint& x, int horizon) {
  x.validate(roof.sft());
  const int m = context_radius(profile, roof);
  if (horizon < minimal_horizon(x, m))
    throw DomainError("flow_lagrange: horizon must cover one full period of the right tail");

  const int p_left = x.left.period();
  const int p_right = x.right.period();
  const int left_reps = (m + std::max(0, -x.origin)) / p_left + 1;
  const int past_right = horizon + m + x.origin - static_cast<int>(x.middle.size());
  const int right_reps = std::max(0, past_right) / p_right + 1;
  const Word seq = x.unfold(left_reps, right_reps);
  const int start = left_reps * p_left + x.origin;

  // Walk fiber by fiber; the last p_right fibers are in the periodic regime.
  std::vector<double> fiber_peaks(horizon);
  double flow_time = 0;
  for (int n = 0; n < horizon; ++n) {
    const Word context(seq.begin() + (start + n - m), seq.begin() + (start + n + m + 1));
    const double tau = roof.at(context);
    fiber_peaks[n] = fiber_max(FiberFunction{profile.effective(context), tau}).value;
    flow_time += tau;
  }
  if (!(flow_time > 0)) throw DomainError("flow_lagrange: degenerate flow time");
  return *std::max_element(fiber_peaks.end() - p_right, fiber_peaks.end());
}

SuspensionDimensionCheck suspension_dimension_check(const CantorModel& model, const RoofFunction& roof, int depth,
                                                    std::span<const double> resolutions) {
  if (depth < 6) throw DomainError("suspension_dimension_check: depth must be >= 6");
  if (roof.sft().size() != model.alphabet_size())
    throw DomainError("suspension_dimension_check: roof and model alphabets differ");
  const int m = roof.radius();
  if (m > depth) throw DomainError("suspension_dimension_check: roof radius exceeds depth");

  std::vector<double> grid(resolutions.begin(), resolutions.end());
  if (grid.empty()) {
    const double coarsest = max_cylinder_length(model, depth);
    grid = dyadic_resolutions(2, std::max(3, static_cast<int>(std::floor(std::log2(1.0 / coarsest))) - 1));
  }
  const double step = 0.5 * *std::min_element(grid.begin(), grid.end());

  const Sft& sft = roof.sft();
  const std::vector<Word> words = enumerate_words(sft, depth);
  std::vector<double> coord_u;
  std::vector<double> coord_s;
  // Past words are kept in time order; the stable side reads them nearest
  // symbol first.
  for (const Word& w : words) {
    coord_u.push_back(cylinder_interval(model, w).left);
    coord_s.push_back(cylinder_interval(model, reversed(w)).left);
  }

  std::vector<std::array<double, 2>> base;
  std::vector<double> taus;
  Word context(2 * m + 1);
  for (std::size_t i = 0; i < words.size(); ++i) {    // past
    for (std::size_t j = 0; j < words.size(); ++j) {  // future
      const Word& past = words[i];
      const Word& future = words[j];
      if (!sft.allows(past.back(), future.front())) continue;
      std::copy(past.end() - m, past.end(), context.begin());
      std::copy(future.begin(), future.begin() + m + 1, context.begin() + m);
      base.push_back({coord_s[i], coord_u[j]});
      taus.push_back(roof.at(context));
    }
  }
  Eigen::MatrixXd base_cloud(static_cast<Eigen::Index>(base.size()), 2);
  std::size_t torus_points = 0;
  for (std::size_t i = 0; i < base.size(); ++i) {
    base_cloud(static_cast<Eigen::Index>(i), 0) = base[i][0];
    base_cloud(static_cast<Eigen::Index>(i), 1) = base[i][1];
    torus_points += static_cast<std::size_t>(std::ceil(taus[i] / step));
  }
  Eigen::MatrixXd torus(static_cast<Eigen::Index>(torus_points), 3);
  Eigen::Index row = 0;
  for (std::size_t i = 0; i < base.size(); ++i) {
    const auto samples = static_cast<Eigen::Index>(std::ceil(taus[i] / step));
    for (Eigen::Index k = 0; k < samples; ++k, ++row) {
      torus(row, 0) = base[i][0];
      torus(row, 1) = base[i][1];
      torus(row, 2) = std::min(static_cast<double>(k) * step, std::nextafter(taus[i], 0.0));
    }
  }
  SuspensionDimensionCheck out;
  out.dim_k = box_count_dimension(base_cloud, grid);
  out.dim_lambda = box_count_dimension(torus, grid);
  out.residual = std::abs(out.dim_lambda.value - out.dim_k.value - 1.0);
  return out;
}

}  // namespace hspec

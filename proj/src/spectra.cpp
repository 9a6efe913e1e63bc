#include "hspec/spectra.hpp"

#include "hspec/errors.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace hspec {

namespace {

constexpr std::uint64_t kDenseLimit = std::uint64_t{1} << 22;

Word repeat_suffix(const Word& cycle, std::size_t length) {
  Word out(length);
  const std::size_t p = cycle.size();
  // Last symbol of the suffix is cycle.back().
  for (std::size_t i = 0; i < length; ++i) out[length - 1 - i] = cycle[p - 1 - (i % p)];
  return out;
}

Word repeat_prefix(const Word& cycle, std::size_t length) {
  Word out(length);
  for (std::size_t i = 0; i < length; ++i) out[i] = cycle[i % cycle.size()];
  return out;
}

double window_max(const HeightTable& table, const Word& seq) {
  double best = -std::numeric_limits<double>::infinity();
  const auto w = static_cast<std::size_t>(table.width());
  for (std::size_t i = 0; i + w <= seq.size(); ++i) best = std::max(best, table.at(seq.data() + i));
  return best;
}

}  // namespace

HeightTable::HeightTable(const Sft& sft, int radius, std::vector<double> values)
    : radius_(radius), alphabet_(sft.size()), values_(std::move(values)) {
  if (radius < 0) throw DomainError("height table: radius must be >= 0");
  windows_ = enumerate_words(sft, width());
  if (windows_.size() != values_.size())
    throw DomainError("height table: expected " + std::to_string(windows_.size()) + " values, got " +
                      std::to_string(values_.size()));
  for (double v : values_)
    if (!std::isfinite(v)) throw DomainError("height table: values must be finite");

  double states = 1;
  for (int i = 0; i < width(); ++i) states *= alphabet_;
  if (states <= static_cast<double>(kDenseLimit)) {
    dense_.assign(static_cast<std::size_t>(states), -1);
    for (std::size_t i = 0; i < windows_.size(); ++i) dense_[*word_code(windows_[i], alphabet_)] = static_cast<int>(i);
  } else {
    for (std::size_t i = 0; i < windows_.size(); ++i) {
      const auto code = word_code(windows_[i], alphabet_);
      if (!code) throw DomainError("height table: window too long to index");
      sparse_.emplace(*code, static_cast<int>(i));
    }
  }
}

HeightTable HeightTable::from_function(const Sft& sft, int radius, const std::function<double(const Word&)>& fn) {
  if (radius < 0) throw DomainError("height table: radius must be >= 0");
  std::vector<double> values;
  for (const Word& w : enumerate_words(sft, 2 * radius + 1)) values.push_back(fn(w));
  return HeightTable(sft, radius, std::move(values));
}

HeightTable HeightTable::additive(const Sft& sft, int radius, const std::vector<double>& weights) {
  if (static_cast<int>(weights.size()) != sft.size()) throw DomainError("additive height: one weight per symbol");
  return from_function(sft, radius, [&](const Word& w) {
    double sum = 0;
    for (Symbol s : w) sum += weights[s];
    return sum;
  });
}

HeightTable HeightTable::embedded(const Sft& sft, int radius, const CantorModel& model_s,
                                  const CantorModel& model_u, const HeightMap& h) {
  if (model_s.alphabet_size() != sft.size() || model_u.alphabet_size() != sft.size())
    throw DomainError("embedded height: model alphabets must match the system");
  return from_function(sft, radius, [&](const Word& w) {
    const auto [xs, xu] = window_coordinates(w, radius, model_s, model_u);
    return h(xs, xu);
  });
}

int HeightTable::index_of(const Word& window) const {
  if (static_cast<int>(window.size()) != width()) return -1;
  for (Symbol s : window)
    if (s >= alphabet_) return -1;
  const auto code = word_code(window, alphabet_);
  if (!code) return -1;
  if (!dense_.empty()) return *code < dense_.size() ? dense_[*code] : -1;
  auto it = sparse_.find(*code);
  return it == sparse_.end() ? -1 : it->second;
}

double HeightTable::at(const Symbol* first) const {
  std::uint64_t code = 0;
  for (int i = 0; i < width(); ++i) code = code * alphabet_ + first[i];
  int index = -1;
  if (!dense_.empty()) {
    index = dense_[code];
  } else if (auto it = sparse_.find(code); it != sparse_.end()) {
    index = it->second;
  }
  if (index < 0) throw InadmissibleWord("height table: inadmissible window");
  return values_[index];
}

double HeightTable::operator()(const Word& window) const {
  const int i = index_of(window);
  if (i < 0) throw InadmissibleWord("height table: window " + to_string(window) + " not in table");
  return values_[i];
}

HeightTable HeightTable::reversed(const Sft& reversed_sft) const {
  return from_function(reversed_sft, radius_, [&](const Word& w) { return (*this)(hspec::reversed(w)); });
}

double HeightTable::min_value() const { return *std::min_element(values_.begin(), values_.end()); }
double HeightTable::max_value() const { return *std::max_element(values_.begin(), values_.end()); }

void TwoSidedPoint::validate(const Sft& sft) const {
  auto check_cycle = [&](const PeriodicOrbit& o, const char* name) {
    if (o.cycle.empty()) throw InadmissibleWord(std::string("two-sided point: empty ") + name + " tail");
    if (!sft.admissible(o.cycle) || !sft.allows(o.cycle.back(), o.cycle.front()))
      throw InadmissibleWord(std::string("two-sided point: inadmissible ") + name + " tail");
  };
  check_cycle(left, "left");
  check_cycle(right, "right");
  if (!sft.admissible(middle)) throw InadmissibleWord("two-sided point: inadmissible middle");
  const Symbol into = middle.empty() ? right.cycle.front() : middle.front();
  if (!sft.allows(left.cycle.back(), into)) throw InadmissibleWord("two-sided point: inadmissible left junction");
  if (!middle.empty() && !sft.allows(middle.back(), right.cycle.front()))
    throw InadmissibleWord("two-sided point: inadmissible right junction");
}

TwoSidedPoint TwoSidedPoint::shifted(int steps) const {
  TwoSidedPoint out = *this;
  out.origin += steps;
  return out;
}

Word TwoSidedPoint::unfold(int left_reps, int right_reps) const {
  Word out;
  for (int i = 0; i < left_reps; ++i) out.insert(out.end(), left.cycle.begin(), left.cycle.end());
  out.insert(out.end(), middle.begin(), middle.end());
  for (int i = 0; i < right_reps; ++i) out.insert(out.end(), right.cycle.begin(), right.cycle.end());
  return out;
}

double cycle_maximum(const HeightTable& table, const Word& cycle) {
  const std::size_t p = cycle.size();
  return window_max(table, repeat_prefix(cycle, p + 2 * table.radius()));
}

namespace {

// Windows that are not entirely inside one of the periodic tails.
double junction_maximum(const HeightTable& table, const Word& left, const Word& middle, const Word& right,
                        Word& buffer) {
  const auto reach = static_cast<std::size_t>(2 * table.radius());
  buffer = repeat_suffix(left, reach);
  buffer.insert(buffer.end(), middle.begin(), middle.end());
  const Word tail = repeat_prefix(right, reach);
  buffer.insert(buffer.end(), tail.begin(), tail.end());
  return window_max(table, buffer);
}

}  // namespace

double markov_value(const Sft& sft, const HeightTable& table, const TwoSidedPoint& x) {
  x.validate(sft);
  Word buffer;
  return std::max({cycle_maximum(table, x.left.cycle), cycle_maximum(table, x.right.cycle),
                   junction_maximum(table, x.left.cycle, x.middle, x.right.cycle, buffer)});
}

double lagrange_value(const Sft& sft, const HeightTable& table, const TwoSidedPoint& x) {
  x.validate(sft);
  return cycle_maximum(table, x.right.cycle);
}

VertexMask PrunedSystem::selected_mask() const { return mask_of(*graph, selected_component().component.vertices); }

VertexMask threshold_mask(const HeightTable& table, double t) {
  VertexMask mask(table.values().size());
  for (std::size_t i = 0; i < mask.size(); ++i) mask[i] = table.values()[i] <= t;
  return mask;
}

namespace {

PrunedSystem select_components(std::shared_ptr<const BlockGraph> graph, const CantorModel& model, double t,
                               VertexMask mask, const PressureOptions& options) {
  PrunedSystem out{t, std::move(graph), model, {}, {}, -1};
  out.mask = trim_mask(*out.graph, std::move(mask));
  for (Component& c : scc_decompose(*out.graph, out.mask)) {
    if (!c.nontrivial) continue;
    DimensionEstimate d = component_dimension(model, *out.graph, c.vertices, options);
    out.components.push_back({std::move(c), d});
  }
  for (std::size_t i = 0; i < out.components.size(); ++i)
    if (out.selected < 0 || out.components[i].dimension.value > out.components[out.selected].dimension.value)
      out.selected = static_cast<int>(i);
  if (out.selected < 0) throw EmptyPrune("prune_below: no subhorseshoe at t = " + std::to_string(t));
  return out;
}

}  // namespace

PrunedSystem prune_below(std::shared_ptr<const BlockGraph> graph, const CantorModel& model,
                         const HeightTable& table, double t, const PressureOptions& options) {
  if (graph->width != table.width() || graph->size() != static_cast<int>(table.values().size()))
    throw DomainError("prune_below: graph does not match the height table windows");
  return select_components(std::move(graph), model, t, threshold_mask(table, t), options);
}

PrunedSystem prune_below(const Sft& sft, const CantorModel& model, const HeightTable& table, double t,
                         const PressureOptions& options) {
  auto graph = std::make_shared<const BlockGraph>(higher_block(sft, table.width()));
  return prune_below(std::move(graph), model, table, t, options);
}

DimensionCurve du_curve(const Sft& sft, const CantorModel& model_u, const CantorModel& model_s,
                        const HeightTable& table, const std::vector<double>& t_grid, const PressureOptions& options) {
  if (!std::is_sorted(t_grid.begin(), t_grid.end())) throw DomainError("du_curve: t_grid must be sorted");
  const Sft backward = sft.reversed();
  const HeightTable table_s = table.reversed(backward);
  auto graph_u = std::make_shared<const BlockGraph>(higher_block(sft, table.width()));
  auto graph_s = std::make_shared<const BlockGraph>(higher_block(backward, table.width()));

  DimensionCurve curve;
  for (double t : t_grid) {
    CurveSample sample;
    sample.t = t;
    try {
      const PrunedSystem pu = prune_below(graph_u, model_u, table, t, options);
      sample.du = pu.dimension();
      sample.error = pu.selected_component().dimension.error_bound;
    } catch (const EmptyPrune&) {
    }
    try {
      const PrunedSystem ps = prune_below(graph_s, model_s, table_s, t, options);
      sample.ds = ps.dimension();
      sample.error = std::max(sample.error, ps.selected_component().dimension.error_bound);
    } catch (const EmptyPrune&) {
    }
    curve.samples.push_back(sample);
  }
  return curve;
}

std::string to_string(SpectrumKind kind) { return kind == SpectrumKind::Markov ? "markov" : "lagrange"; }

std::vector<double> dedup_sorted(std::vector<double> values, double resolution) {
  std::sort(values.begin(), values.end());
  std::vector<double> out;
  for (double v : values)
    if (out.empty() || v - out.back() > resolution) out.push_back(v);
  return out;
}

SpectrumSlice spectrum_slice(const Sft& sft, const HeightTable& table, SpectrumKind kind, double t, int max_period,
                             int middle_bound) {
  if (max_period < 1) throw DomainError("spectrum_slice: max_period must be >= 1");
  if (middle_bound < 0) throw DomainError("spectrum_slice: middle_bound must be >= 0");
  const std::vector<PeriodicOrbit> orbits = periodic_orbits(sft, max_period);
  std::vector<double> cycle_max;
  cycle_max.reserve(orbits.size());
  for (const auto& o : orbits) cycle_max.push_back(cycle_maximum(table, o.cycle));

  std::vector<double> raw;
  if (kind == SpectrumKind::Lagrange) {
    raw = cycle_max;
  } else {
    std::vector<Word> middles{Word{}};
    for (int k = 1; k <= middle_bound; ++k) {
      auto words = enumerate_words(sft, k);
      middles.insert(middles.end(), words.begin(), words.end());
    }
    Word buffer;
    for (std::size_t i = 0; i < orbits.size(); ++i) {
      const Word& left = orbits[i].cycle;
      for (const Word& mid : middles) {
        if (!mid.empty() && !sft.allows(left.back(), mid.front())) continue;
        for (std::size_t j = 0; j < orbits.size(); ++j) {
          const Word& right = orbits[j].cycle;
          const Symbol last = mid.empty() ? left.back() : mid.back();
          if (!sft.allows(last, right.front())) continue;
          const double base = std::max(cycle_max[i], cycle_max[j]);
          if (base > t) continue;
          raw.push_back(std::max(base, junction_maximum(table, left, mid, right, buffer)));
        }
      }
    }
  }
  std::erase_if(raw, [t](double v) { return v > t; });
  return SpectrumSlice{kind, t, dedup_sorted(std::move(raw)), max_period, middle_bound};
}

DimensionEstimate slice_dimension(const SpectrumSlice& slice, std::span<const double> resolutions) {
  if (slice.values.empty()) throw DomainError("slice_dimension: empty slice");
  try {
    return box_count_dimension(std::span<const double>(slice.values), resolutions);
  } catch (const DegenerateSet&) {
    DimensionEstimate est;
    est.method = DimensionMethod::BoxCount;
    return est;
  }
}

SubhorseshoeSelection select_subhorseshoe(const PrunedSystem& pruned, const std::vector<Word>& forbidden, int r0,
                                          const PressureOptions& options) {
  if (r0 < 1) throw DomainError("select_subhorseshoe: r0 must be >= 1");
  VertexMask mask = pruned.mask;
  for (const Word& w : forbidden) {
    const int v = pruned.graph->index_of(w);
    if (v < 0) throw DomainError("select_subhorseshoe: forbidden window " + to_string(w) + " is not a vertex");
    mask[v] = false;
  }
  SubhorseshoeSelection out{select_components(pruned.graph, pruned.model, pruned.threshold, std::move(mask), options),
                            0, 0, 0.0};
  out.count_before = scale_front(pruned.model, *pruned.graph, r0, pruned.mask).size();
  out.count_after = scale_front(out.system.model, *out.system.graph, r0, out.system.selected_mask()).size();
  out.counting_loss = (std::log(static_cast<double>(out.count_before)) -
                       std::log(static_cast<double>(std::max<std::size_t>(out.count_after, 1)))) /
                      r0;
  return out;
}

}  // namespace hspec

#include "hspec/errors.hpp"
#include "hspec/spectra.hpp"

#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <random>

using namespace hspec;

namespace {

const double kLog23 = std::log(2.0) / std::log(3.0);

CantorModel middle_third() { return CantorModel::uniform_affine(2, 1.0 / 3); }

// F(0)=0, F(1)=1 with radius 0.
HeightTable step_table() { return HeightTable(Sft::full_shift(2), 0, {0.0, 1.0}); }

double brute_max(const HeightTable& table, const Word& seq) {
  double best = -INFINITY;
  for (std::size_t i = 0; i + static_cast<std::size_t>(table.width()) <= seq.size(); ++i)
    best = std::max(best, table(Word(seq.begin() + static_cast<long>(i), seq.begin() + static_cast<long>(i) + table.width())));
  return best;
}

double brute_markov(const HeightTable& table, const TwoSidedPoint& x) {
  const int reps = 2 * table.width() + 2;
  return brute_max(table, x.unfold(reps, reps));
}

double brute_lagrange(const HeightTable& table, const TwoSidedPoint& x) {
  Word seq;
  for (int i = 0; i < 2 * table.width() + 2; ++i) seq.insert(seq.end(), x.right.cycle.begin(), x.right.cycle.end());
  return brute_max(table, seq);
}

TwoSidedPoint random_point(const Sft& sft, const std::vector<PeriodicOrbit>& orbits, std::mt19937_64& rng) {
  while (true) {
    const auto& l = orbits[rng() % orbits.size()];
    const auto& r = orbits[rng() % orbits.size()];
    // Random rotation of each tail.
    auto rotate = [&](const Word& c) {
      const std::size_t k = rng() % c.size();
      Word w(c.begin() + static_cast<long>(k), c.end());
      w.insert(w.end(), c.begin(), c.begin() + static_cast<long>(k));
      return w;
    };
    Word middle(rng() % 6);
    for (auto& s : middle) s = static_cast<Symbol>(rng() % static_cast<unsigned>(sft.size()));
    TwoSidedPoint x{{rotate(l.cycle)}, middle, {rotate(r.cycle)}, 0};
    x.origin = static_cast<int>(rng() % 9) - 4;
    try {
      x.validate(sft);
      return x;
    } catch (const InadmissibleWord&) {
    }
  }
}

}  // namespace

TEST_CASE("height tables") {
  const Sft sft = Sft::golden_mean();
  const HeightTable t = HeightTable::additive(sft, 1, {0, 1});
  CHECK(t.windows() == enumerate_words(sft, 3));
  CHECK(t(Word{1, 0, 1}) == 2);
  CHECK(t.index_of(Word{1, 1, 0}) == -1);
  CHECK_THROWS_AS(t(Word{1, 1, 0}), InadmissibleWord);
  CHECK_THROWS_AS(HeightTable(sft, 1, {1.0, 2.0}), DomainError);
  CHECK_THROWS_AS(HeightTable(sft, 0, {1.0, NAN}), DomainError);
  CHECK(t.min_value() == 0);
  CHECK(t.max_value() == 2);

  const HeightTable asym = HeightTable::from_function(sft, 1, [](const Word& w) { return w[0] + 10.0 * w[2]; });
  const HeightTable rev = asym.reversed(sft.reversed());
  for (const Word& w : rev.windows()) CHECK(rev(w) == asym(reversed(w)));

  const HeightTable emb = HeightTable::embedded(Sft::full_shift(2), 1, middle_third(), middle_third());
  const auto [xs, xu] = window_coordinates(Word{0, 1, 1}, 1, middle_third(), middle_third());
  CHECK(emb(Word{0, 1, 1}) == doctest::Approx(xs + xu));
}

TEST_CASE("markov and lagrange examples") {
  const Sft sft = Sft::full_shift(2);
  const HeightTable f = step_table();
  const TwoSidedPoint spike{{{0}}, {1}, {{0}}, 0};
  CHECK(markov_value(sft, f, spike) == 1);
  CHECK(lagrange_value(sft, f, spike) == 0);
  const TwoSidedPoint zero = TwoSidedPoint::periodic({{0}});
  CHECK(markov_value(sft, f, zero) == 0);
  const TwoSidedPoint alt = TwoSidedPoint::periodic({{0, 1}});
  CHECK(markov_value(sft, f, alt) == 1);
  CHECK(lagrange_value(sft, f, alt) == 1);

  const HeightTable thirds = HeightTable::from_function(
      sft, 1, [](const Word& w) { return static_cast<double>(std::count(w.begin(), w.end(), 1)) / 3; });
  const TwoSidedPoint tail{{{0}}, {}, {{0, 1, 1}}, 0};
  CHECK(lagrange_value(sft, thirds, tail) == 2.0 / 3);
  CHECK(cycle_maximum(thirds, Word{0, 1, 1}) == 2.0 / 3);

  CHECK_THROWS_AS(markov_value(Sft::golden_mean(), HeightTable::additive(Sft::golden_mean(), 0, {0, 1}),
                               TwoSidedPoint::periodic({{1}})),
                  InadmissibleWord);
}

TEST_CASE("orbit value invariants on random points") {
  std::mt19937_64 rng(42);
  const Sft systems[] = {Sft::full_shift(2), Sft::golden_mean(), Sft::full_shift(3)};
  for (const Sft& sft : systems) {
    const auto orbits = periodic_orbits(sft, 5);
    const HeightTable table = HeightTable::from_function(sft, 1, [&](const Word& w) {
      return std::sin(1.7 * w[0] + 0.9 * w[1] * w[1] + 2.3 * w[2]);
    });
    for (int i = 0; i < 300; ++i) {
      const TwoSidedPoint x = random_point(sft, orbits, rng);
      const double m = markov_value(sft, table, x);
      const double l = lagrange_value(sft, table, x);
      CHECK(l <= m);
      CHECK(m == brute_markov(table, x));
      CHECK(l == brute_lagrange(table, x));
      CHECK(markov_value(sft, table, x.shifted(7)) == m);
      CHECK(lagrange_value(sft, table, x.shifted(-3)) == l);
      const TwoSidedPoint p = TwoSidedPoint::periodic(x.right);
      CHECK(markov_value(sft, table, p) == lagrange_value(sft, table, p));
    }
  }
}

TEST_CASE("prune examples") {
  const Sft sft = Sft::full_shift(2);
  const HeightTable f = step_table();
  const PrunedSystem low = prune_below(sft, middle_third(), f, 0.5);
  CHECK(low.selected_component().component.vertices == std::vector<int>{0});
  CHECK(low.dimension() == doctest::Approx(0).scale(1));
  const PrunedSystem all = prune_below(sft, middle_third(), f, 1.0);
  CHECK(std::abs(all.dimension() - kLog23) < 1e-6);
  CHECK_THROWS_AS(prune_below(sft, middle_third(), f, -1.0), EmptyPrune);

  for (std::size_t v = 0; v < all.mask.size(); ++v)
    if (all.mask[v]) CHECK(f.values()[v] <= 1.0);
}

TEST_CASE("tie breaking selects the least vertex") {
  // Two disjoint fixed points with equal (zero) dimension.
  const HeightTable f(Sft::full_shift(2), 1, {0, 5, 5, 5, 5, 5, 5, 0});
  const PrunedSystem p = prune_below(Sft::full_shift(2), middle_third(), f, 1.0);
  REQUIRE(p.components.size() == 2);
  CHECK(p.selected == 0);
  CHECK(p.graph->vertices[static_cast<std::size_t>(p.selected_component().component.vertices.front())] == Word{0, 0, 0});
}

TEST_CASE("monotone pruning and step structure") {
  const Sft sft = Sft::full_shift(2);
  const CantorModel m = middle_third();
  const HeightTable f = HeightTable::additive(sft, 1, {0, 1});
  const auto graph = std::make_shared<const BlockGraph>(higher_block(sft, 3));
  std::vector<double> grid;
  for (int i = 0; i < 20; ++i) grid.push_back(-0.2 + 0.18 * i);
  VertexMask previous(static_cast<std::size_t>(graph->size()), false);
  std::vector<std::size_t> previous_counts(13, 0);
  for (double t : grid) {
    VertexMask mask(previous.size(), false);
    try {
      mask = prune_below(graph, m, f, t).mask;
    } catch (const EmptyPrune&) {
    }
    for (std::size_t v = 0; v < mask.size(); ++v) CHECK((!previous[v] || mask[v]));
    for (int r = 0; r <= 12; ++r) {
      const std::size_t n = mask_count(mask) ? scale_front(m, *graph, r, mask).size() : 0;
      CHECK(n >= previous_counts[static_cast<std::size_t>(r)]);
      previous_counts[static_cast<std::size_t>(r)] = n;
    }
    previous = mask;
  }
  const DimensionCurve curve = du_curve(sft, m, m, f, grid);
  for (std::size_t i = 1; i < curve.samples.size(); ++i) CHECK(curve.samples[i].du >= curve.samples[i - 1].du);

  // Between consecutive table values the mask and D_u are constant.
  const DimensionCurve steps = du_curve(sft, m, m, f, {1.0, 1.3, 1.999, 2.0});
  CHECK(steps.samples[0].du == steps.samples[1].du);
  CHECK(steps.samples[1].du == steps.samples[2].du);
  CHECK(steps.samples[3].du > steps.samples[2].du);
}

TEST_CASE("du curve examples") {
  const Sft sft = Sft::full_shift(2);
  const DimensionCurve c = du_curve(sft, middle_third(), middle_third(), step_table(), {0.5, 1.0});
  REQUIRE(c.samples.size() == 2);
  CHECK(c.samples[0].du == doctest::Approx(0).scale(1));
  CHECK(c.samples[1].du == doctest::Approx(kLog23).epsilon(1e-6));

  const HeightTable sym = HeightTable::additive(sft, 1, {0, 1});
  for (const auto& s : du_curve(sft, middle_third(), middle_third(), sym, {0, 1, 2, 3, 4}).samples)
    CHECK(s.du == doctest::Approx(s.ds).epsilon(1e-9));
  const auto above = du_curve(sft, middle_third(), middle_third(), sym, {10}).samples[0];
  CHECK(above.du == doctest::Approx(kLog23).epsilon(1e-6));
  CHECK(du_curve(sft, middle_third(), middle_third(), sym, {-1}).samples[0].du == 0);
  CHECK_THROWS_AS(du_curve(sft, middle_third(), middle_third(), sym, {1, 0}), DomainError);

  // Asymmetric model: D_s follows model_s.
  const CantorModel fifth = CantorModel::uniform_affine(2, 0.2);
  const auto mixed = du_curve(sft, middle_third(), fifth, sym, {10}).samples[0];
  CHECK(mixed.ds == doctest::Approx(std::log(2.0) / std::log(5.0)).epsilon(1e-6));
}

TEST_CASE("spectrum slice examples") {
  const Sft sft = Sft::full_shift(2);
  const HeightTable f = step_table();
  CHECK(spectrum_slice(sft, f, SpectrumKind::Markov, 2, 2, 2).values == std::vector<double>{0, 1});
  CHECK(spectrum_slice(sft, f, SpectrumKind::Lagrange, 0.5, 2, 2).values == std::vector<double>{0});
  CHECK(dedup_sorted({0.3, 0.1, 0.1 + 1e-13, 0.2}) == std::vector<double>{0.1, 0.2, 0.3});
}

TEST_CASE("slice inclusions across generated configurations") {
  std::mt19937_64 rng(3);
  const Sft systems[] = {Sft::full_shift(2), Sft::golden_mean(), Sft::full_shift(3)};
  for (const Sft& sft : systems)
    for (int radius : {0, 1})
      for (int trial = 0; trial < 3; ++trial) {
        std::uniform_real_distribution<double> u(0, 1);
        std::vector<double> values(enumerate_words(sft, 2 * radius + 1).size());
        for (auto& v : values) v = std::round(u(rng) * 8) / 8;
        const HeightTable f(sft, radius, values);
        std::vector<double> range = values;
        std::sort(range.begin(), range.end());
        for (double t : {0.4, 0.7, 1.0}) {
          const auto markov = spectrum_slice(sft, f, SpectrumKind::Markov, t, 5, 2).values;
          const auto lagrange = spectrum_slice(sft, f, SpectrumKind::Lagrange, t, 5, 2).values;
          for (double v : lagrange) CHECK(std::binary_search(markov.begin(), markov.end(), v));
          for (double v : markov) {
            CHECK(std::binary_search(range.begin(), range.end(), v));
            CHECK(v <= t);
          }
        }
      }
}

TEST_CASE("slice dimension") {
  SpectrumSlice zero{SpectrumKind::Markov, 1, {0.0}, 1, 0};
  const auto res = dyadic_resolutions(4, 8);
  CHECK(slice_dimension(zero, res).value == 0);
  SpectrumSlice fill{SpectrumKind::Lagrange, 1, {}, 1, 0};
  for (int i = 0; i < 1000; ++i) fill.values.push_back(i / 999.0);
  CHECK(std::abs(slice_dimension(fill, res).value - 1) < 0.05);
  SpectrumSlice empty{SpectrumKind::Lagrange, 1, {}, 1, 0};
  CHECK_THROWS_AS(slice_dimension(empty, res), DomainError);
}

TEST_CASE("subhorseshoe selection") {
  const Sft sft = Sft::full_shift(2);
  const PrunedSystem full = prune_below(sft, middle_third(), step_table(), 1.0);
  const auto same = select_subhorseshoe(full, {}, 6);
  CHECK(same.system.selected_mask() == full.selected_mask());
  CHECK(same.counting_loss == 0);
  const auto again = select_subhorseshoe(same.system, {}, 6);
  CHECK(again.system.selected_mask() == same.system.selected_mask());
  CHECK(again.system.dimension() == same.system.dimension());

  const auto only0 = select_subhorseshoe(full, {Word{1}}, 6);
  CHECK(only0.system.selected_component().component.vertices == std::vector<int>{0});
  CHECK(only0.count_after == 1);
  CHECK(only0.count_before == scale_front(middle_third(), *full.graph, 6, full.mask).size());
  CHECK(only0.counting_loss == doctest::Approx(std::log(double(only0.count_before)) / 6));

  const Sft three = Sft::full_shift(3);
  const CantorModel fifth = CantorModel::uniform_affine(3, 0.2);
  const PrunedSystem p3 = prune_below(three, fifth, HeightTable(three, 0, {0.0, 0.0, 0.0}), 1);
  CHECK(p3.dimension() == doctest::Approx(std::log(3.0) / std::log(5.0)).epsilon(1e-6));
  const auto drop = select_subhorseshoe(p3, {Word{2}}, 6);
  CHECK(drop.system.dimension() == doctest::Approx(std::log(2.0) / std::log(5.0)).epsilon(1e-6));
  CHECK(drop.counting_loss > 0);

  CHECK_THROWS_AS(select_subhorseshoe(full, {Word{0}, Word{1}}, 6), EmptyPrune);
  CHECK_THROWS_AS(select_subhorseshoe(full, {Word{0, 1}}, 6), DomainError);
}

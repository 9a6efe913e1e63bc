#include "hspec/errors.hpp"
#include "hspec/symbolic.hpp"

#include <doctest.h>

#include <algorithm>
#include <set>

using namespace hspec;

namespace {

TransitionMatrix matrix(std::initializer_list<std::initializer_list<int>> rows) {
  TransitionMatrix m(static_cast<Eigen::Index>(rows.size()), static_cast<Eigen::Index>(rows.begin()->size()));
  Eigen::Index i = 0;
  for (auto row : rows) {
    Eigen::Index j = 0;
    for (int v : row) m(i, j++) = v;
    ++i;
  }
  return m;
}

// Words by brute force over all n^k strings.
std::vector<Word> brute_words(const Sft& sft, int k) {
  std::vector<Word> out;
  Word w(static_cast<std::size_t>(k), 0);
  const int n = sft.size();
  while (true) {
    if (sft.admissible(w)) out.push_back(w);
    int i = k - 1;
    while (i >= 0 && w[static_cast<std::size_t>(i)] == n - 1) w[static_cast<std::size_t>(i--)] = 0;
    if (i < 0) break;
    ++w[static_cast<std::size_t>(i)];
  }
  return out;
}

}  // namespace

TEST_CASE("validate_sft trims to a fixpoint") {
  auto full = validate_sft(matrix({{1, 1}, {1, 1}}));
  CHECK(full.sft.size() == 2);
  CHECK(full.deleted.empty());

  auto cut = validate_sft(matrix({{1, 1}, {0, 0}}));
  CHECK(cut.sft.size() == 1);
  CHECK(cut.deleted == std::vector<int>{1});
  CHECK(cut.kept == std::vector<int>{0});
  CHECK(cut.sft == Sft::full_shift(1));

  CHECK_THROWS_AS(validate_sft(matrix({{0, 1}, {0, 0}})), EmptySystem);
  CHECK_THROWS_AS(validate_sft(matrix({{1, 2}, {1, 1}})), DomainError);
  CHECK_THROWS_AS(validate_sft(TransitionMatrix(2, 3)), DomainError);

  // 0 -> 1 -> 2 -> 2, with 0 having no predecessor: the chain unwinds.
  auto chain = validate_sft(matrix({{0, 1, 0}, {0, 0, 1}, {0, 0, 1}}));
  CHECK(chain.sft.size() == 1);
  CHECK(chain.kept == std::vector<int>{2});
}

TEST_CASE("enumerate_words examples") {
  const auto two = enumerate_words(Sft::full_shift(2), 2);
  CHECK(two == std::vector<Word>{{0, 0}, {0, 1}, {1, 0}, {1, 1}});
  CHECK(enumerate_words(Sft::full_shift(2), 1) == std::vector<Word>{{0}, {1}});
  CHECK(enumerate_words(Sft::golden_mean(), 3).size() == 5);
}

TEST_CASE("word counts follow the transfer matrix") {
  const Sft systems[] = {Sft::full_shift(2), Sft::golden_mean(), Sft::full_shift(3),
                         validate_sft(matrix({{1, 1, 0}, {0, 0, 1}, {1, 0, 1}})).sft};
  for (const Sft& sft : systems) {
    Eigen::Matrix<long long, Eigen::Dynamic, Eigen::Dynamic> b = sft.transitions().cast<long long>();
    Eigen::Matrix<long long, Eigen::Dynamic, Eigen::Dynamic> p =
        Eigen::Matrix<long long, Eigen::Dynamic, Eigen::Dynamic>::Identity(b.rows(), b.cols());
    for (int k = 1; k <= 12; ++k) {
      CHECK(static_cast<long long>(enumerate_words(sft, k).size()) == p.sum());
      p = p * b;
    }
    for (int k = 1; k <= 6; ++k) CHECK(enumerate_words(sft, k) == brute_words(sft, k));
  }
}

TEST_CASE("periodic orbits") {
  const auto full = periodic_orbits(Sft::full_shift(2), 2);
  REQUIRE(full.size() == 3);
  CHECK(full[0].cycle == Word{0});
  CHECK(full[1].cycle == Word{1});
  CHECK(full[2].cycle == Word{0, 1});

  const auto golden = periodic_orbits(Sft::golden_mean(), 2);
  REQUIRE(golden.size() == 2);
  CHECK(golden[0].cycle == Word{0});
  CHECK(golden[1].cycle == Word{0, 1});

  const Sft mixed = validate_sft(matrix({{1, 1, 0}, {0, 0, 1}, {1, 0, 1}})).sft;
  const auto fixed = periodic_orbits(mixed, 1);
  REQUIRE(fixed.size() == 2);
  CHECK(fixed[0].cycle == Word{0});
  CHECK(fixed[1].cycle == Word{2});

  // Necklace counts: primitive binary necklaces of length p.
  const int necklaces[] = {0, 2, 1, 2, 3, 6, 9, 18, 30, 56, 99};
  const auto orbits = periodic_orbits(Sft::full_shift(2), 10);
  for (int p = 1; p <= 10; ++p)
    CHECK(std::count_if(orbits.begin(), orbits.end(), [&](const PeriodicOrbit& o) { return o.period() == p; }) ==
          necklaces[p]);

  for (const Sft& sft : {Sft::golden_mean(), mixed}) {
    const auto list = periodic_orbits(sft, 8);
    std::set<Word> rotations;
    for (const auto& o : list) {
      Word doubled = o.cycle;
      doubled.insert(doubled.end(), o.cycle.begin(), o.cycle.end());
      CHECK(sft.admissible(doubled));
      CHECK(o.primitive);
      CHECK(is_primitive(o.cycle));
      CHECK(canonical_rotation(o.cycle) == o.cycle);
      for (int r = 0; r < o.period(); ++r) {
        Word rot(o.cycle.begin() + r, o.cycle.end());
        rot.insert(rot.end(), o.cycle.begin(), o.cycle.begin() + r);
        CHECK(rotations.insert(rot).second);  // no two orbits share a rotation
      }
    }
  }
  CHECK_FALSE(is_primitive(Word{0, 1, 0, 1}));
  CHECK(canonical_rotation(Word{1, 0, 0}) == Word{0, 0, 1});
}

TEST_CASE("higher block graphs") {
  const BlockGraph g1 = higher_block(Sft::full_shift(2), 1);
  CHECK(g1.size() == 2);
  CHECK(g1.edge_count() == 4);

  const BlockGraph g2 = higher_block(Sft::full_shift(2), 2);
  CHECK(g2.size() == 4);
  CHECK(g2.edge_count() == 8);

  const BlockGraph gm = higher_block(Sft::golden_mean(), 2);
  CHECK(gm.vertices == std::vector<Word>{{0, 0}, {0, 1}, {1, 0}});
  CHECK(gm.edge_count() == 5);
  CHECK(gm.successors[0] == std::vector<int>{0, 1});
  CHECK(gm.successors[1] == std::vector<int>{2});
  CHECK(gm.successors[2] == std::vector<int>{0, 1});
  CHECK(gm.index_of(Word{1, 1}) == -1);

  // Paths of length L biject with words of length L + w - 1.
  for (int w = 1; w <= 3; ++w) {
    const BlockGraph g = higher_block(Sft::golden_mean(), w);
    CHECK(g.vertices == enumerate_words(Sft::golden_mean(), w));
    std::vector<long long> paths(static_cast<std::size_t>(g.size()), 1);
    for (int len = 2; len <= 6; ++len) {
      std::vector<long long> next(paths.size(), 0);
      for (int u = 0; u < g.size(); ++u)
        for (int v : g.successors[static_cast<std::size_t>(u)]) next[static_cast<std::size_t>(v)] += paths[static_cast<std::size_t>(u)];
      paths = next;
      long long total = 0;
      for (auto c : paths) total += c;
      CHECK(total == static_cast<long long>(enumerate_words(Sft::golden_mean(), len + w - 1).size()));
    }
  }
}

TEST_CASE("scc decomposition") {
  const BlockGraph g1 = higher_block(Sft::full_shift(2), 1);
  auto all = scc_decompose(g1, full_mask(g1));
  REQUIRE(all.size() == 1);
  CHECK(all[0].nontrivial);
  CHECK(all[0].vertices == std::vector<int>{0, 1});

  auto self = scc_decompose(g1, mask_of(g1, {0}));
  REQUIRE(self.size() == 1);
  CHECK(self[0].nontrivial);
  CHECK(self[0].vertices == std::vector<int>{0});

  const BlockGraph gm = higher_block(Sft::golden_mean(), 2);
  auto two = scc_decompose(gm, mask_of(gm, {1, 2}));
  REQUIRE(two.size() == 1);
  CHECK(two[0].nontrivial);
  CHECK(two[0].vertices == std::vector<int>{1, 2});

  // 00 -> 01 without the way back: two trivial components.
  auto chain = scc_decompose(gm, mask_of(gm, {1, 0}));
  REQUIRE(chain.size() == 2);
  CHECK(chain[0].vertices == std::vector<int>{0});
  CHECK(chain[0].nontrivial);  // 00 has a self-loop
  CHECK_FALSE(chain[1].nontrivial);

  for (const Sft& sft : {Sft::full_shift(2), Sft::golden_mean(), Sft::full_shift(3)})
    for (int w = 1; w <= 4; ++w) {
      const BlockGraph g = higher_block(sft, w);
      auto comps = scc_decompose(g, full_mask(g));
      REQUIRE(comps.size() == 1);
      CHECK(comps[0].nontrivial);
      CHECK(static_cast<int>(comps[0].vertices.size()) == g.size());
    }
}

TEST_CASE("trim_mask keeps the bi-infinite part") {
  const BlockGraph gm = higher_block(Sft::golden_mean(), 2);
  CHECK(mask_count(trim_mask(gm, mask_of(gm, {0, 1}))) == 1);  // 01 has no masked successor
  CHECK(mask_count(trim_mask(gm, mask_of(gm, {1}))) == 0);
  CHECK(mask_count(trim_mask(gm, full_mask(gm))) == 3);
}

TEST_CASE("word helpers") {
  CHECK(to_string(Word{0, 1, 1}) == "011");
  CHECK(to_string(Word{1, 12}) == "1,12");
  CHECK(reversed(Word{0, 1, 2}) == Word{2, 1, 0});
  CHECK(word_code(Word{1, 0, 1}, 2) == 5u);
  CHECK_FALSE(word_code(Word(70, 1), 2).has_value());
  CHECK(Sft::golden_mean().reversed() == Sft::golden_mean());
}

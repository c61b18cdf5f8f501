#include "wkbgo/lattice.hpp"

#include <doctest.h>

#include <random>
#include <set>

using namespace wkbgo;

namespace {

std::set<WaveVector> as_set(const ModeSet& m) { return {m.vectors().begin(), m.vectors().end()}; }

ModeSet close(std::vector<WaveVector> v, int sigma, int max_gen = 8) {
  ClosureLimits lim;
  lim.max_generations = max_gen;
  return close_under_resonances(v, sigma, lim);
}

// Every ordered (k, l, m) with k - l + m = kappa_j and matching quadratic form.
std::vector<std::vector<std::size_t>> brute_force_cubic(const ModeSet& m, std::size_t j) {
  std::vector<std::vector<std::size_t>> out;
  const WaveVector& target = m[j];
  for (std::size_t a = 0; a < m.size(); ++a)
    for (std::size_t b = 0; b < m.size(); ++b)
      for (std::size_t c = 0; c < m.size(); ++c) {
        if (m[a] - m[b] + m[c] != target) continue;
        if (m[a].norm2() - m[b].norm2() + m[c].norm2() != target.norm2()) continue;
        out.push_back({a, b, c});
      }
  return out;
}

}  // namespace

TEST_CASE("wave vector arithmetic") {
  const WaveVector a{1, 2}, b{3, -1};
  CHECK(a.dot(b) == 1);
  CHECK(a.norm2() == 5);
  CHECK(b.sup_norm() == 3);
  CHECK(a + b == WaveVector{4, 1});
  CHECK(a - b == WaveVector{-2, 3});
  CHECK(3 * a == WaveVector{3, 6});
  CHECK(a.to_string() == "(1,2)");
  CHECK_THROWS_AS(a.dot(WaveVector{1}), std::invalid_argument);
}

TEST_CASE("resonance defect by hand") {
  const std::vector<WaveVector> rect{{0, 1}, {1, 1}, {1, 0}};
  CHECK(alternating_sum(rect) == WaveVector{0, 0});
  CHECK(resonance_defect(rect) == 0);
  const std::vector<WaveVector> off{{1, 0}, {0, 0}, {1, 0}};
  // |(2,0)|^2 - (1 - 0 + 1) = 2
  CHECK(resonance_defect(off) == 2);
  CHECK_THROWS(resonance_defect(std::vector<WaveVector>{{1, 0}, {0, 1}}));
}

TEST_CASE("complete rectangle") {
  auto r = complete_rectangle({1, 1}, {1, 2}, {3, 2});
  REQUIRE(r);
  CHECK(*r == WaveVector{3, 1});
  CHECK_FALSE(complete_rectangle({0, 0}, {1, 0}, {3, 1}));
  CHECK_FALSE(complete_rectangle({1, 0}, {1, 0}, {3, 1}));
}

TEST_CASE("zero mode example: three corners create the origin") {
  const ModeSet m = close({{0, 1}, {1, 1}, {1, 0}}, 1);
  CHECK(m.saturated());
  CHECK(as_set(m) == std::set<WaveVector>{{0, 1}, {1, 1}, {1, 0}, {0, 0}});
  CHECK(m.generation(*m.index_of({0, 0})) == 1);
  REQUIRE(m.edges().size() == 1);
  CHECK(m.edges()[0].created == WaveVector{0, 0});
}

TEST_CASE("rectangle example: (3,1) is created") {
  const ModeSet m = close({{1, 1}, {1, 2}, {3, 2}}, 1);
  CHECK(m.saturated());
  CHECK(as_set(m) == std::set<WaveVector>{{1, 1}, {1, 2}, {3, 2}, {3, 1}});
}

TEST_CASE("two generation example grows without bound") {
  const std::vector<WaveVector> j0{{-1, 1}, {0, 1}, {0, 0}, {1, 0}};
  const ModeSet g1 = close(j0, 1, 1);
  CHECK_FALSE(g1.saturated());
  CHECK(as_set(g1) == std::set<WaveVector>{{-1, 1}, {0, 1}, {1, 1}, {-1, 0}, {0, 0}, {1, 0}});
  const ModeSet g2 = close(j0, 1, 2);
  CHECK(as_set(g2) ==
        std::set<WaveVector>{{-1, 1}, {0, 1}, {1, 1}, {-1, 0}, {0, 0}, {1, 0}, {0, 2}, {0, -1}});
  CHECK(g2.generation(*g2.index_of({0, 2})) == 2);
  CHECK_FALSE(g2.warnings().empty());
  // The set keeps growing: a large sup limit is still exhausted.
  ClosureLimits lim;
  lim.max_generations = 50;
  lim.max_sup_norm = 4;
  const ModeSet big = close_under_resonances(j0, 1, lim);
  CHECK_FALSE(big.saturated());
  CHECK(big.size() == 81);  // the full box [-4, 4]^2
}

TEST_CASE("cubic interaction in one dimension creates nothing") {
  std::mt19937 rng(11);
  std::uniform_int_distribution<int> d(-20, 20);
  for (int trial = 0; trial < 50; ++trial) {
    std::set<WaveVector> init;
    while (init.size() < 5) init.insert(WaveVector{d(rng)});
    const ModeSet m = close({init.begin(), init.end()}, 1);
    CHECK(m.saturated());
    CHECK(m.size() == 5);
  }
}

TEST_CASE("two modes create nothing for sigma 1, 2, 3") {
  std::mt19937 rng(5);
  std::uniform_int_distribution<int> d(-6, 6);
  for (int sigma = 1; sigma <= 3; ++sigma)
    for (int trial = 0; trial < 20; ++trial) {
      WaveVector a{d(rng), d(rng)}, b{d(rng), d(rng)};
      if (a == b) continue;
      const ModeSet m = close({a, b}, sigma);
      CHECK(m.saturated());
      CHECK(m.size() == 2);
    }
}

TEST_CASE("quintic line example creates kappa = 3") {
  const ModeSet m = close({{-1}, {0}, {2}}, 2);
  CHECK(m.saturated());
  CHECK(as_set(m) == std::set<WaveVector>{{-1}, {0}, {2}, {3}});
  // Same phases under the cubic nonlinearity stay put.
  CHECK(close({{-1}, {0}, {2}}, 1).size() == 3);
  // The two-dimensional version lies on a line as well.
  const ModeSet m2 = close({{-1, 0}, {0, 0}, {2, 0}}, 2);
  CHECK(m2.contains({3, 0}));
}

TEST_CASE("enumerate_interactions matches brute force on J^3") {
  std::mt19937 rng(2024);
  std::uniform_int_distribution<int> d(-2, 2);
  for (int trial = 0; trial < 300; ++trial) {
    const int size = 1 + trial % 6;
    const int dim = 1 + trial % 3;
    std::set<WaveVector> vs;
    while (static_cast<int>(vs.size()) < size) {
      std::vector<Int> c(static_cast<std::size_t>(dim));
      for (auto& x : c) x = d(rng);
      vs.insert(WaveVector(c));
    }
    const ModeSet m = ModeSet::from_vectors({vs.begin(), vs.end()}, 1);
    const InteractionTable table(m);
    for (std::size_t j = 0; j < m.size(); ++j) {
      const auto got = enumerate_interactions(m, j);
      auto expect = brute_force_cubic(m, j);
      std::set<std::vector<std::size_t>> g;
      for (const auto& t : got) {
        CHECK(t.target == j);
        g.insert(t.indices);
      }
      CHECK(g.size() == got.size());
      CHECK(g == std::set<std::vector<std::size_t>>(expect.begin(), expect.end()));
      CHECK(table.count(j) == expect.size());
    }
  }
}

TEST_CASE("rational input is brought to a common lattice") {
  const auto iv = integerize({{Rational(1, 2), Rational(0)}, {Rational(1, 3), Rational(1)}});
  CHECK(iv.scale == 6);
  CHECK(iv.vectors[0] == WaveVector{3, 0});
  CHECK(iv.vectors[1] == WaveVector{2, 6});
  // Scaling the zero-mode example by 1/2 gives the scaled closure.
  const auto half = integerize({{Rational(0), Rational(1, 2)}, {Rational(1, 2), Rational(1, 2)},
                                {Rational(1, 2), Rational(0)}});
  const ModeSet m = close_under_resonances(half.vectors, 1, {}, half.scale);
  CHECK(m.size() == 4);
  CHECK(m.contains({0, 0}));
  CHECK(m.user_vector(*m.index_of({1, 1}))[0] == Rational(1, 2));
}

TEST_CASE("for_each_tuple visits (2 sigma + 1)-tuples with their defect") {
  const ModeSet m = ModeSet::from_vectors({{0}, {1}}, 2);
  std::size_t count = 0, resonant = 0;
  for_each_tuple(m, [&](std::span<const std::size_t> idx, Int defect, const WaveVector& s) {
    CHECK(idx.size() == 5);
    std::vector<WaveVector> v;
    for (auto i : idx) v.push_back(m[i]);
    CHECK(resonance_defect(v) == defect);
    CHECK(alternating_sum(v) == s);
    ++count;
    if (defect == 0) ++resonant;
  });
  CHECK(count == 32);
  CHECK(resonant > 0);
}

TEST_CASE("mode set lookup") {
  const ModeSet m = ModeSet::from_vectors({{2, 0}, {-1, 1}, {0, 0}}, 1);
  CHECK(m.size() == 3);
  for (std::size_t i = 0; i < m.size(); ++i) CHECK(m.index_of(m[i]) == i);
  CHECK_FALSE(m.contains({5, 5}));
  CHECK_THROWS(ModeSet::from_vectors({{1, 0}, {1}}, 1));
}

#include "wkbgo/small_divisors.hpp"

#include <doctest.h>

#include <cmath>
#include <map>
#include <random>
#include <set>

using namespace wkbgo;

namespace {

ModeSet random_set(std::mt19937& rng, int dim, int size, int range, int sigma) {
  std::uniform_int_distribution<int> d(-range, range);
  std::set<WaveVector> vs;
  while (static_cast<int>(vs.size()) < size) {
    std::vector<Int> c(static_cast<std::size_t>(dim));
    for (auto& x : c) x = d(rng);
    vs.insert(WaveVector(c));
  }
  return ModeSet::from_vectors({vs.begin(), vs.end()}, sigma);
}

struct BruteGram {
  std::uint64_t zeros = 0;
  double min_value = INFINITY;
  double c_prime = INFINITY;
};

// All beta in [-B, B]^{m x m}, grouped by gamma up to sign.
BruteGram brute_gram(const std::vector<std::vector<double>>& gen, int B, double b_prime) {
  const std::size_t m = gen.size();
  std::vector<std::vector<double>> G(m, std::vector<double>(m));
  for (std::size_t i = 0; i < m; ++i)
    for (std::size_t j = 0; j < m; ++j)
      for (std::size_t a = 0; a < gen[i].size(); ++a) G[i][j] += gen[i][a] * gen[j][a];
  std::map<std::vector<int>, std::pair<double, int>> seen;  // gamma -> (value, min l1)
  std::vector<int> beta(m * m, -B);
  while (true) {
    std::vector<int> gamma;
    for (std::size_t i = 0; i < m; ++i) gamma.push_back(beta[i * m + i]);
    for (std::size_t i = 0; i < m; ++i)
      for (std::size_t j = i + 1; j < m; ++j) gamma.push_back(beta[i * m + j] + beta[j * m + i]);
    std::size_t f = 0;
    while (f < gamma.size() && gamma[f] == 0) ++f;
    if (f < gamma.size()) {
      if (gamma[f] < 0)
        for (int& x : gamma) x = -x;
      double v = 0.0;
      int l1 = 0;
      for (std::size_t i = 0; i < m; ++i)
        for (std::size_t j = 0; j < m; ++j) {
          v += beta[i * m + j] * G[i][j];
          l1 += std::abs(beta[i * m + j]);
        }
      auto it = seen.find(gamma);
      if (it == seen.end())
        seen[gamma] = {std::abs(v), l1};
      else
        it->second.second = std::min(it->second.second, l1);
    }
    std::size_t c = 0;
    while (c < beta.size() && beta[c] == B) beta[c++] = -B;
    if (c == beta.size()) break;
    ++beta[c];
  }
  BruteGram r;
  for (const auto& [g, vl] : seen) {
    if (vl.first < 1e-12) {
      ++r.zeros;
      continue;
    }
    r.min_value = std::min(r.min_value, vl.first);
    r.c_prime = std::min(r.c_prime, vl.first * std::pow(vl.second, b_prime));
  }
  return r;
}

}  // namespace

TEST_CASE("integer lattices have min_delta >= 1") {
  std::mt19937 rng(12);
  for (int trial = 0; trial < 60; ++trial) {
    const int sigma = 1 + trial % 2;
    const ModeSet m = random_set(rng, 1 + trial % 3, 2 + trial % 4, 4, sigma);
    const DivisorSurvey s = survey_divisors(m, sigma);
    CHECK(s.tuples_scanned == static_cast<std::uint64_t>(std::pow(m.size(), 2 * sigma + 1)));
    if (!s.all_resonant()) {
      CHECK(s.min_delta >= 1.0);
      CHECK(s.min_delta == static_cast<double>(std::llabs(s.min_defect)));
    }
  }
}

TEST_CASE("survey minimum matches a direct scan") {
  const ModeSet m = ModeSet::from_vectors({{0}, {1}, {3}}, 1);
  Int best = -1;
  std::uint64_t nonres = 0;
  for (std::size_t a = 0; a < 3; ++a)
    for (std::size_t b = 0; b < 3; ++b)
      for (std::size_t c = 0; c < 3; ++c) {
        const std::vector<WaveVector> v{m[a], m[b], m[c]};
        const Int d = std::llabs(resonance_defect(v));
        if (d == 0) continue;
        ++nonres;
        if (best < 0 || d < best) best = d;
      }
  const DivisorSurvey s = survey_divisors(m, 1);
  CHECK(s.nonresonant == nonres);
  CHECK(s.min_delta == static_cast<double>(best));
}

TEST_CASE("rational lattices scale the defect") {
  const auto iv = integerize({{Rational(0)}, {Rational(1, 2)}});
  const ModeSet m = ModeSet::from_vectors(iv.vectors, 1, iv.scale);
  // (1/2, 0, 1/2): |1|^2 - (1/4 + 1/4) = 1/2
  CHECK(survey_divisors(m, 1).min_delta == doctest::Approx(0.5));
}

TEST_CASE("generalized bound is monotone in b") {
  std::mt19937 rng(13);
  const std::vector<double> grid{0.0, 0.25, 0.5, 1.0, 2.0, 3.0};
  for (int trial = 0; trial < 40; ++trial) {
    const ModeSet m = random_set(rng, 2, 3 + trial % 3, 5, 1);
    const auto fits = fit_generalized_bound(m, 1, grid);
    REQUIRE(fits.size() == grid.size());
    CHECK(fits[0].c == doctest::Approx(survey_divisors(m, 1).min_delta));
    for (std::size_t i = 1; i < fits.size(); ++i) CHECK(fits[i].c >= fits[i - 1].c);
  }
}

TEST_CASE("gram probe agrees with brute force over beta") {
  const std::vector<std::vector<double>> gens{{1.0, std::sqrt(2.0)}, {0.5, -1.0}};
  const BruteGram ref = brute_gram(gens, 2, 1.0);
  const GramProbeResult r = gram_diophantine_probe(gens, 2, 1.0);
  CHECK_FALSE(r.partial);
  CHECK(r.zero_relations == ref.zeros);
  CHECK(r.min_value == doctest::Approx(ref.min_value).epsilon(1e-12));
  CHECK(r.c_prime == doctest::Approx(ref.c_prime).epsilon(1e-12));
}

TEST_CASE("exact gram probe on rational generators") {
  const std::vector<std::vector<Rational>> gens{{Rational(1), Rational(1, 2)}, {Rational(0), Rational(1, 3)}};
  const GramProbeResult r = gram_diophantine_probe(gens, 2, 0.5);
  CHECK(r.exact);
  const BruteGram ref = brute_gram({{1.0, 0.5}, {0.0, 1.0 / 3.0}}, 2, 0.5);
  CHECK(r.zero_relations == ref.zeros);
  CHECK(r.min_value == doctest::Approx(ref.min_value).epsilon(1e-12));
  // 36 sum gamma G = 45 g11 + 4 g22 + 6 g12; smallest nonzero value 2.
  CHECK(r.min_value_exact == "1/18");
  CHECK(r.c_prime == doctest::Approx(ref.c_prime).epsilon(1e-12));
}

TEST_CASE("gram probe budget") {
  const GramProbeResult r = gram_diophantine_probe(std::vector<std::vector<double>>{{1.0}, {2.0}, {3.0}}, 3, 1.0, 100);
  CHECK(r.partial);
  CHECK(r.scanned == 100);
}

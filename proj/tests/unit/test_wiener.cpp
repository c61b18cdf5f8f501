#include "wkbgo/wiener.hpp"

#include <doctest.h>

#include <cmath>
#include <random>

using namespace wkbgo;

namespace {

FourierSeries random_series(std::mt19937& rng, int dim, int terms, int range) {
  std::uniform_int_distribution<int> k(-range, range);
  std::normal_distribution<double> c;
  FourierSeries f(dim);
  for (int i = 0; i < terms; ++i) {
    std::vector<Int> v(static_cast<std::size_t>(dim));
    for (auto& x : v) x = k(rng);
    f.add(WaveVector(v), {c(rng), c(rng)});
  }
  return f;
}

}  // namespace

TEST_CASE("series basics") {
  FourierSeries f(1);
  f.add({2}, {3.0, 4.0}).add({-1}, -1.0).add({2}, {0.0, -4.0});
  CHECK(f.coefficient({2}) == Complex(3.0, 0.0));
  CHECK(w_norm(f) == doctest::Approx(4.0));
  const double y[1] = {0.5};
  CHECK(std::abs(f(y) - (3.0 * std::polar(1.0, 1.0) - std::polar(1.0, -0.5))) < 1e-14);
  f.add({-1}, 1.0);
  CHECK(f.terms().size() == 1);  // cancelled terms are pruned
}

TEST_CASE("substitution is an isometry") {
  std::mt19937 rng(4);
  for (int trial = 0; trial < 1000; ++trial) {
    const FourierSeries f = random_series(rng, 1 + trial % 3, 1 + trial % 9, 5);
    const double eps = 1.0 / (1 + trial % 40);
    const auto [a, b] = substitution_isometry_check(f, eps);
    CHECK(a == b);
  }
  CHECK_THROWS(substitution_isometry_check(FourierSeries(1), 0.3));
  CHECK(inverse_eps(1.0 / 64) == 64);
  CHECK_THROWS(inverse_eps(0.0));
}

TEST_CASE("W is submultiplicative and the free propagator is unitary") {
  std::mt19937 rng(9);
  std::uniform_real_distribution<double> u(-3.0, 3.0);
  for (int trial = 0; trial < 1000; ++trial) {
    const int dim = 1 + trial % 2;
    const FourierSeries f = random_series(rng, dim, 1 + trial % 7, 4);
    const FourierSeries g = random_series(rng, dim, 1 + (trial / 7) % 7, 4);
    CHECK(w_norm(product(f, g)) <= w_norm(f) * w_norm(g) * (1 + 1e-12));
    CHECK(w_norm(f + g) <= (w_norm(f) + w_norm(g)) * (1 + 1e-12));
    const FourierSeries p = propagate_free(f, 1.0 / (1 + trial % 16), u(rng));
    CHECK(std::abs(w_norm(p) - w_norm(f)) <= 1e-12 * w_norm(f));
  }
}

TEST_CASE("product is the pointwise product") {
  std::mt19937 rng(10);
  const FourierSeries f = random_series(rng, 2, 5, 3), g = random_series(rng, 2, 4, 3);
  const FourierSeries h = product(f, g);
  for (double y0 : {0.1, 1.3}) {
    const double y[2] = {y0, 2.0 - y0};
    CHECK(std::abs(h(y) - f(y) * g(y)) < 1e-12);
  }
}

TEST_CASE("dilation moves frequencies") {
  FourierSeries f(1);
  f.add({3}, 1.0);
  CHECK(dilate(f, 4).coefficient({12}) == Complex(1.0));
}

TEST_CASE("Euclidean Wiener norm of a Gaussian") {
  // ||F exp(-x^2/2)||_{L^1} with F f(xi) = (2 pi)^{-1/2} int f e^{-i x xi} is sqrt(2 pi).
  const EuclidGrid g{1, 256, 40.0};
  const ComplexVec f = sample(g, GaussianProfile{{0.0}, 1.0, 1.0});
  CHECK(w_norm_euclid(f, g) == doctest::Approx(std::sqrt(2.0 * M_PI)).epsilon(1e-10));
  // Two dimensions: the norm factorizes.
  const EuclidGrid g2{2, 128, 30.0};
  const ComplexVec f2 = sample(g2, GaussianProfile{{1.0, -2.0}, 1.0, 1.0});
  CHECK(w_norm_euclid(f2, g2) == doctest::Approx(2.0 * M_PI).epsilon(1e-10));
}

TEST_CASE("Euclidean substitution isometry on the box") {
  const EuclidGrid g{1, 512, 40.0};
  ProfileStateEuclid st{g, {sample(g, GaussianProfile{{0.0}, 1.0, 1.0}), sample(g, GaussianProfile{{2.0}, 1.5, 0.5})}, 0.0};
  // kappa / eps must be a multiple of 2 pi / L; carriers 10 apart in xi keep the
  // shifted spectra disjoint to rounding.
  const double eps = 1.0 / 8;
  const std::vector<std::vector<double>> kappa{{2.0 * M_PI / 40.0 * 64 * eps}, {-2.0 * M_PI / 40.0 * 64 * eps}};
  const auto [a, w] = substitution_isometry_check(st, kappa, eps);
  CHECK(a == doctest::Approx(e_norm(st)));
  CHECK(std::abs(a - w) <= 1e-10 * a);
}

TEST_CASE("E-norm of torus state") {
  CHECK(e_norm(ProfileStateTorus{{Complex(3, 4), 1.0}, 0.0}) == doctest::Approx(6.0));
}

#include "wkbgo/fft.hpp"

#include <doctest.h>

#include <cmath>
#include <random>

using namespace wkbgo;

namespace {

// Direct O(N^2) DFT over a d-dimensional row-major array.
ComplexVec naive_dft(const ComplexVec& in, int dim, int n, int sign) {
  ComplexVec out(in.size());
  for (std::size_t k = 0; k < in.size(); ++k) {
    Complex acc = 0.0;
    for (std::size_t x = 0; x < in.size(); ++x) {
      std::size_t kk = k, xx = x;
      double dot = 0.0;
      for (int a = 0; a < dim; ++a) {
        dot += static_cast<double>((kk % n) * (xx % n));
        kk /= n;
        xx /= n;
      }
      acc += in[x] * std::polar(1.0, sign * 2.0 * M_PI * dot / n);
    }
    out[k] = acc;
  }
  return out;
}

ComplexVec random_field(std::size_t size, unsigned seed) {
  std::mt19937 rng(seed);
  std::normal_distribution<double> g;
  ComplexVec v(size);
  for (auto& z : v) z = {g(rng), g(rng)};
  return v;
}

}  // namespace

TEST_CASE("power of two helpers") {
  CHECK(is_power_of_two(1));
  CHECK(is_power_of_two(1024));
  CHECK_FALSE(is_power_of_two(0));
  CHECK_FALSE(is_power_of_two(12));
  CHECK(next_power_of_two(1) == 1);
  CHECK(next_power_of_two(17) == 32);
  CHECK(next_power_of_two(64) == 64);
}

TEST_CASE("bin frequency round trip") {
  for (long long n : {2LL, 8LL, 64LL})
    for (long long k = 0; k < n; ++k) {
      const long long f = bin_frequency(k, n);
      CHECK(f >= -n / 2);
      CHECK(f < n / 2);
      CHECK(frequency_bin(f, n) == k);
    }
}

TEST_CASE("forward and backward match a direct DFT") {
  for (auto [dim, n] : {std::pair{1, 16}, std::pair{2, 8}, std::pair{3, 4}}) {
    CAPTURE(dim);
    auto plan = fft_plan(dim, n);
    const ComplexVec x = random_field(plan->size(), 7);
    ComplexVec f = x;
    plan->forward(f);
    const ComplexVec ref = naive_dft(x, dim, n, -1);
    for (std::size_t k = 0; k < f.size(); ++k) CHECK(std::abs(f[k] - ref[k]) < 1e-11);
    ComplexVec b = x;
    plan->backward(b);
    const ComplexVec refb = naive_dft(x, dim, n, +1);
    for (std::size_t k = 0; k < b.size(); ++k) CHECK(std::abs(b[k] - refb[k]) < 1e-11);
  }
}

TEST_CASE("round trip scales by n^d and is bitwise reproducible") {
  auto plan = fft_plan(2, 64);
  const ComplexVec x = random_field(plan->size(), 3);
  ComplexVec a = x, b = x;
  plan->forward(a);
  plan->backward(a);
  plan->forward(b);
  plan->backward(b);
  double err = 0.0;
  for (std::size_t p = 0; p < x.size(); ++p) {
    err = std::max(err, std::abs(a[p] / static_cast<double>(x.size()) - x[p]));
    REQUIRE(a[p] == b[p]);
  }
  CHECK(err < 1e-13);
}

TEST_CASE("plan cache returns shared plans") {
  CHECK(fft_plan(1, 32).get() == fft_plan(1, 32).get());
  CHECK(fft_plan(1, 32).get() != fft_plan(2, 32).get());
}

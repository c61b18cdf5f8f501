#include "wkbgo/errors.hpp"
#include "wkbgo/spectral_nls.hpp"

#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <random>

using namespace wkbgo;

namespace {

double sup_diff(const GridField& a, const GridField& b) { return sup_norm(difference(a, b)); }

GridField random_bandlimited(int dim, int n, int band, unsigned seed) {
  std::mt19937 rng(seed);
  std::normal_distribution<double> c;
  std::uniform_int_distribution<int> k(-band, band);
  GridField u(dim, n);
  for (int i = 0; i < 6; ++i) {
    std::vector<Int> f(static_cast<std::size_t>(dim));
    for (auto& x : f) x = k(rng);
    add_carrier(u, {0.3 * c(rng), 0.3 * c(rng)}, WaveVector(f));
  }
  return u;
}

}  // namespace

TEST_CASE("grid size rule") {
  CHECK(grid_size_rule(1, 1.0, 1.0 / 8) == 128);
  CHECK(grid_size_rule(2, 1.0, 1.0 / 16) == 512);
  CHECK(grid_size_rule(1, 0.0, 1.0) == 16);
}

TEST_CASE("plane waves are reproduced to rounding") {
  for (int sigma = 1; sigma <= 2; ++sigma) {
    for (const WaveVector& k : {WaveVector{1}, WaveVector{-2}}) {
      SolverConfig cfg;
      cfg.eps = 1.0 / 16;
      cfg.sigma = sigma;
      cfg.lambda = 1.5;
      cfg.t_final = 1.0;
      cfg.n = grid_size_rule(sigma, static_cast<double>(k.sup_norm()), cfg.eps);
      const Complex alpha(0.6, -0.3);
      const GridField u0 = plane_wave_exact(alpha, k, cfg, 1, 0.0);
      const SolveResult r = solve(u0, cfg);
      CHECK(sup_diff(r.snapshots.back(), plane_wave_exact(alpha, k, cfg, 1, 1.0)) <= 1e-10);
    }
  }
}

TEST_CASE("plane wave closed form solves the equation") {
  // Residual of i eps u_t + eps^2/2 u_xx - lambda eps |u|^2 u with spectral x-derivatives
  // and a centred time difference.
  SolverConfig cfg;
  cfg.eps = 1.0 / 8;
  cfg.lambda = 0.7;
  cfg.n = 64;
  const Complex alpha(0.9, 0.2);
  const WaveVector k{2, -1};
  const double t = 0.4, h = 1e-5;
  const GridField u = plane_wave_exact(alpha, k, cfg, 2, t);
  const GridField up = plane_wave_exact(alpha, k, cfg, 2, t + h), um = plane_wave_exact(alpha, k, cfg, 2, t - h);
  ComplexVec lap = u.values;
  auto plan = fft_plan(2, cfg.n);
  plan->forward(lap);
  for (std::size_t p = 0; p < lap.size(); ++p) {
    const double k0 = static_cast<double>(bin_frequency(static_cast<long long>(p / 64), 64));
    const double k1 = static_cast<double>(bin_frequency(static_cast<long long>(p % 64), 64));
    lap[p] *= -(k0 * k0 + k1 * k1) / (64.0 * 64.0);
  }
  plan->backward(lap);
  double res = 0.0;
  for (std::size_t p = 0; p < u.size(); ++p) {
    const Complex ut = (up.values[p] - um.values[p]) / (2 * h);
    const Complex r = Complex(0, cfg.eps) * ut + 0.5 * cfg.eps * cfg.eps * lap[p] -
                      cfg.lambda * cfg.eps * std::norm(u.values[p]) * u.values[p];
    res = std::max(res, std::abs(r));
  }
  CHECK(res <= 1e-6);  // limited by the finite difference in time
}

TEST_CASE("discrete L2 norm is conserved") {
  const GridField u0 = random_bandlimited(1, 256, 20, 3);
  SolverConfig cfg;
  cfg.eps = 1.0 / 4;
  cfg.n = 256;
  cfg.t_final = 1.0;
  cfg.dt = 1e-3;
  const SolveResult r = solve(u0, cfg);
  CHECK(r.steps == 1000);
  CHECK(std::abs(l2_norm2(r.snapshots.back()) - l2_norm2(u0)) <= 1e-12 * l2_norm2(u0));
}

TEST_CASE("linear propagation keeps Fourier magnitudes") {
  const GridField u0 = random_bandlimited(2, 32, 6, 8);
  SolverConfig cfg;
  cfg.eps = 1.0 / 2;
  cfg.lambda = 0.0;
  cfg.n = 32;
  cfg.t_final = 0.7;
  const SolveResult r = solve(u0, cfg);
  const ComplexVec a = fourier_coefficients(u0), b = fourier_coefficients(r.snapshots.back());
  for (std::size_t i = 0; i < a.size(); ++i) CHECK(std::abs(std::abs(a[i]) - std::abs(b[i])) < 1e-13);
  CHECK(w_norm_of_field(r.snapshots.back()) == doctest::Approx(w_norm_of_field(u0)).epsilon(1e-12));
}

TEST_CASE("sup norm is dominated by the discrete W norm") {
  for (unsigned s = 0; s < 50; ++s) {
    const GridField u = random_bandlimited(1 + s % 2, 32, 8, s);
    CHECK(sup_norm(u) <= w_norm_of_field(u) * (1 + 1e-12));
  }
}

TEST_CASE("a folded solve equals the full solve") {
  // Frequencies in 4 Z: one quarter period carries the whole field.
  SolverConfig cfg;
  cfg.eps = 1.0 / 4;
  cfg.n = 64;
  cfg.t_final = 0.5;
  GridField full(2, 64), folded(2, 16);
  const std::vector<std::pair<WaveVector, Complex>> waves{{{4, 0}, 0.7}, {{0, -4}, Complex(0, 0.5)}, {{4, 4}, 0.3}};
  for (const auto& [k, a] : waves) {
    add_carrier(full, a, k);
    add_carrier(folded, a, WaveVector{k[0] / 4, k[1] / 4});
  }
  const SolveResult rf = solve(full, cfg);
  cfg.fold = 4;
  const SolveResult rr = solve(folded, cfg);
  // Sample (m0, m1) of the folded grid is sample (m0, m1) of the full grid.
  double err = 0.0;
  for (int a = 0; a < 16; ++a)
    for (int b = 0; b < 16; ++b)
      err = std::max(err, std::abs(rf.snapshots.back().values[static_cast<std::size_t>(a * 64 + b)] -
                                   rr.snapshots.back().values[static_cast<std::size_t>(a * 16 + b)]));
  CHECK(err < 1e-12);
  CHECK(std::abs(sup_norm(rf.snapshots.back()) - sup_norm(rr.snapshots.back())) < 1e-12);
  CHECK(std::abs(w_norm_of_field(rf.snapshots.back()) - w_norm_of_field(rr.snapshots.back())) < 1e-12);
}

TEST_CASE("output times and validation") {
  SolverConfig cfg;
  cfg.eps = 1.0 / 8;
  cfg.n = 128;
  cfg.t_final = 1.0;
  const GridField u0 = plane_wave_exact(1.0, WaveVector{1}, cfg, 1, 0.0);
  const std::vector<double> times{0.25, 0.5, 1.0};
  const SolveResult r = solve(u0, cfg, times);
  CHECK(r.times == times);
  CHECK(r.snapshots.size() == 3);
  const std::vector<double> bad{0.5, 0.25};
  CHECK_THROWS(solve(u0, cfg, bad));
  cfg.eps = 0.3;
  CHECK_THROWS(solve(u0, cfg));
  cfg.eps = 1.0 / 8;
  cfg.n = 64;
  CHECK_THROWS_AS(solve(u0, cfg), DimensionMismatch);
  GridField g(1, 16);
  CHECK_THROWS(add_carrier(g, 1.0, WaveVector{8}));
}

TEST_CASE("aliasing is detected") {
  GridField u(1, 64);
  add_carrier(u, 1.0, WaveVector{1});
  CHECK(aliasing_ratio(u) < 1e-20);
  add_carrier(u, 1.0, WaveVector{31});
  CHECK(aliasing_ratio(u) == doctest::Approx(0.5));
  SolverConfig cfg;
  cfg.eps = 1.0;
  cfg.n = 64;
  cfg.t_final = 0.01;
  const SolveResult r = solve(u, cfg);
  CHECK_FALSE(r.warnings.empty());
}

TEST_CASE("snapshot round trip") {
  const GridField u = random_bandlimited(2, 16, 4, 1);
  const auto path = std::filesystem::temp_directory_path() / "wkbgo_snapshot_test.wkbf";
  write_snapshot(path, u, 0.125, 0.5);
  const Snapshot s = read_snapshot(path);
  CHECK(s.eps == 0.125);
  CHECK(s.t == 0.5);
  CHECK(s.field.dim == 2);
  CHECK(s.field.n == 16);
  CHECK(s.field.values == u.values);
  std::filesystem::remove(path);
  CHECK(fourier_magnitudes_csv(u).rfind("k1,k2,abs\n", 0) == 0);
}

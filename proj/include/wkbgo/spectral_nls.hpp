#pragma once

#include "wkbgo/fft.hpp"
#include "wkbgo/lattice.hpp"

#include <filesystem>
#include <span>
#include <string>
#include <vector>

namespace wkbgo {

/// Complex samples on the uniform grid x_m = 2 pi m / n of [0, 2 pi)^d, row-major.
struct GridField {
  int dim = 1;
  int n = 0;
  ComplexVec values;

  GridField() = default;
  GridField(int dim, int n);
  std::size_t size() const { return values.size(); }
};

struct SolverConfig {
  double eps = 1.0 / 16;
  double lambda = 1.0;
  int sigma = 1;
  double dt = 0.0;  // 0 selects eps / 100
  int n = 0;        // 0 selects grid_size_rule
  double t_final = 1.0;
  /// Fields have period 2 pi / fold along every axis and are stored as one
  /// period on n / fold points. The result equals the n-point solve.
  int fold = 1;

  double effective_dt() const { return dt > 0.0 ? dt : eps / 100.0; }
  void validate() const;
};

/// Smallest power of two >= 4 (2 sigma + 2) max_sup / eps (at least 16).
int grid_size_rule(int sigma, double max_sup, double eps);

struct SolveResult {
  std::vector<double> times;
  std::vector<GridField> snapshots;
  std::size_t steps = 0;
  /// Largest fraction of spectral energy found in the top 10% of frequencies.
  double max_aliasing_ratio = 0.0;
  std::vector<std::string> warnings;
};

inline constexpr double kAliasingThreshold = 1e-8;

/// Strang splitting: exact nonlinear rotation over dt/2, exact linear
/// propagator e^{i eps dt Delta / 2} in Fourier space, second nonlinear half.
/// Each interval between consecutive output times is split into equal steps
/// no longer than cfg.effective_dt(). Output times must be increasing and
/// within [0, cfg.t_final]; an empty list means {t_final}.
SolveResult solve(const GridField& u0, const SolverConfig& cfg,
                  std::span<const double> output_times = {});

/// alpha e^{i(kappa.x - |kappa|^2 t / 2)/eps} e^{-i lambda t |alpha|^{2 sigma}} on the grid.
GridField plane_wave_exact(Complex alpha, const WaveVector& kappa, const SolverConfig& cfg, int dim,
                           double t);

/// Adds amplitude e^{i freq.x} for an integer grid frequency, with the phase
/// reduced exactly modulo n before scaling.
void add_carrier(GridField& u, Complex amplitude, const WaveVector& freq);

/// Normalized Fourier coefficients c_k = DFT(u)_k / n^d.
ComplexVec fourier_coefficients(const GridField& u);

/// sum_k |c_k|: the discrete Wiener norm.
double w_norm_of_field(const GridField& u);
double sup_norm(const GridField& u);
/// Discrete L^2 norm squared, (2 pi / n)^d sum |u|^2.
double l2_norm2(const GridField& u);
GridField difference(const GridField& a, const GridField& b);

/// Fraction of sum |c_k|^2 carried by bins with some |k_a| > 0.9 n / 2.
double aliasing_ratio(const GridField& u);

/// Binary snapshot: "WKBF", uint32 version, uint32 d, uint32 n, double eps,
/// double t, then n^d (re, im) pairs, little-endian host order.
void write_snapshot(const std::filesystem::path& path, const GridField& u, double eps, double t);
struct Snapshot {
  GridField field;
  double eps = 0.0;
  double t = 0.0;
};
Snapshot read_snapshot(const std::filesystem::path& path);

/// "k_1,...,k_d,abs" rows for coefficients above `floor`.
std::string fourier_magnitudes_csv(const GridField& u, double floor = 1e-14);

}  // namespace wkbgo

#pragma once

#include "wkbgo/fft.hpp"
#include "wkbgo/lattice.hpp"

#include <functional>
#include <span>
#include <utility>
#include <vector>

namespace wkbgo {

struct SimParams {
  double lambda = 1.0;
  int sigma = 1;
  double t_final = 0.0;
  double dt = 1e-3;

  void validate() const;
};

/// Number of equal steps covering [0, t_final] with step at most dt.
std::size_t step_count(double t_final, double dt);

struct ProfileStateTorus {
  std::vector<Complex> amps;
  double t = 0.0;
};

/// Periodic box [-L/2, L/2)^d with n points per axis, row-major.
struct EuclidGrid {
  int dim = 1;
  int n = 256;
  double L = 40.0;

  std::size_t size() const;
  double dx() const { return L / n; }
  double coordinate(int m) const { return -0.5 * L + m * dx(); }
  /// Angular wavenumber of DFT bin k along one axis.
  double wavenumber(int k) const;
  void validate() const;
  friend bool operator==(const EuclidGrid&, const EuclidGrid&) = default;
};

struct ProfileStateEuclid {
  EuclidGrid grid;
  std::vector<ComplexVec> fields;
  double t = 0.0;
};

/// A profile A exp(-|x - c|^2 / (2 w^2)).
struct GaussianProfile {
  std::vector<double> center;
  double width = 1.0;
  Complex amplitude{1.0, 0.0};

  Complex operator()(std::span<const double> x) const;
};

using ProfileFunction = std::function<Complex(std::span<const double>)>;

ComplexVec sample(const EuclidGrid& grid, const ProfileFunction& f);

/// -i lambda sum over I_j of a_{l1} conj(a_{l2}) ... a_{l_{2s+1}}.
std::vector<Complex> nonlinear_rhs(const ProfileStateTorus& state, const InteractionTable& table,
                                   double lambda);
/// Pointwise on the grid, all fields taken in the same frame.
std::vector<ComplexVec> nonlinear_rhs(const ProfileStateEuclid& state,
                                      const InteractionTable& table, double lambda);

struct TorusTrajectory {
  std::vector<ProfileStateTorus> states;  // one per step, initial state first
  const ProfileStateTorus& back() const { return states.back(); }
};

/// Classic RK4 with fixed step. Throws BlowUpError once any |a_j| exceeds
/// 1e6 times the initial E-norm, NumericalError on NaN.
TorusTrajectory integrate_torus(const std::vector<Complex>& alpha, const ModeSet& modes,
                                const SimParams& params);
TorusTrajectory integrate_torus(const std::vector<Complex>& alpha, const InteractionTable& table,
                                const SimParams& params);

struct EuclidTrajectory {
  std::vector<ProfileStateEuclid> states;
  const ProfileStateEuclid& back() const { return states.back(); }
};

/// Transport plus coupling in the co-moving frame b_j(t,x) = a_j(t, x + t kappa_j);
/// the transport is an exact spectral shift. Stored states are in the lab frame.
/// record_every = 0 keeps only the initial and final states. Profiles must
/// decay to negligible size at the box boundary for the whole run.
EuclidTrajectory integrate_euclid(const std::vector<ComplexVec>& alpha, const EuclidGrid& grid,
                                  const ModeSet& modes, const SimParams& params,
                                  std::size_t record_every = 0);

/// Translates f by s: returns f(x - s) via Fourier phase multiplication.
void spectral_shift(ComplexVec& f, const EuclidGrid& grid, std::span<const double> s);

std::vector<Complex> explicit_torus_1d(const std::vector<Complex>& alpha, double lambda, double t);

/// Self-modulation closed form in d = 1, sigma = 1; the time integral uses
/// composite Simpson quadrature with step at most quadrature_dt.
std::vector<Complex> explicit_euclid_1d(const std::vector<ProfileFunction>& alpha,
                                        const std::vector<double>& kappa, double lambda,
                                        double t, double x, double quadrature_dt);

/// sum_n C(s+1,n) C(s,n) |a|^{2s-2n} |b|^{2n}
double two_mode_frequency(Complex a, Complex b, int sigma);

std::pair<Complex, Complex> explicit_two_mode(Complex alpha_j, Complex alpha_l, int sigma,
                                              double lambda, double t);

double total_mass(const ProfileStateTorus& state);
double total_mass(const ProfileStateEuclid& state);

std::vector<double> user_kappa(const ModeSet& modes, std::size_t j);

}  // namespace wkbgo

#pragma once

#include "wkbgo/fft.hpp"
#include "wkbgo/lattice.hpp"
#include "wkbgo/profiles.hpp"

#include <map>
#include <utility>
#include <vector>

namespace wkbgo {

/// Coefficients below this magnitude are dropped.
inline constexpr double kPruneBelow = 1e-30;

/// Finite Fourier series sum_k b_k e^{i kappa_k . y} on the torus.
class FourierSeries {
public:
  explicit FourierSeries(int dim = 1) : dim_(dim) {}

  int dim() const { return dim_; }
  const std::map<WaveVector, Complex>& terms() const { return terms_; }
  bool empty() const { return terms_.empty(); }

  /// Adds c to the coefficient of e^{i k.y}; coefficients below kPruneBelow are dropped.
  FourierSeries& add(const WaveVector& k, Complex c);
  Complex coefficient(const WaveVector& k) const;
  Complex operator()(std::span<const double> y) const;

private:
  int dim_;
  std::map<WaveVector, Complex> terms_;
};

double w_norm(const FourierSeries& f);
FourierSeries operator+(const FourierSeries& f, const FourierSeries& g);
FourierSeries scale(const FourierSeries& f, Complex c);
/// Exact convolution of the coefficient sequences.
FourierSeries product(const FourierSeries& f, const FourierSeries& g);
/// b_k -> b_k e^{-i eps t |k|^2 / 2}, the free propagator e^{i eps t Delta / 2}.
FourierSeries propagate_free(const FourierSeries& f, double eps, double t);
/// k -> factor k, i.e. f(factor y).
FourierSeries dilate(const FourierSeries& f, Int factor);

/// (w_norm(f), w_norm(f(./eps))). Throws unless 1/eps is a positive integer.
std::pair<double, double> substitution_isometry_check(const FourierSeries& f, double eps);

/// Exact integer N with eps = 1/N, or throws std::invalid_argument.
Int inverse_eps(double eps);

/// Discretization of ||f^||_{L^1} on the box: (2 pi)^{d/2} sum_k |F_k| / n^d with F
/// the unnormalized DFT of the samples.
double w_norm_euclid(const ComplexVec& f, const EuclidGrid& grid);

/// Discrete transforms of each profile, scaled so that sum |entries| is the
/// discrete L^1 norm of the Fourier transform.
struct ProfileSpectrum {
  EuclidGrid grid;
  std::vector<ComplexVec> spectra;

  explicit ProfileSpectrum(const ProfileStateEuclid& state);
};

double e_norm(const ProfileStateTorus& state);
double e_norm(const ProfileSpectrum& spectrum);
double e_norm(const ProfileStateEuclid& state);

/// (||f||_A, ||sum_j a_j(x) e^{i kappa_j . x / eps}||_W) on the box. Carriers
/// kappa_j / eps must sit on the grid's frequency lattice 2 pi Z^d / L.
std::pair<double, double> substitution_isometry_check(const ProfileStateEuclid& state,
                                                      const std::vector<std::vector<double>>& kappa,
                                                      double eps);

}  // namespace wkbgo

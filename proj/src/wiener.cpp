#include "wkbgo/wiener.hpp"

#include "wkbgo/errors.hpp"

#include <cmath>
#include <stdexcept>

namespace wkbgo {

namespace {

void require_dim(const FourierSeries& f, const WaveVector& k) {
  if (k.dim() != f.dim()) throw DimensionMismatch("FourierSeries: frequency dimension");
}

void prune(std::map<WaveVector, Complex>& terms) {
  std::erase_if(terms, [](const auto& kv) { return std::abs(kv.second) < kPruneBelow; });
}

}  // namespace

FourierSeries& FourierSeries::add(const WaveVector& k, Complex c) {
  require_dim(*this, k);
  auto it = terms_.try_emplace(k, Complex{}).first;
  it->second += c;
  if (std::abs(it->second) < kPruneBelow) terms_.erase(it);
  return *this;
}

Complex FourierSeries::coefficient(const WaveVector& k) const {
  auto it = terms_.find(k);
  return it == terms_.end() ? Complex{} : it->second;
}

Complex FourierSeries::operator()(std::span<const double> y) const {
  if (static_cast<int>(y.size()) != dim_) throw DimensionMismatch("FourierSeries: point dimension");
  Complex s = 0.0;
  for (const auto& [k, b] : terms_) {
    double arg = 0.0;
    for (int a = 0; a < dim_; ++a) arg += static_cast<double>(k[a]) * y[static_cast<std::size_t>(a)];
    s += b * Complex(std::cos(arg), std::sin(arg));
  }
  return s;
}

double w_norm(const FourierSeries& f) {
  double s = 0.0;
  for (const auto& [k, b] : f.terms())
    if (std::abs(b) >= kPruneBelow) s += std::abs(b);
  return s;
}

FourierSeries operator+(const FourierSeries& f, const FourierSeries& g) {
  if (f.dim() != g.dim()) throw DimensionMismatch("FourierSeries: sum of different dimensions");
  FourierSeries out = f;
  for (const auto& [k, b] : g.terms()) out.add(k, b);
  auto terms = out.terms();
  prune(terms);
  FourierSeries r(f.dim());
  for (const auto& [k, b] : terms) r.add(k, b);
  return r;
}

FourierSeries scale(const FourierSeries& f, Complex c) {
  FourierSeries out(f.dim());
  for (const auto& [k, b] : f.terms())
    if (std::abs(b * c) >= kPruneBelow) out.add(k, b * c);
  return out;
}

FourierSeries product(const FourierSeries& f, const FourierSeries& g) {
  if (f.dim() != g.dim()) throw DimensionMismatch("FourierSeries: product of different dimensions");
  std::map<WaveVector, Complex> terms;
  for (const auto& [k, b] : f.terms())
    for (const auto& [l, c] : g.terms()) terms[k + l] += b * c;
  prune(terms);
  FourierSeries out(f.dim());
  for (const auto& [k, b] : terms) out.add(k, b);
  return out;
}

FourierSeries propagate_free(const FourierSeries& f, double eps, double t) {
  FourierSeries out(f.dim());
  for (const auto& [k, b] : f.terms()) {
    const double arg = -eps * t * static_cast<double>(k.norm2()) / 2.0;
    out.add(k, b * Complex(std::cos(arg), std::sin(arg)));
  }
  return out;
}

FourierSeries dilate(const FourierSeries& f, Int factor) {
  if (factor == 0) throw std::invalid_argument("dilate: zero factor");
  FourierSeries out(f.dim());
  for (const auto& [k, b] : f.terms()) out.add(factor * k, b);
  return out;
}

Int inverse_eps(double eps) {
  if (!(eps > 0.0) || !std::isfinite(eps)) throw std::invalid_argument("eps must be positive");
  const double inv = 1.0 / eps;
  const double r = std::round(inv);
  if (r < 1.0 || std::abs(inv - r) > 1e-9 * r)
    throw std::invalid_argument("1/eps must be a positive integer (eps=" + std::to_string(eps) + ")");
  return static_cast<Int>(r);
}

std::pair<double, double> substitution_isometry_check(const FourierSeries& f, double eps) {
  const Int n = inverse_eps(eps);
  return {w_norm(f), w_norm(dilate(f, n))};
}

double w_norm_euclid(const ComplexVec& f, const EuclidGrid& grid) {
  if (f.size() != grid.size()) throw DimensionMismatch("w_norm_euclid: grid mismatch");
  ComplexVec hat = f;
  fft_plan(grid.dim, grid.n)->forward(hat);
  double s = 0.0;
  for (const Complex& z : hat) s += std::abs(z);
  return std::pow(2.0 * M_PI, 0.5 * grid.dim) * s / static_cast<double>(grid.size());
}

ProfileSpectrum::ProfileSpectrum(const ProfileStateEuclid& state) : grid(state.grid) {
  const double w = std::pow(2.0 * M_PI, 0.5 * grid.dim) / static_cast<double>(grid.size());
  auto plan = fft_plan(grid.dim, grid.n);
  for (const auto& f : state.fields) {
    if (f.size() != grid.size()) throw DimensionMismatch("ProfileSpectrum: grid mismatch");
    ComplexVec hat = f;
    plan->forward(hat);
    for (Complex& z : hat) z *= w;
    spectra.push_back(std::move(hat));
  }
}

double e_norm(const ProfileStateTorus& state) {
  double s = 0.0;
  for (const Complex& a : state.amps) s += std::abs(a);
  return s;
}

double e_norm(const ProfileSpectrum& spectrum) {
  double s = 0.0;
  for (const auto& hat : spectrum.spectra)
    for (const Complex& z : hat) s += std::abs(z);
  return s;
}

double e_norm(const ProfileStateEuclid& state) { return e_norm(ProfileSpectrum(state)); }

std::pair<double, double> substitution_isometry_check(const ProfileStateEuclid& state,
                                                      const std::vector<std::vector<double>>& kappa,
                                                      double eps) {
  const EuclidGrid& g = state.grid;
  if (kappa.size() != state.fields.size())
    throw DimensionMismatch("substitution_isometry_check: carrier count");
  if (!(eps > 0.0)) throw std::invalid_argument("substitution_isometry_check: eps must be positive");
  ComplexVec sum(g.size());
  std::vector<double> x(static_cast<std::size_t>(g.dim));
  const std::size_t n = static_cast<std::size_t>(g.n);
  for (std::size_t j = 0; j < kappa.size(); ++j) {
    if (static_cast<int>(kappa[j].size()) != g.dim)
      throw DimensionMismatch("substitution_isometry_check: carrier dimension");
    for (double k : kappa[j]) {
      const double bins = k / eps * g.L / (2.0 * M_PI);
      if (std::abs(bins - std::round(bins)) > 1e-9)
        throw std::invalid_argument("substitution_isometry_check: carrier off the grid lattice");
    }
    for (std::size_t p = 0; p < g.size(); ++p) {
      std::size_t r = p;
      double arg = 0.0;
      for (int a = g.dim - 1; a >= 0; --a) {
        arg += kappa[j][static_cast<std::size_t>(a)] / eps * g.coordinate(static_cast<int>(r % n));
        r /= n;
      }
      sum[p] += state.fields[j][p] * Complex(std::cos(arg), std::sin(arg));
    }
  }
  return {e_norm(state), w_norm_euclid(sum, g)};
}

}  // namespace wkbgo

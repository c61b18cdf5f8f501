#include "wkbgo/profiles.hpp"

#include "wkbgo/errors.hpp"
#include "wkbgo/wiener.hpp"

#include <boost/math/special_functions/binomial.hpp>

#include <cmath>
#include <stdexcept>

namespace wkbgo {

namespace {

constexpr double kBlowUpFactor = 1e6;

// out_j[p] = -i lambda sum_t prod_q f_{l_q}[p] (conjugated at odd q), p < npts.
void accumulate_rhs(const InteractionTable& table, const std::vector<const Complex*>& f,
                    std::size_t npts, double lambda, const std::vector<Complex*>& out) {
  const std::size_t arity = table.arity();
  const Complex coef(0.0, -lambda);
  for (std::size_t j = 0; j < table.modes(); ++j) {
    Complex* o = out[j];
    for (std::size_t p = 0; p < npts; ++p) o[p] = 0.0;
    const std::size_t count = table.count(j);
    for (std::size_t t = 0; t < count; ++t) {
      auto tuple = table.tuple(j, t);
      for (std::size_t p = 0; p < npts; ++p) {
        Complex prod = f[tuple[0]][p];
        for (std::size_t q = 1; q < arity; ++q) {
          const Complex v = f[tuple[q]][p];
          prod *= (q % 2 == 1) ? std::conj(v) : v;
        }
        o[p] += prod;
      }
    }
    for (std::size_t p = 0; p < npts; ++p) o[p] *= coef;
  }
}

void check_finite(std::span<const Complex> v, double t) {
  for (const Complex& z : v)
    if (!std::isfinite(z.real()) || !std::isfinite(z.imag()))
      throw NumericalError("non-finite amplitude at t=" + std::to_string(t));
}

double max_abs(std::span<const Complex> v) {
  double m = 0.0;
  for (const Complex& z : v) m = std::max(m, std::abs(z));
  return m;
}

}  // namespace

void SimParams::validate() const {
  if (sigma < 1) throw std::invalid_argument("SimParams: sigma must be >= 1");
  if (!std::isfinite(lambda)) throw std::invalid_argument("SimParams: lambda must be finite");
  if (!(t_final >= 0.0) || !std::isfinite(t_final))
    throw std::invalid_argument("SimParams: t_final must be >= 0");
  if (!(dt > 0.0)) throw std::invalid_argument("SimParams: dt must be > 0");
  if (t_final > 0.0 && dt > t_final) throw std::invalid_argument("SimParams: dt exceeds t_final");
}

std::size_t step_count(double t_final, double dt) {
  if (t_final <= 0.0) return 0;
  return static_cast<std::size_t>(std::ceil(t_final / dt - 1e-9));
}

std::size_t EuclidGrid::size() const {
  std::size_t s = 1;
  for (int a = 0; a < dim; ++a) s *= static_cast<std::size_t>(n);
  return s;
}

double EuclidGrid::wavenumber(int k) const {
  return 2.0 * M_PI / L * static_cast<double>(bin_frequency(k, n));
}

void EuclidGrid::validate() const {
  if (dim < 1) throw std::invalid_argument("EuclidGrid: dim must be >= 1");
  if (!is_power_of_two(n)) throw std::invalid_argument("EuclidGrid: n must be a power of two");
  if (!(L > 0.0)) throw std::invalid_argument("EuclidGrid: L must be > 0");
}

Complex GaussianProfile::operator()(std::span<const double> x) const {
  if (x.size() != center.size()) throw DimensionMismatch("GaussianProfile: point dimension");
  double r2 = 0.0;
  for (std::size_t a = 0; a < x.size(); ++a) r2 += (x[a] - center[a]) * (x[a] - center[a]);
  return amplitude * std::exp(-r2 / (2.0 * width * width));
}

ComplexVec sample(const EuclidGrid& grid, const ProfileFunction& f) {
  grid.validate();
  ComplexVec out(grid.size());
  std::vector<double> x(static_cast<std::size_t>(grid.dim));
  std::vector<int> m(static_cast<std::size_t>(grid.dim), 0);
  for (std::size_t p = 0; p < out.size(); ++p) {
    std::size_t r = p;
    for (int a = grid.dim - 1; a >= 0; --a) {
      m[static_cast<std::size_t>(a)] = static_cast<int>(r % static_cast<std::size_t>(grid.n));
      r /= static_cast<std::size_t>(grid.n);
    }
    for (int a = 0; a < grid.dim; ++a)
      x[static_cast<std::size_t>(a)] = grid.coordinate(m[static_cast<std::size_t>(a)]);
    out[p] = f(x);
  }
  return out;
}

std::vector<Complex> nonlinear_rhs(const ProfileStateTorus& state, const InteractionTable& table,
                                   double lambda) {
  if (state.amps.size() != table.modes())
    throw DimensionMismatch("nonlinear_rhs: state has " + std::to_string(state.amps.size()) +
                            " amplitudes, interaction table " + std::to_string(table.modes()));
  std::vector<Complex> out(state.amps.size());
  std::vector<const Complex*> f;
  std::vector<Complex*> o;
  for (std::size_t j = 0; j < out.size(); ++j) {
    f.push_back(&state.amps[j]);
    o.push_back(&out[j]);
  }
  accumulate_rhs(table, f, 1, lambda, o);
  return out;
}

std::vector<ComplexVec> nonlinear_rhs(const ProfileStateEuclid& state,
                                      const InteractionTable& table, double lambda) {
  if (state.fields.size() != table.modes())
    throw DimensionMismatch("nonlinear_rhs: field count does not match interaction table");
  const std::size_t npts = state.grid.size();
  std::vector<ComplexVec> out(state.fields.size(), ComplexVec(npts));
  std::vector<const Complex*> f;
  std::vector<Complex*> o;
  for (std::size_t j = 0; j < out.size(); ++j) {
    if (state.fields[j].size() != npts) throw DimensionMismatch("nonlinear_rhs: grid mismatch");
    f.push_back(state.fields[j].data());
    o.push_back(out[j].data());
  }
  accumulate_rhs(table, f, npts, lambda, o);
  return out;
}

TorusTrajectory integrate_torus(const std::vector<Complex>& alpha, const ModeSet& modes,
                                const SimParams& params) {
  if (modes.sigma() != params.sigma)
    throw std::invalid_argument("integrate_torus: sigma differs from the mode set");
  return integrate_torus(alpha, InteractionTable(modes), params);
}

TorusTrajectory integrate_torus(const std::vector<Complex>& alpha, const InteractionTable& table,
                                const SimParams& params) {
  params.validate();
  if (alpha.size() != table.modes())
    throw DimensionMismatch("integrate_torus: amplitude count does not match mode set");
  check_finite(alpha, 0.0);
  const std::size_t steps = step_count(params.t_final, params.dt);
  const double h = steps ? params.t_final / static_cast<double>(steps) : 0.0;
  const std::size_t m = alpha.size();
  double e0 = 0.0;
  for (const Complex& z : alpha) e0 += std::abs(z);
  const double guard = kBlowUpFactor * e0;

  TorusTrajectory traj;
  traj.states.reserve(steps + 1);
  traj.states.push_back({alpha, 0.0});

  std::vector<Complex> k1(m), k2(m), k3(m), k4(m), y(m), tmp(m);
  std::vector<const Complex*> fin(m);
  std::vector<Complex*> fout(m);
  auto rhs = [&](const std::vector<Complex>& a, std::vector<Complex>& out) {
    for (std::size_t j = 0; j < m; ++j) {
      fin[j] = &a[j];
      fout[j] = &out[j];
    }
    accumulate_rhs(table, fin, 1, params.lambda, fout);
  };

  y = alpha;
  for (std::size_t s = 0; s < steps; ++s) {
    rhs(y, k1);
    for (std::size_t j = 0; j < m; ++j) tmp[j] = y[j] + 0.5 * h * k1[j];
    rhs(tmp, k2);
    for (std::size_t j = 0; j < m; ++j) tmp[j] = y[j] + 0.5 * h * k2[j];
    rhs(tmp, k3);
    for (std::size_t j = 0; j < m; ++j) tmp[j] = y[j] + h * k3[j];
    rhs(tmp, k4);
    for (std::size_t j = 0; j < m; ++j) y[j] += h / 6.0 * (k1[j] + 2.0 * k2[j] + 2.0 * k3[j] + k4[j]);
    const double t = (s + 1 == steps) ? params.t_final : static_cast<double>(s + 1) * h;
    check_finite(y, t);
    if (e0 > 0.0 && max_abs(y) > guard)
      throw BlowUpError("integrate_torus: amplitude exceeded 1e6 x initial E-norm", t);
    traj.states.push_back({y, t});
  }
  return traj;
}

std::vector<double> user_kappa(const ModeSet& modes, std::size_t j) {
  std::vector<double> k;
  for (const auto& c : modes.user_vector(j)) k.push_back(boost::rational_cast<double>(c));
  return k;
}

void spectral_shift(ComplexVec& f, const EuclidGrid& grid, std::span<const double> s) {
  if (f.size() != grid.size()) throw DimensionMismatch("spectral_shift: grid mismatch");
  if (static_cast<int>(s.size()) != grid.dim) throw DimensionMismatch("spectral_shift: shift dimension");
  auto plan = fft_plan(grid.dim, grid.n);
  plan->forward(f);
  const std::size_t n = static_cast<std::size_t>(grid.n);
  // Per-axis phase tables, combined multiplicatively.
  std::vector<std::vector<Complex>> ph(static_cast<std::size_t>(grid.dim), std::vector<Complex>(n));
  for (int a = 0; a < grid.dim; ++a)
    for (std::size_t k = 0; k < n; ++k) {
      const double arg = -grid.wavenumber(static_cast<int>(k)) * s[static_cast<std::size_t>(a)];
      ph[static_cast<std::size_t>(a)][k] = Complex(std::cos(arg), std::sin(arg));
    }
  const double norm = 1.0 / static_cast<double>(f.size());
  for (std::size_t p = 0; p < f.size(); ++p) {
    std::size_t r = p;
    Complex m = norm;
    for (int a = grid.dim - 1; a >= 0; --a) {
      m *= ph[static_cast<std::size_t>(a)][r % n];
      r /= n;
    }
    f[p] *= m;
  }
  plan->backward(f);
}

EuclidTrajectory integrate_euclid(const std::vector<ComplexVec>& alpha, const EuclidGrid& grid,
                                  const ModeSet& modes, const SimParams& params,
                                  std::size_t record_every) {
  params.validate();
  grid.validate();
  if (modes.sigma() != params.sigma)
    throw std::invalid_argument("integrate_euclid: sigma differs from the mode set");
  if (modes.dim() != grid.dim) throw DimensionMismatch("integrate_euclid: mode and grid dimension");
  if (alpha.size() != modes.size())
    throw DimensionMismatch("integrate_euclid: field count does not match mode set");
  for (const auto& f : alpha) {
    if (f.size() != grid.size()) throw DimensionMismatch("integrate_euclid: grid mismatch");
    check_finite(f, 0.0);
  }
  const InteractionTable table(modes);
  const std::size_t m = alpha.size();
  const std::size_t npts = grid.size();
  std::vector<std::vector<double>> kappa(m);
  for (std::size_t j = 0; j < m; ++j) kappa[j] = user_kappa(modes, j);
  auto scaled = [](const std::vector<double>& k, double t) {
    std::vector<double> s(k);
    for (double& c : s) c *= t;
    return s;
  };

  double e0 = 0.0;
  for (const auto& f : alpha) e0 += w_norm_euclid(f, grid);
  double sup0 = 0.0;
  for (const auto& f : alpha) sup0 = std::max(sup0, max_abs(f));
  const double guard = kBlowUpFactor * std::max(e0, sup0);

  const std::size_t steps = step_count(params.t_final, params.dt);
  const double h = steps ? params.t_final / static_cast<double>(steps) : 0.0;

  std::vector<ComplexVec> lab(m, ComplexVec(npts));
  std::vector<const Complex*> fin(m);
  std::vector<Complex*> fout(m);
  // d/dt b_j(t,x) = N_j(a(t))(x + t kappa_j), a_l(t,y) = b_l(t, y - t kappa_l).
  auto rhs = [&](const std::vector<ComplexVec>& b, double t, std::vector<ComplexVec>& out) {
    for (std::size_t j = 0; j < m; ++j) {
      lab[j] = b[j];
      const auto s = scaled(kappa[j], t);
      if (t != 0.0) spectral_shift(lab[j], grid, s);
      fin[j] = lab[j].data();
      fout[j] = out[j].data();
    }
    accumulate_rhs(table, fin, npts, params.lambda, fout);
    if (t != 0.0)
      for (std::size_t j = 0; j < m; ++j) spectral_shift(out[j], grid, scaled(kappa[j], -t));
  };
  auto to_lab = [&](const std::vector<ComplexVec>& b, double t) {
    ProfileStateEuclid st{grid, b, t};
    if (t != 0.0)
      for (std::size_t j = 0; j < m; ++j) spectral_shift(st.fields[j], grid, scaled(kappa[j], t));
    return st;
  };

  EuclidTrajectory traj;
  traj.states.push_back({grid, alpha, 0.0});
  std::vector<ComplexVec> y = alpha, tmp = alpha;
  std::vector<ComplexVec> k1(m, ComplexVec(npts)), k2 = k1, k3 = k1, k4 = k1;
  for (std::size_t s = 0; s < steps; ++s) {
    const double t0 = static_cast<double>(s) * h;
    rhs(y, t0, k1);
    for (std::size_t j = 0; j < m; ++j)
      for (std::size_t p = 0; p < npts; ++p) tmp[j][p] = y[j][p] + 0.5 * h * k1[j][p];
    rhs(tmp, t0 + 0.5 * h, k2);
    for (std::size_t j = 0; j < m; ++j)
      for (std::size_t p = 0; p < npts; ++p) tmp[j][p] = y[j][p] + 0.5 * h * k2[j][p];
    rhs(tmp, t0 + 0.5 * h, k3);
    for (std::size_t j = 0; j < m; ++j)
      for (std::size_t p = 0; p < npts; ++p) tmp[j][p] = y[j][p] + h * k3[j][p];
    rhs(tmp, t0 + h, k4);
    double peak = 0.0;
    for (std::size_t j = 0; j < m; ++j) {
      for (std::size_t p = 0; p < npts; ++p)
        y[j][p] += h / 6.0 * (k1[j][p] + 2.0 * k2[j][p] + 2.0 * k3[j][p] + k4[j][p]);
      peak = std::max(peak, max_abs(y[j]));
    }
    const double t = (s + 1 == steps) ? params.t_final : static_cast<double>(s + 1) * h;
    for (const auto& f : y) check_finite(f, t);
    if (guard > 0.0 && peak > guard)
      throw BlowUpError("integrate_euclid: profile exceeded 1e6 x initial E-norm", t);
    const bool last = s + 1 == steps;
    if (last || (record_every > 0 && (s + 1) % record_every == 0)) traj.states.push_back(to_lab(y, t));
  }
  return traj;
}

std::vector<Complex> explicit_torus_1d(const std::vector<Complex>& alpha, double lambda, double t) {
  double mass = 0.0;
  for (const Complex& a : alpha) mass += std::norm(a);
  std::vector<Complex> out;
  for (const Complex& a : alpha) {
    const double arg = -lambda * t * (2.0 * mass - std::norm(a));
    out.push_back(a * Complex(std::cos(arg), std::sin(arg)));
  }
  return out;
}

std::vector<Complex> explicit_euclid_1d(const std::vector<ProfileFunction>& alpha,
                                        const std::vector<double>& kappa, double lambda,
                                        double t, double x, double quadrature_dt) {
  if (alpha.size() != kappa.size())
    throw DimensionMismatch("explicit_euclid_1d: profile and wave vector counts differ");
  if (!(quadrature_dt > 0.0)) throw std::invalid_argument("explicit_euclid_1d: quadrature_dt");
  std::size_t intervals = static_cast<std::size_t>(std::ceil(std::abs(t) / quadrature_dt - 1e-9));
  if (intervals % 2 == 1) ++intervals;
  if (intervals == 0) intervals = 2;
  const double h = t / static_cast<double>(intervals);
  auto at = [](const ProfileFunction& f, double y) {
    const double p[1] = {y};
    return f(std::span<const double>(p, 1));
  };

  std::vector<Complex> out;
  for (std::size_t j = 0; j < alpha.size(); ++j) {
    // integrand(tau) = sum_{l != j} |alpha_l(x + (tau - t) kappa_j - tau kappa_l)|^2
    auto integrand = [&](double tau) {
      double s = 0.0;
      for (std::size_t l = 0; l < alpha.size(); ++l)
        if (l != j) s += std::norm(at(alpha[l], x + (tau - t) * kappa[j] - tau * kappa[l]));
      return s;
    };
    double integral = 0.0;
    if (t != 0.0) {
      double acc = integrand(0.0) + integrand(t);
      for (std::size_t i = 1; i < intervals; ++i)
        acc += (i % 2 == 1 ? 4.0 : 2.0) * integrand(static_cast<double>(i) * h);
      integral = acc * h / 3.0;
    }
    const Complex a0 = at(alpha[j], x - t * kappa[j]);
    const double phase = -2.0 * lambda * integral - t * lambda * std::norm(a0);
    out.push_back(a0 * Complex(std::cos(phase), std::sin(phase)));
  }
  return out;
}

double two_mode_frequency(Complex a, Complex b, int sigma) {
  if (sigma < 1) throw std::invalid_argument("two_mode_frequency: sigma must be >= 1");
  const double ma = std::norm(a), mb = std::norm(b);
  const auto s = static_cast<unsigned>(sigma);
  double sum = 0.0;
  for (unsigned n = 0; n <= s; ++n)
    sum += boost::math::binomial_coefficient<double>(s + 1, n) *
           boost::math::binomial_coefficient<double>(s, n) * std::pow(ma, s - n) * std::pow(mb, n);
  return sum;
}

std::pair<Complex, Complex> explicit_two_mode(Complex alpha_j, Complex alpha_l, int sigma,
                                              double lambda, double t) {
  const double fj = two_mode_frequency(alpha_j, alpha_l, sigma);
  const double fl = two_mode_frequency(alpha_l, alpha_j, sigma);
  return {alpha_j * std::polar(1.0, -lambda * t * fj), alpha_l * std::polar(1.0, -lambda * t * fl)};
}

double total_mass(const ProfileStateTorus& state) {
  double m = 0.0;
  for (const Complex& a : state.amps) m += std::norm(a);
  return m;
}

double total_mass(const ProfileStateEuclid& state) {
  const double cell = std::pow(state.grid.dx(), state.grid.dim);
  double m = 0.0;
  for (const auto& f : state.fields)
    for (const Complex& z : f) m += std::norm(z);
  return m * cell;
}

}  // namespace wkbgo

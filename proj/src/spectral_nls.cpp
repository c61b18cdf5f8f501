#include "wkbgo/spectral_nls.hpp"

#include "wkbgo/errors.hpp"
#include "wkbgo/wiener.hpp"

#include <cmath>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <iomanip>
#include <sstream>
#include <stdexcept>

namespace wkbgo {

namespace {

std::size_t ipow(std::size_t n, int d) {
  std::size_t s = 1;
  for (int a = 0; a < d; ++a) s *= n;
  return s;
}

// Includes the 1/n^d normalization of the inverse transform.
ComplexVec linear_multiplier(int dim, int n, double eps, double h) {
  const std::size_t total = ipow(static_cast<std::size_t>(n), dim);
  ComplexVec m(total);
  const double norm = 1.0 / static_cast<double>(total);
  const std::size_t un = static_cast<std::size_t>(n);
  for (std::size_t p = 0; p < total; ++p) {
    std::size_t r = p;
    double k2 = 0.0;
    for (int a = 0; a < dim; ++a) {
      const double k = static_cast<double>(bin_frequency(static_cast<long long>(r % un), n));
      k2 += k * k;
      r /= un;
    }
    const double arg = -eps * h * k2 / 2.0;
    m[p] = Complex(norm * std::cos(arg), norm * std::sin(arg));
  }
  return m;
}

void nonlinear_step(ComplexVec& u, double lambda, int sigma, double h) {
  double* d = reinterpret_cast<double*>(u.data());
  const std::size_t total = u.size();
  const double c0 = -lambda * h;
  for (std::size_t p = 0; p < total; ++p) {
    const double re = d[2 * p], im = d[2 * p + 1];
    const double r2 = re * re + im * im;
    double w = r2;
    for (int s = 1; s < sigma; ++s) w *= r2;
    const double arg = c0 * w;
    const double c = std::cos(arg), s = std::sin(arg);
    d[2 * p] = re * c - im * s;
    d[2 * p + 1] = re * s + im * c;
  }
}

void multiply(ComplexVec& u, const ComplexVec& m) {
  double* d = reinterpret_cast<double*>(u.data());
  const double* w = reinterpret_cast<const double*>(m.data());
  const std::size_t total = u.size();
  for (std::size_t p = 0; p < total; ++p) {
    const double re = d[2 * p], im = d[2 * p + 1];
    const double mr = w[2 * p], mi = w[2 * p + 1];
    d[2 * p] = re * mr - im * mi;
    d[2 * p + 1] = re * mi + im * mr;
  }
}

bool all_finite(const ComplexVec& u) {
  double s = 0.0;
  for (const Complex& z : u) s += std::norm(z);
  return std::isfinite(s);
}

}  // namespace

GridField::GridField(int d, int points) : dim(d), n(points), values(ipow(static_cast<std::size_t>(points), d)) {
  if (d < 1 || points < 1) throw std::invalid_argument("GridField: dim and n must be positive");
}

void SolverConfig::validate() const {
  inverse_eps(eps);
  if (sigma < 1) throw std::invalid_argument("SolverConfig: sigma must be >= 1");
  if (!std::isfinite(lambda)) throw std::invalid_argument("SolverConfig: lambda must be finite");
  if (dt < 0.0) throw std::invalid_argument("SolverConfig: dt must be >= 0");
  if (n != 0 && !is_power_of_two(n)) throw std::invalid_argument("SolverConfig: n must be a power of two");
  if (!(t_final >= 0.0)) throw std::invalid_argument("SolverConfig: t_final must be >= 0");
  if (!is_power_of_two(fold)) throw std::invalid_argument("SolverConfig: fold must be a power of two");
  if (fold > 1 && (n == 0 || n % fold != 0)) throw std::invalid_argument("SolverConfig: fold must divide n");
}

int grid_size_rule(int sigma, double max_sup, double eps) {
  const double need = 4.0 * (2.0 * sigma + 2.0) * max_sup / eps;
  return static_cast<int>(next_power_of_two(std::max<long long>(16, static_cast<long long>(std::ceil(need - 1e-9)))));
}

SolveResult solve(const GridField& u0, const SolverConfig& cfg, std::span<const double> output_times) {
  cfg.validate();
  if (!is_power_of_two(u0.n)) throw std::invalid_argument("solve: grid size must be a power of two");
  if (cfg.n != 0 && cfg.n / cfg.fold != u0.n) throw DimensionMismatch("solve: field grid differs from config");
  if (!all_finite(u0.values)) throw NumericalError("solve: non-finite initial data");
  std::vector<double> outs(output_times.begin(), output_times.end());
  if (outs.empty()) outs.push_back(cfg.t_final);
  for (std::size_t i = 0; i < outs.size(); ++i) {
    if (outs[i] < 0.0 || outs[i] > cfg.t_final * (1 + 1e-12))
      throw std::invalid_argument("solve: output time outside [0, t_final]");
    if (i > 0 && outs[i] <= outs[i - 1]) throw std::invalid_argument("solve: output times must increase");
  }

  auto plan = fft_plan(u0.dim, u0.n);
  const double dt = cfg.effective_dt();
  SolveResult res;
  GridField u = u0;
  double t = 0.0;
  double cached_h = -1.0;
  ComplexVec mult;

  for (double target : outs) {
    const double seg = target - t;
    const std::size_t m = seg > 0.0 ? static_cast<std::size_t>(std::ceil(seg / dt - 1e-9)) : 0;
    if (m > 0) {
      const double h = seg / static_cast<double>(m);
      if (h != cached_h) {
        mult = linear_multiplier(u.dim, u.n, cfg.eps * cfg.fold * cfg.fold, h);
        cached_h = h;
      }
      nonlinear_step(u.values, cfg.lambda, cfg.sigma, 0.5 * h);
      for (std::size_t i = 0; i < m; ++i) {
        plan->forward(u.values);
        multiply(u.values, mult);
        plan->backward(u.values);
        nonlinear_step(u.values, cfg.lambda, cfg.sigma, i + 1 == m ? 0.5 * h : h);
        if ((i & 255) == 255 && !all_finite(u.values))
          throw NumericalError("solve: non-finite field at t=" + std::to_string(t + (i + 1) * h));
      }
      res.steps += m;
    }
    t = target;
    if (!all_finite(u.values)) throw NumericalError("solve: non-finite field at t=" + std::to_string(t));
    const double ratio = aliasing_ratio(u);
    if (ratio > kAliasingThreshold && res.max_aliasing_ratio <= kAliasingThreshold) {
      std::ostringstream os;
      os << "aliasing: " << std::scientific << std::setprecision(3) << ratio
         << " of spectral energy in the top 10% of frequencies at t=" << t;
      res.warnings.push_back(os.str());
    }
    res.max_aliasing_ratio = std::max(res.max_aliasing_ratio, ratio);
    res.times.push_back(t);
    res.snapshots.push_back(u);
  }
  return res;
}

void add_carrier(GridField& u, Complex amplitude, const WaveVector& freq) {
  if (freq.dim() != u.dim) throw DimensionMismatch("add_carrier: frequency dimension");
  const Int n = u.n;
  for (int a = 0; a < u.dim; ++a)
    if (freq[a] < -n / 2 || freq[a] >= n / 2)
      throw std::invalid_argument("add_carrier: frequency " + freq.to_string() +
                                  " not resolved on an n=" + std::to_string(n) + " grid");
  const std::size_t un = static_cast<std::size_t>(n);
  // Phase table e^{2 pi i r / n}, indexed by the exact residue r.
  std::vector<Complex> table(un);
  for (std::size_t r = 0; r < un; ++r) {
    const double arg = 2.0 * M_PI * static_cast<double>(r) / static_cast<double>(n);
    table[r] = Complex(std::cos(arg), std::sin(arg));
  }
  for (std::size_t p = 0; p < u.size(); ++p) {
    std::size_t q = p;
    Int acc = 0;
    for (int a = u.dim - 1; a >= 0; --a) {
      acc += freq[a] * static_cast<Int>(q % un);
      q /= un;
    }
    Int r = acc % n;
    if (r < 0) r += n;
    u.values[p] += amplitude * table[static_cast<std::size_t>(r)];
  }
}

GridField plane_wave_exact(Complex alpha, const WaveVector& kappa, const SolverConfig& cfg, int dim,
                           double t) {
  const Int inv = inverse_eps(cfg.eps);
  if (kappa.dim() != dim) throw DimensionMismatch("plane_wave_exact: kappa dimension");
  Int sup = kappa.sup_norm();
  const int n = cfg.n ? cfg.n : grid_size_rule(cfg.sigma, static_cast<double>(sup), cfg.eps);
  GridField u(dim, n);
  const double phase = -static_cast<double>(kappa.norm2()) * t / (2.0 * cfg.eps) -
                       cfg.lambda * t * std::pow(std::norm(alpha), cfg.sigma);
  add_carrier(u, alpha * Complex(std::cos(phase), std::sin(phase)), inv * kappa);
  return u;
}

ComplexVec fourier_coefficients(const GridField& u) {
  ComplexVec c = u.values;
  fft_plan(u.dim, u.n)->forward(c);
  const double norm = 1.0 / static_cast<double>(c.size());
  for (Complex& z : c) z *= norm;
  return c;
}

double w_norm_of_field(const GridField& u) {
  double s = 0.0;
  for (const Complex& z : fourier_coefficients(u)) s += std::abs(z);
  return s;
}

double sup_norm(const GridField& u) {
  double m = 0.0;
  for (const Complex& z : u.values) m = std::max(m, std::abs(z));
  return m;
}

double l2_norm2(const GridField& u) {
  double s = 0.0;
  for (const Complex& z : u.values) s += std::norm(z);
  return s * std::pow(2.0 * M_PI / u.n, u.dim);
}

GridField difference(const GridField& a, const GridField& b) {
  if (a.dim != b.dim || a.n != b.n) throw DimensionMismatch("difference: grid mismatch");
  GridField d = a;
  for (std::size_t p = 0; p < d.size(); ++p) d.values[p] -= b.values[p];
  return d;
}

double aliasing_ratio(const GridField& u) {
  const ComplexVec c = fourier_coefficients(u);
  const std::size_t un = static_cast<std::size_t>(u.n);
  const double cut = 0.9 * u.n / 2.0;
  double total = 0.0, top = 0.0;
  for (std::size_t p = 0; p < c.size(); ++p) {
    const double e = std::norm(c[p]);
    total += e;
    std::size_t r = p;
    bool high = false;
    for (int a = 0; a < u.dim; ++a) {
      if (std::abs(static_cast<double>(bin_frequency(static_cast<long long>(r % un), u.n))) > cut) high = true;
      r /= un;
    }
    if (high) top += e;
  }
  return total > 0.0 ? top / total : 0.0;
}

void write_snapshot(const std::filesystem::path& path, const GridField& u, double eps, double t) {
  const std::filesystem::path tmp = path.string() + ".tmp";
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  {
    std::ofstream os(tmp, std::ios::binary | std::ios::trunc);
    if (!os) throw std::runtime_error("write_snapshot: cannot open " + tmp.string());
    const char magic[4] = {'W', 'K', 'B', 'F'};
    const std::uint32_t header[3] = {1u, static_cast<std::uint32_t>(u.dim), static_cast<std::uint32_t>(u.n)};
    os.write(magic, 4);
    os.write(reinterpret_cast<const char*>(header), sizeof header);
    os.write(reinterpret_cast<const char*>(&eps), sizeof eps);
    os.write(reinterpret_cast<const char*>(&t), sizeof t);
    os.write(reinterpret_cast<const char*>(u.values.data()),
             static_cast<std::streamsize>(u.size() * sizeof(Complex)));
    if (!os) throw std::runtime_error("write_snapshot: write failed for " + tmp.string());
  }
  std::filesystem::rename(tmp, path);
}

Snapshot read_snapshot(const std::filesystem::path& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw std::runtime_error("read_snapshot: cannot open " + path.string());
  char magic[4];
  std::uint32_t header[3];
  Snapshot s;
  is.read(magic, 4);
  is.read(reinterpret_cast<char*>(header), sizeof header);
  is.read(reinterpret_cast<char*>(&s.eps), sizeof s.eps);
  is.read(reinterpret_cast<char*>(&s.t), sizeof s.t);
  if (!is || std::memcmp(magic, "WKBF", 4) != 0 || header[0] != 1u)
    throw ParseError(path.string(), "not a version-1 WKBF snapshot");
  s.field = GridField(static_cast<int>(header[1]), static_cast<int>(header[2]));
  is.read(reinterpret_cast<char*>(s.field.values.data()),
          static_cast<std::streamsize>(s.field.size() * sizeof(Complex)));
  if (!is) throw ParseError(path.string(), "truncated snapshot payload");
  return s;
}

std::string fourier_magnitudes_csv(const GridField& u, double floor) {
  const ComplexVec c = fourier_coefficients(u);
  const std::size_t un = static_cast<std::size_t>(u.n);
  std::ostringstream os;
  for (int a = 0; a < u.dim; ++a) os << "k" << a + 1 << ",";
  os << "abs\n" << std::setprecision(17);
  std::vector<long long> k(static_cast<std::size_t>(u.dim));
  for (std::size_t p = 0; p < c.size(); ++p) {
    if (std::abs(c[p]) <= floor) continue;
    std::size_t r = p;
    for (int a = u.dim - 1; a >= 0; --a) {
      k[static_cast<std::size_t>(a)] = bin_frequency(static_cast<long long>(r % un), u.n);
      r /= un;
    }
    for (long long v : k) os << v << ",";
    os << std::abs(c[p]) << "\n";
  }
  return os.str();
}

}  // namespace wkbgo

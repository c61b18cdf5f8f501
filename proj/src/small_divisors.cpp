#include "wkbgo/small_divisors.hpp"

#include "wkbgo/errors.hpp"
#include "wkbgo/lattice_io.hpp"

#include <cmath>
#include <numeric>
#include <stdexcept>

namespace wkbgo {

namespace {

const ModeSet& with_sigma(const ModeSet& modes, int sigma, ModeSet& storage) {
  if (sigma < 1) throw std::invalid_argument("sigma must be >= 1");
  if (modes.sigma() == sigma) return modes;
  storage = ModeSet::from_vectors(modes.vectors(), sigma, modes.scale());
  return storage;
}

std::vector<double> log_brackets(const ModeSet& modes) {
  std::vector<double> out;
  for (std::size_t i = 0; i < modes.size(); ++i) out.push_back(0.5 * std::log1p(modes.user_norm2(i)));
  return out;
}

// Shared odometer over gamma in prod [-R_c, R_c], one representative per sign pair.
template <class T, class Zero, class Abs>
void scan_gamma(const std::vector<T>& weights, const std::vector<Int>& ranges, GramProbeResult& res,
                Zero is_zero, Abs to_double, T& best) {
  const std::size_t m = weights.size();
  std::vector<Int> g(m);
  for (std::size_t c = 0; c < m; ++c) g[c] = -ranges[c];
  bool have_best = false;
  while (true) {
    std::size_t first = 0;
    while (first < m && g[first] == 0) ++first;
    if (first < m && g[first] > 0) {
      if (res.scanned >= res.budget) {
        res.partial = true;
        return;
      }
      ++res.scanned;
      T v = 0;
      Int l1 = 0;
      for (std::size_t c = 0; c < m; ++c) {
        v += static_cast<T>(g[c]) * weights[c];
        l1 += g[c] < 0 ? -g[c] : g[c];
      }
      if (is_zero(v, l1)) {
        ++res.zero_relations;
      } else {
        const T a = v < 0 ? -v : v;
        if (!have_best || a < best) {
          best = a;
          have_best = true;
          res.min_value = to_double(a);
          res.argmin = g;
          res.argmin_l1 = l1;
        }
        const double cp = to_double(a) * std::pow(static_cast<double>(l1), res.b_prime);
        if (cp < res.c_prime) {
          res.c_prime = cp;
          res.c_prime_argmin = g;
        }
      }
    }
    std::size_t c = m;
    while (c > 0) {
      --c;
      if (g[c] < ranges[c]) {
        ++g[c];
        break;
      }
      g[c] = -ranges[c];
      if (c == 0) return;
    }
    if (m == 0) return;
  }
}

std::vector<Int> gamma_ranges(std::size_t p, int B) {
  std::vector<Int> r;
  for (std::size_t i = 0; i < p; ++i) r.push_back(B);
  for (std::size_t i = 0; i < p; ++i)
    for (std::size_t j = i + 1; j < p; ++j) r.push_back(2 * static_cast<Int>(B));
  return r;
}

void check_probe_args(std::size_t p, std::size_t dim0, int B) {
  if (p == 0) throw std::invalid_argument("gram_diophantine_probe: no generators");
  if (dim0 == 0) throw std::invalid_argument("gram_diophantine_probe: empty generator");
  if (B < 1) throw std::invalid_argument("gram_diophantine_probe: beta_bound must be >= 1");
}

}  // namespace

DivisorSurvey survey_divisors(const ModeSet& modes_in, int sigma, double b) {
  ModeSet storage;
  const ModeSet& modes = with_sigma(modes_in, sigma, storage);
  const std::vector<double> lb = log_brackets(modes);
  const double s2 = static_cast<double>(modes.scale()) * static_cast<double>(modes.scale());
  DivisorSurvey out;
  out.sigma = sigma;
  out.weight_exponent = b;
  for_each_tuple(modes, [&](std::span<const std::size_t> idx, Int defect, const WaveVector&) {
    ++out.tuples_scanned;
    if (defect == 0) return;
    ++out.nonresonant;
    const Int ad = defect < 0 ? -defect : defect;
    const double delta = static_cast<double>(ad) / s2;
    if (out.min_defect == 0 || ad < out.min_defect) {
      out.min_defect = ad;
      out.min_delta = delta;
      out.argmin.assign(idx.begin(), idx.end());
    }
    double lw = 0.0;
    for (std::size_t i : idx) lw += lb[i];
    out.weighted_min = std::min(out.weighted_min, delta * std::exp(b * lw));
  });
  return out;
}

std::vector<BoundFit> fit_generalized_bound(const ModeSet& modes_in, int sigma,
                                            const std::vector<double>& b_grid) {
  for (double b : b_grid)
    if (!(b >= 0.0)) throw std::invalid_argument("fit_generalized_bound: b must be >= 0");
  ModeSet storage;
  const ModeSet& modes = with_sigma(modes_in, sigma, storage);
  const std::vector<double> lb = log_brackets(modes);
  const double s2 = static_cast<double>(modes.scale()) * static_cast<double>(modes.scale());
  std::vector<BoundFit> fits;
  for (double b : b_grid) fits.push_back({b, std::numeric_limits<double>::infinity(), {}});
  for_each_tuple(modes, [&](std::span<const std::size_t> idx, Int defect, const WaveVector&) {
    if (defect == 0) return;
    const double delta = static_cast<double>(defect < 0 ? -defect : defect) / s2;
    double lw = 0.0;
    for (std::size_t i : idx) lw += lb[i];
    for (auto& f : fits) {
      const double v = delta * std::exp(f.b * lw);
      if (v < f.c) {
        f.c = v;
        f.argmin.assign(idx.begin(), idx.end());
      }
    }
  });
  return fits;
}

GramProbeResult gram_diophantine_probe(const std::vector<std::vector<double>>& generators,
                                       int beta_bound, double b_prime, std::uint64_t budget) {
  const std::size_t p = generators.size();
  check_probe_args(p, p ? generators[0].size() : 0, beta_bound);
  for (const auto& g : generators)
    if (g.size() != generators[0].size()) throw DimensionMismatch("gram_diophantine_probe: generator dimension");
  using LD = long double;
  std::vector<LD> w;
  LD gmax = 0;
  auto gram = [&](std::size_t i, std::size_t j) {
    LD s = 0;
    for (std::size_t a = 0; a < generators[i].size(); ++a)
      s += static_cast<LD>(generators[i][a]) * static_cast<LD>(generators[j][a]);
    return s;
  };
  for (std::size_t i = 0; i < p; ++i) w.push_back(gram(i, i));
  for (std::size_t i = 0; i < p; ++i)
    for (std::size_t j = i + 1; j < p; ++j) w.push_back(gram(i, j));
  for (LD v : w) gmax = std::max(gmax, v < 0 ? -v : v);

  GramProbeResult res;
  res.generators = p;
  res.beta_bound = beta_bound;
  res.b_prime = b_prime;
  res.budget = budget;
  res.exact = false;
  // Values at the level of accumulated rounding count as exact relations.
  const LD tol = 64 * std::numeric_limits<LD>::epsilon() * (gmax > 0 ? gmax : 1);
  LD best = 0;
  scan_gamma<LD>(
      w, gamma_ranges(p, beta_bound), res,
      [&](LD v, Int l1) { return (v < 0 ? -v : v) <= tol * static_cast<LD>(l1); },
      [](LD v) { return static_cast<double>(v); }, best);
  return res;
}

GramProbeResult gram_diophantine_probe(const std::vector<std::vector<Rational>>& generators,
                                       int beta_bound, double b_prime, std::uint64_t budget) {
  const std::size_t p = generators.size();
  check_probe_args(p, p ? generators[0].size() : 0, beta_bound);
  for (const auto& g : generators)
    if (g.size() != generators[0].size()) throw DimensionMismatch("gram_diophantine_probe: generator dimension");
  std::vector<Rational> G;
  auto gram = [&](std::size_t i, std::size_t j) {
    Rational s = 0;
    for (std::size_t a = 0; a < generators[i].size(); ++a) s += generators[i][a] * generators[j][a];
    return s;
  };
  for (std::size_t i = 0; i < p; ++i) G.push_back(gram(i, i));
  for (std::size_t i = 0; i < p; ++i)
    for (std::size_t j = i + 1; j < p; ++j) G.push_back(gram(i, j));
  Int q = 1;
  for (const auto& v : G) q = std::lcm(q, v.denominator());
  std::vector<Int> w;
  for (const auto& v : G) w.push_back(v.numerator() * (q / v.denominator()));

  GramProbeResult res;
  res.generators = p;
  res.beta_bound = beta_bound;
  res.b_prime = b_prime;
  res.budget = budget;
  res.exact = true;
  Int best = 0;
  const double qd = static_cast<double>(q);
  scan_gamma<Int>(
      w, gamma_ranges(p, beta_bound), res, [](Int v, Int) { return v == 0; },
      [qd](Int v) { return static_cast<double>(v) / qd; }, best);
  if (std::isfinite(res.min_value)) res.min_value_exact = rational_to_string(Rational(best, q));
  return res;
}

}  // namespace wkbgo

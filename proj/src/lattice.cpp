#include "wkbgo/lattice.hpp"

#include "wkbgo/errors.hpp"

#include <algorithm>
#include <map>
#include <numeric>
#include <sstream>
#include <stdexcept>

namespace wkbgo {

namespace {

void require_same_dim(const WaveVector& a, const WaveVector& b) {
  if (a.dim() != b.dim())
    throw DimensionMismatch("wave vectors of dimension " + std::to_string(a.dim()) + " and " +
                            std::to_string(b.dim()));
}

void require_same_dim(std::span<const WaveVector> vs) {
  for (const auto& v : vs) require_same_dim(vs.front(), v);
}

}  // namespace

Int WaveVector::dot(const WaveVector& other) const {
  require_same_dim(*this, other);
  Int s = 0;
  for (std::size_t i = 0; i < coords_.size(); ++i) s += coords_[i] * other.coords_[i];
  return s;
}

Int WaveVector::sup_norm() const {
  Int m = 0;
  for (Int c : coords_) m = std::max(m, c < 0 ? -c : c);
  return m;
}

WaveVector& WaveVector::operator+=(const WaveVector& other) {
  require_same_dim(*this, other);
  for (std::size_t i = 0; i < coords_.size(); ++i) coords_[i] += other.coords_[i];
  return *this;
}

WaveVector& WaveVector::operator-=(const WaveVector& other) {
  require_same_dim(*this, other);
  for (std::size_t i = 0; i < coords_.size(); ++i) coords_[i] -= other.coords_[i];
  return *this;
}

WaveVector operator*(Int s, WaveVector v) {
  for (auto& c : v.coords_) c *= s;
  return v;
}

std::string WaveVector::to_string() const {
  std::ostringstream os;
  os << '(';
  for (std::size_t i = 0; i < coords_.size(); ++i) os << (i ? "," : "") << coords_[i];
  os << ')';
  return os.str();
}

WaveVector zero_vector(int dim) { return WaveVector(std::vector<Int>(static_cast<std::size_t>(dim), 0)); }

Phase::Phase(WaveVector k) : kappa(std::move(k)), omega(kappa.norm2(), 2) {}

double Phase::value(double t, std::span<const double> x) const {
  if (static_cast<int>(x.size()) != kappa.dim()) throw DimensionMismatch("Phase::value: point dimension");
  double s = 0.0;
  for (int i = 0; i < kappa.dim(); ++i) s += static_cast<double>(kappa[i]) * x[static_cast<std::size_t>(i)];
  return s - t * boost::rational_cast<double>(omega);
}

ModeSet ModeSet::from_vectors(std::vector<WaveVector> vectors, int sigma, Int scale) {
  if (vectors.empty()) throw std::invalid_argument("ModeSet: empty vector list");
  if (sigma < 1) throw std::invalid_argument("ModeSet: sigma must be >= 1");
  if (scale < 1) throw std::invalid_argument("ModeSet: scale must be >= 1");
  require_same_dim(vectors);
  if (vectors.front().dim() < 1) throw std::invalid_argument("ModeSet: dimension must be >= 1");
  ModeSet m;
  m.dim_ = vectors.front().dim();
  m.sigma_ = sigma;
  m.scale_ = scale;
  m.saturated_ = false;
  m.generations_.assign(vectors.size(), 0);
  m.vectors_ = std::move(vectors);
  m.sort_canonical();
  for (std::size_t i = 1; i < m.vectors_.size(); ++i)
    if (m.vectors_[i] == m.vectors_[i - 1])
      throw std::invalid_argument("ModeSet: duplicate vector " + m.vectors_[i].to_string());
  return m;
}

void ModeSet::sort_canonical() {
  std::vector<std::size_t> order(vectors_.size());
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(),
            [&](std::size_t a, std::size_t b) { return vectors_[a] < vectors_[b]; });
  std::vector<WaveVector> v;
  std::vector<int> g;
  v.reserve(order.size());
  g.reserve(order.size());
  for (std::size_t i : order) {
    v.push_back(std::move(vectors_[i]));
    g.push_back(generations_[i]);
  }
  vectors_ = std::move(v);
  generations_ = std::move(g);
}

std::optional<std::size_t> ModeSet::index_of(const WaveVector& v) const {
  auto it = std::lower_bound(vectors_.begin(), vectors_.end(), v);
  if (it == vectors_.end() || *it != v) return std::nullopt;
  return static_cast<std::size_t>(it - vectors_.begin());
}

std::vector<Rational> ModeSet::user_vector(std::size_t i) const {
  std::vector<Rational> out;
  for (Int c : vectors_.at(i).coords()) out.emplace_back(c, scale_);
  return out;
}

double ModeSet::user_norm2(std::size_t i) const {
  const double s = static_cast<double>(scale_);
  return static_cast<double>(vectors_.at(i).norm2()) / (s * s);
}

IntegerizedVectors integerize(const std::vector<std::vector<Rational>>& vectors) {
  IntegerizedVectors out;
  Int l = 1;
  for (const auto& v : vectors)
    for (const auto& c : v) l = std::lcm(l, c.denominator());
  out.scale = l;
  for (const auto& v : vectors) {
    std::vector<Int> coords;
    for (const auto& c : v) coords.push_back(c.numerator() * (l / c.denominator()));
    out.vectors.emplace_back(std::move(coords));
  }
  return out;
}

WaveVector alternating_sum(std::span<const WaveVector> vectors) {
  if (vectors.empty()) throw std::invalid_argument("alternating_sum: empty list");
  require_same_dim(vectors);
  WaveVector s = zero_vector(vectors.front().dim());
  for (std::size_t p = 0; p < vectors.size(); ++p) {
    if (p % 2 == 0)
      s += vectors[p];
    else
      s -= vectors[p];
  }
  return s;
}

Int resonance_defect(std::span<const WaveVector> vectors) {
  if (vectors.size() % 2 == 0)
    throw std::invalid_argument("resonance_defect: list length must be odd");
  const WaveVector s = alternating_sum(vectors);
  Int signed_norms = 0;
  for (std::size_t p = 0; p < vectors.size(); ++p)
    signed_norms += (p % 2 == 0 ? 1 : -1) * vectors[p].norm2();
  return s.norm2() - signed_norms;
}

std::optional<WaveVector> complete_rectangle(const WaveVector& k, const WaveVector& l,
                                             const WaveVector& m) {
  require_same_dim(k, l);
  require_same_dim(k, m);
  if (k == l || m == l) return std::nullopt;
  if ((l - m).dot(l - k) != 0) return std::nullopt;
  return k - l + m;
}

namespace {

struct ScanState {
  const std::vector<WaveVector>* set = nullptr;
  const std::vector<char>* fresh = nullptr;
  const std::vector<std::size_t>* fresh_list = nullptr;
  bool require_fresh = false;
  std::size_t arity = 3;
  Int sup_limit = 0;
  std::uint64_t budget = 0;
  std::uint64_t scanned = 0;
  bool budget_hit = false;
  bool sup_rejected = false;
  std::vector<std::size_t> idx;
  std::vector<Int> sum;
  std::map<WaveVector, std::vector<std::size_t>> created;
  const std::vector<WaveVector>* sorted = nullptr;

  bool in_set(const WaveVector& v) const {
    return std::binary_search(sorted->begin(), sorted->end(), v);
  }

  void leaf(Int signed_norms) {
    ++scanned;
    Int s2 = 0;
    for (Int c : sum) s2 += c * c;
    if (s2 != signed_norms) return;
    WaveVector v(sum);
    if (in_set(v)) return;
    if (v.sup_norm() > sup_limit) {
      sup_rejected = true;
      return;
    }
    created.try_emplace(std::move(v), idx);
  }

  bool level(std::size_t pos, Int signed_norms, bool has_fresh) {
    if (budget_hit) return false;
    if (pos == arity) {
      if (scanned >= budget) {
        budget_hit = true;
        return false;
      }
      leaf(signed_norms);
      return true;
    }
    const Int sign = pos % 2 == 0 ? 1 : -1;
    const std::size_t d = sum.size();
    auto visit = [&](std::size_t i) {
      const WaveVector& k = (*set)[i];
      idx[pos] = i;
      for (std::size_t a = 0; a < d; ++a) sum[a] += sign * k[static_cast<int>(a)];
      const bool ok = level(pos + 1, signed_norms + sign * k.norm2(), has_fresh || (*fresh)[i]);
      for (std::size_t a = 0; a < d; ++a) sum[a] -= sign * k[static_cast<int>(a)];
      return ok;
    };
    // Semi-naive pruning: tuples built only from old vectors were already scanned.
    if (require_fresh && !has_fresh && pos + 1 == arity) {
      for (std::size_t i : *fresh_list)
        if (!visit(i)) return false;
    } else {
      for (std::size_t i = 0; i < set->size(); ++i)
        if (!visit(i)) return false;
    }
    return true;
  }
};

}  // namespace

ModeSet close_under_resonances(const std::vector<WaveVector>& initial, int sigma,
                               const ClosureLimits& limits, Int scale) {
  if (limits.max_generations < 0 || limits.max_sup_norm < 1)
    throw std::invalid_argument("close_under_resonances: limits must be positive");
  ModeSet out = ModeSet::from_vectors(initial, sigma, scale);

  // Insertion-ordered working set: index i keeps its meaning across generations.
  std::vector<WaveVector> set = out.vectors_;
  std::vector<int> gen(set.size(), 0);
  std::vector<char> fresh(set.size(), 1);
  std::vector<WaveVector> sorted = set;
  const Int sup_limit = limits.max_sup_norm * scale;
  bool sup_rejected_any = false;
  bool budget_hit = false;
  bool fixed_point = false;

  auto scan = [&](bool require_fresh) {
    ScanState st;
    std::vector<std::size_t> fresh_list;
    for (std::size_t i = 0; i < set.size(); ++i)
      if (fresh[i]) fresh_list.push_back(i);
    st.set = &set;
    st.fresh = &fresh;
    st.fresh_list = &fresh_list;
    st.require_fresh = require_fresh;
    st.arity = 2 * static_cast<std::size_t>(sigma) + 1;
    st.sup_limit = sup_limit;
    st.budget = limits.max_tuples_per_generation;
    st.idx.assign(st.arity, 0);
    st.sum.assign(static_cast<std::size_t>(out.dim_), 0);
    st.sorted = &sorted;
    st.level(0, 0, false);
    return st;
  };

  for (int g = 1;; ++g) {
    ScanState st = scan(g > 1);
    sup_rejected_any = sup_rejected_any || st.sup_rejected;
    if (st.budget_hit) {
      budget_hit = true;
      break;
    }
    if (st.created.empty()) {
      fixed_point = true;
      break;
    }
    if (g > limits.max_generations) break;  // verification scan found growth
    std::fill(fresh.begin(), fresh.end(), 0);
    for (auto& [v, tuple] : st.created) {
      CreationEdge e;
      e.generation = g;
      for (std::size_t i : tuple) e.tuple.push_back(set[i]);
      e.created = v;
      out.edges_.push_back(std::move(e));
      set.push_back(v);
      gen.push_back(g);
      fresh.push_back(1);
    }
    sorted = set;
    std::sort(sorted.begin(), sorted.end());
  }

  out.vectors_ = set;
  out.generations_ = gen;
  out.sort_canonical();
  out.saturated_ = fixed_point && !sup_rejected_any;
  if (budget_hit)
    out.warnings_.push_back("closure: tuple budget of " +
                            std::to_string(limits.max_tuples_per_generation) +
                            " per generation exhausted; set truncated");
  if (!fixed_point && !budget_hit)
    out.warnings_.push_back("closure: max_generations=" + std::to_string(limits.max_generations) +
                            " reached before a fixed point; set truncated");
  if (sup_rejected_any)
    out.warnings_.push_back("closure: resonant vectors beyond max_sup_norm=" +
                            std::to_string(limits.max_sup_norm) + " were discarded; set truncated");
  return out;
}

std::vector<ResonantTuple> enumerate_interactions(const ModeSet& modes, std::size_t j) {
  if (j >= modes.size()) throw std::out_of_range("enumerate_interactions: index out of range");
  const std::size_t arity = 2 * static_cast<std::size_t>(modes.sigma()) + 1;
  const std::size_t n = modes.size();
  const std::size_t d = static_cast<std::size_t>(modes.dim());
  const WaveVector& target = modes[j];
  std::vector<ResonantTuple> out;
  std::vector<std::size_t> idx(arity, 0);
  std::vector<Int> partial(d, 0);

  // Odometer over the first 2 sigma indices; the last is solved for.
  auto recurse = [&](auto&& self, std::size_t pos, Int signed_norms) -> void {
    if (pos + 1 == arity) {
      std::vector<Int> last(d);
      for (std::size_t a = 0; a < d; ++a) last[a] = target[static_cast<int>(a)] - partial[a];
      const WaveVector lv(std::move(last));
      auto li = modes.index_of(lv);
      if (!li) return;
      if (target.norm2() != signed_norms + lv.norm2()) return;
      idx[pos] = *li;
      out.push_back({idx, j});
      return;
    }
    const Int sign = pos % 2 == 0 ? 1 : -1;
    for (std::size_t i = 0; i < n; ++i) {
      const WaveVector& k = modes[i];
      idx[pos] = i;
      for (std::size_t a = 0; a < d; ++a) partial[a] += sign * k[static_cast<int>(a)];
      self(self, pos + 1, signed_norms + sign * k.norm2());
      for (std::size_t a = 0; a < d; ++a) partial[a] -= sign * k[static_cast<int>(a)];
    }
  };
  recurse(recurse, 0, 0);
  return out;
}

InteractionTable::InteractionTable(const ModeSet& modes)
    : sigma_(modes.sigma()), arity_(2 * static_cast<std::size_t>(modes.sigma()) + 1) {
  std::vector<std::vector<std::uint32_t>> per(modes.size());
  for_each_tuple(modes, [&](std::span<const std::size_t> idx, Int defect, const WaveVector& s) {
    if (defect != 0) return;
    auto j = modes.index_of(s);
    if (!j) return;
    for (std::size_t i : idx) per[*j].push_back(static_cast<std::uint32_t>(i));
  });
  offsets_.assign(modes.size() + 1, 0);
  for (std::size_t j = 0; j < modes.size(); ++j) offsets_[j + 1] = offsets_[j] + per[j].size();
  flat_.reserve(offsets_.back());
  for (auto& v : per) flat_.insert(flat_.end(), v.begin(), v.end());
}

}  // namespace wkbgo

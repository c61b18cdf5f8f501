#pragma once

#include <boost/rational.hpp>

#include <compare>
#include <cstddef>
#include <cstdint>
#include <initializer_list>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace wkbgo {

using Int = std::int64_t;
using Rational = boost::rational<Int>;

/// Integer lattice vector. Dimension is fixed at construction.
class WaveVector {
public:
  WaveVector() = default;
  explicit WaveVector(std::vector<Int> coords) : coords_(std::move(coords)) {}
  WaveVector(std::initializer_list<Int> coords) : coords_(coords) {}

  int dim() const { return static_cast<int>(coords_.size()); }
  Int operator[](int i) const { return coords_[static_cast<std::size_t>(i)]; }
  const std::vector<Int>& coords() const { return coords_; }

  Int dot(const WaveVector& other) const;
  Int norm2() const { return dot(*this); }
  Int sup_norm() const;

  WaveVector& operator+=(const WaveVector& other);
  WaveVector& operator-=(const WaveVector& other);
  friend WaveVector operator+(WaveVector a, const WaveVector& b) { return a += b; }
  friend WaveVector operator-(WaveVector a, const WaveVector& b) { return a -= b; }
  friend WaveVector operator*(Int s, WaveVector v);

  friend bool operator==(const WaveVector&, const WaveVector&) = default;
  friend std::strong_ordering operator<=>(const WaveVector& a, const WaveVector& b) {
    return a.coords_ <=> b.coords_;
  }

  std::string to_string() const;

private:
  std::vector<Int> coords_;
};

WaveVector zero_vector(int dim);

/// Characteristic plane-wave phase kappa.x - t|kappa|^2/2.
struct Phase {
  WaveVector kappa;
  Rational omega;  // |kappa|^2 / 2

  explicit Phase(WaveVector k);
  double value(double t, std::span<const double> x) const;
};

/// One element of I_j: kappa_{l1} - kappa_{l2} + ... + kappa_{l_{2s+1}} = kappa_j
/// with vanishing resonance defect.
struct ResonantTuple {
  std::vector<std::size_t> indices;
  std::size_t target = 0;
  friend bool operator==(const ResonantTuple&, const ResonantTuple&) = default;
};

/// Record of the first tuple (in scan order) that created a vector during closure.
struct CreationEdge {
  int generation = 0;
  std::vector<WaveVector> tuple;
  WaveVector created;
};

struct ClosureLimits {
  int max_generations = 8;
  Int max_sup_norm = 64;
  /// Upper bound on tuples scanned in one generation.
  std::uint64_t max_tuples_per_generation = 200'000'000;
};

/// Canonically ordered set of distinct lattice vectors (the index set J).
/// Index i refers to the i-th vector in lexicographic order.
class ModeSet {
public:
  ModeSet() = default;

  /// Builds a set from integer vectors, all tagged generation 0. Duplicates
  /// are rejected.
  static ModeSet from_vectors(std::vector<WaveVector> vectors, int sigma, Int scale = 1);

  int dim() const { return dim_; }
  int sigma() const { return sigma_; }
  /// Integer coordinates are user coordinates times scale().
  Int scale() const { return scale_; }
  bool saturated() const { return saturated_; }
  std::size_t size() const { return vectors_.size(); }
  bool empty() const { return vectors_.empty(); }

  const std::vector<WaveVector>& vectors() const { return vectors_; }
  const WaveVector& operator[](std::size_t i) const { return vectors_[i]; }
  int generation(std::size_t i) const { return generations_[i]; }
  const std::vector<int>& generations() const { return generations_; }
  const std::vector<CreationEdge>& edges() const { return edges_; }
  const std::vector<std::string>& warnings() const { return warnings_; }

  std::optional<std::size_t> index_of(const WaveVector& v) const;
  bool contains(const WaveVector& v) const { return index_of(v).has_value(); }
  /// Coordinates of vector i in user units (integer coordinates / scale).
  std::vector<Rational> user_vector(std::size_t i) const;
  /// |kappa_i|^2 in user units.
  double user_norm2(std::size_t i) const;

private:
  friend ModeSet close_under_resonances(const std::vector<WaveVector>&, int,
                                        const ClosureLimits&, Int);
  void sort_canonical();

  int dim_ = 0;
  int sigma_ = 1;
  Int scale_ = 1;
  bool saturated_ = false;
  std::vector<WaveVector> vectors_;
  std::vector<int> generations_;
  std::vector<CreationEdge> edges_;
  std::vector<std::string> warnings_;
};

/// Rational input vectors brought to a common integer lattice.
struct IntegerizedVectors {
  std::vector<WaveVector> vectors;
  Int scale = 1;
};
IntegerizedVectors integerize(const std::vector<std::vector<Rational>>& vectors);

/// |sum_p (-1)^{p+1} k_p|^2 - sum_p (-1)^{p+1} |k_p|^2, exactly.
/// Throws for even-length lists and mixed dimensions.
Int resonance_defect(std::span<const WaveVector> vectors);

/// Alternating sum k_1 - k_2 + k_3 - ...
WaveVector alternating_sum(std::span<const WaveVector> vectors);

/// Fourth corner k - l + m of the rectangle with l opposite the result, or
/// nothing when (k,l,m) is non-resonant or degenerate (k == l or m == l).
std::optional<WaveVector> complete_rectangle(const WaveVector& k, const WaveVector& l,
                                             const WaveVector& m);

/// Closes `initial` under (2 sigma + 1)-wave resonant creation. Limit
/// exhaustion is reported through saturated() == false and warnings().
ModeSet close_under_resonances(const std::vector<WaveVector>& initial, int sigma,
                               const ClosureLimits& limits = {}, Int scale = 1);

/// All ordered tuples of I_j^sigma for target index j.
std::vector<ResonantTuple> enumerate_interactions(const ModeSet& modes, std::size_t j);

/// Flattened resonant sets for every target, shared by the profile integrators.
class InteractionTable {
public:
  InteractionTable() = default;
  explicit InteractionTable(const ModeSet& modes);

  int sigma() const { return sigma_; }
  std::size_t arity() const { return arity_; }
  std::size_t modes() const { return offsets_.empty() ? 0 : offsets_.size() - 1; }
  std::size_t count(std::size_t j) const { return (offsets_[j + 1] - offsets_[j]) / arity_; }
  std::size_t total() const { return flat_.size() / (arity_ == 0 ? 1 : arity_); }
  /// Tuple t of target j as arity() consecutive mode indices.
  std::span<const std::uint32_t> tuple(std::size_t j, std::size_t t) const {
    return {flat_.data() + offsets_[j] + t * arity_, arity_};
  }
  std::span<const std::uint32_t> tuples(std::size_t j) const {
    return {flat_.data() + offsets_[j], offsets_[j + 1] - offsets_[j]};
  }

private:
  int sigma_ = 1;
  std::size_t arity_ = 3;
  std::vector<std::size_t> offsets_;
  std::vector<std::uint32_t> flat_;
};

/// Visits every tuple in J^{2 sigma + 1} together with its defect and
/// alternating sum. Used by the remainder and small-divisor surveys.
template <class Visitor>
void for_each_tuple(const ModeSet& modes, Visitor&& visit);

}  // namespace wkbgo

#include "wkbgo/detail/tuple_scan.hpp"

#pragma once

#include "wkbgo/lattice.hpp"

#include <cstdint>
#include <limits>
#include <string>
#include <vector>

namespace wkbgo {

struct DivisorSurvey {
  int sigma = 1;
  std::uint64_t tuples_scanned = 0;
  std::uint64_t nonresonant = 0;
  /// Smallest |defect| in user units; +inf when every tuple is resonant.
  double min_delta = std::numeric_limits<double>::infinity();
  std::vector<std::size_t> argmin;
  /// min of delta * prod_p <kappa_{l_p}>^b for the b passed to survey_divisors.
  double weight_exponent = 0.0;
  double weighted_min = std::numeric_limits<double>::infinity();
  /// Exact minimum |defect| on the integer lattice (before dividing by scale^2).
  Int min_defect = 0;

  bool all_resonant() const { return nonresonant == 0; }
};

/// Scans J^{2 sigma + 1}; only tuples with nonzero defect contribute.
DivisorSurvey survey_divisors(const ModeSet& modes, int sigma, double b = 0.0);

struct BoundFit {
  double b = 0.0;
  /// Largest admissible c on the truncated set; +inf when no tuple is non-resonant.
  double c = std::numeric_limits<double>::infinity();
  std::vector<std::size_t> argmin;
};

/// For each b, min over non-resonant tuples of delta * prod_p <kappa_{l_p}>^b
/// with <k>^2 = 1 + |k|^2 in user units.
std::vector<BoundFit> fit_generalized_bound(const ModeSet& modes, int sigma,
                                            const std::vector<double>& b_grid);

struct GramProbeResult {
  std::size_t generators = 0;
  int beta_bound = 0;
  double b_prime = 0.0;
  std::uint64_t budget = 0;
  std::uint64_t scanned = 0;
  bool partial = false;
  bool exact = false;
  /// gamma vectors (up to sign) with sum gamma G equal to zero.
  std::uint64_t zero_relations = 0;
  /// Smallest nonzero |sum beta_ij G_ij|.
  double min_value = std::numeric_limits<double>::infinity();
  std::string min_value_exact;  // "p/q" when the input is rational
  /// Minimizer as gamma: diagonal entries, then gamma_ij = beta_ij + beta_ji for i < j.
  std::vector<Int> argmin;
  Int argmin_l1 = 0;
  /// min over nonzero relations of |sum beta G| (sum |beta|)^{b'}.
  double c_prime = std::numeric_limits<double>::infinity();
  std::vector<Int> c_prime_argmin;
};

inline constexpr std::uint64_t kDefaultGramBudget = 10'000'000;

/// Exhaustive scan of integer beta with |beta_ij| <= B, reduced to the symmetric
/// combinations gamma seen by the symmetric Gram matrix and to one sign per pair
/// {gamma, -gamma}. The l1 weight of gamma is the smallest sum |beta| realizing it.
GramProbeResult gram_diophantine_probe(const std::vector<std::vector<double>>& generators,
                                       int beta_bound, double b_prime,
                                       std::uint64_t budget = kDefaultGramBudget);
/// Exact variant for rational generators.
GramProbeResult gram_diophantine_probe(const std::vector<std::vector<Rational>>& generators,
                                       int beta_bound, double b_prime,
                                       std::uint64_t budget = kDefaultGramBudget);

}  // namespace wkbgo

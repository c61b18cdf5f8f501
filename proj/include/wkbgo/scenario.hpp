#pragma once

#include "wkbgo/lattice.hpp"
#include "wkbgo/pipeline.hpp"
#include "wkbgo/profiles.hpp"
#include "wkbgo/small_divisors.hpp"

#include <json.hpp>

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

namespace wkbgo {

inline constexpr const char* kScenarioSchema = "wkbgo-scenario/1";

struct ModeSpec {
  std::vector<Rational> kappa;
  Complex amplitude{0.0, 0.0};
  std::optional<GaussianProfile> profile;  // Euclidean domains only
};

enum class DomainType { torus, euclid };

struct ProfilesOptions {
  double t_final = 1.0;
  double dt = 1e-3;
  std::string oracle = "none";  // none | explicit_torus_1d | explicit_two_mode | explicit_euclid_1d
  std::size_t record_every = 0;
  bool snapshots = false;
};

struct GramOptions {
  bool exact = false;
  std::vector<std::vector<Rational>> rational_generators;
  std::vector<std::vector<double>> real_generators;
  int beta_bound = 6;
  double b_prime = 1.0;
  std::uint64_t budget = kDefaultGramBudget;
};

struct SmallDivOptions {
  std::vector<double> b_grid{0.0, 0.5, 1.0, 2.0};
  std::optional<GramOptions> gram;
};

struct Scenario {
  std::string name;
  int dimension = 1;
  int sigma = 1;
  double lambda = 1.0;
  DomainType domain = DomainType::torus;
  EuclidGrid grid;
  std::vector<ModeSpec> modes;
  ClosureLimits closure;
  std::string experiment;  // converge | instability | smalldiv | profiles | closure
  ConvergenceOptions converge;
  InstabilityParams instability;
  SmallDivOptions smalldiv;
  ProfilesOptions profiles;

  /// Initial vectors on the common integer lattice.
  IntegerizedVectors integer_modes() const;
  std::vector<Complex> amplitudes() const;
};

/// Validates and fills defaults. Errors carry the JSON path of the offending field.
Scenario parse_scenario(const nlohmann::json& j);
Scenario parse_scenario_text(const std::string& text);

/// Every parameter, defaults included, in scenario layout.
nlohmann::json resolved_json(const Scenario& s);

/// Accepts a number or a "1/N" string; 1/eps must be a positive integer.
double parse_eps(const nlohmann::json& j, const std::string& where);

std::string read_text_file(const std::filesystem::path& path);

}  // namespace wkbgo

#pragma once

#include "wkbgo/lattice.hpp"

#include <json.hpp>

#include <string>
#include <vector>

namespace wkbgo {

/// Accepts an integer or a "p/q" string. `where` names the field for errors.
Rational parse_rational(const nlohmann::json& j, const std::string& where);
std::string rational_to_string(const Rational& r);

/// Parses a vector of exactly `dim` rational coordinates (dim < 0: any length).
std::vector<Rational> parse_rational_vector(const nlohmann::json& j, int dim,
                                            const std::string& where);

struct ModeSetDocument {
  int dimension = 1;
  int sigma = 1;
  std::vector<std::vector<Rational>> vectors;
};

/// {dimension, sigma, vectors: [[int or "p/q", ...], ...]}
ModeSetDocument parse_modeset_document(const nlohmann::json& j);
ModeSetDocument parse_modeset_document(const std::string& text);

/// Same layout plus scale, saturated, generations and warnings. Coordinates
/// are in user units.
nlohmann::json modeset_to_json(const ModeSet& modes);

/// One row per creation edge: generation, tuple vectors, created vector.
std::string edges_csv(const ModeSet& modes);

/// Vector i of `modes` in user units, as a JSON array.
nlohmann::json user_vector_json(const ModeSet& modes, std::size_t i);
std::string user_vector_string(const ModeSet& modes, const WaveVector& v);

}  // namespace wkbgo

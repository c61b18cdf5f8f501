#include "wkbgo/lattice_io.hpp"

#include "wkbgo/errors.hpp"

#include <charconv>
#include <sstream>

namespace wkbgo {

namespace {

Int parse_int(std::string_view s, const std::string& where) {
  Int v = 0;
  if (!s.empty() && s.front() == '+') s.remove_prefix(1);
  auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || p != s.data() + s.size() || s.empty())
    throw ParseError(where, "expected an integer, got \"" + std::string(s) + "\"");
  return v;
}

}  // namespace

Rational parse_rational(const nlohmann::json& j, const std::string& where) {
  if (j.is_number_integer()) return Rational(j.get<Int>());
  if (j.is_number_float()) {
    const double x = j.get<double>();
    const Int r = static_cast<Int>(x);
    if (static_cast<double>(r) != x)
      throw ParseError(where, "non-integer number; write rationals as \"p/q\"");
    return Rational(r);
  }
  if (j.is_string()) {
    const std::string s = j.get<std::string>();
    const auto slash = s.find('/');
    if (slash == std::string::npos) return Rational(parse_int(s, where));
    const Int num = parse_int(std::string_view(s).substr(0, slash), where);
    const Int den = parse_int(std::string_view(s).substr(slash + 1), where);
    if (den == 0) throw ParseError(where, "zero denominator");
    return Rational(num, den);
  }
  throw ParseError(where, "expected an integer or a \"p/q\" string");
}

std::string rational_to_string(const Rational& r) {
  if (r.denominator() == 1) return std::to_string(r.numerator());
  return std::to_string(r.numerator()) + "/" + std::to_string(r.denominator());
}

std::vector<Rational> parse_rational_vector(const nlohmann::json& j, int dim,
                                            const std::string& where) {
  if (!j.is_array()) throw ParseError(where, "expected an array");
  if (dim >= 0 && j.size() != static_cast<std::size_t>(dim))
    throw ParseError(where, "expected " + std::to_string(dim) + " coordinates, got " +
                                std::to_string(j.size()));
  std::vector<Rational> out;
  for (std::size_t i = 0; i < j.size(); ++i)
    out.push_back(parse_rational(j[i], where + "[" + std::to_string(i) + "]"));
  return out;
}

ModeSetDocument parse_modeset_document(const nlohmann::json& j) {
  if (!j.is_object()) throw ParseError("$", "expected an object");
  ModeSetDocument doc;
  if (!j.contains("dimension") || !j["dimension"].is_number_integer())
    throw ParseError("dimension", "missing or not an integer");
  doc.dimension = j["dimension"].get<int>();
  if (doc.dimension < 1) throw ParseError("dimension", "must be >= 1");
  if (!j.contains("sigma") || !j["sigma"].is_number_integer())
    throw ParseError("sigma", "missing or not an integer");
  doc.sigma = j["sigma"].get<int>();
  if (doc.sigma < 1) throw ParseError("sigma", "must be >= 1");
  if (!j.contains("vectors") || !j["vectors"].is_array() || j["vectors"].empty())
    throw ParseError("vectors", "missing or empty array");
  for (std::size_t i = 0; i < j["vectors"].size(); ++i)
    doc.vectors.push_back(parse_rational_vector(j["vectors"][i], doc.dimension,
                                                "vectors[" + std::to_string(i) + "]"));
  return doc;
}

ModeSetDocument parse_modeset_document(const std::string& text) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    throw ParseError("document", e.what());
  }
  return parse_modeset_document(j);
}

nlohmann::json user_vector_json(const ModeSet& modes, std::size_t i) {
  nlohmann::json v = nlohmann::json::array();
  for (const auto& c : modes.user_vector(i)) {
    if (c.denominator() == 1)
      v.push_back(c.numerator());
    else
      v.push_back(rational_to_string(c));
  }
  return v;
}

std::string user_vector_string(const ModeSet& modes, const WaveVector& v) {
  std::string s = "(";
  for (int a = 0; a < v.dim(); ++a) {
    if (a) s += ",";
    s += rational_to_string(Rational(v[a], modes.scale()));
  }
  return s + ")";
}

nlohmann::json modeset_to_json(const ModeSet& modes) {
  nlohmann::json j;
  j["dimension"] = modes.dim();
  j["sigma"] = modes.sigma();
  j["scale"] = modes.scale();
  j["saturated"] = modes.saturated();
  j["vectors"] = nlohmann::json::array();
  j["generations"] = nlohmann::json::array();
  for (std::size_t i = 0; i < modes.size(); ++i) {
    j["vectors"].push_back(user_vector_json(modes, i));
    j["generations"].push_back(modes.generation(i));
  }
  j["warnings"] = modes.warnings();
  return j;
}

std::string edges_csv(const ModeSet& modes) {
  std::ostringstream os;
  os << "generation,tuple,created\n";
  for (const auto& e : modes.edges()) {
    os << e.generation << ",\"";
    for (std::size_t p = 0; p < e.tuple.size(); ++p)
      os << (p ? " " : "") << user_vector_string(modes, e.tuple[p]);
    os << "\",\"" << user_vector_string(modes, e.created) << "\"\n";
  }
  return os.str();
}

}  // namespace wkbgo

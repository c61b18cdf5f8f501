#include "wkbgo/scenario.hpp"

#include "wkbgo/errors.hpp"
#include "wkbgo/lattice_io.hpp"
#include "wkbgo/wiener.hpp"

#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

namespace wkbgo {

namespace {

using nlohmann::json;

void only_keys(const json& j, const std::string& where, std::initializer_list<const char*> keys) {
  if (!j.is_object()) throw ParseError(where, "expected an object");
  std::set<std::string> allowed(keys.begin(), keys.end());
  for (auto it = j.begin(); it != j.end(); ++it)
    if (!allowed.count(it.key())) throw ParseError(where + "." + it.key(), "unknown field");
}

std::string join(const std::string& where, const std::string& key) {
  return where.empty() ? key : where + "." + key;
}

double get_number(const json& j, const std::string& where) {
  if (!j.is_number()) throw ParseError(where, "expected a number");
  const double v = j.get<double>();
  if (!std::isfinite(v)) throw ParseError(where, "must be finite");
  return v;
}

long long get_integer(const json& j, const std::string& where) {
  if (!j.is_number_integer()) throw ParseError(where, "expected an integer");
  return j.get<long long>();
}

bool get_bool(const json& j, const std::string& where) {
  if (!j.is_boolean()) throw ParseError(where, "expected true or false");
  return j.get<bool>();
}

std::string get_string(const json& j, const std::string& where) {
  if (!j.is_string()) throw ParseError(where, "expected a string");
  return j.get<std::string>();
}

Complex parse_complex(const json& j, const std::string& where) {
  if (j.is_number()) return {get_number(j, where), 0.0};
  if (j.is_array()) {
    if (j.size() != 2) throw ParseError(where, "expected [re, im]");
    return {get_number(j[0], where + "[0]"), get_number(j[1], where + "[1]")};
  }
  if (j.is_object()) {
    only_keys(j, where, {"polar"});
    const json& p = j.at("polar");
    if (!p.is_array() || p.size() != 2) throw ParseError(where + ".polar", "expected [modulus, angle]");
    return std::polar(get_number(p[0], where + ".polar[0]"), get_number(p[1], where + ".polar[1]"));
  }
  throw ParseError(where, "expected a number, [re, im] or {\"polar\": [r, angle]}");
}

std::vector<double> parse_real_vector(const json& j, int dim, const std::string& where) {
  if (!j.is_array()) throw ParseError(where, "expected an array");
  if (dim >= 0 && j.size() != static_cast<std::size_t>(dim))
    throw ParseError(where, "expected " + std::to_string(dim) + " entries, got " + std::to_string(j.size()));
  std::vector<double> v;
  for (std::size_t i = 0; i < j.size(); ++i) v.push_back(get_number(j[i], where + "[" + std::to_string(i) + "]"));
  return v;
}

json complex_json(Complex z) { return json::array({z.real(), z.imag()}); }

json rational_json(const Rational& r) {
  if (r.denominator() == 1) return r.numerator();
  return rational_to_string(r);
}

bool all_exact(const json& j) {
  for (const auto& row : j)
    for (const auto& v : row)
      if (!(v.is_number_integer() || v.is_string())) return false;
  return true;
}

void parse_converge(const json& j, const std::string& w, Scenario& s) {
  only_keys(j, w, {"t_final", "eps_list", "checkpoints"});
  if (j.contains("t_final")) s.converge.t_final = get_number(j["t_final"], join(w, "t_final"));
  if (!(s.converge.t_final > 0.0)) throw ParseError(join(w, "t_final"), "must be > 0");
  if (!j.contains("eps_list") || !j["eps_list"].is_array() || j["eps_list"].empty())
    throw ParseError(join(w, "eps_list"), "missing or empty array");
  for (std::size_t i = 0; i < j["eps_list"].size(); ++i) {
    const std::string wi = join(w, "eps_list") + "[" + std::to_string(i) + "]";
    const double e = parse_eps(j["eps_list"][i], wi);
    if (!s.converge.eps_list.empty() && e >= s.converge.eps_list.back())
      throw ParseError(wi, "eps values must be strictly decreasing");
    s.converge.eps_list.push_back(e);
  }
  if (j.contains("checkpoints")) {
    s.converge.checkpoints = static_cast<int>(get_integer(j["checkpoints"], join(w, "checkpoints")));
    if (s.converge.checkpoints < 1) throw ParseError(join(w, "checkpoints"), "must be >= 1");
  }
}

void parse_solver(const json& j, const std::string& w, Scenario& s) {
  only_keys(j, w, {"dt", "n", "profile_dt", "self_check", "max_halvings", "error_budget", "jobs"});
  auto& c = s.converge;
  if (j.contains("dt")) {
    c.dt = get_number(j["dt"], join(w, "dt"));
    if (c.dt < 0.0) throw ParseError(join(w, "dt"), "must be >= 0 (0 selects eps/100)");
  }
  if (j.contains("n")) {
    c.n = static_cast<int>(get_integer(j["n"], join(w, "n")));
    if (c.n != 0 && !is_power_of_two(c.n)) throw ParseError(join(w, "n"), "must be a power of two or 0");
  }
  if (j.contains("profile_dt")) {
    c.profile_dt = get_number(j["profile_dt"], join(w, "profile_dt"));
    if (!(c.profile_dt > 0.0)) throw ParseError(join(w, "profile_dt"), "must be > 0");
  }
  if (j.contains("self_check")) c.self_check = get_bool(j["self_check"], join(w, "self_check"));
  if (j.contains("max_halvings")) {
    c.max_halvings = static_cast<int>(get_integer(j["max_halvings"], join(w, "max_halvings")));
    if (c.max_halvings < 0) throw ParseError(join(w, "max_halvings"), "must be >= 0");
  }
  if (j.contains("error_budget")) {
    c.error_budget = get_number(j["error_budget"], join(w, "error_budget"));
    if (!(c.error_budget > 0.0)) throw ParseError(join(w, "error_budget"), "must be > 0");
  }
  if (j.contains("jobs")) {
    c.jobs = static_cast<int>(get_integer(j["jobs"], join(w, "jobs")));
    if (c.jobs < 1) throw ParseError(join(w, "jobs"), "must be >= 1");
  }
}

void parse_instability(const json& j, const std::string& w, Scenario& s) {
  only_keys(j, w, {"rho", "delta", "s", "K", "variant", "theta", "grid_points", "solver_check",
                   "solver_checkpoints", "solver_dt"});
  auto& p = s.instability;
  p.sigma = s.sigma;
  p.lambda = s.lambda;
  p.dim = s.dimension;
  if (j.contains("rho")) p.rho = get_number(j["rho"], join(w, "rho"));
  if (j.contains("delta")) p.delta = get_number(j["delta"], join(w, "delta"));
  if (j.contains("s")) p.s = get_number(j["s"], join(w, "s"));
  if (j.contains("K")) p.K = get_integer(j["K"], join(w, "K"));
  if (j.contains("variant")) {
    try {
      p.variant = parse_instability_variant(get_string(j["variant"], join(w, "variant")));
    } catch (const std::invalid_argument& e) {
      throw ParseError(join(w, "variant"), e.what());
    }
  }
  if (j.contains("theta")) p.theta = get_number(j["theta"], join(w, "theta"));
  if (j.contains("grid_points")) p.grid_points = static_cast<int>(get_integer(j["grid_points"], join(w, "grid_points")));
  if (j.contains("solver_check")) p.solver_check = get_bool(j["solver_check"], join(w, "solver_check"));
  if (j.contains("solver_checkpoints"))
    p.solver_checkpoints = static_cast<int>(get_integer(j["solver_checkpoints"], join(w, "solver_checkpoints")));
  if (j.contains("solver_dt")) p.solver_dt = get_number(j["solver_dt"], join(w, "solver_dt"));
  if (!(p.rho > 0.0)) throw ParseError(join(w, "rho"), "must be > 0");
  if (!(p.delta > 0.0 && p.delta <= 1.0)) throw ParseError(join(w, "delta"), "must lie in (0, 1]");
  if (!(p.s < 0.0)) throw ParseError(join(w, "s"), "must be < 0");
  if (p.K < 1) throw ParseError(join(w, "K"), "must be a positive integer");
  if (p.grid_points < 2) throw ParseError(join(w, "grid_points"), "must be >= 2");
  if (p.solver_checkpoints < 1) throw ParseError(join(w, "solver_checkpoints"), "must be >= 1");
  if (p.solver_dt < 0.0) throw ParseError(join(w, "solver_dt"), "must be >= 0");
  if (!(p.theta >= 0.0)) throw ParseError(join(w, "theta"), "must be >= 0");
}

void parse_smalldiv(const json& j, const std::string& w, Scenario& s) {
  only_keys(j, w, {"b_grid", "gram"});
  if (j.contains("b_grid")) {
    s.smalldiv.b_grid = parse_real_vector(j["b_grid"], -1, join(w, "b_grid"));
    for (double b : s.smalldiv.b_grid)
      if (b < 0.0) throw ParseError(join(w, "b_grid"), "entries must be >= 0");
  }
  if (j.contains("gram")) {
    const std::string wg = join(w, "gram");
    const json& g = j["gram"];
    only_keys(g, wg, {"generators", "beta_bound", "b_prime", "budget"});
    GramOptions o;
    if (!g.contains("generators") || !g["generators"].is_array() || g["generators"].empty())
      throw ParseError(join(wg, "generators"), "missing or empty array");
    const json& gens = g["generators"];
    o.exact = all_exact(gens);
    int dim = -1;
    for (std::size_t i = 0; i < gens.size(); ++i) {
      const std::string wi = join(wg, "generators") + "[" + std::to_string(i) + "]";
      if (o.exact) {
        o.rational_generators.push_back(parse_rational_vector(gens[i], dim, wi));
        dim = static_cast<int>(o.rational_generators.back().size());
      } else {
        o.real_generators.push_back(parse_real_vector(gens[i], dim, wi));
        dim = static_cast<int>(o.real_generators.back().size());
      }
      if (dim == 0) throw ParseError(wi, "empty generator");
    }
    if (g.contains("beta_bound")) o.beta_bound = static_cast<int>(get_integer(g["beta_bound"], join(wg, "beta_bound")));
    if (o.beta_bound < 1) throw ParseError(join(wg, "beta_bound"), "must be >= 1");
    if (g.contains("b_prime")) o.b_prime = get_number(g["b_prime"], join(wg, "b_prime"));
    if (g.contains("budget")) {
      const long long b = get_integer(g["budget"], join(wg, "budget"));
      if (b < 1) throw ParseError(join(wg, "budget"), "must be >= 1");
      o.budget = static_cast<std::uint64_t>(b);
    }
    s.smalldiv.gram = o;
  }
}

void parse_profiles(const json& j, const std::string& w, Scenario& s) {
  only_keys(j, w, {"t_final", "dt", "oracle", "record_every", "snapshots"});
  auto& p = s.profiles;
  if (j.contains("t_final")) p.t_final = get_number(j["t_final"], join(w, "t_final"));
  if (j.contains("dt")) p.dt = get_number(j["dt"], join(w, "dt"));
  if (j.contains("oracle")) p.oracle = get_string(j["oracle"], join(w, "oracle"));
  if (j.contains("record_every")) {
    const long long r = get_integer(j["record_every"], join(w, "record_every"));
    if (r < 0) throw ParseError(join(w, "record_every"), "must be >= 0");
    p.record_every = static_cast<std::size_t>(r);
  }
  if (j.contains("snapshots")) p.snapshots = get_bool(j["snapshots"], join(w, "snapshots"));
  if (!(p.t_final >= 0.0)) throw ParseError(join(w, "t_final"), "must be >= 0");
  if (!(p.dt > 0.0)) throw ParseError(join(w, "dt"), "must be > 0");
  static const std::set<std::string> oracles{"none", "explicit_torus_1d", "explicit_two_mode", "explicit_euclid_1d"};
  if (!oracles.count(p.oracle)) throw ParseError(join(w, "oracle"), "unknown oracle \"" + p.oracle + "\"");
}

}  // namespace

double parse_eps(const json& j, const std::string& where) {
  double e = 0.0;
  if (j.is_string()) {
    const Rational r = parse_rational(j, where);
    if (r <= 0 || r.numerator() != 1) throw ParseError(where, "eps must have the form 1/N with N a positive integer");
    e = 1.0 / static_cast<double>(r.denominator());
  } else {
    e = get_number(j, where);
  }
  try {
    inverse_eps(e);
  } catch (const std::invalid_argument& ex) {
    throw ParseError(where, ex.what());
  }
  return e;
}

IntegerizedVectors Scenario::integer_modes() const {
  std::vector<std::vector<Rational>> v;
  for (const auto& m : modes) v.push_back(m.kappa);
  return integerize(v);
}

std::vector<Complex> Scenario::amplitudes() const {
  std::vector<Complex> a;
  for (const auto& m : modes) a.push_back(m.amplitude);
  return a;
}

Scenario parse_scenario(const json& j) {
  only_keys(j, "$", {"schema", "name", "dimension", "sigma", "lambda", "domain", "modes", "closure",
                     "solver", "experiment"});
  Scenario s;
  if (!j.contains("schema") || get_string(j["schema"], "schema") != kScenarioSchema)
    throw ParseError("schema", std::string("expected \"") + kScenarioSchema + "\"");
  if (j.contains("name")) s.name = get_string(j["name"], "name");
  if (!j.contains("dimension")) throw ParseError("dimension", "missing");
  s.dimension = static_cast<int>(get_integer(j["dimension"], "dimension"));
  if (s.dimension < 1) throw ParseError("dimension", "must be >= 1");
  if (j.contains("sigma")) s.sigma = static_cast<int>(get_integer(j["sigma"], "sigma"));
  if (s.sigma < 1) throw ParseError("sigma", "must be >= 1");
  if (j.contains("lambda")) s.lambda = get_number(j["lambda"], "lambda");

  if (j.contains("domain")) {
    const json& d = j["domain"];
    only_keys(d, "domain", {"type", "L", "n"});
    const std::string type = d.contains("type") ? get_string(d["type"], "domain.type") : "torus";
    if (type == "torus") {
      s.domain = DomainType::torus;
      if (d.contains("L") || d.contains("n")) throw ParseError("domain", "torus domain takes no L or n");
    } else if (type == "euclid") {
      s.domain = DomainType::euclid;
      s.grid.dim = s.dimension;
      if (d.contains("L")) s.grid.L = get_number(d["L"], "domain.L");
      if (d.contains("n")) s.grid.n = static_cast<int>(get_integer(d["n"], "domain.n"));
      if (!(s.grid.L > 0.0)) throw ParseError("domain.L", "must be > 0");
      if (!is_power_of_two(s.grid.n)) throw ParseError("domain.n", "must be a power of two");
    } else {
      throw ParseError("domain.type", "expected \"torus\" or \"euclid\"");
    }
  }
  s.grid.dim = s.dimension;

  if (j.contains("modes")) {
    const json& ms = j["modes"];
    if (!ms.is_array()) throw ParseError("modes", "expected an array");
    for (std::size_t i = 0; i < ms.size(); ++i) {
      const std::string w = "modes[" + std::to_string(i) + "]";
      only_keys(ms[i], w, {"kappa", "amplitude", "profile"});
      ModeSpec m;
      if (!ms[i].contains("kappa")) throw ParseError(w + ".kappa", "missing");
      m.kappa = parse_rational_vector(ms[i]["kappa"], s.dimension, w + ".kappa");
      if (ms[i].contains("amplitude")) m.amplitude = parse_complex(ms[i]["amplitude"], w + ".amplitude");
      if (ms[i].contains("profile")) {
        if (s.domain != DomainType::euclid) throw ParseError(w + ".profile", "profiles need an euclid domain");
        const json& p = ms[i]["profile"];
        only_keys(p, w + ".profile", {"type", "center", "width", "amplitude"});
        if (!p.contains("type") || get_string(p["type"], w + ".profile.type") != "gaussian")
          throw ParseError(w + ".profile.type", "only \"gaussian\" is supported");
        GaussianProfile g;
        g.center = p.contains("center") ? parse_real_vector(p["center"], s.dimension, w + ".profile.center")
                                        : std::vector<double>(static_cast<std::size_t>(s.dimension), 0.0);
        if (p.contains("width")) g.width = get_number(p["width"], w + ".profile.width");
        if (!(g.width > 0.0)) throw ParseError(w + ".profile.width", "must be > 0");
        if (p.contains("amplitude")) g.amplitude = parse_complex(p["amplitude"], w + ".profile.amplitude");
        m.profile = g;
      } else if (s.domain == DomainType::euclid) {
        throw ParseError(w + ".profile", "euclid modes need a profile");
      }
      for (std::size_t k = 0; k < s.modes.size(); ++k)
        if (s.modes[k].kappa == m.kappa)
          throw ParseError(w + ".kappa", "duplicate of modes[" + std::to_string(k) + "]");
      s.modes.push_back(std::move(m));
    }
  }

  if (j.contains("closure")) {
    const json& c = j["closure"];
    only_keys(c, "closure", {"max_generations", "max_sup_norm", "max_tuples"});
    if (c.contains("max_generations"))
      s.closure.max_generations = static_cast<int>(get_integer(c["max_generations"], "closure.max_generations"));
    if (c.contains("max_sup_norm")) s.closure.max_sup_norm = get_integer(c["max_sup_norm"], "closure.max_sup_norm");
    if (c.contains("max_tuples")) {
      const long long t = get_integer(c["max_tuples"], "closure.max_tuples");
      if (t < 1) throw ParseError("closure.max_tuples", "must be >= 1");
      s.closure.max_tuples_per_generation = static_cast<std::uint64_t>(t);
    }
    if (s.closure.max_generations < 0) throw ParseError("closure.max_generations", "must be >= 0");
    if (s.closure.max_sup_norm < 1) throw ParseError("closure.max_sup_norm", "must be >= 1");
  }

  if (j.contains("solver")) parse_solver(j["solver"], "solver", s);

  if (!j.contains("experiment")) throw ParseError("experiment", "missing");
  const json& e = j["experiment"];
  if (!e.is_object() || e.size() != 1)
    throw ParseError("experiment", "must hold exactly one of converge, instability, smalldiv, profiles, closure");
  s.experiment = e.begin().key();
  const std::string w = "experiment." + s.experiment;
  const json& body = e.begin().value();
  if (s.experiment == "converge") {
    if (s.domain != DomainType::torus) throw ParseError(w, "convergence runs need a torus domain");
    parse_converge(body, w, s);
  } else if (s.experiment == "instability") {
    parse_instability(body, w, s);
  } else if (s.experiment == "smalldiv") {
    parse_smalldiv(body, w, s);
  } else if (s.experiment == "profiles") {
    parse_profiles(body, w, s);
  } else if (s.experiment == "closure") {
    only_keys(body, w, {});
  } else {
    throw ParseError("experiment." + s.experiment, "unknown experiment");
  }
  const bool needs_modes = s.experiment == "converge" || s.experiment == "profiles" || s.experiment == "closure" ||
                           (s.experiment == "smalldiv" && !s.smalldiv.gram);
  if (needs_modes && s.modes.empty()) throw ParseError("modes", "this experiment needs at least one mode");
  return s;
}

Scenario parse_scenario_text(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ParseError("document", e.what());
  }
  return parse_scenario(j);
}

json resolved_json(const Scenario& s) {
  json j;
  j["schema"] = kScenarioSchema;
  j["name"] = s.name;
  j["dimension"] = s.dimension;
  j["sigma"] = s.sigma;
  j["lambda"] = s.lambda;
  if (s.domain == DomainType::torus) {
    j["domain"] = {{"type", "torus"}};
  } else {
    j["domain"] = {{"type", "euclid"}, {"L", s.grid.L}, {"n", s.grid.n}};
  }
  j["modes"] = json::array();
  for (const auto& m : s.modes) {
    json mj;
    mj["kappa"] = json::array();
    for (const auto& c : m.kappa) mj["kappa"].push_back(rational_json(c));
    if (m.profile) {
      mj["profile"] = {{"type", "gaussian"},
                       {"center", m.profile->center},
                       {"width", m.profile->width},
                       {"amplitude", complex_json(m.profile->amplitude)}};
    } else {
      mj["amplitude"] = complex_json(m.amplitude);
    }
    j["modes"].push_back(mj);
  }
  j["closure"] = {{"max_generations", s.closure.max_generations},
                  {"max_sup_norm", s.closure.max_sup_norm},
                  {"max_tuples", s.closure.max_tuples_per_generation}};
  const auto& c = s.converge;
  j["solver"] = {{"dt", c.dt},
                 {"dt_rule", "eps/100 when dt is 0"},
                 {"n", c.n},
                 {"n_rule", "smallest power of two >= 4(2 sigma + 2) max|kappa|_inf / eps when n is 0"},
                 {"profile_dt", c.profile_dt},
                 {"self_check", c.self_check},
                 {"max_halvings", c.max_halvings},
                 {"error_budget", c.error_budget}};
  json e;
  if (s.experiment == "converge") {
    json eps = json::array();
    for (double x : c.eps_list) eps.push_back("1/" + std::to_string(inverse_eps(x)));
    e["converge"] = {{"t_final", c.t_final}, {"eps_list", eps}, {"checkpoints", c.checkpoints}};
  } else if (s.experiment == "instability") {
    const auto& p = s.instability;
    e["instability"] = {{"rho", p.rho},
                        {"delta", p.delta},
                        {"s", p.s},
                        {"K", p.K},
                        {"variant", to_string(p.variant)},
                        {"theta", p.theta},
                        {"grid_points", p.grid_points},
                        {"solver_check", p.solver_check},
                        {"solver_checkpoints", p.solver_checkpoints},
                        {"solver_dt", p.solver_dt}};
  } else if (s.experiment == "smalldiv") {
    json sd = {{"b_grid", s.smalldiv.b_grid}};
    if (s.smalldiv.gram) {
      const auto& g = *s.smalldiv.gram;
      json gens = json::array();
      if (g.exact) {
        for (const auto& v : g.rational_generators) {
          json row = json::array();
          for (const auto& x : v) row.push_back(rational_json(x));
          gens.push_back(row);
        }
      } else {
        for (const auto& v : g.real_generators) gens.push_back(v);
      }
      sd["gram"] = {{"generators", gens},
                    {"exact", g.exact},
                    {"beta_bound", g.beta_bound},
                    {"b_prime", g.b_prime},
                    {"budget", g.budget}};
    }
    e["smalldiv"] = sd;
  } else if (s.experiment == "profiles") {
    const auto& p = s.profiles;
    e["profiles"] = {{"t_final", p.t_final},
                     {"dt", p.dt},
                     {"oracle", p.oracle},
                     {"record_every", p.record_every},
                     {"snapshots", p.snapshots}};
  } else {
    e["closure"] = json::object();
  }
  j["experiment"] = e;
  return j;
}

std::string read_text_file(const std::filesystem::path& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw ParseError(path.string(), "cannot open file");
  std::ostringstream os;
  os << is.rdbuf();
  return os.str();
}

}  // namespace wkbgo

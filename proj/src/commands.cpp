#include "wkbgo/commands.hpp"

#include "wkbgo/errors.hpp"
#include "wkbgo/lattice_io.hpp"
#include "wkbgo/pipeline.hpp"
#include "wkbgo/report.hpp"
#include "wkbgo/scenario.hpp"
#include "wkbgo/small_divisors.hpp"
#include "wkbgo/spectral_nls.hpp"
#include "wkbgo/wiener.hpp"

#include <chrono>
#include <cmath>
#include <ostream>
#include <sstream>

namespace wkbgo {

namespace {

using nlohmann::json;
namespace fs = std::filesystem;

class UsageError : public std::invalid_argument {
public:
  using std::invalid_argument::invalid_argument;
};

struct Context {
  Scenario scenario;
  std::string scenario_sha256;
  json resolved;
  const CommandOptions* options = nullptr;
  std::ostream* out = nullptr;
  std::ostream* err = nullptr;
  json runtimes = json::object();
  int exit_code = kExitOk;
};

json complex_json(Complex z) { return json::array({json_number(z.real()), json_number(z.imag())}); }

json warnings_json(const std::vector<std::string>& w) { return w; }

void write_report(Context& ctx, const std::string& file, const std::string& command, const json& results) {
  write_file_atomic(ctx.options->out / file,
                    dump_json(make_report(command, ctx.scenario_sha256, ctx.resolved, results)));
}

void write_runtimes(Context& ctx, const std::string& command, double seconds) {
  ctx.runtimes["command"] = command;
  ctx.runtimes["scenario_sha256"] = ctx.scenario_sha256;
  ctx.runtimes["total_seconds"] = seconds;
  write_file_atomic(ctx.options->out / (command + "_runtimes.json"), dump_json(ctx.runtimes));
}

ModeSet close_scenario(const Scenario& s) {
  const IntegerizedVectors iv = s.integer_modes();
  return close_under_resonances(iv.vectors, s.sigma, s.closure, iv.scale);
}

std::string fmt(double v) { return format_double(v); }

// ---------------------------------------------------------------- closure

void cmd_closure(Context& ctx) {
  const Scenario& s = ctx.scenario;
  if (s.modes.empty()) throw UsageError("closure: the scenario lists no modes");
  const ModeSet modes = close_scenario(s);
  const std::size_t created = modes.size() - s.modes.size();

  json results = modeset_to_json(modes);
  json created_json = json::array();
  for (const auto& e : modes.edges()) {
    json t = json::array();
    for (const auto& v : e.tuple) t.push_back(user_vector_string(modes, v));
    created_json.push_back({{"vector", user_vector_string(modes, e.created)},
                            {"generation", e.generation},
                            {"tuple", t}});
  }
  results["created"] = created_json;
  results["initial_count"] = s.modes.size();
  results["status"] = modes.saturated() ? "saturated" : "truncated";
  write_report(ctx, "closure.json", "closure", results);

  CsvTable gens({"index", "vector", "generation"});
  for (std::size_t i = 0; i < modes.size(); ++i)
    gens.row({std::to_string(i), user_vector_string(modes, modes[i]), std::to_string(modes.generation(i))});
  write_file_atomic(ctx.options->out / "closure_generations.csv", gens.str());
  write_file_atomic(ctx.options->out / "closure_edges.csv", edges_csv(modes));

  std::ostream& o = *ctx.out;
  o << "closure: " << modes.size() << " vectors (" << s.modes.size() << " initial, " << created
    << " created), " << (modes.saturated() ? "saturated" : "truncated") << "\n";
  if (modes.saturated() && created == 0) o << "saturated, no new vectors\n";
  for (const auto& e : modes.edges())
    o << "created " << user_vector_string(modes, e.created) << " at generation " << e.generation << "\n";
  for (const auto& w : modes.warnings()) *ctx.err << "warning: " << w << "\n";
}

// ---------------------------------------------------------------- profiles

struct OracleResult {
  std::string name;
  double max_deviation = 0.0;
};

json remainder_json(const RemainderReport& r, const ModeSet& modes) {
  json a = json::array();
  for (auto i : r.argmin) a.push_back(user_vector_string(modes, modes[i]));
  return {{"r2_bound", r.r2_bound},
          {"nonresonant_tuples", r.nonresonant_tuples},
          {"truncated_resonant_tuples", r.truncated_resonant_tuples},
          {"min_delta", json_number(r.min_delta)},
          {"argmin", a}};
}

void cmd_profiles_torus(Context& ctx, const std::string& oracle) {
  const Scenario& s = ctx.scenario;
  const IntegerizedVectors iv = s.integer_modes();
  const TorusProblem p = make_torus_problem(iv.vectors, s.amplitudes(), s.sigma, s.lambda, s.closure, iv.scale);
  const SimParams sp{s.lambda, s.sigma, s.profiles.t_final, s.profiles.dt};
  const TorusTrajectory traj = integrate_torus(p.alpha, p.modes, sp);

  std::vector<std::string> warnings = p.modes.warnings();
  if (s.profiles.snapshots) warnings.push_back("snapshots are written for euclid domains only");

  CsvTable csv({"t", "j", "kappa", "re", "im", "abs"});
  const std::size_t stride = s.profiles.record_every ? s.profiles.record_every : 1;
  for (std::size_t k = 0; k < traj.states.size(); ++k) {
    if (k % stride != 0 && k + 1 != traj.states.size()) continue;
    const auto& st = traj.states[k];
    for (std::size_t j = 0; j < st.amps.size(); ++j)
      csv.row({fmt(st.t), std::to_string(j), user_vector_string(p.modes, p.modes[j]), fmt(st.amps[j].real()),
               fmt(st.amps[j].imag()), fmt(std::abs(st.amps[j]))});
  }
  write_file_atomic(ctx.options->out / "profiles_trajectory.csv", csv.str());

  std::optional<OracleResult> orc;
  if (oracle == "explicit_torus_1d") {
    if (s.dimension != 1 || s.sigma != 1)
      throw UsageError("oracle explicit_torus_1d needs dimension 1 and sigma 1");
    orc = OracleResult{oracle};
    for (const auto& st : traj.states) {
      const auto ex = explicit_torus_1d(p.alpha, s.lambda, st.t);
      for (std::size_t j = 0; j < ex.size(); ++j)
        orc->max_deviation = std::max(orc->max_deviation, std::abs(st.amps[j] - ex[j]));
    }
  } else if (oracle == "explicit_two_mode") {
    if (p.modes.size() != 2) throw UsageError("oracle explicit_two_mode needs a closed set of exactly two modes");
    orc = OracleResult{oracle};
    for (const auto& st : traj.states) {
      const auto [a, b] = explicit_two_mode(p.alpha[0], p.alpha[1], s.sigma, s.lambda, st.t);
      orc->max_deviation =
          std::max({orc->max_deviation, std::abs(st.amps[0] - a), std::abs(st.amps[1] - b)});
    }
  } else if (oracle == "explicit_euclid_1d") {
    throw UsageError("oracle explicit_euclid_1d needs an euclid domain");
  }

  const double m0 = total_mass(traj.states.front());
  const double m1 = total_mass(traj.back());
  double mod_drift = 0.0;
  for (const auto& st : traj.states)
    for (std::size_t j = 0; j < st.amps.size(); ++j)
      mod_drift = std::max(mod_drift, std::abs(std::abs(st.amps[j]) - std::abs(p.alpha[j])));

  json modes_json = json::array();
  for (std::size_t j = 0; j < p.modes.size(); ++j)
    modes_json.push_back({{"kappa", user_vector_json(p.modes, j)},
                          {"generation", p.modes.generation(j)},
                          {"initial", complex_json(p.alpha[j])},
                          {"final", complex_json(traj.back().amps[j])}});
  json results{{"domain", "torus"},
               {"steps", traj.states.size() - 1},
               {"modes", modes_json},
               {"saturated", p.modes.saturated()},
               {"mass_initial", m0},
               {"mass_final", m1},
               {"mass_relative_drift", json_number(m0 > 0 ? std::abs(m1 - m0) / m0 : std::abs(m1 - m0))},
               {"max_modulus_drift", mod_drift},
               {"e_norm_initial", e_norm(traj.states.front())},
               {"e_norm_final", e_norm(traj.back())},
               {"remainder", remainder_json(remainder_report(traj.back(), p.modes, s.sigma), p.modes)},
               {"warnings", warnings_json(warnings)}};
  if (orc) results["oracle"] = {{"name", orc->name}, {"max_deviation", orc->max_deviation}};
  write_report(ctx, "profiles.json", "profiles", results);

  std::ostream& o = *ctx.out;
  o << "profiles: " << p.modes.size() << " modes, " << traj.states.size() - 1 << " steps to t=" << fmt(s.profiles.t_final)
    << "\n";
  o << "mass relative drift: " << fmt(m0 > 0 ? std::abs(m1 - m0) / m0 : std::abs(m1 - m0)) << "\n";
  if (orc) o << "max deviation from " << orc->name << ": " << fmt(orc->max_deviation) << "\n";
  for (const auto& w : warnings) *ctx.err << "warning: " << w << "\n";
}

void cmd_profiles_euclid(Context& ctx, const std::string& oracle) {
  const Scenario& s = ctx.scenario;
  const IntegerizedVectors iv = s.integer_modes();
  const ModeSet modes = close_under_resonances(iv.vectors, s.sigma, s.closure, iv.scale);
  const EuclidGrid& grid = s.grid;
  std::vector<ComplexVec> alpha(modes.size(), ComplexVec(grid.size()));
  std::vector<ProfileFunction> initial_fns(modes.size(), [](std::span<const double>) { return Complex{}; });
  for (std::size_t i = 0; i < s.modes.size(); ++i) {
    const std::size_t j = *modes.index_of(iv.vectors[i]);
    initial_fns[j] = *s.modes[i].profile;
    alpha[j] = sample(grid, initial_fns[j]);
  }
  const SimParams sp{s.lambda, s.sigma, s.profiles.t_final, s.profiles.dt};
  const EuclidTrajectory traj = integrate_euclid(alpha, grid, modes, sp, s.profiles.record_every);
  std::vector<std::string> warnings = modes.warnings();

  std::vector<std::string> header{"t", "j"};
  for (int a = 0; a < grid.dim; ++a) header.push_back("x" + std::to_string(a + 1));
  header.insert(header.end(), {"re", "im"});
  CsvTable csv(header);
  const std::size_t n = static_cast<std::size_t>(grid.n);
  for (const auto& st : traj.states)
    for (std::size_t j = 0; j < st.fields.size(); ++j)
      for (std::size_t p = 0; p < st.fields[j].size(); ++p) {
        std::vector<std::string> row{fmt(st.t), std::to_string(j)};
        std::vector<std::string> xs(static_cast<std::size_t>(grid.dim));
        std::size_t r = p;
        for (int a = grid.dim - 1; a >= 0; --a) {
          xs[static_cast<std::size_t>(a)] = fmt(grid.coordinate(static_cast<int>(r % n)));
          r /= n;
        }
        row.insert(row.end(), xs.begin(), xs.end());
        row.push_back(fmt(st.fields[j][p].real()));
        row.push_back(fmt(st.fields[j][p].imag()));
        csv.row(std::move(row));
      }
  write_file_atomic(ctx.options->out / "profiles_fields.csv", csv.str());

  if (s.profiles.snapshots) {
    for (std::size_t k = 0; k < traj.states.size(); ++k)
      for (std::size_t j = 0; j < traj.states[k].fields.size(); ++j) {
        GridField f(grid.dim, grid.n);
        f.values = traj.states[k].fields[j];
        write_snapshot(ctx.options->out / "snapshots" /
                           ("profile_s" + std::to_string(k) + "_j" + std::to_string(j) + ".wkbf"),
                       f, 0.0, traj.states[k].t);
      }
  }

  std::optional<OracleResult> orc;
  if (oracle == "explicit_euclid_1d") {
    if (s.dimension != 1 || s.sigma != 1)
      throw UsageError("oracle explicit_euclid_1d needs dimension 1 and sigma 1");
    if (modes.size() != s.modes.size())
      throw UsageError("oracle explicit_euclid_1d needs a mode set without created vectors");
    std::vector<double> kappa;
    for (std::size_t j = 0; j < modes.size(); ++j) kappa.push_back(user_kappa(modes, j)[0]);
    orc = OracleResult{oracle};
    for (const auto& st : traj.states)
      for (std::size_t p = 0; p < n; ++p) {
        const auto ex = explicit_euclid_1d(initial_fns, kappa, s.lambda, st.t, grid.coordinate(static_cast<int>(p)),
                                           s.profiles.dt);
        for (std::size_t j = 0; j < ex.size(); ++j)
          orc->max_deviation = std::max(orc->max_deviation, std::abs(st.fields[j][p] - ex[j]));
      }
  } else if (oracle != "none") {
    throw UsageError("oracle " + oracle + " needs a torus domain");
  }

  const double m0 = total_mass(traj.states.front());
  const double m1 = total_mass(traj.back());
  json modes_json = json::array();
  for (std::size_t j = 0; j < modes.size(); ++j)
    modes_json.push_back({{"kappa", user_vector_json(modes, j)}, {"generation", modes.generation(j)}});
  json results{{"domain", "euclid"},
               {"grid", {{"L", grid.L}, {"n", grid.n}}},
               {"recorded_states", traj.states.size()},
               {"modes", modes_json},
               {"saturated", modes.saturated()},
               {"mass_initial", m0},
               {"mass_final", m1},
               {"mass_relative_drift", json_number(m0 > 0 ? std::abs(m1 - m0) / m0 : std::abs(m1 - m0))},
               {"e_norm_initial", e_norm(traj.states.front())},
               {"e_norm_final", e_norm(traj.back())},
               {"remainder", remainder_json(remainder_report(traj.back(), modes, s.sigma), modes)},
               {"warnings", warnings_json(warnings)}};
  if (orc) results["oracle"] = {{"name", orc->name}, {"max_deviation", orc->max_deviation}};
  write_report(ctx, "profiles.json", "profiles", results);

  std::ostream& o = *ctx.out;
  o << "profiles: " << modes.size() << " modes on a " << grid.n << "^" << grid.dim << " box grid to t="
    << fmt(s.profiles.t_final) << "\n";
  o << "mass relative drift: " << fmt(m0 > 0 ? std::abs(m1 - m0) / m0 : std::abs(m1 - m0)) << "\n";
  if (orc) o << "max deviation from " << orc->name << ": " << fmt(orc->max_deviation) << "\n";
  for (const auto& w : warnings) *ctx.err << "warning: " << w << "\n";
}

void cmd_profiles(Context& ctx) {
  Scenario& s = ctx.scenario;
  if (s.experiment != "profiles") throw UsageError("profiles: the scenario holds a " + s.experiment + " experiment");
  std::string oracle = s.profiles.oracle;
  if (ctx.options->oracle) {
    oracle = *ctx.options->oracle;
    if (oracle != "none" && oracle != "explicit_torus_1d" && oracle != "explicit_two_mode" &&
        oracle != "explicit_euclid_1d")
      throw UsageError("unknown oracle \"" + oracle + "\"");
    s.profiles.oracle = oracle;
    ctx.resolved["experiment"]["profiles"]["oracle"] = oracle;
  }
  if (s.domain == DomainType::torus)
    cmd_profiles_torus(ctx, oracle);
  else
    cmd_profiles_euclid(ctx, oracle);
}

// ---------------------------------------------------------------- converge

void cmd_converge(Context& ctx) {
  const Scenario& s = ctx.scenario;
  if (s.experiment != "converge") throw UsageError("converge: the scenario holds a " + s.experiment + " experiment");
  const IntegerizedVectors iv = s.integer_modes();
  const TorusProblem p = make_torus_problem(iv.vectors, s.amplitudes(), s.sigma, s.lambda, s.closure, iv.scale);
  ConvergenceOptions opt = s.converge;
  if (ctx.options->jobs) opt.jobs = *ctx.options->jobs;
  ctx.runtimes["jobs"] = opt.jobs;
  const ConvergenceTable table = run_convergence(p, opt);

  CsvTable csv({"eps", "n", "fold", "dt", "steps", "sup_error", "w_error", "final_sup_error", "solver_error_estimate",
                "dt_halvings", "aliasing_ratio", "status"});
  json rows = json::array();
  json row_times = json::array();
  for (const auto& r : table.rows) {
    csv.row({fmt(r.eps), std::to_string(r.n), std::to_string(r.fold), fmt(r.dt), std::to_string(r.steps), fmt(r.sup_error),
             fmt(r.w_error), fmt(r.final_sup_error), fmt(r.solver_error_estimate), std::to_string(r.dt_halvings),
             fmt(r.aliasing_ratio), r.status});
    rows.push_back({{"eps", r.eps},
                    {"n", r.n},
                    {"fold", r.fold},
                    {"dt", r.dt},
                    {"steps", r.steps},
                    {"sup_error", json_number(r.sup_error)},
                    {"w_error", json_number(r.w_error)},
                    {"final_sup_error", json_number(r.final_sup_error)},
                    {"solver_error_estimate", json_number(r.solver_error_estimate)},
                    {"dt_halvings", r.dt_halvings},
                    {"aliasing_ratio", json_number(r.aliasing_ratio)},
                    {"ok", r.ok},
                    {"status", r.status},
                    {"warnings", r.warnings}});
    row_times.push_back({{"eps", r.eps}, {"seconds", r.runtime}});
  }
  ctx.runtimes["rows"] = row_times;
  write_file_atomic(ctx.options->out / "convergence.csv", csv.str());

  auto order_json = [&](const std::optional<double>& v) -> json {
    if (table.at_floor) return "n/a (floor)";
    if (!v) return "n/a";
    return json_number(*v);
  };
  json modes_json = json::array();
  for (std::size_t j = 0; j < p.modes.size(); ++j)
    modes_json.push_back({{"kappa", user_vector_json(p.modes, j)},
                          {"generation", p.modes.generation(j)},
                          {"amplitude", complex_json(p.alpha[j])}});
  json results{{"modes", modes_json},
               {"saturated", p.modes.saturated()},
               {"rows", rows},
               {"fitted_order_sup", order_json(table.fitted_order_sup)},
               {"fitted_order_w", order_json(table.fitted_order_w)},
               {"at_floor", table.at_floor},
               {"warnings", table.warnings}};
  if (ctx.options->assert_order) results["assert_order"] = *ctx.options->assert_order;
  write_report(ctx, "convergence.json", "converge", results);

  std::ostream& o = *ctx.out;
  o << "eps        n      sup_error      w_error        status\n";
  for (const auto& r : table.rows) {
    char line[256];
    std::snprintf(line, sizeof line, "1/%-7lld %-6d %-14.6e %-14.6e %s\n", static_cast<long long>(std::llround(1.0 / r.eps)),
                  r.n, r.sup_error, r.w_error, r.status.c_str());
    o << line;
  }
  if (table.at_floor) {
    o << "fitted order: n/a (floor)\n";
  } else {
    o << "fitted order (sup): " << (table.fitted_order_sup ? fmt(*table.fitted_order_sup) : "n/a") << "\n";
    o << "fitted order (W): " << (table.fitted_order_w ? fmt(*table.fitted_order_w) : "n/a") << "\n";
  }
  for (const auto& w : table.warnings) *ctx.err << "warning: " << w << "\n";
  for (const auto& r : table.rows)
    for (const auto& w : r.warnings) *ctx.err << "warning: eps=" << fmt(r.eps) << ": " << w << "\n";

  if (ctx.options->assert_order) {
    const double want = *ctx.options->assert_order;
    bool pass = true;
    std::string why;
    for (const auto& r : table.rows)
      if (!r.ok) {
        pass = false;
        why = "row eps=" + fmt(r.eps) + " " + r.status;
      }
    if (pass && !table.at_floor) {
      if (!table.fitted_order_sup) {
        pass = false;
        why = "no fitted order";
      } else if (*table.fitted_order_sup < want) {
        pass = false;
        why = "fitted order " + fmt(*table.fitted_order_sup) + " < " + fmt(want);
      }
    }
    if (pass) {
      o << "assert-order " << fmt(want) << ": pass\n";
    } else {
      *ctx.err << "assert-order " << fmt(want) << ": FAIL (" << why << ")\n";
      ctx.exit_code = kExitAssertion;
    }
  }
}

// ---------------------------------------------------------------- instability

void cmd_instability(Context& ctx) {
  const Scenario& s = ctx.scenario;
  if (s.experiment != "instability")
    throw UsageError("instability: the scenario holds a " + s.experiment + " experiment");
  const InstabilityRecord rec = run_instability(s.instability);
  const auto& prm = rec.params;

  CsvTable csv({"t", "gap"});
  for (int k = 0; k < prm.grid_points; ++k) {
    const double t = prm.delta * static_cast<double>(k) / static_cast<double>(prm.grid_points - 1);
    const Complex u = rec.alpha0 * std::polar(1.0, -prm.lambda * t * rec.theta0);
    const Complex v = rec.alpha0_tilde * std::polar(1.0, -prm.lambda * t * rec.theta0_tilde);
    csv.row({fmt(t), fmt(std::abs(u - v))});
  }
  write_file_atomic(ctx.options->out / "instability_gap.csv", csv.str());

  auto opt = [](const auto& v) -> json {
    if (!v) return nullptr;
    return json_number(static_cast<double>(*v));
  };
  json results{{"variant", to_string(prm.variant)},
               {"alpha0", complex_json(rec.alpha0)},
               {"alpha0_tilde", complex_json(rec.alpha0_tilde)},
               {"alpha1", complex_json(rec.alpha1)},
               {"alpha1_tilde", complex_json(rec.alpha1_tilde)},
               {"theta0", json_number(rec.theta0)},
               {"theta0_tilde", json_number(rec.theta0_tilde)},
               {"t_star", rec.t_star},
               {"gap", rec.gap},
               {"hs_condition_violated", rec.hs_condition_violated},
               {"hs_threshold", json_number(rec.hs_threshold)},
               {"solver_gap", opt(rec.solver_gap)},
               {"solver_deviation", opt(rec.solver_deviation)},
               {"solver_max_deviation", opt(rec.solver_max_deviation)},
               {"solver_eps", opt(rec.solver_eps)},
               {"solver_n", opt(rec.solver_n)},
               {"warnings", rec.warnings}};
  write_report(ctx, "instability.json", "instability", results);

  std::ostream& o = *ctx.out;
  o << "instability " << to_string(prm.variant) << ": gap=" << fmt(rec.gap) << " at t_star=" << fmt(rec.t_star)
    << " (delta=" << fmt(prm.delta) << ")\n";
  if (rec.solver_gap)
    o << "solver check eps=" << fmt(*rec.solver_eps) << " n=" << *rec.solver_n << ": gap=" << fmt(*rec.solver_gap)
      << ", max deviation " << fmt(*rec.solver_max_deviation) << "\n";
  for (const auto& w : rec.warnings) *ctx.err << "warning: " << w << "\n";
}

// ---------------------------------------------------------------- smalldiv

json gram_json(const GramProbeResult& g) {
  return {{"generators", g.generators},
          {"beta_bound", g.beta_bound},
          {"b_prime", g.b_prime},
          {"budget", g.budget},
          {"scanned", g.scanned},
          {"partial", g.partial},
          {"exact", g.exact},
          {"zero_relations", g.zero_relations},
          {"min_value", json_number(g.min_value)},
          {"min_value_exact", g.min_value_exact},
          {"argmin", g.argmin},
          {"argmin_l1", g.argmin_l1},
          {"c_prime", json_number(g.c_prime)},
          {"c_prime_argmin", g.c_prime_argmin}};
}

void cmd_smalldiv(Context& ctx) {
  const Scenario& s = ctx.scenario;
  if (s.experiment != "smalldiv") throw UsageError("smalldiv: the scenario holds a " + s.experiment + " experiment");
  std::ostream& o = *ctx.out;
  json results = json::object();
  bool assertion_failed = false;

  if (!s.modes.empty()) {
    const ModeSet modes = close_scenario(s);
    const DivisorSurvey sv = survey_divisors(modes, s.sigma);
    const auto fits = fit_generalized_bound(modes, s.sigma, s.smalldiv.b_grid);
    json argmin = json::array();
    for (auto i : sv.argmin) argmin.push_back(user_vector_string(modes, modes[i]));
    const bool integer = modes.scale() == 1;
    results["survey"] = {{"modes", modes.size()},
                         {"saturated", modes.saturated()},
                         {"integer_lattice", integer},
                         {"tuples_scanned", sv.tuples_scanned},
                         {"nonresonant", sv.nonresonant},
                         {"min_delta", json_number(sv.min_delta)},
                         {"min_defect", sv.min_defect},
                         {"argmin", argmin},
                         {"warnings", modes.warnings()}};
    CsvTable csv({"b", "c"});
    json fj = json::array();
    for (const auto& f : fits) {
      csv.row({fmt(f.b), fmt(f.c)});
      fj.push_back({{"b", f.b}, {"c", json_number(f.c)}});
    }
    results["bounds"] = fj;
    write_file_atomic(ctx.options->out / "smalldiv_bounds.csv", csv.str());

    o << "smalldiv: " << modes.size() << " modes, " << sv.tuples_scanned << " tuples, " << sv.nonresonant
      << " non-resonant, min_delta=" << fmt(sv.min_delta) << "\n";
    if (integer) {
      const bool ok = sv.all_resonant() || sv.min_delta >= 1.0;
      results["integer_min_delta_at_least_one"] = ok;
      if (ok) {
        o << "integer lattice: min_delta >= 1: pass\n";
      } else {
        *ctx.err << "integer lattice: min_delta >= 1: FAIL (" << fmt(sv.min_delta) << ")\n";
        assertion_failed = true;
      }
    }
    for (const auto& w : modes.warnings()) *ctx.err << "warning: " << w << "\n";
  }

  if (s.smalldiv.gram) {
    const GramOptions& g = *s.smalldiv.gram;
    const GramProbeResult r =
        g.exact ? gram_diophantine_probe(g.rational_generators, g.beta_bound, g.b_prime, g.budget)
                : gram_diophantine_probe(g.real_generators, g.beta_bound, g.b_prime, g.budget);
    results["gram"] = gram_json(r);
    o << "gram probe: " << r.scanned << " relations scanned" << (r.partial ? " (partial, budget reached)" : "")
      << ", " << r.zero_relations << " exact zeros, smallest nonzero " << fmt(r.min_value)
      << ", C'=" << fmt(r.c_prime) << "\n";
    if (r.partial) *ctx.err << "warning: gram probe stopped at the budget of " << r.budget << " combinations\n";
  }
  write_report(ctx, "smalldiv.json", "smalldiv", results);
  if (assertion_failed) ctx.exit_code = kExitAssertion;
}

}  // namespace

int run_command(const std::string& command, const CommandOptions& options, std::ostream& out,
                std::ostream& err) {
  const auto start = std::chrono::steady_clock::now();
  Context ctx;
  ctx.options = &options;
  ctx.out = &out;
  ctx.err = &err;
  try {
    if (command != "closure" && command != "profiles" && command != "converge" && command != "instability" &&
        command != "smalldiv")
      throw UsageError("unknown command \"" + command + "\"");
    if (options.jobs && *options.jobs < 1) throw UsageError("--jobs must be >= 1");
    const std::string text = read_text_file(options.scenario);
    ctx.scenario = parse_scenario_text(text);
    ctx.scenario_sha256 = sha256_hex(text);
    ctx.resolved = resolved_json(ctx.scenario);
    fs::create_directories(options.out);

    if (command == "closure") cmd_closure(ctx);
    else if (command == "profiles") cmd_profiles(ctx);
    else if (command == "converge") cmd_converge(ctx);
    else if (command == "instability") cmd_instability(ctx);
    else cmd_smalldiv(ctx);

    write_runtimes(ctx, command,
                   std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count());
    return ctx.exit_code;
  } catch (const ParseError& e) {
    err << "error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const UsageError& e) {
    err << "error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const BlowUpError& e) {
    err << "error: " << e.what() << " at t=" << e.time() << "\n";
    return kExitRuntime;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kExitRuntime;
  }
}

}  // namespace wkbgo

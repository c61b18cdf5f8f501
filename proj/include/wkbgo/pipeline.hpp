#pragma once

#include "wkbgo/lattice.hpp"
#include "wkbgo/profiles.hpp"
#include "wkbgo/spectral_nls.hpp"

#include <optional>
#include <string>
#include <vector>

namespace wkbgo {

/// Closed mode set with index-aligned initial amplitudes.
struct TorusProblem {
  ModeSet modes;
  std::vector<Complex> alpha;
  double lambda = 1.0;
};

/// Closes the initial vectors and places the amplitudes; created modes start at zero.
TorusProblem make_torus_problem(const std::vector<WaveVector>& initial,
                                const std::vector<Complex>& amplitudes, int sigma, double lambda,
                                const ClosureLimits& limits = {}, Int scale = 1);

/// Sum_j a_j e^{i(kappa_j.x - t|kappa_j|^2/2)/eps} on an n-point grid of [0, 2 pi)^d.
/// Throws std::invalid_argument when some kappa_j / eps is not an integer
/// frequency resolved by the grid. With fold > 1 the result is one period,
/// n / fold points covering [0, 2 pi / fold)^d.
GridField assemble_uapp(const ProfileStateTorus& profiles, const ModeSet& modes, double eps, int n,
                        Int fold = 1);

/// Largest g dividing n with every kappa_j / eps in g Z^d (n when all vanish).
Int frequency_fold(const ModeSet& modes, double eps, int n);

/// Largest |kappa_j|_inf over the mode set, user units.
double max_sup_norm(const ModeSet& modes);

struct ConvergenceOptions {
  double t_final = 1.0;
  std::vector<double> eps_list;
  double dt = 0.0;            // solver step, 0 selects eps / 100
  int n = 0;                  // 0 selects grid_size_rule
  double profile_dt = 1e-3;   // upper bound; rounded so checkpoints fall on steps
  int checkpoints = 9;        // error evaluated at k T / checkpoints, k = 1..checkpoints
  bool self_check = true;     // Richardson estimate against a 2 dt run
  double error_budget = 1.0;  // expected error C eps; the self check allows 0.1 C eps
  int max_halvings = 3;
  int jobs = 1;
};

struct ConvergenceRow {
  double eps = 0.0;
  int n = 0;
  int fold = 1;  // solve ran on n / fold points per axis, see SolverConfig::fold
  double dt = 0.0;
  std::size_t steps = 0;
  double sup_error = 0.0;
  double w_error = 0.0;
  double final_sup_error = 0.0;
  /// Richardson estimate of the solver's own error (NaN when not run).
  double solver_error_estimate = 0.0;
  int dt_halvings = 0;
  double aliasing_ratio = 0.0;
  double runtime = 0.0;  // seconds
  bool ok = true;
  std::string status = "ok";
  std::vector<std::string> warnings;
};

struct ConvergenceTable {
  std::vector<ConvergenceRow> rows;
  /// Least-squares slope of log error against log eps over ok rows.
  std::optional<double> fitted_order_sup;
  std::optional<double> fitted_order_w;
  /// True when every ok row is below kErrorFloor.
  bool at_floor = false;
  std::vector<std::string> warnings;
};

inline constexpr double kErrorFloor = 1e-10;

/// Unweighted least-squares slope of log y on log x; nullopt with fewer than two points.
std::optional<double> fit_loglog_slope(const std::vector<double>& x, const std::vector<double>& y);

/// Rows run as independent jobs; the table is in eps_list order regardless of
/// completion order. Row failures are recorded, not thrown.
ConvergenceTable run_convergence(const TorusProblem& problem, const ConvergenceOptions& options);

struct RemainderReport {
  double r2_bound = 0.0;
  /// |J^{2 sigma + 1} minus the union of the I_j|.
  std::uint64_t nonresonant_tuples = 0;
  /// Members of that set with zero defect (their combination left the truncated J).
  std::uint64_t truncated_resonant_tuples = 0;
  double min_delta = 0.0;  // +inf when no tuple has nonzero defect
  std::vector<std::size_t> argmin;
};

RemainderReport remainder_report(const ProfileStateTorus& profiles, const ModeSet& modes, int sigma);
RemainderReport remainder_report(const ProfileStateEuclid& profiles, const ModeSet& modes, int sigma);

enum class InstabilityVariant { part1, part2, part3 };
std::string to_string(InstabilityVariant v);
InstabilityVariant parse_instability_variant(const std::string& s);

struct InstabilityParams {
  double rho = 1.0;
  double delta = 0.1;
  double s = -0.5;
  Int K = 32;
  int sigma = 1;
  double lambda = 1.0;
  InstabilityVariant variant = InstabilityVariant::part1;
  double theta = 1.0;  // part3 target angle
  int grid_points = 10000;
  bool solver_check = false;
  int dim = 1;
  double solver_dt = 0.0;  // 0 selects eps / 100
  int solver_checkpoints = 10;
};

struct InstabilityRecord {
  InstabilityParams params;
  Complex alpha0, alpha0_tilde, alpha1, alpha1_tilde;
  double theta0 = 0.0;
  double theta0_tilde = 0.0;
  double t_star = 0.0;
  double gap = 0.0;
  bool hs_condition_violated = false;
  double hs_threshold = 0.0;  // delta^{1/s}
  /// Zero-mode gap |c_0(u) - c_0(u~)| from two spectral solves at eps = 1/K^2.
  std::optional<double> solver_gap;
  std::optional<double> solver_deviation;      // |solver_gap - gap| at t_star
  std::optional<double> solver_max_deviation;  // over the solver checkpoints
  std::optional<double> solver_eps;
  std::optional<int> solver_n;
  std::vector<std::string> warnings;
};

InstabilityRecord run_instability(const InstabilityParams& params);

}  // namespace wkbgo

#pragma once

#include "hjb/core/model.hpp"
#include "hjb/radial/barriers.hpp"
#include "hjb/radial/solver.hpp"

#include <optional>
#include <span>
#include <string>
#include <vector>

namespace hjb::monotone {

struct SchemeOptions {
  // Every ball uses spacing 1/nodes_per_unit so that nodes on [0, R_obs] coincide.
  int nodes_per_unit = 60;
  double newton_tol = 2e-11;
  int max_newton_iters = 200;
  int barrier_samples = 2001;
  bool parallel = true;
};

struct ErrorPoint {
  double R = 0.0;
  double eps = 0.0;
  double error = 0.0; // max_{r <= R_obs} |U_exact - u_n|
};

struct SchemeRun {
  std::vector<double> radii;
  std::vector<double> eps_schedule;
  std::vector<radial::BarrierParameters> barriers;
  std::vector<double> boundary_values;
  std::vector<radial::RadialSolution> solutions;
  double observation_radius = 0.0;
  double newton_tol = 0.0;
  std::vector<ErrorPoint> error_curve;
  // Entry n: min over [0, R_obs] of u_{n+1} - u_n.
  std::vector<double> monotonicity_report;
  // Entry n: max over [0, R_obs] of u_n - U_exact.
  std::vector<double> upper_excess;
  std::optional<std::size_t> failed_index;
  std::string failure;
};

// eps_n = 1/(n+1), n = 1..count.
std::vector<double> default_eps_schedule(std::size_t count);

// Empty eps_schedule selects the default.
SchemeRun run_expanding_balls(const Quadratic& source, int N, std::span<const double> radii,
                              double R_obs, std::span<const double> eps_schedule,
                              const SchemeOptions& options = {});

struct RateFit {
  double C_fit = 0.0;
  double c_fit = 0.0;
  double r_squared = 0.0;
  std::vector<ErrorPoint> used;
  std::vector<ErrorPoint> excluded; // at or below the noise floor
};

// Least squares of log error = log C - c (R - R_obs), ignoring points <= floor.
RateFit fit_log_linear(std::span<const ErrorPoint> curve, double R_obs, double floor);

// Floor is 10x the run's Newton tolerance.
RateFit fit_convergence_rate(const SchemeRun& run);

} // namespace hjb::monotone

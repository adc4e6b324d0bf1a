#include "hjb/monotone/scheme.hpp"

#include "hjb/core/errors.hpp"
#include "hjb/exact/quadratic.hpp"

#include <algorithm>
#include <cmath>
#include <future>
#include <limits>

namespace hjb::monotone {

namespace {

struct BallResult {
  radial::BarrierParameters barrier;
  double boundary = 0.0;
  std::optional<radial::RadialSolution> solution;
  std::string failure;
};

BallResult solve_ball(const ScalarProblem& problem, double R, double eps,
                      const SchemeOptions& options) {
  BallResult out;
  const int m = static_cast<int>(std::lround(R * options.nodes_per_unit)) + 1;
  std::vector<double> samples(static_cast<std::size_t>(options.barrier_samples));
  for (std::size_t i = 0; i < samples.size(); ++i) {
    samples[i] = R * static_cast<double>(i) / static_cast<double>(samples.size() - 1);
  }
  out.barrier = radial::certify_subsolution_barrier(eps, 2.0, problem.dimension(),
                                                    problem.source(), samples);
  out.boundary = radial::subsolution_barrier(out.barrier.c, out.barrier.C, 2.0, R);
  radial::RadialOptions ro;
  ro.R = R;
  ro.m = m;
  ro.bc = radial::DirichletValue{out.boundary};
  ro.newton_tol = options.newton_tol;
  ro.max_newton_iters = options.max_newton_iters;
  // Start from the barrier, which already matches the boundary value.
  ro.initial_guess.resize(static_cast<std::size_t>(m));
  for (int i = 0; i < m; ++i) {
    const double r = R * static_cast<double>(i) / static_cast<double>(m - 1);
    ro.initial_guess[static_cast<std::size_t>(i)] =
        radial::subsolution_barrier(out.barrier.c, out.barrier.C, 2.0, r);
  }
  try {
    out.solution = radial::solve_radial_bvp(problem, ro);
  } catch (const SolverError& e) {
    out.failure = e.what();
  }
  return out;
}

} // namespace

std::vector<double> default_eps_schedule(std::size_t count) {
  std::vector<double> eps(count);
  for (std::size_t n = 0; n < count; ++n) eps[n] = 1.0 / static_cast<double>(n + 2);
  return eps;
}

SchemeRun run_expanding_balls(const Quadratic& source, int N, std::span<const double> radii,
                              double R_obs, std::span<const double> eps_schedule,
                              const SchemeOptions& options) {
  const ScalarProblem problem(N, 2.0, source);
  if (radii.empty()) throw PreconditionError("need at least one ball radius");
  for (std::size_t n = 1; n < radii.size(); ++n) {
    if (!(radii[n] > radii[n - 1])) throw PreconditionError("radii must be strictly increasing");
  }
  if (!(R_obs > 0.0 && R_obs < radii.front())) {
    throw PreconditionError("observation radius must lie in (0, R_1)");
  }
  if (options.nodes_per_unit < 1) throw PreconditionError("nodes_per_unit must be >= 1");
  for (double R : radii) {
    const double cells = R * options.nodes_per_unit;
    if (std::abs(cells - std::round(cells)) > 1e-9 * cells) {
      throw PreconditionError("every radius must be a multiple of 1/nodes_per_unit");
    }
  }

  SchemeRun run;
  run.radii.assign(radii.begin(), radii.end());
  run.eps_schedule = eps_schedule.empty()
                         ? default_eps_schedule(radii.size())
                         : std::vector<double>(eps_schedule.begin(), eps_schedule.end());
  if (run.eps_schedule.size() != radii.size()) {
    throw PreconditionError("eps schedule length must match the number of balls");
  }
  for (std::size_t n = 0; n < run.eps_schedule.size(); ++n) {
    const double e = run.eps_schedule[n];
    if (!(e > 0.0 && e < 1.0) || (n > 0 && !(e < run.eps_schedule[n - 1]))) {
      throw PreconditionError("eps schedule must be decreasing inside (0, 1)");
    }
  }
  run.observation_radius = R_obs;
  run.newton_tol = options.newton_tol;

  std::vector<BallResult> balls(radii.size());
  if (options.parallel && radii.size() > 1) {
    std::vector<std::future<BallResult>> jobs;
    for (std::size_t n = 0; n < radii.size(); ++n) {
      jobs.push_back(std::async(std::launch::async, solve_ball, std::cref(problem), radii[n],
                                run.eps_schedule[n], std::cref(options)));
    }
    for (std::size_t n = 0; n < radii.size(); ++n) balls[n] = jobs[n].get();
  } else {
    for (std::size_t n = 0; n < radii.size(); ++n) {
      balls[n] = solve_ball(problem, radii[n], run.eps_schedule[n], options);
    }
  }

  const auto exact = exact::scalar_quadratic_solution(source.a, source.b, N);
  const double h = 1.0 / options.nodes_per_unit;
  const auto observed = static_cast<std::size_t>(std::floor(R_obs / h + 1e-9)) + 1;
  for (std::size_t n = 0; n < balls.size(); ++n) {
    auto& ball = balls[n];
    if (!ball.solution) {
      run.failed_index = n;
      run.failure = ball.failure;
      run.radii.resize(n);
      run.eps_schedule.resize(n);
      break;
    }
    const auto& sol = *ball.solution;
    double error = 0.0;
    double above = -std::numeric_limits<double>::infinity();
    for (std::size_t k = 0; k < observed; ++k) {
      const double diff = sol.U[k] - exact::value_at(exact, sol.grid.nodes[k]);
      error = std::max(error, std::abs(diff));
      above = std::max(above, diff);
    }
    run.error_curve.push_back({radii[n], run.eps_schedule[n], error});
    run.upper_excess.push_back(above);
    if (n > 0) {
      const auto& prev = run.solutions.back();
      double gap = std::numeric_limits<double>::infinity();
      for (std::size_t k = 0; k < observed; ++k) gap = std::min(gap, sol.U[k] - prev.U[k]);
      run.monotonicity_report.push_back(gap);
    }
    run.barriers.push_back(ball.barrier);
    run.boundary_values.push_back(ball.boundary);
    run.solutions.push_back(std::move(*ball.solution));
  }
  return run;
}

RateFit fit_log_linear(std::span<const ErrorPoint> curve, double R_obs, double floor) {
  RateFit fit;
  for (const auto& pt : curve) {
    (pt.error > floor && pt.error > 0.0 ? fit.used : fit.excluded).push_back(pt);
  }
  if (fit.used.size() < 3) {
    throw InsufficientDataError("rate fit needs >= 3 errors above the noise floor, got " +
                                std::to_string(fit.used.size()));
  }
  const double n = static_cast<double>(fit.used.size());
  double mx = 0.0, my = 0.0;
  for (const auto& pt : fit.used) {
    mx += pt.R - R_obs;
    my += std::log(pt.error);
  }
  mx /= n;
  my /= n;
  double sxx = 0.0, sxy = 0.0, syy = 0.0;
  for (const auto& pt : fit.used) {
    const double dx = pt.R - R_obs - mx;
    const double dy = std::log(pt.error) - my;
    sxx += dx * dx;
    sxy += dx * dy;
    syy += dy * dy;
  }
  if (sxx == 0.0) throw InsufficientDataError("rate fit needs distinct radii");
  const double slope = sxy / sxx;
  fit.c_fit = -slope;
  fit.C_fit = std::exp(my - slope * mx);
  fit.r_squared = syy == 0.0 ? 1.0 : (sxy * sxy) / (sxx * syy);
  return fit;
}

RateFit fit_convergence_rate(const SchemeRun& run) {
  return fit_log_linear(run.error_curve, run.observation_radius, 10.0 * run.newton_tol);
}

} // namespace hjb::monotone

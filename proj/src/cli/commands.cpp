#include "hjb/cli/commands.hpp"

#include "hjb/cli/acceptance.hpp"
#include "hjb/core/errors.hpp"
#include "hjb/exact/quadratic.hpp"
#include "hjb/exact/regime.hpp"
#include "hjb/grid2d/solver.hpp"
#include "hjb/monotone/scheme.hpp"
#include "hjb/radial/solver.hpp"
#include "hjb/simd/kernels.hpp"
#include "hjb/stochastic/estimators.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>

namespace hjb::cli {

namespace fs = std::filesystem;

namespace {

std::vector<double> linspace(double lo, double hi, int count) {
  std::vector<double> out(static_cast<std::size_t>(count));
  for (int i = 0; i < count; ++i) out[static_cast<std::size_t>(i)] = lo + (hi - lo) * i / (count - 1);
  return out;
}

std::string tag(double x) { return format_double(x); }

void write_estimate(CsvWriter& csv, const std::string& name, const stochastic::MonteCarloEstimate& e) {
  csv.cell(name).cell(e.mean).cell(e.std_error).cell(e.n_samples);
  csv.end_row();
}

std::vector<std::string> path_header(std::size_t dim) {
  std::vector<std::string> h{"t", "path_id"};
  for (std::size_t c = 1; c <= dim; ++c) h.push_back("x" + std::to_string(c));
  h.push_back("regime");
  return h;
}

// Unmodulated paths carry regime 0.
void write_paths(const fs::path& file, const stochastic::PathSet& ps, std::size_t count) {
  CsvWriter csv(file, path_header(ps.dim));
  count = std::min(count, ps.n_paths);
  for (std::size_t p = 0; p < count; ++p) {
    for (std::size_t r = 0; r < ps.n_records(); ++r) {
      csv.cell(ps.times[r]).cell(p);
      const double* x = ps.state(p, r);
      for (std::size_t c = 0; c < ps.dim; ++c) csv.cell(x[c]);
      csv.cell(ps.has_regimes() ? ps.regime(p, r) : 0);
      csv.end_row();
    }
  }
  csv.close();
}

void record_scheme(RunSummary& s, const stochastic::SchemeMetadata& meta) {
  s.text("scheme", meta.scheme);
  s.text("switching", meta.switching);
  s.metric("n_steps", meta.n_steps);
  s.metric("record_stride", meta.record_stride);
  s.metric("min_gain", meta.min_gain);
  s.metric("stability_warning", meta.stability_warning ? 1 : 0);
}

// Within tolerance when |estimate - exact| <= 3 SE + bias.
bool within(RunSummary& s, const std::string& name, const stochastic::MonteCarloEstimate& est,
            double exact, double bias) {
  const double dev = std::abs(est.mean - exact);
  s.metric(name + "_exact", exact);
  s.metric(name + "_estimate", est.mean);
  s.metric(name + "_std_error", est.std_error);
  s.metric(name + "_bias_allowance", bias);
  s.metric(name + "_z", est.std_error > 0.0 ? (est.mean - exact) / est.std_error : 0.0);
  return s.check(name, dev <= 3.0 * est.std_error + bias);
}

} // namespace

RunSummary run_exact(const ExactParams& p, const fs::path& dir) {
  RunSummary s;
  s.command = "exact";
  const auto c = exact::scalar_quadratic_solution(p.a, p.b, p.N);
  const Quadratic source{p.a, p.b};
  const auto radii = linspace(0.0, p.r_max, p.samples);

  const long double A = c.A;
  const double quad_res = static_cast<double>(std::abs(2.0L * A * A + A - p.a));
  const double offset_res = std::abs(c.B - (p.b + c.A * p.N));
  const double pde_res = exact::pde_residual_quadratic(c, source, p.N, radii);

  CsvWriter csv(dir / "radial.csv", {"r", "u", "s", "upp", "residual"});
  for (double r : radii) {
    const double single[] = {r};
    csv.cell(r).cell(exact::value_at(c, r)).cell(2.0 * c.A * r).cell(2.0 * c.A);
    csv.cell(exact::pde_residual_quadratic(c, source, p.N, single));
    csv.end_row();
  }
  csv.close();
  s.artifacts.push_back("radial.csv");

  const auto sens = exact::scalar_sensitivities(p.a, p.N);
  s.metric("A", c.A);
  s.metric("B", c.B);
  s.metric("rejected_root", exact::rejected_root(p.a));
  s.metric("dA_da", sens.dA_da);
  s.metric("dB_da", sens.dB_da);
  s.metric("dB_db", sens.dB_db);
  s.metric("quadratic_residual", quad_res);
  s.metric("offset_residual", offset_res);
  s.metric("pde_residual", pde_res);
  s.check("quadratic_residual", quad_res <= 1e-12);
  s.check("offset_residual", offset_res <= 1e-12);
  s.check("pde_residual", pde_res <= 1e-12);
  return s;
}

RunSummary run_radial(const RadialParams& p, const fs::path& dir) {
  RunSummary s;
  s.command = "radial";
  const ScalarProblem problem(p.N, p.p, Quadratic{p.a, p.b});
  radial::RadialOptions o;
  o.R = p.R;
  o.m = p.m;
  o.newton_tol = p.newton_tol;
  o.max_newton_iters = p.max_newton_iters;
  switch (p.bc) {
  case BcKind::NeumannExact: o.bc = radial::NeumannExactQuadratic{}; break;
  case BcKind::DirichletExact: o.bc = radial::DirichletExactQuadratic{}; break;
  case BcKind::Neumann: o.bc = radial::NeumannSlope{p.bc_value}; break;
  case BcKind::Dirichlet: o.bc = radial::DirichletValue{p.bc_value}; break;
  }
  const auto sol = radial::solve_radial_bvp(problem, o);

  CsvWriter csv(dir / "radial.csv", {"r", "u", "s", "upp", "residual"});
  for (std::size_t i = 0; i < sol.U.size(); ++i) {
    csv.cell(sol.grid.nodes[i]).cell(sol.U[i]).cell(sol.S[i]).cell(sol.Upp[i]).cell(sol.residual[i]);
    csv.end_row();
  }
  csv.close();
  s.artifacts.push_back("radial.csv");

  double independent = 0.0;
  for (double r : radial::radial_residual(sol, problem)) independent = std::max(independent, std::abs(r));
  const double residual = std::max(sol.diagnostics.max_residual, independent);

  s.metric("iterations", sol.diagnostics.iterations);
  s.metric("discrete_residual", sol.diagnostics.discrete_residual);
  s.metric("max_residual", residual);
  s.metric("is_convex", sol.diagnostics.is_convex ? 1 : 0);
  s.metric("gradient_monotone", sol.diagnostics.gradient_monotone ? 1 : 0);
  s.metric("u_origin", sol.U.front());
  s.metric("u_boundary", sol.U.back());
  s.check("residual", residual <= 1e-8);
  if (p.bc == BcKind::NeumannExact || p.bc == BcKind::DirichletExact) {
    const auto c = exact::scalar_quadratic_solution(p.a, p.b, p.N);
    double u_err = 0.0;
    double upp_err = 0.0;
    for (std::size_t i = 0; i < sol.U.size(); ++i) {
      u_err = std::max(u_err, std::abs(sol.U[i] - exact::value_at(c, sol.grid.nodes[i])));
      upp_err = std::max(upp_err, std::abs(sol.Upp[i] - 2.0 * c.A));
    }
    s.metric("A", c.A);
    s.metric("max_u_error", u_err);
    s.metric("max_upp_error", upp_err);
    s.check("second_derivative", upp_err <= 1e-6);
  }
  return s;
}

RunSummary run_grid2d(const Grid2dParams& p, const fs::path& dir) {
  RunSummary s;
  s.command = "grid2d";
  const grid2d::Grid2D g(p.L, p.n);
  const SourceSpec source = p.source();
  const bool closed = p.has_closed_form();
  exact::QuadraticCoefficients c{};
  grid2d::Field2D exact_field;
  if (closed) {
    c = exact::scalar_quadratic_solution(p.quadratic.a, p.quadratic.b, 2);
    exact_field = grid2d::quadratic_field(g, c);
  }
  const grid2d::Field2D boundary = closed ? exact_field : grid2d::source_field(g, source);
  std::optional<grid2d::Field2D> initial;
  if (p.init == InitKind::Exact) initial = exact_field;
  if (p.init == InitKind::Zero) {
    grid2d::Field2D zero(g, 0.0);
    for (int i = 0; i < g.n; ++i) {
      for (int j = 0; j < g.n; ++j) {
        if (zero.on_frame(i, j)) zero.at(i, j) = boundary.at(i, j);
      }
    }
    initial = std::move(zero);
  }
  grid2d::SolveOptions o;
  o.lambda = p.lambda;
  o.damping = p.damping;
  o.tol = p.tol;
  o.max_iters = p.max_iters;
  o.gradient_clip = p.gradient_clip;
  const auto res = grid2d::solve_fd2d(source, p.p, g, o, boundary, initial);

  CsvWriter csv(dir / "grid2d.csv", {"x", "y", "u", "exact", "abs_err"});
  for (int i = 0; i < g.n; ++i) {
    for (int j = 0; j < g.n; ++j) {
      const double u = res.field.at(i, j);
      csv.cell(g.coord(i)).cell(g.coord(j)).cell(u);
      if (closed) {
        csv.cell(exact_field.at(i, j)).cell(std::abs(u - exact_field.at(i, j)));
      } else {
        csv.empty().empty();
      }
      csv.end_row();
    }
  }
  csv.close();
  s.artifacts.push_back("grid2d.csv");

  const auto& log = res.log;
  s.text("source", describe(source));
  s.metric("converged", log.converged ? 1 : 0);
  s.metric("iterations", log.iterations);
  s.metric("clipped_nodes", log.clipped_nodes);
  s.metric("final_relative_update", log.relative_updates.empty() ? 0.0 : log.relative_updates.back());
  const auto sym = grid2d::radial_symmetry_deviation(res.field, p.bins);
  s.metric("symmetry_spread", sym.max_bin_spread);
  s.metric("empty_bins", sym.empty_bins.size());
  const auto [lo, hi] = std::minmax_element(res.field.values.begin(), res.field.values.end());
  s.metric("u_min", *lo);
  s.metric("u_max", *hi);
  if (closed) {
    const auto err = grid2d::compare_to_exact(res.field, c);
    const double baseline = grid2d::radial_symmetry_deviation(exact_field, p.bins).max_bin_spread;
    s.metric("A", c.A);
    s.metric("B", c.B);
    s.metric("max_abs_err", err.max_abs_err);
    s.metric("rms_err", err.rms_err);
    s.metric("symmetry_baseline", baseline);
  }
  if (!log.converged) {
    s.exit_code = 2;
    s.error = "relaxation did not converge in " + std::to_string(log.iterations) +
              " iterations (clipped nodes: " + std::to_string(log.clipped_nodes) + ")";
    return s;
  }
  if (closed) {
    s.check("max_abs_err", *s.value("max_abs_err") <= 0.05);
    s.check("symmetry", *s.value("symmetry_spread") <= 5.0 * *s.value("symmetry_baseline"));
  }
  return s;
}

RunSummary run_monotone(const MonotoneParams& p, const fs::path& dir) {
  RunSummary s;
  s.command = "monotone";
  monotone::SchemeOptions o;
  o.nodes_per_unit = p.nodes_per_unit;
  o.newton_tol = p.newton_tol;
  o.parallel = p.parallel;
  const auto run = monotone::run_expanding_balls(Quadratic{p.a, p.b}, p.N, p.radii, p.R_obs, p.eps, o);

  CsvWriter csv(dir / "convergence.csv", {"R_n", "eps_n", "error", "min_monotone_gap"});
  for (std::size_t n = 0; n < run.error_curve.size(); ++n) {
    const auto& e = run.error_curve[n];
    csv.cell(e.R).cell(e.eps).cell(e.error);
    if (n == 0) csv.empty();
    else csv.cell(run.monotonicity_report[n - 1]);
    csv.end_row();
  }
  csv.close();
  s.artifacts.push_back("convergence.csv");

  for (std::size_t n = 0; n < run.barriers.size(); ++n) {
    const std::string k = std::to_string(n + 1);
    s.metric("barrier_c_" + k, run.barriers[n].c);
    s.metric("barrier_C_" + k, run.barriers[n].C);
    s.metric("boundary_value_" + k, run.boundary_values[n]);
  }
  s.metric("newton_tol", run.newton_tol);
  if (run.failed_index) {
    s.exit_code = 2;
    s.error = "ball " + std::to_string(*run.failed_index + 1) + " failed: " + run.failure;
    return s;
  }

  const double slack = 10.0 * run.newton_tol;
  double min_gap = std::numeric_limits<double>::infinity();
  for (double g : run.monotonicity_report) min_gap = std::min(min_gap, g);
  double max_above = -std::numeric_limits<double>::infinity();
  for (double e : run.upper_excess) max_above = std::max(max_above, e);
  bool decreasing = true;
  for (std::size_t n = 1; n < run.error_curve.size(); ++n) {
    decreasing = decreasing && run.error_curve[n].error < run.error_curve[n - 1].error;
  }
  s.metric("min_monotone_gap", min_gap);
  s.metric("max_upper_excess", max_above);
  s.metric("final_error", run.error_curve.back().error);
  s.check("ordering", min_gap >= -slack);
  s.check("upper_bound", max_above <= slack);
  s.check("error_decreasing", decreasing);
  try {
    const auto fit = monotone::fit_convergence_rate(run);
    s.metric("c_fit", fit.c_fit);
    s.metric("C_fit", fit.C_fit);
    s.metric("r_squared", fit.r_squared);
    s.metric("fit_points", fit.used.size());
    s.check("decay_fit", fit.c_fit > 0.0 && fit.r_squared >= 0.9);
  } catch (const InsufficientDataError& e) {
    s.text("fit_error", e.what());
    s.check("decay_fit", false);
  }
  return s;
}

RunSummary run_simulate(const SimulateParams& p, std::uint64_t seed, const fs::path& dir) {
  RunSummary s;
  s.command = "simulate";
  const auto c = exact::scalar_quadratic_solution(p.a, p.b, p.N);
  const stochastic::RngSpec rng{seed};
  stochastic::SimulationOptions so;
  so.record_stride = p.record_stride;
  so.threads = p.threads;
  const auto paths = stochastic::simulate_ou(c.A, p.sigma, p.x0, p.T, p.dt,
                                             static_cast<std::size_t>(p.paths), rng, so);
  write_paths(dir / "paths.csv", paths, static_cast<std::size_t>(p.output_paths));
  s.artifacts.push_back("paths.csv");

  const auto moment = stochastic::estimate_stationary_moments(paths, p.burn_in);
  const auto cost = stochastic::long_run_cost_estimate(paths, p.a, p.b, c.A, p.burn_in);
  const auto decay = stochastic::transversality_decay(paths, c, p.checkpoints);

  CsvWriter csv(dir / "estimates.csv", {"name", "mean", "std_error", "n"});
  write_estimate(csv, "stationary_second_moment", moment);
  write_estimate(csv, "long_run_cost", cost);
  for (const auto& d : decay) write_estimate(csv, "transversality_t_" + tag(d.t), d.estimate);
  csv.close();
  s.artifacts.push_back("estimates.csv");

  // Bias allowance: the Euler chain's stationary variance differs from the
  // continuous one, and the start has not fully decayed at the burn-in time.
  const double k = 2.0 * c.A;
  const double x0_sq = [&] {
    double acc = 0.0;
    for (double x : p.x0) acc += x * x;
    return acc;
  }();
  const double exact_moment = p.N * p.sigma * p.sigma / (4.0 * c.A);
  const double euler_moment = p.N * p.sigma * p.sigma / (k * (2.0 - k * p.dt));
  const double burn_steps = std::floor(p.burn_in * p.T / p.dt);
  const double transient = x0_sq * std::pow(1.0 - k * p.dt, 2.0 * burn_steps);
  const double moment_bias = std::abs(euler_moment - exact_moment) + transient;
  const double cost_bias = (2.0 * c.A * c.A + p.a) * moment_bias;

  s.metric("A", c.A);
  s.metric("B", c.B);
  record_scheme(s, paths.meta);
  within(s, "stationary_moment", moment, exact_moment, moment_bias);
  within(s, "long_run_cost", cost, exact::long_run_cost(p.a, p.b, p.N, p.sigma), cost_bias);

  bool below = true;
  bool decreasing = true;
  for (std::size_t i = 0; i < decay.size(); ++i) {
    const double t = decay[i].t;
    const double bound = std::exp(-t) * (c.A * x0_sq + p.N * p.sigma * p.sigma / (4.0 * c.A) + c.B);
    s.metric("transversality_t_" + tag(t), decay[i].estimate.mean);
    s.metric("transversality_bound_t_" + tag(t), bound);
    below = below && decay[i].estimate.mean <= bound;
    if (i > 0) decreasing = decreasing && decay[i].estimate.mean < decay[i - 1].estimate.mean;
  }
  if (!decay.empty()) {
    s.check("transversality_bound", below);
    s.check("transversality_decreasing", decreasing);
  }
  return s;
}

RunSummary run_verify(const VerifyParams& p, std::uint64_t seed, const fs::path& dir) {
  RunSummary s;
  s.command = "verify";
  const auto c = exact::scalar_quadratic_solution(p.a, p.b, p.N);
  const stochastic::RngSpec rng{seed};
  CsvWriter csv(dir / "estimates.csv", {"name", "mean", "std_error", "n"});
  double worst_z = 0.0;
  bool all_pass = true;
  s.metric("A", c.A);
  s.metric("B", c.B);
  for (double x : p.x0) {
    stochastic::DiscountedCostParams dp;
    dp.a = p.a;
    dp.b = p.b;
    dp.N = p.N;
    dp.x0.assign(static_cast<std::size_t>(p.N), x);
    dp.sigma = p.sigma;
    dp.T = p.T;
    dp.dt = p.dt;
    dp.n_paths = static_cast<std::size_t>(p.paths);
    dp.truncation_budget = p.truncation_budget;
    dp.threads = p.threads;
    const auto vr = stochastic::verify_value_function(dp, rng);
    const std::string at = "_x0_" + tag(x);
    write_estimate(csv, "optimal_cost" + at, vr.estimate);
    s.metric("u_exact" + at, vr.u_exact);
    s.metric("estimate" + at, vr.estimate.mean);
    s.metric("std_error" + at, vr.estimate.std_error);
    s.metric("truncation_bound" + at, vr.truncation_bound);
    s.metric("tolerance" + at, vr.tolerance);
    s.metric("z_score" + at, vr.z_score);
    s.check("value" + at, vr.pass);
    all_pass = all_pass && vr.pass;
    if (std::abs(vr.z_score) > std::abs(worst_z)) worst_z = vr.z_score;

    for (double f : p.gain_factors) {
      dp.gain = f * 2.0 * c.A;
      const auto cr = stochastic::estimate_discounted_cost(dp, rng);
      const std::string name = "gain_" + tag(dp.gain) + at;
      write_estimate(csv, "perturbed_cost_" + name, cr.estimate);
      s.metric("perturbed_cost_" + name, cr.estimate.mean);
      s.metric("closed_form_cost_" + name,
               stochastic::linear_feedback_cost(p.a, p.b, p.N, p.sigma, dp.gain,
                                                p.N * x * x));
      s.check("suboptimal_" + name, cr.estimate.mean >= vr.estimate.mean - 3.0 * vr.estimate.std_error);
    }
  }
  csv.close();
  s.artifacts.push_back("estimates.csv");
  s.metric("z_score", worst_z);
  s.metric("pass", all_pass ? 1 : 0);
  return s;
}

RunSummary run_regime(const RegimeParams& p, std::uint64_t seed, const fs::path& dir) {
  RunSummary s;
  s.command = "regime";
  const RegimeModel& m = p.model;
  const std::size_t k = m.regimes();
  const auto coeffs = exact::solve_regime_system(m);
  const double res_beta = exact::beta_residual(m, coeffs.beta);
  const double res_eta = exact::eta_residual(m, coeffs.beta, coeffs.eta);
  for (std::size_t j = 0; j < k; ++j) s.metric("beta_" + std::to_string(j + 1), coeffs.beta[j]);
  for (std::size_t j = 0; j < k; ++j) s.metric("eta_" + std::to_string(j + 1), coeffs.eta[j]);
  s.metric("residual_beta", res_beta);
  s.metric("residual_eta", res_eta);
  s.check("beta_residual", res_beta <= 1e-10);
  s.check("eta_residual", res_eta <= 1e-10);

  // Without switching each regime solves its own scalar equation
  // 2 beta^2 + delta beta - a = 0, eta = (b + sigma^2 beta N) / delta.
  RegimeModel decoupled = m;
  for (auto& row : decoupled.alpha) std::fill(row.begin(), row.end(), 0.0);
  const auto dc = exact::solve_regime_system(decoupled);
  double dec_err = 0.0;
  for (std::size_t j = 0; j < k; ++j) {
    const double d = m.delta[j];
    const double beta = 2.0 * m.a[j] / (d + std::sqrt(d * d + 8.0 * m.a[j]));
    const double eta = (m.b[j] + m.sigma[j] * m.sigma[j] * beta * m.N) / d;
    dec_err = std::max({dec_err, std::abs(dc.beta[j] - beta), std::abs(dc.eta[j] - eta)});
  }
  s.metric("decoupled_error", dec_err);
  s.check("decoupled", dec_err <= 1e-10);
  if (p.multistart_seeds > 0) {
    const double spread = exact::beta_multistart_spread(m, p.multistart_seeds, seed);
    s.metric("multistart_spread", spread);
    s.check("multistart", spread <= 1e-8);
  }

  const auto pi = stationary_distribution(m);
  const stochastic::RngSpec rng{seed};
  stochastic::SimulationOptions so;
  so.record_stride = p.record_stride;
  so.threads = p.threads;
  const auto paths = stochastic::simulate_regime_switching(
      m, coeffs.beta, p.x0, static_cast<std::size_t>(p.j0 - 1), p.T, p.dt,
      static_cast<std::size_t>(p.paths), rng, p.switching, so);
  write_paths(dir / "paths.csv", paths, static_cast<std::size_t>(p.output_paths));
  s.artifacts.push_back("paths.csv");
  record_scheme(s, paths.meta);

  CsvWriter csv(dir / "estimates.csv", {"name", "mean", "std_error", "n"});
  const auto occ = stochastic::regime_occupation(paths, k, p.burn_in);
  bool occ_ok = true;
  for (std::size_t j = 0; j < k; ++j) {
    const std::string id = std::to_string(j + 1);
    write_estimate(csv, "occupation_" + id, occ[j]);
    s.metric("pi_" + id, pi[j]);
    s.metric("occupation_" + id, occ[j].mean);
    s.metric("occupation_std_error_" + id, occ[j].std_error);
    occ_ok = occ_ok && std::abs(occ[j].mean - pi[j]) <= 3.0 * occ[j].std_error;
  }
  s.check("occupation", occ_ok);

  // Switch counts cover every step, so only the endpoints need recording.
  stochastic::SimulationOptions sparse;
  sparse.record_stride = static_cast<int>(stochastic::step_count(p.switch_T, p.switch_dt));
  sparse.threads = p.threads;
  stochastic::MonteCarloEstimate rates[2];
  const stochastic::Switching kinds[2] = {stochastic::Switching::BernoulliEuler,
                                          stochastic::Switching::ExponentialClock};
  for (int i = 0; i < 2; ++i) {
    const auto sw = stochastic::simulate_regime_switching(
        m, coeffs.beta, p.x0, static_cast<std::size_t>(p.j0 - 1), p.switch_T, p.switch_dt,
        static_cast<std::size_t>(p.switch_paths), rng, kinds[i], sparse);
    rates[i] = stochastic::switch_rate(sw);
    const std::string name = std::string("switch_rate_") + stochastic::switching_name(kinds[i]);
    write_estimate(csv, name, rates[i]);
    s.metric(name, rates[i].mean);
    s.metric(name + "_std_error", rates[i].std_error);
  }
  csv.close();
  s.artifacts.push_back("estimates.csv");
  double stationary_rate = 0.0;
  for (std::size_t j = 0; j < k; ++j) stationary_rate += pi[j] * -m.alpha[j][j];
  s.metric("stationary_switch_rate", stationary_rate);
  const double se = std::hypot(rates[0].std_error, rates[1].std_error);
  s.check("switch_rates_agree", std::abs(rates[0].mean - rates[1].mean) <= 3.0 * se);
  return s;
}

int exit_code_for(const std::exception& e) {
  if (dynamic_cast<const SolverError*>(&e) || dynamic_cast<const BranchError*>(&e) ||
      dynamic_cast<const MatrixError*>(&e)) {
    return 2;
  }
  return 1;
}

RunSummary execute(const std::string& command, const nlohmann::json& parameters,
                   std::uint64_t seed, const fs::path& dir) {
  RunSummary s;
  try {
    fs::create_directories(dir);
    if (command == "exact") s = run_exact(parse_exact(parameters), dir);
    else if (command == "radial") s = run_radial(parse_radial(parameters), dir);
    else if (command == "grid2d") s = run_grid2d(parse_grid2d(parameters), dir);
    else if (command == "monotone") s = run_monotone(parse_monotone(parameters), dir);
    else if (command == "simulate") s = run_simulate(parse_simulate(parameters), seed, dir);
    else if (command == "verify") s = run_verify(parse_verify(parameters), seed, dir);
    else if (command == "regime") s = run_regime(parse_regime(parameters), seed, dir);
    else throw ConfigError("command '" + command + "' cannot run as a single step");
  } catch (const std::exception& e) {
    s = RunSummary{};
    s.exit_code = exit_code_for(e);
    s.error = e.what();
  }
  s.command = command;
  s.text("seed", std::to_string(seed));
  s.text("simd_isa", simd::isa_name(simd::active_isa()));
  s.text("normal_method", stochastic::kNormalMethod);
  try {
    write_summary(dir / "summary.txt", s);
  } catch (const std::exception& e) {
    if (s.exit_code == 0) s.exit_code = 1;
    if (s.error.empty()) s.error = e.what();
  }
  return s;
}

namespace {

void report(const RunSummary& s, bool quiet, std::ostream& out, std::ostream& err) {
  if (!s.error.empty()) err << s.command << ": " << s.error << '\n';
  for (const auto& c : s.failed_checks) err << s.command << ": check failed: " << c << '\n';
  if (quiet) return;
  out << "status=" << (s.ok() ? "ok" : "failed") << '\n';
  for (const auto& m : s.metrics) out << m.name << '=' << m.text << '\n';
}

} // namespace

int run(const RunConfig& config, bool quiet, std::ostream& out, std::ostream& err) {
  if (config.command == "all") {
    const auto report_all = run_acceptance(config.output_dir, config.seed, quiet ? nullptr : &out);
    for (const auto& s : report_all.runs) {
      if (!s.error.empty()) err << s.command << ": " << s.error << '\n';
    }
    return report_all.exit_code;
  }
  const auto s = execute(config.command, config.parameters, config.seed, config.output_dir);
  report(s, quiet, out, err);
  return s.exit_code;
}

} // namespace hjb::cli

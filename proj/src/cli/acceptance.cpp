#include "hjb/cli/acceptance.hpp"

#include "hjb/cli/commands.hpp"
#include "hjb/core/errors.hpp"
#include "hjb/exact/quadratic.hpp"
#include "hjb/grid2d/solver.hpp"
#include "hjb/radial/barriers.hpp"
#include "hjb/radial/solver.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <iterator>
#include <ostream>
#include <sstream>

namespace hjb::cli {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

struct Step {
  std::string name; // subdirectory
  std::string command;
  json parameters;
};

std::vector<Step> acceptance_steps() {
  return {
      {"exact_a1_b0_N1", "exact", {{"a", 1.0}, {"b", 0.0}, {"N", 1}}},
      {"exact_a1_b0_N2", "exact", {{"a", 1.0}, {"b", 0.0}, {"N", 2}}},
      {"exact_a2_b1_N2", "exact", {{"a", 2.0}, {"b", 1.0}, {"N", 2}}},
      {"radial_N1", "radial", {{"N", 1}}},
      {"radial_N2", "radial", {{"N", 2}}},
      {"radial_N3", "radial", {{"N", 3}}},
      {"monotone", "monotone", json::object()},
      {"grid2d", "grid2d", json::object()},
      {"grid2d_nonradial", "grid2d", {{"source", "anisotropic"}}},
      {"simulate", "simulate", json::object()},
      {"verify", "verify", json::object()},
      {"regime", "regime", json::object()},
  };
}

std::string num(double x) {
  if (std::isnan(x)) return "nan";
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.3g", x);
  return buf;
}

double get(const RunSummary& s, const std::string& name) {
  const auto v = s.value(name);
  return v ? *v : std::nan("");
}

// The run finished and every named check passed.
bool run_passed(const RunSummary& s, std::initializer_list<const char*> checks,
                std::string& detail) {
  bool ok = s.exit_code == 0;
  if (!s.error.empty()) detail += s.command + " error: " + s.error + "; ";
  for (const char* c : checks) {
    if (!s.check_passed(c)) {
      ok = false;
      detail += std::string("check ") + c + " failed; ";
    }
  }
  return ok;
}

std::vector<double> linspace(double lo, double hi, int count) {
  std::vector<double> out(static_cast<std::size_t>(count));
  for (int i = 0; i < count; ++i) out[static_cast<std::size_t>(i)] = lo + (hi - lo) * i / (count - 1);
  return out;
}

std::string join(const std::vector<double>& v) {
  std::string out = "(";
  for (std::size_t i = 0; i < v.size(); ++i) out += (i ? ", " : "") + num(v[i]);
  return out + ")";
}

// Max nodal error of the radial solver against the closed form, f = r^2,
// p = 2, R = 10, with the interval count doubling.
std::vector<double> radial_mesh_errors(int N) {
  const ScalarProblem problem(N, 2.0, Quadratic{1.0, 0.0});
  const auto c = exact::scalar_quadratic_solution(1.0, 0.0, N);
  std::vector<double> errs;
  for (int intervals : {150, 300, 600, 1200}) {
    radial::RadialOptions o;
    o.R = 10.0;
    o.m = intervals + 1;
    const auto sol = radial::solve_radial_bvp(problem, o);
    double e = 0.0;
    for (std::size_t i = 0; i < sol.U.size(); ++i) {
      e = std::max(e, std::abs(sol.U[i] - exact::value_at(c, sol.grid.nodes[i])));
    }
    errs.push_back(e);
  }
  return errs;
}

std::vector<double> ratios(const std::vector<double>& errs) {
  std::vector<double> out;
  for (std::size_t k = 1; k < errs.size(); ++k) out.push_back(errs[k - 1] / errs[k]);
  return out;
}

bool in_band(const std::vector<double>& r, double lo, double hi) {
  return std::all_of(r.begin(), r.end(), [&](double x) { return x >= lo && x <= hi; });
}

CriterionResult criterion_exact(const std::vector<const RunSummary*>& runs) {
  CriterionResult c{1, "exact scalar solution", true, ""};
  double worst = 0.0;
  for (const RunSummary* s : runs) {
    c.pass = run_passed(*s, {"quadratic_residual", "offset_residual", "pde_residual"}, c.detail) &&
             c.pass;
    worst = std::max({worst, get(*s, "quadratic_residual"), get(*s, "offset_residual"),
                      get(*s, "pde_residual")});
  }
  c.detail += "max residual " + num(worst) + " (limit 1e-12)";
  return c;
}

CriterionResult criterion_radial(const std::vector<const RunSummary*>& runs) {
  CriterionResult c{2, "radial boundary value problem", true, ""};
  double res = 0.0;
  double upp = 0.0;
  for (const RunSummary* s : runs) {
    c.pass = run_passed(*s, {"residual", "second_derivative"}, c.detail) && c.pass;
    res = std::max(res, get(*s, "max_residual"));
    upp = std::max(upp, get(*s, "max_upp_error"));
  }
  c.detail += "max residual " + num(res) + " (limit 1e-8), max |U''-2A| " + num(upp) +
              " (limit 1e-6); mesh doubling ratios";
  for (int N : {1, 2, 3}) {
    try {
      const auto errs = radial_mesh_errors(N);
      const auto r = ratios(errs);
      const bool ok = in_band(r, 3.5, 4.5);
      c.pass = c.pass && ok;
      const bool roundoff = *std::max_element(errs.begin(), errs.end()) <= 1e-12;
      c.detail += " N=" + std::to_string(N) + " errors " + join(errs) + " ratios " + join(r) +
                  (ok ? "" : " outside [3.5, 4.5]") +
                  (roundoff ? " (errors at round-off: the centered stencil is exact on quadratics)"
                            : "") +
                  ";";
    } catch (const std::exception& e) {
      c.pass = false;
      c.detail += " N=" + std::to_string(N) + " mesh study failed: " + e.what() + ";";
    }
  }
  return c;
}

CriterionResult criterion_monotone(const RunSummary& s) {
  CriterionResult c{3, "monotone expanding-ball scheme", true, ""};
  c.pass = run_passed(s, {"ordering", "upper_bound", "error_decreasing", "decay_fit"}, c.detail);
  c.detail += "min gap " + num(get(s, "min_monotone_gap")) + ", max excess over exact " +
              num(get(s, "max_upper_excess")) + ", c_fit " + num(get(s, "c_fit")) + ", r^2 " +
              num(get(s, "r_squared"));
  return c;
}

// Benchmark error at n = 60 and n = 120 with the relaxation run to round-off.
std::vector<double> grid_refinement_errors() {
  const auto coeffs = exact::scalar_quadratic_solution(2.0, 1.0, 2);
  std::vector<double> errs;
  for (int n : {60, 120}) {
    const grid2d::Grid2D g(2.0, n);
    const auto exact_field = grid2d::quadratic_field(g, coeffs);
    grid2d::SolveOptions o;
    o.tol = 1e-12;
    o.max_iters = 20000;
    const auto res = grid2d::solve_fd2d(Quadratic{2.0, 1.0}, 2.0, g, o, exact_field);
    if (!res.log.converged) throw SolverError("refinement solve did not converge", 0.0, res.log.iterations);
    errs.push_back(grid2d::compare_to_exact(res.field, coeffs).max_abs_err);
  }
  return errs;
}

CriterionResult criterion_grid(const RunSummary& bench, const RunSummary& nonradial) {
  CriterionResult c{4, "2D benchmark and broken symmetry", true, ""};
  c.pass = run_passed(bench, {"max_abs_err", "symmetry"}, c.detail);
  c.detail += "n=60 max error " + num(get(bench, "max_abs_err")) + " (limit 0.05), spread " +
              num(get(bench, "symmetry_spread")) + " vs exact baseline " +
              num(get(bench, "symmetry_baseline")) + "; ";
  try {
    const auto errs = grid_refinement_errors();
    const double ratio = errs[0] / errs[1];
    const bool ok = ratio >= 3.5 && ratio <= 4.5;
    c.pass = c.pass && ok;
    c.detail += "n=60->120 errors " + join(errs) + " ratio " + num(ratio) +
                (ok ? "" : " outside [3.5, 4.5]") +
                (ratio > 6.0 ? " (third order: the interior stencil is exact on quadratics and "
                               "only the one-sided first ring errs)"
                             : "") +
                "; ";
  } catch (const std::exception& e) {
    c.pass = false;
    c.detail += std::string("refinement failed: ") + e.what() + "; ";
  }
  const bool nr_ok = run_passed(nonradial, {}, c.detail);
  const double spread = get(nonradial, "symmetry_spread");
  const double baseline = get(bench, "symmetry_baseline");
  const bool broken = spread >= 10.0 * baseline;
  c.pass = c.pass && nr_ok && broken;
  c.detail += "non-radial converged=" + std::string(nr_ok ? "yes" : "no") + " spread " +
              num(spread) + " (need >= " + num(10.0 * baseline) + ")";
  return c;
}

CriterionResult criterion_barriers() {
  CriterionResult c{5, "barrier sub- and supersolutions", true, ""};
  const auto radii = linspace(0.0, 50.0, 5001);
  const auto near = linspace(4.5, 4.999, 200);
  const SourceSpec f = Quadratic{1.0, 0.0};
  for (int N : {1, 2, 3}) {
    const auto cert = radial::certify_subsolution_barrier(0.1, 2.0, N, f, radii);
    const auto recheck = radial::subsolution_barrier_excess(cert.c, cert.C, 2.0, N, f, radii);
    const double steep = radial::explosive_barrier_margin(5.0, 10.0, 2.0, N, near);
    const double flat = radial::explosive_barrier_margin(5.0, 0.1, 2.0, N, near);
    const bool ok = recheck.verified && cert.max_excess <= 0.0 && recheck.max_excess <= 0.0 &&
                    steep >= 0.0 && flat < 0.0;
    c.pass = c.pass && ok;
    c.detail += "N=" + std::to_string(N) + ": c " + num(cert.c) + " C " + num(cert.C) +
                " excess " + num(recheck.max_excess) + ", margin(alpha=10) " + num(steep) +
                ", margin(alpha=0.1) " + num(flat) + "; ";
  }
  return c;
}

CriterionResult criterion_verify(const RunSummary& s) {
  CriterionResult c{6, "Monte Carlo verification", true, ""};
  // Every value and suboptimality check of the run counts.
  c.pass = run_passed(s, {}, c.detail) && s.failed_checks.empty() && s.find("check.value_x0_0") &&
           s.find("check.value_x0_2");
  for (const char* x : {"0", "2"}) {
    c.detail += std::string("x0=") + x + ": estimate " + num(get(s, std::string("estimate_x0_") + x)) +
                " vs " + num(get(s, std::string("u_exact_x0_") + x)) + " z " +
                num(get(s, std::string("z_score_x0_") + x)) + "; ";
  }
  c.detail += std::to_string(s.failed_checks.size()) + " failed checks";
  return c;
}

CriterionResult criterion_stationary(const RunSummary& s) {
  CriterionResult c{7, "stationary and ergodic formulas", true, ""};
  c.pass = run_passed(s, {"stationary_moment", "long_run_cost", "transversality_bound",
                          "transversality_decreasing"},
                      c.detail);
  c.detail += "second moment " + num(get(s, "stationary_moment_estimate")) + " vs " +
              num(get(s, "stationary_moment_exact")) + ", long-run cost " +
              num(get(s, "long_run_cost_estimate")) + " vs " + num(get(s, "long_run_cost_exact"));
  return c;
}

CriterionResult criterion_regime(const RunSummary& s) {
  CriterionResult c{8, "regime-switching system", true, ""};
  c.pass = run_passed(s, {"beta_residual", "eta_residual", "decoupled", "occupation",
                          "switch_rates_agree"},
                      c.detail);
  c.detail += "beta (" + num(get(s, "beta_1")) + ", " + num(get(s, "beta_2")) + "), eta (" +
              num(get(s, "eta_1")) + ", " + num(get(s, "eta_2")) + "), occupation (" +
              num(get(s, "occupation_1")) + ", " + num(get(s, "occupation_2")) +
              "), switch rates " + num(get(s, "switch_rate_bernoulli-euler")) + " / " +
              num(get(s, "switch_rate_exponential-clock"));
  return c;
}

std::string read_bytes(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

CriterionResult criterion_determinism(const fs::path& dir, const std::vector<Step>& steps,
                                      const std::vector<RunSummary>& first, std::uint64_t seed,
                                      std::ostream* progress) {
  CriterionResult c{9, "determinism", true, ""};
  int compared = 0;
  for (std::size_t i = 0; i < steps.size(); ++i) {
    const fs::path again = dir / "rerun" / steps[i].name;
    if (progress) *progress << "rerunning " << steps[i].name << '\n' << std::flush;
    const auto s = execute(steps[i].command, steps[i].parameters, seed, again);
    for (const auto& a : first[i].artifacts) {
      ++compared;
      const std::string x = read_bytes(dir / steps[i].name / a);
      const std::string y = read_bytes(again / a);
      if (x.empty() || x != y) {
        c.pass = false;
        c.detail += steps[i].name + "/" + a + " differs; ";
      }
    }
    if (s.artifacts != first[i].artifacts) {
      c.pass = false;
      c.detail += steps[i].name + " produced different artifacts; ";
    }
  }
  c.detail += std::to_string(compared) + " CSV files compared byte for byte";
  return c;
}

} // namespace

std::string format_criterion(const CriterionResult& c) {
  return "criterion " + std::to_string(c.id) + " " + (c.pass ? "PASS" : "FAIL") + " " + c.title +
         ": " + c.detail;
}

AcceptanceReport run_acceptance(const fs::path& dir, std::uint64_t seed, std::ostream* progress) {
  AcceptanceReport rep;
  const auto steps = acceptance_steps();
  for (const auto& st : steps) {
    if (progress) *progress << "running " << st.name << '\n' << std::flush;
    rep.runs.push_back(execute(st.command, st.parameters, seed, dir / st.name));
  }
  auto by_name = [&](const std::string& name) -> const RunSummary& {
    for (std::size_t i = 0; i < steps.size(); ++i) {
      if (steps[i].name == name) return rep.runs[i];
    }
    throw std::logic_error("no acceptance step " + name);
  };

  auto evaluate = [&](auto&& fn) {
    try {
      rep.criteria.push_back(fn());
    } catch (const std::exception& e) {
      rep.criteria.push_back({static_cast<int>(rep.criteria.size()) + 1, "evaluation", false,
                              std::string("threw: ") + e.what()});
    }
    if (progress) *progress << format_criterion(rep.criteria.back()) << '\n' << std::flush;
  };
  evaluate([&] {
    return criterion_exact({&by_name("exact_a1_b0_N1"), &by_name("exact_a1_b0_N2"),
                            &by_name("exact_a2_b1_N2")});
  });
  evaluate([&] {
    return criterion_radial({&by_name("radial_N1"), &by_name("radial_N2"), &by_name("radial_N3")});
  });
  evaluate([&] { return criterion_monotone(by_name("monotone")); });
  evaluate([&] { return criterion_grid(by_name("grid2d"), by_name("grid2d_nonradial")); });
  evaluate([&] { return criterion_barriers(); });
  evaluate([&] { return criterion_verify(by_name("verify")); });
  evaluate([&] { return criterion_stationary(by_name("simulate")); });
  evaluate([&] { return criterion_regime(by_name("regime")); });
  evaluate([&] { return criterion_determinism(dir, steps, rep.runs, seed, progress); });

  for (const auto& s : rep.runs) rep.exit_code = std::max(rep.exit_code, s.exit_code);
  for (const auto& c : rep.criteria) {
    if (!c.pass) rep.exit_code = std::max(rep.exit_code, 3);
  }

  std::ofstream out(dir / "acceptance.txt", std::ios::binary | std::ios::trunc);
  for (const auto& c : rep.criteria) out << format_criterion(c) << '\n';

  RunSummary all;
  all.command = "all";
  all.exit_code = rep.exit_code;
  all.text("seed", std::to_string(seed));
  for (const auto& c : rep.criteria) {
    all.text("criterion_" + std::to_string(c.id), c.pass ? "pass" : "fail");
  }
  for (std::size_t i = 0; i < steps.size(); ++i) {
    all.metric("exit_code." + steps[i].name, rep.runs[i].exit_code);
  }
  all.artifacts.push_back("acceptance.txt");
  write_summary(dir / "summary.txt", all);
  return rep;
}

} // namespace hjb::cli

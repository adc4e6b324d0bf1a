#include "hjb/radial/solver.hpp"

#include "hjb/core/errors.hpp"
#include "hjb/exact/quadratic.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

namespace hjb::radial {

namespace {

// |S|^p / p and its derivative sign(S)|S|^{p-1} (0 at S = 0).
double hamiltonian(double s, double p) { return std::pow(std::abs(s), p) / p; }

double hamiltonian_slope(double s, double p) {
  if (s == 0.0) return 0.0;
  const double mag = std::pow(std::abs(s), p - 1.0);
  return s > 0.0 ? mag : -mag;
}

// In-place Thomas algorithm; lower[0] and upper[n-1] are unused.
void solve_tridiagonal(std::vector<double>& lower, std::vector<double>& diag,
                       std::vector<double>& upper, std::vector<double>& rhs) {
  const std::size_t n = diag.size();
  for (std::size_t i = 1; i < n; ++i) {
    if (diag[i - 1] == 0.0) throw MatrixError("zero pivot in tridiagonal Newton system");
    const double w = lower[i] / diag[i - 1];
    diag[i] -= w * upper[i - 1];
    rhs[i] -= w * rhs[i - 1];
  }
  if (diag[n - 1] == 0.0) throw MatrixError("zero pivot in tridiagonal Newton system");
  rhs[n - 1] /= diag[n - 1];
  for (std::size_t i = n - 1; i-- > 0;) {
    rhs[i] = (rhs[i] - upper[i] * rhs[i + 1]) / diag[i];
  }
}

struct Boundary {
  bool dirichlet = true;
  double value = 0.0; // u_R or s_R
};

Boundary resolve(const BoundaryCondition& bc, const ScalarProblem& problem, double R) {
  auto closed_form = [&]() {
    const auto* q = std::get_if<Quadratic>(&problem.source());
    if (q == nullptr || problem.exponent() != 2.0) {
      throw PreconditionError("exact-quadratic boundary data needs a Quadratic source and p = 2");
    }
    return exact::scalar_quadratic_solution(q->a, q->b, problem.dimension());
  };
  if (const auto* d = std::get_if<DirichletValue>(&bc)) return {true, d->u_R};
  if (const auto* n = std::get_if<NeumannSlope>(&bc)) return {false, n->s_R};
  if (std::holds_alternative<DirichletExactQuadratic>(bc)) {
    return {true, exact::value_at(closed_form(), R)};
  }
  return {false, 2.0 * closed_form().A * R};
}

class RadialSystem {
public:
  RadialSystem(const ScalarProblem& problem, const RadialGrid& grid, Boundary boundary)
      : p_(problem.exponent()),
        N_(problem.dimension()),
        grid_(grid),
        bc_(boundary),
        h_(grid.spacing()),
        f_(grid.size()) {
    for (std::size_t i = 0; i < grid.size(); ++i) {
      f_[i] = source_at_radius(problem.source(), grid.nodes[i]);
    }
  }

  // F(U); also fills the tridiagonal Jacobian when jac is true.
  double evaluate(const std::vector<double>& U, std::vector<double>& F, bool jac) {
    const std::size_t m = U.size();
    const double h2 = h_ * h_;
    const double dN = static_cast<double>(N_);
    F.resize(m);
    if (jac) {
      lower_.assign(m, 0.0);
      diag_.assign(m, 0.0);
      upper_.assign(m, 0.0);
    }
    double worst = 0.0;
    auto record = [&](std::size_t i, double value) {
      if (!std::isfinite(value)) {
        throw StiffnessError("non-finite residual at node " + std::to_string(i) +
                                 "; refine the mesh",
                             value, 0);
      }
      F[i] = value;
      worst = std::max(worst, std::abs(value));
    };

    record(0, -dN * (U[1] - U[0]) / h2 + U[0] - f_[0]);
    if (jac) {
      diag_[0] = dN / h2 + 1.0;
      upper_[0] = -dN / h2;
    }
    for (std::size_t i = 1; i + 1 < m; ++i) {
      const double r = grid_.nodes[i];
      const double s = (U[i + 1] - U[i - 1]) / (2.0 * h_);
      guard(s, i);
      const double upp = (U[i + 1] - 2.0 * U[i] + U[i - 1]) / h2;
      record(i, -0.5 * (upp + (dN - 1.0) / r * s) + hamiltonian(s, p_) + U[i] - f_[i]);
      if (jac) {
        const double drift = (dN - 1.0) / (2.0 * r * h_);
        const double g = hamiltonian_slope(s, p_) / (2.0 * h_);
        lower_[i] = -0.5 * (1.0 / h2 - drift) - g;
        diag_[i] = 1.0 / h2 + 1.0;
        upper_[i] = -0.5 * (1.0 / h2 + drift) + g;
      }
    }
    const std::size_t last = m - 1;
    if (bc_.dirichlet) {
      record(last, U[last] - bc_.value);
      if (jac) diag_[last] = 1.0;
    } else {
      // Ghost node U_m = U_{m-2} + 2 h s_R.
      const double s = bc_.value;
      const double upp = (2.0 * U[last - 1] - 2.0 * U[last] + 2.0 * h_ * s) / h2;
      record(last,
             -0.5 * (upp + (dN - 1.0) / grid_.R * s) + hamiltonian(s, p_) + U[last] - f_[last]);
      if (jac) {
        lower_[last] = -1.0 / h2;
        diag_[last] = 1.0 / h2 + 1.0;
      }
    }
    return worst;
  }

  static double merit(const std::vector<double>& F) {
    double sum = 0.0;
    for (double v : F) sum += v * v;
    return sum;
  }

  std::vector<double> newton_step(std::vector<double> F) {
    for (double& v : F) v = -v;
    solve_tridiagonal(lower_, diag_, upper_, F);
    return F;
  }

  std::vector<double> slopes(const std::vector<double>& U) const {
    const std::size_t m = U.size();
    std::vector<double> S(m, 0.0);
    for (std::size_t i = 1; i + 1 < m; ++i) S[i] = (U[i + 1] - U[i - 1]) / (2.0 * h_);
    S[m - 1] = bc_.dirichlet ? (3.0 * U[m - 1] - 4.0 * U[m - 2] + U[m - 3]) / (2.0 * h_)
                             : bc_.value;
    return S;
  }

private:
  void guard(double s, std::size_t i) const {
    if (!(std::abs(s) < overflow_slope())) {
      throw StiffnessError("gradient overflow guard triggered at node " + std::to_string(i) +
                               "; refine the mesh",
                           std::abs(s), 0);
    }
  }
  double overflow_slope() const { return std::pow(1e250, 1.0 / p_); }

  double p_;
  int N_;
  const RadialGrid& grid_;
  Boundary bc_;
  double h_;
  std::vector<double> f_;
  std::vector<double> lower_, diag_, upper_;
};

} // namespace

RadialGrid RadialGrid::uniform(double R, int m) {
  if (!(R > 0.0) || !std::isfinite(R)) throw PreconditionError("outer radius R must be > 0");
  if (m < 16) throw PreconditionError("radial grid needs m >= 16 nodes");
  RadialGrid g;
  g.R = R;
  g.nodes.resize(static_cast<std::size_t>(m));
  const double h = R / static_cast<double>(m - 1);
  for (int i = 0; i < m; ++i) g.nodes[static_cast<std::size_t>(i)] = h * i;
  g.nodes.back() = R;
  return g;
}

double boundary_value(const BoundaryCondition& bc, const ScalarProblem& problem, double R) {
  const Boundary b = resolve(bc, problem, R);
  if (!b.dirichlet) throw PreconditionError("Neumann condition has no boundary value");
  return b.value;
}

std::vector<double> reconstruct_second_derivative(const RadialGrid& grid,
                                                  const std::vector<double>& U,
                                                  const std::vector<double>& S,
                                                  const ScalarProblem& problem) {
  const double p = problem.exponent();
  const double dN = static_cast<double>(problem.dimension());
  std::vector<double> Upp(U.size());
  Upp[0] = 2.0 * (U[0] - source_at_radius(problem.source(), 0.0)) / dN;
  for (std::size_t i = 1; i < U.size(); ++i) {
    const double r = grid.nodes[i];
    const double f = source_at_radius(problem.source(), r);
    Upp[i] = 2.0 * (hamiltonian(S[i], p) + U[i] - f) - (dN - 1.0) * S[i] / r;
  }
  return Upp;
}

std::vector<double> radial_residual(const RadialSolution& sol, const ScalarProblem& problem) {
  const double p = problem.exponent();
  const double dN = static_cast<double>(problem.dimension());
  const auto& r = sol.grid.nodes;
  std::vector<double> res(r.size());
  res[0] = -0.5 * dN * sol.Upp[0] + sol.U[0] - source_at_radius(problem.source(), 0.0);
  for (std::size_t i = 1; i < r.size(); ++i) {
    res[i] = -0.5 * (sol.Upp[i] + (dN - 1.0) / r[i] * sol.S[i]) + hamiltonian(sol.S[i], p) +
             sol.U[i] - source_at_radius(problem.source(), r[i]);
  }
  return res;
}

RadialSolution solve_radial_bvp(const ScalarProblem& problem, const RadialOptions& options) {
  if (!is_radial(problem.source())) {
    throw PreconditionError("radial solver needs a radial source");
  }
  if (!(options.newton_tol > 0.0)) throw PreconditionError("newton_tol must be > 0");
  if (options.max_newton_iters < 1) throw PreconditionError("max_newton_iters must be >= 1");

  RadialSolution sol;
  sol.grid = RadialGrid::uniform(options.R, options.m);
  const auto& r = sol.grid.nodes;
  const std::size_t m = r.size();
  const Boundary boundary = resolve(options.bc, problem, options.R);
  RadialSystem system(problem, sol.grid, boundary);

  std::vector<double> U(m);
  if (!options.initial_guess.empty()) {
    if (options.initial_guess.size() != m) throw PreconditionError("initial guess has wrong size");
    U = options.initial_guess;
  } else if (problem.exponent() != 2.0) {
    std::fill(U.begin(), U.end(), 0.0);
  } else if (const auto* q = std::get_if<Quadratic>(&problem.source())) {
    const auto c = exact::scalar_quadratic_solution(q->a, q->b, problem.dimension());
    for (std::size_t i = 0; i < m; ++i) U[i] = exact::value_at(c, r[i]);
  } else {
    for (std::size_t i = 0; i < m; ++i) U[i] = source_at_radius(problem.source(), r[i]);
  }

  std::vector<double> F;
  std::vector<double> trial(m);
  std::vector<double> F_trial;
  double res = system.evaluate(U, F, true);
  std::vector<double> trace{res};
  int iter = 0;
  while (res > options.newton_tol) {
    if (iter == options.max_newton_iters) {
      throw SolverError("radial Newton iteration did not converge", res, iter, trace);
    }
    const std::vector<double> step = system.newton_step(F);
    // Backtracking on the squared 2-norm, for which the Newton step is a descent direction.
    const double merit = RadialSystem::merit(F);
    double damping = 1.0;
    for (int halving = 0;; ++halving) {
      for (std::size_t i = 0; i < m; ++i) trial[i] = U[i] + damping * step[i];
      double trial_merit = std::numeric_limits<double>::infinity();
      try {
        system.evaluate(trial, F_trial, false);
        trial_merit = RadialSystem::merit(F_trial);
      } catch (const StiffnessError&) {
      }
      if (trial_merit < merit) break;
      if (halving == 40) {
        throw SolverError("radial Newton line search stalled", res, iter, trace);
      }
      damping *= 0.5;
    }
    U.swap(trial);
    res = system.evaluate(U, F, true);
    trace.push_back(res);
    ++iter;
  }

  sol.S = system.slopes(U);
  sol.U = std::move(U);
  sol.Upp = reconstruct_second_derivative(sol.grid, sol.U, sol.S, problem);
  sol.residual = radial_residual(sol, problem);

  auto& d = sol.diagnostics;
  d.iterations = iter;
  d.discrete_residual = res;
  d.newton_trace = std::move(trace);
  d.max_residual = 0.0;
  for (double v : sol.residual) d.max_residual = std::max(d.max_residual, std::abs(v));
  d.is_convex = std::all_of(sol.Upp.begin(), sol.Upp.end(), [](double v) { return v >= -1e-8; });
  d.gradient_monotone = true;
  for (std::size_t i = 1; i < m; ++i) {
    if (sol.S[i] < sol.S[i - 1] - 1e-8) d.gradient_monotone = false;
  }
  return sol;
}

} // namespace hjb::radial

#pragma once

#include "hjb/core/model.hpp"

#include <variant>
#include <vector>

namespace hjb::radial {

struct RadialGrid {
  double R = 0.0;
  std::vector<double> nodes; // r_0 = 0 < ... < r_{m-1} = R, uniform

  static RadialGrid uniform(double R, int m);
  std::size_t size() const noexcept { return nodes.size(); }
  double spacing() const noexcept { return R / static_cast<double>(nodes.size() - 1); }
};

struct DirichletValue {
  double u_R = 0.0;
};
struct NeumannSlope {
  double s_R = 0.0;
};
// u(R) = A R^2 + B from the closed form; Quadratic source and p = 2 only.
struct DirichletExactQuadratic {};
// u'(R) = 2 A R from the closed form; Quadratic source and p = 2 only.
struct NeumannExactQuadratic {};

using BoundaryCondition =
    std::variant<DirichletValue, NeumannSlope, DirichletExactQuadratic, NeumannExactQuadratic>;

struct Diagnostics {
  bool is_convex = false;         // Upp >= -1e-8 everywhere
  bool gradient_monotone = false; // S non-decreasing within 1e-8
  double max_residual = 0.0;      // max |residual| of the reconstructed ODE
  int iterations = 0;
  double discrete_residual = 0.0; // max norm of the finite-difference system at exit
  std::vector<double> newton_trace;
};

struct RadialSolution {
  RadialGrid grid;
  std::vector<double> U;
  std::vector<double> S;
  std::vector<double> Upp;
  std::vector<double> residual;
  Diagnostics diagnostics;
};

struct RadialOptions {
  double R = 10.0;
  BoundaryCondition bc = NeumannExactQuadratic{};
  int m = 600;
  double newton_tol = 1e-10;
  int max_newton_iters = 100;
  // Empty: zero when p != 2; for p = 2 the closed form for Quadratic sources
  // and the source itself otherwise.
  std::vector<double> initial_guess;
};

// Centered second-order differences, damped Newton on the full nonlinear
// system, S(0) = 0 imposed through the origin row.
RadialSolution solve_radial_bvp(const ScalarProblem& problem, const RadialOptions& options);

// Upp from the ODE: 2[(1/p)|S|^p + U - f] - (N-1) S / r, and 2(U0 - f0)/N at r = 0.
std::vector<double> reconstruct_second_derivative(const RadialGrid& grid,
                                                  const std::vector<double>& U,
                                                  const std::vector<double>& S,
                                                  const ScalarProblem& problem);

// -1/2 (Upp + (N-1)/r S) + (1/p)|S|^p + U - f, with -1/2 N Upp + U - f at r = 0.
std::vector<double> radial_residual(const RadialSolution& sol, const ScalarProblem& problem);

// Boundary value implied by the condition, for Dirichlet kinds.
double boundary_value(const BoundaryCondition& bc, const ScalarProblem& problem, double R);

} // namespace hjb::radial

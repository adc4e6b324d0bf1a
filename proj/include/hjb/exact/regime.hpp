#pragma once

#include "hjb/core/model.hpp"

#include <cstdint>
#include <span>
#include <vector>

namespace hjb::exact {

// u_j(x) = beta_j |x|^2 + eta_j
struct RegimeCoefficients {
  std::vector<double> beta;
  std::vector<double> eta;
  double residual_beta = 0.0;
  double residual_eta = 0.0;
};

// max_j | 2 beta_j^2 + delta_j beta_j - sum_l alpha_jl beta_l - a_j |
double beta_residual(const RegimeModel& model, std::span<const double> beta);

// max_j | (M eta)_j - b_j - sigma_j^2 beta_j N |
double eta_residual(const RegimeModel& model, std::span<const double> beta,
                    std::span<const double> eta);

// Damped Newton from beta_j = sqrt(a_j / 2).
std::vector<double> solve_regime_betas(const RegimeModel& model, double newton_tol = 1e-12,
                                       int max_iters = 100);

// Same iteration from a caller-supplied positive start.
std::vector<double> solve_regime_betas_from(const RegimeModel& model,
                                            std::span<const double> initial,
                                            double newton_tol = 1e-12, int max_iters = 100);

// Solves M eta = b + sigma^2 beta N. Two regimes are cross-checked against
// the explicit 2x2 inverse.
std::vector<double> solve_regime_etas(const RegimeModel& model, std::span<const double> beta);

RegimeCoefficients solve_regime_system(const RegimeModel& model, double newton_tol = 1e-12,
                                       int max_iters = 100);

// Largest max-norm distance between the default root and roots found from
// `seeds` random positive starts.
double beta_multistart_spread(const RegimeModel& model, int seeds, std::uint64_t seed,
                              double newton_tol = 1e-12);

} // namespace hjb::exact

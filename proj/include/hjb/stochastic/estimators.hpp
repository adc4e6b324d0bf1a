#pragma once

#include "hjb/exact/quadratic.hpp"
#include "hjb/stochastic/paths.hpp"

#include <cstddef>
#include <span>
#include <vector>

namespace hjb::stochastic {

struct MonteCarloEstimate {
  double mean = 0.0;
  double std_error = 0.0; // sample std / sqrt(n)
  std::size_t n_samples = 0;
};

// Pairwise-summed mean and standard error of per-path values.
MonteCarloEstimate summarize(std::span<const double> samples);

struct DiscountedCostParams {
  double a = 1.0;
  double b = 0.0;
  int N = 1;
  std::vector<double> x0 = {0.0};
  // Linear feedback v(x) = -gain x. Negative selects the optimal gain 2A.
  double gain = -1.0;
  double sigma = 1.0;
  double T = 15.0;
  double dt = 0.005;
  std::size_t n_paths = 20000;
  double truncation_budget = 1e-3;
  int threads = 0;
};

struct DiscountedCostResult {
  MonteCarloEstimate estimate;
  double gain = 0.0;
  double truncation_bound = 0.0;
};

// Closed-form cost of the feedback -k x over an infinite horizon:
// (k^2/2 + a)(|x0|^2 + N sigma^2)/(1 + 2k) + b.
double linear_feedback_cost(double a, double b, int N, double sigma, double gain, double x0_sq);

// Discounted cost after time T. For the optimal gain this is
// e^{-T}(A(e^{-4AT}|x0|^2 + N sigma^2/(4A)) + B).
double truncation_tail_bound(double a, double b, int N, double sigma, double gain, double x0_sq,
                             double T);

// Left-endpoint sum of e^{-t_i}(|v(X_i)|^2/2 + a|X_i|^2 + b) dt over Euler
// paths. Throws PreconditionError when the tail bound exceeds the budget.
DiscountedCostResult estimate_discounted_cost(const DiscountedCostParams& params,
                                              const RngSpec& rng);

struct VerificationResult {
  double u_exact = 0.0;
  MonteCarloEstimate estimate;
  double truncation_bound = 0.0;
  double tolerance = 0.0; // max(3 SE + truncation bound, 0.02 u)
  double z_score = 0.0;
  bool pass = false;
};

// Runs the optimal feedback and compares with A|x0|^2 + B.
VerificationResult verify_value_function(const DiscountedCostParams& params, const RngSpec& rng);

// Per-path time averages over records with t >= burn_in_fraction * T.
MonteCarloEstimate estimate_stationary_moments(const PathSet& paths, double burn_in_fraction);

struct CheckpointEstimate {
  double t = 0.0;
  MonteCarloEstimate estimate;
};

// e^{-t} (A|X_t|^2 + B) averaged over paths at each checkpoint.
std::vector<CheckpointEstimate> transversality_decay(const PathSet& paths,
                                                     const exact::QuadraticCoefficients& coeffs,
                                                     std::span<const double> checkpoints);

// Time average of |2A X|^2/2 + a|X|^2 + b after burn-in.
MonteCarloEstimate long_run_cost_estimate(const PathSet& paths, double a, double b, double A,
                                          double burn_in_fraction);

// Fraction of recorded times spent in each regime after burn-in.
std::vector<MonteCarloEstimate> regime_occupation(const PathSet& paths, std::size_t regimes,
                                                  double burn_in_fraction);

// Regime switches per unit time.
MonteCarloEstimate switch_rate(const PathSet& paths);

// Exact second moment of the Euler chain X_{i+1} = (1 - k dt) X_i + sigma sqrt(dt) xi
// after `steps` steps, summed over N coordinates.
double euler_second_moment(double gain, double sigma, int N, double x0_sq, double dt,
                           std::size_t steps);

} // namespace hjb::stochastic

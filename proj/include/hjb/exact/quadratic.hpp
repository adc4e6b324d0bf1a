#pragma once

#include "hjb/core/model.hpp"

#include <span>

namespace hjb::exact {

// u(x) = A|x|^2 + B
struct QuadraticCoefficients {
  double A = 0.0;
  double B = 0.0;
};

// Positive root of 2A^2 + A - a = 0 and B = b + A N.
QuadraticCoefficients scalar_quadratic_solution(double a, double b, int N);

// The negative root (-1 - sqrt(1+8a))/4, which fails the growth condition.
double rejected_root(double a);

struct Sensitivities {
  double dA_da = 0.0;
  double dB_da = 0.0;
  double dB_db = 0.0;
};

Sensitivities scalar_sensitivities(double a, int N);

// max_r | -A N + 2 A^2 r^2 + A r^2 + B - a r^2 - b |, evaluated in extended precision.
double pde_residual_quadratic(const QuadraticCoefficients& coeffs, const Quadratic& source, int N,
                              std::span<const double> sample_radii);

// Stationary mean running cost under the optimal feedback: (A + 1/4) N sigma^2 + b.
double long_run_cost(double a, double b, int N, double sigma);

// sigma^2 / (4A): variance of each coordinate of the stationary OU law.
double stationary_variance_per_coordinate(double a, double sigma);

inline double value_at(const QuadraticCoefficients& c, double r) { return c.A * r * r + c.B; }

} // namespace hjb::exact

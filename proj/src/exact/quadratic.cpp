#include "hjb/exact/quadratic.hpp"

#include "hjb/core/errors.hpp"

#include <algorithm>
#include <cmath>

namespace hjb::exact {

namespace {

void require_positive_a(double a) {
  if (!(a > 0.0) || !std::isfinite(a)) {
    throw DomainError("quadratic coefficient a must be a finite real > 0");
  }
}

} // namespace

QuadraticCoefficients scalar_quadratic_solution(double a, double b, int N) {
  require_positive_a(a);
  if (!(b >= 0.0)) throw DomainError("constant term b must be >= 0");
  if (N < 1) throw DomainError("dimension N must be >= 1");
  // Cancellation-free form of (-1 + sqrt(1+8a))/4, rounded once from long double.
  const long double al = a;
  const long double A = 2.0L * al / (1.0L + std::sqrt(1.0L + 8.0L * al));
  QuadraticCoefficients c;
  c.A = static_cast<double>(A);
  c.B = static_cast<double>(static_cast<long double>(b) + static_cast<long double>(c.A) * N);
  return c;
}

double rejected_root(double a) {
  require_positive_a(a);
  return (-1.0 - std::sqrt(1.0 + 8.0 * a)) / 4.0;
}

Sensitivities scalar_sensitivities(double a, int N) {
  require_positive_a(a);
  const double root = std::sqrt(1.0 + 8.0 * a);
  return {1.0 / root, static_cast<double>(N) / root, 1.0};
}

double pde_residual_quadratic(const QuadraticCoefficients& coeffs, const Quadratic& source, int N,
                              std::span<const double> sample_radii) {
  const long double A = coeffs.A;
  const long double B = coeffs.B;
  const long double a = source.a;
  const long double b = source.b;
  long double worst = 0.0L;
  for (double rd : sample_radii) {
    const long double r2 = static_cast<long double>(rd) * rd;
    // -1/2 (2AN) + 1/2 (4A^2 r^2) + (A r^2 + B) - (a r^2 + b)
    const long double res = -A * N + 2.0L * A * A * r2 + (A * r2 + B) - (a * r2 + b);
    worst = std::max(worst, std::abs(res));
  }
  return static_cast<double>(worst);
}

double long_run_cost(double a, double b, int N, double sigma) {
  if (!(sigma > 0.0)) throw DomainError("sigma must be > 0");
  const auto c = scalar_quadratic_solution(a, b, N);
  return (c.A + 0.25) * N * sigma * sigma + b;
}

double stationary_variance_per_coordinate(double a, double sigma) {
  if (!(sigma > 0.0)) throw DomainError("sigma must be > 0");
  const auto c = scalar_quadratic_solution(a, 0.0, 1);
  return sigma * sigma / (4.0 * c.A);
}

} // namespace hjb::exact

#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <variant>
#include <vector>

namespace hjb {

// f(x) = a|x|^2 + b
struct Quadratic {
  double a = 1.0;
  double b = 0.0;
};

// f(x, y) = cxx x^2 + cyy y^2 + cxy xy + c0. Two dimensions only.
struct AnisotropicQuadratic {
  double cxx = 1.0;
  double cyy = 1.0;
  double cxy = 0.0;
  double c0 = 0.0;
};

// Radial source sampled at increasing radii starting at 0, linearly interpolated.
struct TabulatedRadial {
  std::vector<double> r;
  std::vector<double> values;
};

using SourceSpec = std::variant<Quadratic, AnisotropicQuadratic, TabulatedRadial>;

// q = p/(p-1). Throws DomainError for p <= 1.
double conjugate_exponent(double p);

bool is_radial(const SourceSpec& source);

// Throws PreconditionError for anisotropic sources and for radii outside a table.
double source_at_radius(const SourceSpec& source, double r);
double source_at(const SourceSpec& source, double x, double y);

// Smallest f(r) r^{-q} over the outer half of a table; a proxy for the
// growth bound liminf f(x)|x|^{-q} >= 0, which has no finite test.
double tabulated_power_bound(const TabulatedRadial& table, double q);

// Throws DomainError / PreconditionError when a source breaks its invariants.
// tail_tolerance applies to tabulated_power_bound.
void validate_source(const SourceSpec& source, double p, double tail_tolerance = 1e-2);

std::string describe(const SourceSpec& source);

class ScalarProblem {
public:
  ScalarProblem(int dimension, double exponent, SourceSpec source);

  int dimension() const noexcept { return dimension_; }
  double exponent() const noexcept { return exponent_; }
  double conjugate() const noexcept { return conjugate_; }
  const SourceSpec& source() const noexcept { return source_; }

private:
  int dimension_;
  double exponent_;
  double conjugate_;
  SourceSpec source_;
};

struct FenchelResult {
  double numeric_inf = 0.0;
  double closed_form = 0.0;
  std::vector<double> argmin;
  std::vector<double> exact_argmin;
  double spacing = 0.0;
  double error_bound = 0.0;
};

// Exhaustive grid search for inf_v { v.xi + |v|^q/q } over [-R, R]^d.
FenchelResult fenchel_conjugate_numeric(std::span<const double> xi, double p, double search_radius,
                                        int grid_points_per_axis);

struct RegimeModel {
  std::vector<double> delta;
  std::vector<std::vector<double>> alpha; // generator: rows sum to zero
  std::vector<double> sigma;
  std::vector<double> a;
  std::vector<double> b;
  std::vector<double> p;
  int N = 1;

  std::size_t regimes() const noexcept { return delta.size(); }
};

struct Violation {
  std::string field;
  std::string predicate;
};

std::vector<Violation> validate_regime_model(const RegimeModel& model);

// M = diag(delta) - alpha, row-major k x k.
std::vector<std::vector<double>> coupling_matrix(const RegimeModel& model);

// Stationary law of the regime chain: pi alpha = 0, sum pi = 1.
std::vector<double> stationary_distribution(const RegimeModel& model);

// Two regimes, N = 2: delta = (1,1), rates 0.4 / 0.6, a = (2.5, 0.5),
// b = (1, 0.5), sigma = (0.3, 1.0).
RegimeModel reference_two_regime_model();

} // namespace hjb

#include "hjb/core/model.hpp"

#include "hjb/core/errors.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

namespace hjb {

double conjugate_exponent(double p) {
  if (!(p > 1.0) || !std::isfinite(p)) {
    throw DomainError("exponent p must be a finite real > 1");
  }
  return p / (p - 1.0);
}

bool is_radial(const SourceSpec& source) {
  if (const auto* an = std::get_if<AnisotropicQuadratic>(&source)) {
    return an->cxx == an->cyy && an->cxy == 0.0;
  }
  return true;
}

namespace {

double interpolate(const TabulatedRadial& t, double r) {
  if (r < t.r.front() || r > t.r.back()) {
    throw PreconditionError("radius outside the tabulated source range");
  }
  auto it = std::upper_bound(t.r.begin(), t.r.end(), r);
  if (it == t.r.end()) {
    return t.values.back();
  }
  const auto hi = static_cast<std::size_t>(it - t.r.begin());
  const auto lo = hi - 1;
  const double w = (r - t.r[lo]) / (t.r[hi] - t.r[lo]);
  return (1.0 - w) * t.values[lo] + w * t.values[hi];
}

} // namespace

double source_at_radius(const SourceSpec& source, double r) {
  if (const auto* q = std::get_if<Quadratic>(&source)) {
    return q->a * r * r + q->b;
  }
  if (const auto* t = std::get_if<TabulatedRadial>(&source)) {
    return interpolate(*t, r);
  }
  const auto& an = std::get<AnisotropicQuadratic>(source);
  if (!is_radial(source)) {
    throw PreconditionError("anisotropic source has no radial profile");
  }
  return an.cxx * r * r + an.c0;
}

double source_at(const SourceSpec& source, double x, double y) {
  if (const auto* an = std::get_if<AnisotropicQuadratic>(&source)) {
    return an->cxx * x * x + an->cyy * y * y + an->cxy * x * y + an->c0;
  }
  return source_at_radius(source, std::sqrt(x * x + y * y));
}

double tabulated_power_bound(const TabulatedRadial& table, double q) {
  const double r_max = table.r.back();
  double worst = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < table.r.size(); ++i) {
    const double r = table.r[i];
    if (r > 0.0 && r >= 0.5 * r_max) {
      worst = std::min(worst, table.values[i] * std::pow(r, -q));
    }
  }
  return worst;
}

void validate_source(const SourceSpec& source, double p, double tail_tolerance) {
  if (const auto* q = std::get_if<Quadratic>(&source)) {
    if (!(q->a > 0.0)) throw DomainError("quadratic source needs a > 0");
    if (!(q->b >= 0.0)) throw DomainError("quadratic source needs b >= 0");
    return;
  }
  if (const auto* an = std::get_if<AnisotropicQuadratic>(&source)) {
    // Hessian [[2cxx, cxy], [cxy, 2cyy]] must be positive semidefinite.
    const double det = 4.0 * an->cxx * an->cyy - an->cxy * an->cxy;
    if (an->cxx < 0.0 || an->cyy < 0.0 || det < 0.0) {
      throw DomainError("anisotropic source is not convex (Hessian not PSD)");
    }
    return;
  }
  const auto& t = std::get<TabulatedRadial>(source);
  if (t.r.size() < 2 || t.r.size() != t.values.size()) {
    throw PreconditionError("tabulated source needs >= 2 matching (r, value) samples");
  }
  if (t.r.front() != 0.0) {
    throw PreconditionError("tabulated source must start at r = 0");
  }
  for (std::size_t i = 0; i < t.r.size(); ++i) {
    if (!std::isfinite(t.r[i]) || !std::isfinite(t.values[i])) {
      throw PreconditionError("tabulated source has non-finite samples");
    }
    if (i > 0 && !(t.r[i] > t.r[i - 1])) {
      throw PreconditionError("tabulated radii must be strictly increasing");
    }
  }
  const double bound = tabulated_power_bound(t, conjugate_exponent(p));
  if (bound < -tail_tolerance) {
    throw DomainError("tabulated source violates the growth bound f r^-q >= 0 in its tail");
  }
}

std::string describe(const SourceSpec& source) {
  std::ostringstream out;
  out.precision(17);
  if (const auto* q = std::get_if<Quadratic>(&source)) {
    out << "quadratic(a=" << q->a << ",b=" << q->b << ")";
  } else if (const auto* an = std::get_if<AnisotropicQuadratic>(&source)) {
    out << "anisotropic(cxx=" << an->cxx << ",cyy=" << an->cyy << ",cxy=" << an->cxy
        << ",c0=" << an->c0 << ")";
  } else {
    const auto& t = std::get<TabulatedRadial>(source);
    out << "tabulated(samples=" << t.r.size() << ",r_max=" << t.r.back() << ")";
  }
  return out.str();
}

ScalarProblem::ScalarProblem(int dimension, double exponent, SourceSpec source)
    : dimension_(dimension),
      exponent_(exponent),
      conjugate_(conjugate_exponent(exponent)),
      source_(std::move(source)) {
  if (dimension_ < 1) {
    throw DomainError("dimension N must be >= 1");
  }
  if (std::holds_alternative<AnisotropicQuadratic>(source_) && dimension_ != 2) {
    throw PreconditionError("anisotropic sources are two-dimensional");
  }
  validate_source(source_, exponent_);
}

} // namespace hjb

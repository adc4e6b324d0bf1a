#include "hjb/radial/barriers.hpp"

#include "hjb/core/errors.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace hjb::radial {

double barrier_slope_limit(double p) {
  const double q = conjugate_exponent(p);
  return std::pow(p, 1.0 / (p - 1.0)) * std::pow(q, -q);
}

double subsolution_barrier(double c, double C, double p, double r) {
  const double q = conjugate_exponent(p);
  return -c * std::pow(1.0 + r * r, 0.5 * q) - C;
}

BarrierExcess subsolution_barrier_excess(double c, double C, double p, int N,
                                         const SourceSpec& source,
                                         std::span<const double> sample_radii) {
  const double q = conjugate_exponent(p);
  const double dN = static_cast<double>(N);
  BarrierExcess out;
  out.verified = c > 0.0 && c < barrier_slope_limit(p) && C >= 0.0;
  out.max_excess = -std::numeric_limits<double>::infinity();
  for (double r : sample_radii) {
    const double w = 1.0 + r * r;
    // -1/2 Lap(u) for u = -c w^{q/2} - C
    const double diffusion = 0.5 * c * q * dN * std::pow(w, 0.5 * q - 1.0) +
                             0.5 * c * q * (q - 2.0) * std::pow(w, 0.5 * q - 2.0) * r * r;
    const double gradient =
        std::pow(c * q, p) / p * std::pow(r, p) * std::pow(w, p * (0.5 * q - 1.0));
    const double value = -c * std::pow(w, 0.5 * q) - C;
    const double excess = diffusion + gradient + value - source_at_radius(source, r);
    if (excess > out.max_excess) {
      out.max_excess = excess;
      out.argmax_radius = r;
    }
  }
  return out;
}

BarrierParameters certify_subsolution_barrier(double eps, double p, int N,
                                              const SourceSpec& source,
                                              std::span<const double> sample_radii) {
  if (!(eps > 0.0 && eps < 1.0)) throw PreconditionError("eps must lie in (0, 1)");
  BarrierParameters out;
  out.c = 0.5 * barrier_slope_limit(p) * (1.0 - eps);
  auto excess = [&](double C) {
    return subsolution_barrier_excess(out.c, C, p, N, source, sample_radii).max_excess;
  };
  double hi = 0.0;
  if (excess(hi) > 0.0) {
    double lo = 0.0;
    hi = 1.0;
    while (excess(hi) > 0.0) {
      lo = hi;
      hi *= 2.0;
      if (hi > 1e300) throw SolverError("barrier offset bracket failed", excess(hi), 0);
    }
    for (int k = 0; k < 200 && hi - lo > 1e-15 * hi; ++k) {
      const double mid = 0.5 * (lo + hi);
      (excess(mid) > 0.0 ? lo : hi) = mid;
    }
  }
  out.C = hi;
  out.max_excess = excess(hi);
  return out;
}

double explosive_barrier_margin(double R, double alpha, double p, int N,
                                std::span<const double> radii_near_boundary) {
  if (!(alpha > 0.0)) throw PreconditionError("alpha must be > 0");
  const double dN = static_cast<double>(N);
  double worst = std::numeric_limits<double>::infinity();
  for (double r : radii_near_boundary) {
    if (!(r < R) || !(r > 0.0)) throw DomainError("barrier radii must lie in (0, R)");
    const double d = R - r;
    // phi' = alpha d^{-alpha-1}, phi'' = alpha (alpha+1) d^{-alpha-2}
    const double dphi = alpha * std::pow(d, -alpha - 1.0);
    const double d2phi = alpha * (alpha + 1.0) * std::pow(d, -alpha - 2.0);
    const double margin =
        -0.5 * (d2phi + (dN - 1.0) / r * dphi) + std::pow(dphi, p) / p + std::pow(d, -alpha);
    worst = std::min(worst, margin);
  }
  return worst;
}

double gradient_bound_ratio(const RadialSolution& sol, double inner_R, double p,
                            const SourceSpec& source) {
  if (!(inner_R > 0.0) || inner_R > 0.5 * sol.grid.R) {
    throw PreconditionError("inner radius must lie in (0, R/2]");
  }
  double slope = 0.0;
  double value = 0.0;
  double forcing = 0.0;
  const auto& r = sol.grid.nodes;
  const double tol = 1e-12 * sol.grid.R;
  for (std::size_t i = 0; i < r.size(); ++i) {
    if (r[i] <= inner_R + tol) slope = std::max(slope, std::abs(sol.S[i]));
    if (r[i] <= 2.0 * inner_R + tol) {
      value = std::max(value, std::abs(sol.U[i]));
      forcing = std::max(forcing, std::pow(std::abs(source_at_radius(source, r[i])), 1.0 / p));
    }
  }
  return slope / (value / inner_R + forcing + 1.0);
}

} // namespace hjb::radial

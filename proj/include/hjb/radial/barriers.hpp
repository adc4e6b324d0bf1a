#pragma once

#include "hjb/core/model.hpp"
#include "hjb/radial/solver.hpp"

#include <span>

namespace hjb::radial {

// p^{1/(p-1)} q^{-q}: supremum of admissible barrier slopes c.
double barrier_slope_limit(double p);

// -c (1 + r^2)^{q/2} - C
double subsolution_barrier(double c, double C, double p, double r);

struct BarrierExcess {
  double max_excess = 0.0;
  double argmax_radius = 0.0;
  bool verified = true; // false when c lies outside (0, barrier_slope_limit(p)) or C < 0
};

// max over samples of L[u] - f for the barrier u above, using the closed-form
// radial derivatives.
BarrierExcess subsolution_barrier_excess(double c, double C, double p, int N,
                                         const SourceSpec& source,
                                         std::span<const double> sample_radii);

struct BarrierParameters {
  double c = 0.0;
  double C = 0.0;
  double max_excess = 0.0;
};

// c = 1/2 barrier_slope_limit(p) (1 - eps); C bisected upward from 0 until the
// excess is non-positive on the samples.
BarrierParameters certify_subsolution_barrier(double eps, double p, int N,
                                              const SourceSpec& source,
                                              std::span<const double> sample_radii);

// min over samples of -1/2 Lap(phi) + (1/p)|phi'|^p + phi for phi = (R - r)^{-alpha}.
double explosive_barrier_margin(double R, double alpha, double p, int N,
                                std::span<const double> radii_near_boundary);

// sup_{r <= R0} |S| / (sup_{r <= 2 R0} |U| / R0 + sup_{r <= 2 R0} |f|^{1/p} + 1)
double gradient_bound_ratio(const RadialSolution& sol, double inner_R, double p,
                            const SourceSpec& source);

} // namespace hjb::radial

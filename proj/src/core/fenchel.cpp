#include "hjb/core/errors.hpp"
#include "hjb/core/model.hpp"

#include <cmath>
#include <limits>

namespace hjb {

namespace {

double norm(std::span<const double> v) {
  double s = 0.0;
  for (double x : v) s += x * x;
  return std::sqrt(s);
}

} // namespace

FenchelResult fenchel_conjugate_numeric(std::span<const double> xi, double p, double search_radius,
                                        int grid_points_per_axis) {
  const double q = conjugate_exponent(p);
  if (xi.empty()) {
    throw std::invalid_argument("xi must have at least one component");
  }
  if (grid_points_per_axis < 3 || !(search_radius > 0.0)) {
    throw std::invalid_argument("empty grid: need >= 3 points per axis and a positive radius");
  }
  const std::size_t d = xi.size();
  const auto n = static_cast<std::size_t>(grid_points_per_axis);
  const double total = std::pow(static_cast<double>(n), static_cast<double>(d));
  if (total > 2e8) {
    throw std::invalid_argument("grid too large for exhaustive search");
  }

  const double xi_norm = norm(xi);
  FenchelResult out;
  out.closed_form = -std::pow(xi_norm, p) / p;
  out.exact_argmin.resize(d);
  const double scale = xi_norm > 0.0 ? std::pow(xi_norm, p - 2.0) : 0.0;
  for (std::size_t i = 0; i < d; ++i) out.exact_argmin[i] = -scale * xi[i];

  out.spacing = 2.0 * search_radius / static_cast<double>(n - 1);
  std::vector<std::size_t> idx(d, 0);
  std::vector<double> v(d);
  double best = std::numeric_limits<double>::infinity();
  std::vector<double> best_v(d);
  while (true) {
    double dot = 0.0;
    double sq = 0.0;
    for (std::size_t i = 0; i < d; ++i) {
      v[i] = -search_radius + static_cast<double>(idx[i]) * out.spacing;
      dot += v[i] * xi[i];
      sq += v[i] * v[i];
    }
    const double value = dot + std::pow(std::sqrt(sq), q) / q;
    if (value < best) {
      best = value;
      best_v = v;
    }
    std::size_t axis = 0;
    while (axis < d && ++idx[axis] == n) {
      idx[axis] = 0;
      ++axis;
    }
    if (axis == d) break;
  }
  out.numeric_inf = best;
  out.argmin = best_v;

  // Mean value bound: the nearest grid node is within delta of the minimizer and
  // |grad| <= |xi| + |v|^{q-1} along the segment.
  const double delta = 0.5 * out.spacing * std::sqrt(static_cast<double>(d));
  const double v_star = norm(out.exact_argmin);
  out.error_bound = delta * (xi_norm + std::pow(v_star + delta, q - 1.0));
  return out;
}

} // namespace hjb

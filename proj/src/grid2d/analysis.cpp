#include "hjb/core/errors.hpp"
#include "hjb/grid2d/solver.hpp"

#include <algorithm>
#include <cmath>

namespace hjb::grid2d {

SymmetryReport radial_symmetry_deviation(const Field2D& field, int n_bins) {
  if (n_bins < 4) throw PreconditionError("need n_bins >= 4");
  const Grid2D& g = field.grid;
  const double width = g.L / n_bins;
  SymmetryReport report;
  report.per_bin.resize(static_cast<std::size_t>(n_bins));
  for (int b = 0; b < n_bins; ++b) {
    report.per_bin[static_cast<std::size_t>(b)].r_lo = width * b;
    report.per_bin[static_cast<std::size_t>(b)].r_hi = width * (b + 1);
  }
  for (int i = 0; i < g.n; ++i) {
    for (int j = 0; j < g.n; ++j) {
      const double r = std::hypot(g.coord(i), g.coord(j));
      if (r > g.L) continue;
      const auto b = static_cast<std::size_t>(std::min(n_bins - 1, static_cast<int>(r / width)));
      auto& bin = report.per_bin[b];
      const double v = field.at(i, j);
      if (bin.count == 0) {
        bin.min = bin.max = v;
      } else {
        bin.min = std::min(bin.min, v);
        bin.max = std::max(bin.max, v);
      }
      ++bin.count;
    }
  }
  for (int b = 0; b < n_bins; ++b) {
    auto& bin = report.per_bin[static_cast<std::size_t>(b)];
    if (bin.count == 0) {
      report.empty_bins.push_back(b);
      continue;
    }
    bin.spread = bin.max - bin.min;
    report.max_bin_spread = std::max(report.max_bin_spread, bin.spread);
  }
  return report;
}

ErrorSummary compare_fields(const Field2D& field, const Field2D& reference) {
  if (field.values.size() != reference.values.size()) {
    throw PreconditionError("fields live on different grids");
  }
  ErrorSummary out;
  double sq = 0.0;
  int count = 0;
  const int n = field.grid.n;
  for (int i = 1; i + 1 < n; ++i) {
    for (int j = 1; j + 1 < n; ++j) {
      const double e = std::abs(field.at(i, j) - reference.at(i, j));
      out.max_abs_err = std::max(out.max_abs_err, e);
      sq += e * e;
      ++count;
    }
  }
  out.rms_err = std::sqrt(sq / count);
  return out;
}

ErrorSummary compare_to_exact(const Field2D& field, const exact::QuadraticCoefficients& coeffs) {
  return compare_fields(field, quadratic_field(field.grid, coeffs));
}

} // namespace hjb::grid2d

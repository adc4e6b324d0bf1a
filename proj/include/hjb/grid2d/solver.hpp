#pragma once

#include "hjb/core/model.hpp"
#include "hjb/exact/quadratic.hpp"

#include <memory>
#include <optional>
#include <vector>

namespace hjb::grid2d {

// Square [-L, L]^2 with n nodes per axis.
struct Grid2D {
  double L = 1.0;
  int n = 8;

  Grid2D() = default;
  Grid2D(double half_width, int nodes);

  double spacing() const noexcept { return 2.0 * L / (n - 1); }
  double coord(int i) const noexcept { return -L + spacing() * i; }
};

// Row-major values; index (i, j) is the node (coord(i), coord(j)).
struct Field2D {
  Grid2D grid;
  std::vector<double> values;

  Field2D() = default;
  explicit Field2D(const Grid2D& g, double fill = 0.0);

  double& at(int i, int j) { return values[static_cast<std::size_t>(i * grid.n + j)]; }
  double at(int i, int j) const { return values[static_cast<std::size_t>(i * grid.n + j)]; }
  bool on_frame(int i, int j) const noexcept {
    return i == 0 || j == 0 || i == grid.n - 1 || j == grid.n - 1;
  }
};

Field2D source_field(const Grid2D& grid, const SourceSpec& source);
Field2D quadratic_field(const Grid2D& grid, const exact::QuadraticCoefficients& coeffs);

struct IterationLog {
  std::vector<double> relative_updates;
  std::vector<double> max_abs; // max |u| after each iteration
  bool converged = false;
  int iterations = 0;
  // Interior nodes whose |grad u|^2 hit the clip in the last iteration. A
  // clipped iterate never counts as converged.
  int clipped_nodes = 0;
};

struct SolveOptions {
  double lambda = 20.0;
  double damping = 0.5;
  double tol = 1e-6;
  int max_iters = 500;
  // Ceiling on |grad u|^2; 0 selects 1e8 for p = 2 and 1e12 otherwise.
  double gradient_clip = 0.0;
};

struct Fd2dResult {
  Field2D field;
  IterationLog log;
};

// Damped linearized relaxation
//   (lambda I - 1/2 Lap_h) u_new = lambda u - ((1/p)|grad_h u|^p + u - f),
//   u <- damping u + (1 - damping) u_new,
// with centered gradients, one-sided (pointing inward) on the first interior
// ring, and frame values pinned.
// The interior operator is factored once per (grid, lambda).
class Fd2dSolver {
public:
  explicit Fd2dSolver(const Grid2D& grid);
  ~Fd2dSolver();
  Fd2dSolver(Fd2dSolver&&) noexcept;
  Fd2dSolver& operator=(Fd2dSolver&&) noexcept;

  // Frame values come from `boundary`; the start is `initial` or, when absent,
  // the source with the frame overwritten.
  Fd2dResult solve(const SourceSpec& source, double p, const SolveOptions& options,
                   const Field2D& boundary, const std::optional<Field2D>& initial = std::nullopt);

  int factorizations() const noexcept;

private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

Fd2dResult solve_fd2d(const SourceSpec& source, double p, const Grid2D& grid,
                      const SolveOptions& options, const Field2D& boundary,
                      const std::optional<Field2D>& initial = std::nullopt);

struct BinStats {
  double r_lo = 0.0;
  double r_hi = 0.0;
  int count = 0;
  double min = 0.0;
  double max = 0.0;
  double spread = 0.0;
};

struct SymmetryReport {
  double max_bin_spread = 0.0;
  std::vector<BinStats> per_bin;
  std::vector<int> empty_bins;
};

// Equal-width annuli over the inscribed disk r <= L; nodes outside are ignored.
SymmetryReport radial_symmetry_deviation(const Field2D& field, int n_bins);

struct ErrorSummary {
  double max_abs_err = 0.0;
  double rms_err = 0.0;
};

// Interior nodes only.
ErrorSummary compare_to_exact(const Field2D& field, const exact::QuadraticCoefficients& coeffs);
ErrorSummary compare_fields(const Field2D& field, const Field2D& reference);

} // namespace hjb::grid2d

#include "hjb/grid2d/solver.hpp"

#include "hjb/core/errors.hpp"
#include "hjb/simd/kernels.hpp"

#include <Eigen/Sparse>
#include <Eigen/SparseCholesky>

#include <algorithm>
#include <cmath>
#include <limits>

namespace hjb::grid2d {

namespace {

double ring_axis(double lo, double mid, double hi, bool at_lo, bool at_hi, double h) {
  if (at_lo) return (hi - mid) / h;
  if (at_hi) return (mid - lo) / h;
  return (hi - lo) / (2.0 * h);
}

// |grad u|^2 at an interior node, one-sided on the first interior ring.
double ring_gradient_sq(const Field2D& u, int i, int j, double h, double clip) {
  const int m = u.grid.n - 2;
  const double gx = ring_axis(u.at(i - 1, j), u.at(i, j), u.at(i + 1, j), i == 1, i == m, h);
  const double gy = ring_axis(u.at(i, j - 1), u.at(i, j), u.at(i, j + 1), j == 1, j == m, h);
  const double g = gx * gx + gy * gy;
  return g < clip ? g : clip;
}

} // namespace

Grid2D::Grid2D(double half_width, int nodes) : L(half_width), n(nodes) {
  if (!(L > 0.0) || !std::isfinite(L)) throw PreconditionError("half-width L must be > 0");
  if (n < 8) throw PreconditionError("grid needs n >= 8 nodes per axis");
}

Field2D::Field2D(const Grid2D& g, double fill)
    : grid(g), values(static_cast<std::size_t>(g.n) * static_cast<std::size_t>(g.n), fill) {}

Field2D source_field(const Grid2D& grid, const SourceSpec& source) {
  Field2D f(grid);
  for (int i = 0; i < grid.n; ++i) {
    for (int j = 0; j < grid.n; ++j) f.at(i, j) = source_at(source, grid.coord(i), grid.coord(j));
  }
  return f;
}

Field2D quadratic_field(const Grid2D& grid, const exact::QuadraticCoefficients& coeffs) {
  Field2D u(grid);
  for (int i = 0; i < grid.n; ++i) {
    for (int j = 0; j < grid.n; ++j) {
      const double x = grid.coord(i);
      const double y = grid.coord(j);
      u.at(i, j) = coeffs.A * (x * x + y * y) + coeffs.B;
    }
  }
  return u;
}

struct Fd2dSolver::Impl {
  Grid2D grid;
  double factored_lambda = std::numeric_limits<double>::quiet_NaN();
  int factorizations = 0;
  Eigen::SimplicialLDLT<Eigen::SparseMatrix<double>> ldlt;

  void factor(double lambda) {
    if (lambda == factored_lambda) return;
    const int m = grid.n - 2;
    const double h = grid.spacing();
    const double off = -0.5 / (h * h);
    const double diag = lambda + 2.0 / (h * h);
    std::vector<Eigen::Triplet<double>> entries;
    entries.reserve(static_cast<std::size_t>(m) * static_cast<std::size_t>(m) * 5);
    auto index = [m](int i, int j) { return i * m + j; };
    for (int i = 0; i < m; ++i) {
      for (int j = 0; j < m; ++j) {
        const int row = index(i, j);
        entries.emplace_back(row, row, diag);
        if (i > 0) entries.emplace_back(row, index(i - 1, j), off);
        if (i + 1 < m) entries.emplace_back(row, index(i + 1, j), off);
        if (j > 0) entries.emplace_back(row, index(i, j - 1), off);
        if (j + 1 < m) entries.emplace_back(row, index(i, j + 1), off);
      }
    }
    Eigen::SparseMatrix<double> A(m * m, m * m);
    A.setFromTriplets(entries.begin(), entries.end());
    ldlt.compute(A);
    if (ldlt.info() != Eigen::Success) {
      throw MatrixError("factorization of the relaxation operator failed");
    }
    factored_lambda = lambda;
    ++factorizations;
  }
};

Fd2dSolver::Fd2dSolver(const Grid2D& grid) : impl_(std::make_unique<Impl>()) {
  impl_->grid = Grid2D(grid.L, grid.n);
}
Fd2dSolver::~Fd2dSolver() = default;
Fd2dSolver::Fd2dSolver(Fd2dSolver&&) noexcept = default;
Fd2dSolver& Fd2dSolver::operator=(Fd2dSolver&&) noexcept = default;

int Fd2dSolver::factorizations() const noexcept { return impl_->factorizations; }

Fd2dResult Fd2dSolver::solve(const SourceSpec& source, double p, const SolveOptions& options,
                             const Field2D& boundary, const std::optional<Field2D>& initial) {
  conjugate_exponent(p);
  const Grid2D& grid = impl_->grid;
  if (!(options.lambda > 0.0)) throw PreconditionError("lambda must be > 0");
  if (!(options.damping > 0.0 && options.damping < 1.0)) {
    throw PreconditionError("damping must lie in (0, 1)");
  }
  if (!(options.tol > 0.0) || options.max_iters < 1) {
    throw PreconditionError("need tol > 0 and max_iters >= 1");
  }
  auto same_grid = [&](const Field2D& f) {
    return f.grid.n == grid.n && f.grid.L == grid.L && f.values.size() == boundary.values.size();
  };
  if (!same_grid(boundary) || (initial && !same_grid(*initial))) {
    throw PreconditionError("boundary and initial fields must live on the solver grid");
  }
  impl_->factor(options.lambda);

  const int n = grid.n;
  const int m = n - 2;
  const double h = grid.spacing();
  const double inv2h = 1.0 / (2.0 * h);
  const double edge = 0.5 / (h * h);
  const double clip = options.gradient_clip > 0.0 ? options.gradient_clip
                                                  : (p == 2.0 ? 1e8 : 1e12);
  const auto& k = simd::kernels();

  const Field2D f = source_field(grid, source);
  Field2D u = initial ? *initial : f;
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      if (u.on_frame(i, j)) u.at(i, j) = boundary.at(i, j);
    }
  }
  Field2D u_new = u;

  std::vector<double> grad(static_cast<std::size_t>(m));
  Eigen::VectorXd rhs(m * m);
  Fd2dResult result;
  auto& log = result.log;
  for (int it = 0; it < options.max_iters; ++it) {
    int clipped = 0;
    for (int i = 1; i <= m; ++i) {
      const double* prev = &u.at(i - 1, 1);
      const double* row = &u.at(i, 1);
      const double* next = &u.at(i + 1, 1);
      k.gradient_sq_row(prev, row, next, static_cast<std::size_t>(m), inv2h, clip, grad.data());
      // First interior ring: one-sided differences pointing into the domain.
      if (i == 1 || i == m) {
        for (int j = 1; j <= m; ++j) {
          grad[static_cast<std::size_t>(j - 1)] = ring_gradient_sq(u, i, j, h, clip);
        }
      } else {
        grad[0] = ring_gradient_sq(u, i, 1, h, clip);
        grad[static_cast<std::size_t>(m - 1)] = ring_gradient_sq(u, i, m, h, clip);
      }
      for (double g : grad) {
        if (!(g < clip)) ++clipped;
      }
      double h_scale = 0.5;
      if (p != 2.0) {
        for (double& g : grad) g = std::pow(g, 0.5 * p) / p;
        h_scale = 1.0;
      }
      double* out = rhs.data() + static_cast<std::ptrdiff_t>(i - 1) * m;
      k.relaxation_rhs_row(row, f.values.data() + i * n + 1, grad.data(), static_cast<std::size_t>(m),
                           options.lambda, h_scale, out);
      out[0] += edge * u.at(i, 0);
      out[m - 1] += edge * u.at(i, n - 1);
      if (i == 1) {
        for (int j = 1; j <= m; ++j) out[j - 1] += edge * u.at(0, j);
      }
      if (i == m) {
        for (int j = 1; j <= m; ++j) out[j - 1] += edge * u.at(n - 1, j);
      }
    }
    const Eigen::VectorXd sol = impl_->ldlt.solve(rhs);
    if (impl_->ldlt.info() != Eigen::Success || !sol.allFinite()) {
      throw MatrixError("relaxation linear solve failed");
    }
    double diff = 0.0;
    double norm = 0.0;
    for (int i = 0; i < n; ++i) {
      for (int j = 0; j < n; ++j) {
        const double next = u.on_frame(i, j)
                                ? u.at(i, j)
                                : sol(static_cast<Eigen::Index>((i - 1) * m + (j - 1)));
        u_new.at(i, j) = next;
        const double d = next - u.at(i, j);
        diff += d * d;
        norm += u.at(i, j) * u.at(i, j);
      }
    }
    const double rel = std::sqrt(diff) / (std::sqrt(norm) + 1e-10);
    double peak = 0.0;
    for (std::size_t idx = 0; idx < u.values.size(); ++idx) {
      u.values[idx] = options.damping * u.values[idx] + (1.0 - options.damping) * u_new.values[idx];
      peak = std::max(peak, std::abs(u.values[idx]));
    }
    log.relative_updates.push_back(rel);
    log.max_abs.push_back(peak);
    log.iterations = it + 1;
    log.clipped_nodes = clipped;
    if (rel < options.tol && clipped == 0) {
      log.converged = true;
      break;
    }
  }
  result.field = std::move(u);
  return result;
}

Fd2dResult solve_fd2d(const SourceSpec& source, double p, const Grid2D& grid,
                      const SolveOptions& options, const Field2D& boundary,
                      const std::optional<Field2D>& initial) {
  Fd2dSolver solver(grid);
  return solver.solve(source, p, options, boundary, initial);
}

} // namespace hjb::grid2d

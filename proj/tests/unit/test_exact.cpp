#include <doctest.h>

#include "hjb/core/errors.hpp"
#include "hjb/exact/quadratic.hpp"
#include "hjb/exact/regime.hpp"

#include <cmath>
#include <vector>

using namespace hjb;
using namespace hjb::exact;

namespace {

std::vector<double> radii(double r_max, int count) {
  std::vector<double> r(static_cast<std::size_t>(count));
  for (int i = 0; i < count; ++i) r[static_cast<std::size_t>(i)] = r_max * i / (count - 1);
  return r;
}

// Direct substitution of u = A r^2 + B into -1/2 Lap u + 1/2 |grad u|^2 + u - f.
double substituted_residual(double A, double B, double a, double b, int N, double r) {
  const double lap = 2.0 * A * N;
  const double grad_sq = 4.0 * A * A * r * r;
  return -0.5 * lap + 0.5 * grad_sq + (A * r * r + B) - (a * r * r + b);
}

// Fixed-point oracle: each beta_j is the positive root of
// 2x^2 + (delta_j - alpha_jj) x - (a_j + sum_{l != j} alpha_jl beta_l) = 0.
std::vector<double> fixed_point_betas(const RegimeModel& m) {
  const std::size_t k = m.regimes();
  std::vector<double> beta(k, 0.0);
  for (int sweep = 0; sweep < 10000; ++sweep) {
    std::vector<double> next(k);
    for (std::size_t j = 0; j < k; ++j) {
      double rhs = m.a[j];
      for (std::size_t l = 0; l < k; ++l) {
        if (l != j) rhs += m.alpha[j][l] * beta[l];
      }
      const double lin = m.delta[j] - m.alpha[j][j];
      next[j] = (-lin + std::sqrt(lin * lin + 8.0 * rhs)) / 4.0;
    }
    double change = 0.0;
    for (std::size_t j = 0; j < k; ++j) change = std::max(change, std::abs(next[j] - beta[j]));
    beta = next;
    if (change < 1e-15) break;
  }
  return beta;
}

RegimeModel decoupled() {
  RegimeModel m;
  m.delta = {1.0, 1.0, 1.0};
  m.alpha = {{0.0, 0.0, 0.0}, {0.0, 0.0, 0.0}, {0.0, 0.0, 0.0}};
  m.sigma = {0.5, 1.0, 2.0};
  m.a = {0.3, 1.0, 7.0};
  m.b = {0.0, 1.0, 2.0};
  m.p = {2.0, 2.0, 2.0};
  m.N = 2;
  return m;
}

} // namespace

TEST_CASE("scalar quadratic solution examples") {
  auto c = scalar_quadratic_solution(1.0, 0.0, 2);
  CHECK(c.A == 0.5);
  CHECK(c.B == 1.0);
  c = scalar_quadratic_solution(1.0, 0.0, 1);
  CHECK(c.A == 0.5);
  CHECK(c.B == 0.5);
  c = scalar_quadratic_solution(2.0, 1.0, 2);
  CHECK(c.A == doctest::Approx((-1.0 + std::sqrt(17.0)) / 4.0).epsilon(1e-15));
  CHECK(c.A == doctest::Approx(0.7807764).epsilon(1e-7));
  CHECK(c.B == doctest::Approx(2.5615528).epsilon(1e-7));
  double worst = 0.0;
  for (double r : radii(50.0, 100)) {
    worst = std::max(worst, std::abs(substituted_residual(c.A, c.B, 2.0, 1.0, 2, r)));
  }
  CHECK(worst <= 1e-12);
  CHECK_THROWS_AS(scalar_quadratic_solution(0.0, 0.0, 1), DomainError);
  CHECK_THROWS_AS(scalar_quadratic_solution(-1.0, 0.0, 1), DomainError);
}

TEST_CASE("coefficient invariants and branch selection") {
  for (double a : {0.01, 0.1, 1.0, 10.0, 100.0}) {
    for (int N : {1, 2, 5}) {
      const auto c = scalar_quadratic_solution(a, 0.7, N);
      CAPTURE(a);
      CHECK(c.A > 0.0);
      CHECK(rejected_root(a) < 0.0);
      CHECK(std::abs(2.0 * c.A * c.A + c.A - a) <= 1e-12 * std::max(1.0, a));
      CHECK(std::abs(c.B - (0.7 + c.A * N)) <= 1e-12 * std::max(1.0, c.B));
    }
  }
}

TEST_CASE("sensitivities against central differences") {
  const double step = 1e-6;
  for (double a : {0.1, 1.0, 3.0}) {
    for (int N : {1, 3}) {
      const auto s = scalar_sensitivities(a, N);
      const auto up = scalar_quadratic_solution(a + step, 0.0, N);
      const auto down = scalar_quadratic_solution(a - step, 0.0, N);
      CHECK(std::abs(s.dA_da - (up.A - down.A) / (2 * step)) <= 1e-8);
      CHECK(std::abs(s.dB_da - (up.B - down.B) / (2 * step)) <= 1e-8);
      const auto bu = scalar_quadratic_solution(a, 1.0 + step, N);
      const auto bd = scalar_quadratic_solution(a, 1.0 - step, N);
      CHECK(std::abs(s.dB_db - (bu.B - bd.B) / (2 * step)) <= 1e-8);
    }
  }
  CHECK(scalar_sensitivities(1.0, 1).dA_da == doctest::Approx(1.0 / 3.0).epsilon(1e-15));
  CHECK(scalar_sensitivities(1.0, 3).dB_da == doctest::Approx(1.0).epsilon(1e-15));
  CHECK(scalar_sensitivities(5.0, 2).dB_db == 1.0);
  CHECK_THROWS_AS(scalar_sensitivities(0.0, 1), DomainError);
}

TEST_CASE("pde residual of the closed form") {
  const auto r = radii(50.0, 100);
  const auto c1 = scalar_quadratic_solution(1.0, 0.0, 1);
  CHECK(pde_residual_quadratic(c1, {1.0, 0.0}, 1, r) <= 1e-13);
  const auto c2 = scalar_quadratic_solution(2.0, 1.0, 2);
  CHECK(pde_residual_quadratic(c2, {2.0, 1.0}, 2, r) <= 1e-12);

  // A perturbation of 0.01 leaves a residual growing like the coefficient times r^2.
  const QuadraticCoefficients bumped{c1.A + 0.01, c1.B};
  const double coeff = 2.0 * bumped.A * bumped.A + bumped.A - 1.0;
  const double res = pde_residual_quadratic(bumped, {1.0, 0.0}, 1, r);
  CHECK(res == doctest::Approx(std::abs(coeff * 2500.0 - 0.01)).epsilon(1e-9));
}

TEST_CASE("long-run cost and stationary variance") {
  CHECK(long_run_cost(1.0, 0.0, 1, 1.0) == doctest::Approx(0.75).epsilon(1e-15));
  CHECK(long_run_cost(1.0, 2.0, 1, 1.0) == doctest::Approx(2.75).epsilon(1e-15));
  CHECK(long_run_cost(1.0, 0.0, 2, 1.0) == doctest::Approx(1.5).epsilon(1e-15));
  for (double a : {0.1, 1.0, 4.0}) {
    for (double sigma : {0.5, 1.0, 2.0}) {
      const auto c = scalar_quadratic_solution(a, 0.3, 3);
      const double other = (2.0 * c.A * c.A + a) * 3 * sigma * sigma / (4.0 * c.A) + 0.3;
      CHECK(std::abs(long_run_cost(a, 0.3, 3, sigma) - other) <= 1e-12 * other);
    }
  }
  CHECK(stationary_variance_per_coordinate(1.0, 1.0) == doctest::Approx(0.5).epsilon(1e-15));
  CHECK(stationary_variance_per_coordinate(1.0, 2.0) == doctest::Approx(2.0).epsilon(1e-15));
  double prev = 1e300;
  for (double a : {0.1, 1.0, 10.0, 100.0, 1e4}) {
    const double v = stationary_variance_per_coordinate(a, 1.0);
    CHECK(v < prev);
    prev = v;
  }
  CHECK(prev < 0.02);
  CHECK_THROWS_AS(long_run_cost(1.0, 0.0, 1, 0.0), DomainError);
}

TEST_CASE("regime betas: decoupled reduction") {
  const auto m = decoupled();
  const auto beta = solve_regime_betas(m);
  for (std::size_t j = 0; j < 3; ++j) {
    CHECK(beta[j] == doctest::Approx(scalar_quadratic_solution(m.a[j], 0.0, 1).A).epsilon(1e-13));
  }
}

TEST_CASE("regime betas: reference model against fixed-point oracle") {
  const auto m = reference_two_regime_model();
  const auto beta = solve_regime_betas(m);
  const auto oracle = fixed_point_betas(m);
  CHECK(beta[0] == doctest::Approx(oracle[0]).epsilon(1e-12));
  CHECK(beta[1] == doctest::Approx(oracle[1]).epsilon(1e-12));
  CHECK(beta[0] == doctest::Approx(0.8566).epsilon(1e-4));
  CHECK(beta[1] == doctest::Approx(0.4167).epsilon(1e-4));
  CHECK(beta_residual(m, beta) <= 1e-10);
  // Independent substitution.
  for (std::size_t j = 0; j < 2; ++j) {
    const double lhs = 2 * beta[j] * beta[j] + m.delta[j] * beta[j] -
                       (m.alpha[j][0] * beta[0] + m.alpha[j][1] * beta[1]);
    CHECK(std::abs(lhs - m.a[j]) <= 1e-10);
  }
}

TEST_CASE("regime betas: symmetry and label swap") {
  RegimeModel sym = reference_two_regime_model();
  sym.a = {1.3, 1.3};
  sym.alpha = {{-0.5, 0.5}, {0.5, -0.5}};
  const auto b = solve_regime_betas(sym);
  CHECK(std::abs(b[0] - b[1]) <= 1e-14);

  const RegimeModel m = reference_two_regime_model();
  RegimeModel swapped = m;
  std::swap(swapped.delta[0], swapped.delta[1]);
  std::swap(swapped.sigma[0], swapped.sigma[1]);
  std::swap(swapped.a[0], swapped.a[1]);
  std::swap(swapped.b[0], swapped.b[1]);
  swapped.alpha = {{m.alpha[1][1], m.alpha[1][0]}, {m.alpha[0][1], m.alpha[0][0]}};
  const auto x = solve_regime_betas(m);
  const auto y = solve_regime_betas(swapped);
  CHECK(std::abs(x[0] - y[1]) <= 1e-10);
  CHECK(std::abs(x[1] - y[0]) <= 1e-10);
}

TEST_CASE("regime betas: multi-start agreement") {
  CHECK(beta_multistart_spread(reference_two_regime_model(), 10, 2024) <= 1e-8);
  CHECK(beta_multistart_spread(decoupled(), 10, 99) <= 1e-8);
}

TEST_CASE("regime betas: errors") {
  RegimeModel bad = reference_two_regime_model();
  bad.delta[0] = 0.0;
  CHECK_THROWS_AS(solve_regime_betas(bad), PreconditionError);
  CHECK_THROWS_AS(solve_regime_betas(reference_two_regime_model(), 1e-12, 0), SolverError);
  try {
    solve_regime_betas(reference_two_regime_model(), 1e-12, 1);
    FAIL("expected non-convergence");
  } catch (const SolverError& e) {
    CHECK(e.iterations() == 1);
    CHECK(e.last_residual() > 1e-12);
    CHECK(e.trace().size() == 2);
  }
  // A start on the negative branch converges to a non-positive root.
  const std::vector<double> negative{-3.0, -3.0};
  CHECK_THROWS_AS(solve_regime_betas_from(decoupled(), std::vector<double>{-3, -3, -3}),
                  BranchError);
  (void)negative;
}

TEST_CASE("regime etas") {
  const auto m = reference_two_regime_model();
  const auto beta = solve_regime_betas(m);
  const auto eta = solve_regime_etas(m, beta);
  // Cramer's rule on M = [[1.4, -0.4], [-0.6, 1.6]].
  const double c0 = m.b[0] + m.sigma[0] * m.sigma[0] * beta[0] * m.N;
  const double c1 = m.b[1] + m.sigma[1] * m.sigma[1] * beta[1] * m.N;
  const double det = 1.4 * 1.6 - 0.4 * 0.6;
  CHECK(eta[0] == doctest::Approx((1.6 * c0 + 0.4 * c1) / det).epsilon(1e-13));
  CHECK(eta[1] == doctest::Approx((0.6 * c0 + 1.4 * c1) / det).epsilon(1e-13));
  CHECK(eta[0] == doctest::Approx(1.1900).epsilon(1e-4));
  CHECK(eta[1] == doctest::Approx(1.2796).epsilon(1e-4));
  CHECK(eta_residual(m, beta, eta) <= 1e-12);

  const auto d = decoupled();
  const auto bd = solve_regime_betas(d);
  const auto ed = solve_regime_etas(d, bd);
  for (std::size_t j = 0; j < 3; ++j) {
    CHECK(ed[j] == doctest::Approx((d.b[j] + d.sigma[j] * d.sigma[j] * bd[j] * d.N) / d.delta[j]));
  }

  RegimeModel zero = m;
  zero.b = {0.0, 0.0};
  const std::vector<double> zero_beta{0.0, 0.0};
  const auto ez = solve_regime_etas(zero, zero_beta);
  CHECK(ez[0] == 0.0);
  CHECK(ez[1] == 0.0);
}

TEST_CASE("regime etas are non-negative for non-negative data") {
  for (double rate : {0.0, 0.1, 1.0, 5.0}) {
    RegimeModel m = reference_two_regime_model();
    m.alpha = {{-rate, rate}, {2 * rate, -2 * rate}};
    const auto c = solve_regime_system(m);
    CHECK(c.eta[0] >= 0.0);
    CHECK(c.eta[1] >= 0.0);
    CHECK(c.residual_beta <= 1e-10);
    CHECK(c.residual_eta <= 1e-10);
  }
}

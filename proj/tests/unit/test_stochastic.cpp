#include <doctest.h>

#include "hjb/core/errors.hpp"
#include "hjb/exact/quadratic.hpp"
#include "hjb/exact/regime.hpp"
#include "hjb/stochastic/estimators.hpp"

#include <cmath>
#include <cstring>
#include <vector>

using namespace hjb;
using namespace hjb::stochastic;

namespace {

const exact::QuadraticCoefficients kUnit = exact::scalar_quadratic_solution(1.0, 0.0, 1);

bool same_paths(const PathSet& a, const PathSet& b) {
  return a.times == b.times && a.regimes == b.regimes && a.switch_counts == b.switch_counts &&
         a.states.size() == b.states.size() &&
         std::memcmp(a.states.data(), b.states.data(), a.states.size() * sizeof(double)) == 0;
}

// Integral over [T, inf) of e^{-t} (k^2/2 + a)(|x0|^2 e^{-2kt} + N s^2 (1 - e^{-2kt})/(2k)) + b e^{-t},
// by the midpoint rule on a long window.
double tail_by_quadrature(double a, double b, int N, double s, double k, double x0_sq, double T) {
  const double quad = 0.5 * k * k + a;
  const double h = 1e-3;
  double sum = 0.0;
  for (double t = T + 0.5 * h; t < T + 60.0; t += h) {
    const double m = k > 0.0 ? x0_sq * std::exp(-2 * k * t) + N * s * s * (1 - std::exp(-2 * k * t)) / (2 * k)
                             : x0_sq + N * s * s * t;
    sum += std::exp(-t) * (quad * m + b) * h;
  }
  return sum;
}

RegimeModel decoupled_copy() {
  RegimeModel m = reference_two_regime_model();
  m.alpha = {{0.0, 0.0}, {0.0, 0.0}};
  return m;
}

} // namespace

TEST_CASE("splitmix64 reference values") {
  CHECK(splitmix64(0) == 0xE220A8397B1DCDAFULL);
  CHECK(stream_seed({7}, 3) == splitmix64(splitmix64(7) + 3));
  CHECK(stream_seed({7}, 3) != stream_seed({7}, 4));
}

TEST_CASE("path stream distributions") {
  PathStream s(RngSpec{123}, 0);
  const int n = 200000;
  double mean = 0.0, var = 0.0, emean = 0.0;
  double umin = 1.0, umax = 0.0;
  for (int i = 0; i < n; ++i) {
    const double z = s.normal();
    mean += z;
    var += z * z;
    emean += s.exponential(2.0);
    const double u = s.uniform();
    umin = std::min(umin, u);
    umax = std::max(umax, u);
  }
  mean /= n;
  var = var / n - mean * mean;
  emean /= n;
  CHECK(std::abs(mean) <= 4.0 / std::sqrt(n));
  CHECK(std::abs(var - 1.0) <= 4.0 * std::sqrt(2.0 / n));
  CHECK(std::abs(emean - 0.5) <= 4.0 * 0.5 / std::sqrt(n));
  CHECK(umin > 0.0);
  CHECK(umax < 1.0);

  PathStream a(RngSpec{5}, 9), b(RngSpec{5}, 9);
  for (int i = 0; i < 100; ++i) CHECK(a.normal() == b.normal());
}

TEST_CASE("pairwise sum") {
  std::vector<double> v(1000);
  long double exact = 0.0L;
  for (std::size_t i = 0; i < v.size(); ++i) {
    v[i] = 1.0 / static_cast<double>(i + 1);
    exact += static_cast<long double>(v[i]);
  }
  CHECK(std::abs(pairwise_sum(v) - static_cast<double>(exact)) <= 1e-14);
  CHECK(pairwise_sum(std::vector<double>{}) == 0.0);
  CHECK(pairwise_sum(std::vector<double>{1.0, 2.0, 3.0}) == 6.0);
}

TEST_CASE("summary statistics") {
  const std::vector<double> x{1.0, 2.0, 3.0, 4.0};
  const auto s = summarize(x);
  CHECK(s.mean == 2.5);
  CHECK(s.std_error == doctest::Approx(std::sqrt(5.0 / 3.0 / 4.0)));
  CHECK(s.n_samples == 4);
}

TEST_CASE("step count and preconditions") {
  CHECK(step_count(15.0, 0.005) == 3000);
  CHECK(step_count(1.0, 0.1) == 10);
  CHECK_THROWS_AS(step_count(1.0, 0.3), PreconditionError);
  const double x0[] = {1.0};
  CHECK_THROWS_AS(simulate_ou(0.0, 1.0, x0, 1.0, 0.1, 10, {1}), DomainError);
  CHECK_THROWS_AS(simulate_ou(0.5, 1.0, x0, 1.0, 0.1, 0, {1}), PreconditionError);
  CHECK_THROWS_AS(simulate_ou(0.5, 1.0, std::span<const double>{}, 1.0, 0.1, 10, {1}),
                  PreconditionError);
  SimulationOptions bad;
  bad.record_stride = 0;
  CHECK_THROWS_AS(simulate_ou(0.5, 1.0, x0, 1.0, 0.1, 10, {1}, bad), PreconditionError);
}

TEST_CASE("noiseless OU follows the exact Euler recursion") {
  const double x0[] = {3.0, -1.0};
  const auto ps = simulate_ou(0.5, 0.0, x0, 1.0, 0.01, 3, {1});
  REQUIRE(ps.n_records() == 101);
  double x = 3.0;
  for (std::size_t r = 1; r < ps.n_records(); ++r) {
    x = (x - 0.01 * x) + 0.0 * 0.0;
    CHECK(ps.state(2, r)[0] == x);
  }
  CHECK(ps.state(0, 100)[1] == doctest::Approx(-std::pow(0.99, 100)).epsilon(1e-14));
  CHECK_FALSE(ps.has_regimes());
  CHECK(ps.meta.min_gain == 1.0);
  CHECK_FALSE(ps.meta.stability_warning);
}

TEST_CASE("record stride keeps every k-th step") {
  const double x0[] = {1.0};
  SimulationOptions every;
  SimulationOptions tenth;
  tenth.record_stride = 10;
  const auto full = simulate_ou(0.5, 1.0, x0, 2.0, 0.01, 20, {9}, every);
  const auto thin = simulate_ou(0.5, 1.0, x0, 2.0, 0.01, 20, {9}, tenth);
  REQUIRE(thin.n_records() == 21);
  for (std::size_t p = 0; p < 20; ++p) {
    for (std::size_t r = 0; r < thin.n_records(); ++r) {
      CHECK(thin.state(p, r)[0] == full.state(p, 10 * r)[0]);
      CHECK(thin.times[r] == full.times[10 * r]);
    }
  }
}

TEST_CASE("simulation is deterministic and independent of thread count") {
  const double x0[] = {2.0, 1.0};
  SimulationOptions one;
  one.threads = 1;
  one.record_stride = 5;
  SimulationOptions four = one;
  four.threads = 4;
  const auto a = simulate_ou(0.5, 1.0, x0, 5.0, 0.01, 700, {31}, one);
  const auto b = simulate_ou(0.5, 1.0, x0, 5.0, 0.01, 700, {31}, four);
  const auto c = simulate_ou(0.5, 1.0, x0, 5.0, 0.01, 700, {32}, one);
  CHECK(same_paths(a, b));
  CHECK_FALSE(same_paths(a, c));

  const auto model = reference_two_regime_model();
  const auto beta = exact::solve_regime_betas(model);
  for (auto sw : {Switching::BernoulliEuler, Switching::ExponentialClock}) {
    const auto r1 = simulate_regime_switching(model, beta, x0, 0, 5.0, 0.01, 600, {3}, sw, one);
    const auto r4 = simulate_regime_switching(model, beta, x0, 0, 5.0, 0.01, 600, {3}, sw, four);
    CHECK(same_paths(r1, r4));
  }
}

TEST_CASE("OU second moment matches the Euler recursion") {
  const double x0[] = {2.0};
  const double A = kUnit.A;
  const auto ps = simulate_ou(A, 1.0, x0, 2.0, 0.01, 20000, {77}, SimulationOptions{200, 0});
  std::vector<double> sq(ps.n_paths);
  for (std::size_t p = 0; p < ps.n_paths; ++p) {
    const double x = ps.state(p, ps.n_records() - 1)[0];
    sq[p] = x * x;
  }
  const auto est = summarize(sq);
  const double expect = euler_second_moment(2 * A, 1.0, 1, 4.0, 0.01, 200);
  CHECK(std::abs(est.mean - expect) <= 4.0 * est.std_error);
  // The recursion approaches the discrete stationary value 1/(2k - k^2 dt).
  const double far = euler_second_moment(2 * A, 1.0, 1, 4.0, 0.01, 100000);
  CHECK(far == doctest::Approx(1.0 / (2.0 - 0.01)).epsilon(1e-12));
}

TEST_CASE("linear feedback cost and tail bound") {
  // The optimal gain reproduces the closed-form value.
  for (double x0 : {0.0, 1.0, 3.0}) {
    CHECK(linear_feedback_cost(1.0, 0.0, 1, 1.0, 2 * kUnit.A, x0 * x0) ==
          doctest::Approx(kUnit.A * x0 * x0 + kUnit.B).epsilon(1e-14));
  }
  // Any other gain costs more.
  for (double k : {0.0, 0.3, 0.6, 1.5, 3.0}) {
    CHECK(linear_feedback_cost(1.0, 0.0, 1, 1.0, k, 4.0) > kUnit.A * 4.0 + kUnit.B);
  }
  for (double k : {0.5, 1.5}) {
    const double oracle = tail_by_quadrature(1.0, 0.2, 2, 1.0, k, 4.0, 5.0);
    CHECK(truncation_tail_bound(1.0, 0.2, 2, 1.0, k, 4.0, 5.0) ==
          doctest::Approx(oracle).epsilon(1e-5));
  }
  // Upper bounds for the optimal and zero gains.
  const auto c = exact::scalar_quadratic_solution(1.0, 0.2, 2);
  CHECK(truncation_tail_bound(1.0, 0.2, 2, 1.0, 2 * c.A, 4.0, 5.0) >=
        tail_by_quadrature(1.0, 0.2, 2, 1.0, 2 * c.A, 4.0, 5.0));
  CHECK(truncation_tail_bound(1.0, 0.2, 2, 1.0, 0.0, 4.0, 5.0) >=
        tail_by_quadrature(1.0, 0.2, 2, 1.0, 0.0, 4.0, 5.0));
}

TEST_CASE("discounted cost estimate verifies the value function") {
  DiscountedCostParams p;
  p.x0 = {1.0};
  p.n_paths = 4000;
  const auto v = verify_value_function(p, {2});
  CHECK(v.u_exact == doctest::Approx(kUnit.A + kUnit.B));
  CHECK(v.pass);
  CHECK(v.truncation_bound <= p.truncation_budget);

  // Perturbed feedbacks cost at least the optimum, up to noise.
  for (double k : {1.5, 0.5, 0.0}) {
    DiscountedCostParams q = p;
    q.gain = k;
    q.truncation_budget = 1e-2;
    const auto r = estimate_discounted_cost(q, {3});
    CHECK(r.estimate.mean >= v.estimate.mean - 3.0 * r.estimate.std_error);
    // Left-endpoint bias of the Riemann sum is O(dt).
    CHECK(std::abs(r.estimate.mean - linear_feedback_cost(1, 0, 1, 1, k, 1.0)) <=
          4.0 * r.estimate.std_error + 0.02);
  }

  DiscountedCostParams short_horizon = p;
  short_horizon.T = 2.0;
  CHECK_THROWS_AS(estimate_discounted_cost(short_horizon, {1}), PreconditionError);
  DiscountedCostParams wrong_dim = p;
  wrong_dim.N = 2;
  CHECK_THROWS_AS(estimate_discounted_cost(wrong_dim, {1}), PreconditionError);
}

TEST_CASE("stationary moment, long-run cost and transversality") {
  const double x0[] = {5.0};
  const auto ps = simulate_ou(kUnit.A, 1.0, x0, 30.0, 0.01, 2000, {8}, SimulationOptions{10, 0});
  const auto m = estimate_stationary_moments(ps, 0.5);
  const double bias = 0.01;
  CHECK(std::abs(m.mean - exact::stationary_variance_per_coordinate(1.0, 1.0)) <=
        3 * m.std_error + bias);
  const auto lr = long_run_cost_estimate(ps, 1.0, 0.0, kUnit.A, 0.5);
  CHECK(std::abs(lr.mean - exact::long_run_cost(1.0, 0.0, 1, 1.0)) <= 3 * lr.std_error + 2 * bias);

  const double checkpoints[] = {1.0, 5.0, 10.0, 15.0};
  const auto decay = transversality_decay(ps, kUnit, checkpoints);
  REQUIRE(decay.size() == 4);
  for (std::size_t i = 0; i < decay.size(); ++i) {
    CHECK(decay[i].estimate.mean <= std::exp(-decay[i].t) * (0.5 * 25.0 + 1.0));
    if (i > 0) CHECK(decay[i].estimate.mean < decay[i - 1].estimate.mean);
  }
  const double off_grid[] = {1.005};
  CHECK_THROWS_AS(transversality_decay(ps, kUnit, off_grid), PreconditionError);
  const double outside[] = {31.0};
  CHECK_THROWS_AS(transversality_decay(ps, kUnit, outside), PreconditionError);

  CHECK_THROWS_AS(estimate_stationary_moments(ps, 0.1), PreconditionError);
  CHECK_THROWS_AS(estimate_stationary_moments(ps, 0.9), PreconditionError);
  const auto brief = simulate_ou(kUnit.A, 1.0, x0, 4.0, 0.01, 10, {8});
  CHECK_THROWS_AS(estimate_stationary_moments(brief, 0.5), PreconditionError);
}

TEST_CASE("decoupled regimes reproduce the unmodulated process bit for bit") {
  const auto model = decoupled_copy();
  const auto beta = exact::solve_regime_betas(model);
  const double x0[] = {1.0, -2.0};
  for (std::size_t j0 : {0u, 1u}) {
    const auto rs = simulate_regime_switching(model, beta, x0, j0, 3.0, 0.01, 300, {4},
                                              Switching::BernoulliEuler);
    const auto ou = simulate_ou(beta[j0], model.sigma[j0], x0, 3.0, 0.01, 300, {4});
    CHECK(rs.states == ou.states);
    for (int label : rs.regimes) CHECK(label == static_cast<int>(j0) + 1);
    for (int count : rs.switch_counts) CHECK(count == 0);
  }
}

TEST_CASE("regime occupation approaches the stationary law") {
  const auto model = reference_two_regime_model();
  const auto beta = exact::solve_regime_betas(model);
  const double x0[] = {5.0, 0.0};
  const auto rs = simulate_regime_switching(model, beta, x0, 0, 30.0, 0.01, 1000, {11},
                                            Switching::BernoulliEuler, SimulationOptions{10, 0});
  const auto occ = regime_occupation(rs, 2, 0.2);
  const auto pi = stationary_distribution(model);
  for (std::size_t j = 0; j < 2; ++j) {
    CHECK(std::abs(occ[j].mean - pi[j]) <= 3.0 * occ[j].std_error + 1e-3);
  }
  CHECK(occ[0].mean + occ[1].mean == doctest::Approx(1.0));
  CHECK_THROWS_AS(regime_occupation(rs, 2, 1.0), PreconditionError);
  const auto ou = simulate_ou(0.5, 1.0, x0, 1.0, 0.1, 2, {1});
  CHECK_THROWS_AS(regime_occupation(ou, 2, 0.2), PreconditionError);
}

TEST_CASE("both switching schemes give the same jump rate") {
  const auto model = reference_two_regime_model();
  const auto beta = exact::solve_regime_betas(model);
  const double x0[] = {0.0};
  SimulationOptions sparse;
  sparse.record_stride = 1000;
  const auto bern = simulate_regime_switching(model, beta, x0, 0, 20.0, 0.001, 800, {21},
                                              Switching::BernoulliEuler, sparse);
  const auto clock = simulate_regime_switching(model, beta, x0, 0, 20.0, 0.001, 800, {22},
                                               Switching::ExponentialClock, sparse);
  const auto rb = switch_rate(bern);
  const auto rc = switch_rate(clock);
  const double se = std::sqrt(rb.std_error * rb.std_error + rc.std_error * rc.std_error);
  CHECK(std::abs(rb.mean - rc.mean) <= 3.0 * se);
  CHECK(bern.meta.switching == "bernoulli-euler");
  CHECK(clock.meta.switching == "exponential-clock");
}

TEST_CASE("regime simulation preconditions") {
  const auto model = reference_two_regime_model();
  const auto beta = exact::solve_regime_betas(model);
  const double x0[] = {1.0};
  // dt * max rate = 0.6 * 1.0 >= 0.5
  CHECK_THROWS_AS(simulate_regime_switching(model, beta, x0, 0, 2.0, 1.0, 10, {1},
                                            Switching::BernoulliEuler),
                  PreconditionError);
  CHECK_NOTHROW(simulate_regime_switching(model, beta, x0, 0, 2.0, 1.0, 10, {1},
                                          Switching::ExponentialClock));
  CHECK_THROWS_AS(simulate_regime_switching(model, beta, x0, 2, 2.0, 0.1, 10, {1},
                                            Switching::BernoulliEuler),
                  PreconditionError);
  const std::vector<double> short_beta{0.5};
  CHECK_THROWS_AS(simulate_regime_switching(model, short_beta, x0, 0, 2.0, 0.1, 10, {1},
                                            Switching::BernoulliEuler),
                  PreconditionError);
  RegimeModel bad = model;
  bad.sigma[0] = -1.0;
  CHECK_THROWS_AS(simulate_regime_switching(bad, beta, x0, 0, 2.0, 0.1, 10, {1},
                                            Switching::BernoulliEuler),
                  PreconditionError);
}

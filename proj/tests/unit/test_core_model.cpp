#include <doctest.h>

#include "hjb/core/errors.hpp"
#include "hjb/core/model.hpp"

#include <cmath>
#include <random>
#include <vector>

using namespace hjb;

TEST_CASE("conjugate exponent values") {
  CHECK(conjugate_exponent(2.0) == doctest::Approx(2.0).epsilon(1e-15));
  CHECK(conjugate_exponent(3.0) == doctest::Approx(1.5).epsilon(1e-15));
  CHECK(conjugate_exponent(1.5) == doctest::Approx(3.0).epsilon(1e-15));
  for (double p : {1.1, 1.5, 2.0, 3.0, 10.0}) {
    const double q = conjugate_exponent(p);
    CHECK(std::abs(1.0 / p + 1.0 / q - 1.0) <= 1e-14);
    CHECK(std::abs(conjugate_exponent(q) - p) <= 1e-12);
  }
}

TEST_CASE("conjugate exponent rejects p <= 1") {
  CHECK_THROWS_AS(conjugate_exponent(1.0), DomainError);
  CHECK_THROWS_AS(conjugate_exponent(0.5), DomainError);
  CHECK_THROWS_AS(conjugate_exponent(-2.0), DomainError);
  CHECK_THROWS_AS(conjugate_exponent(NAN), DomainError);
}

TEST_CASE("scalar problem validation") {
  CHECK_NOTHROW(ScalarProblem(2, 2.0, Quadratic{1.0, 0.0}));
  CHECK_THROWS_AS(ScalarProblem(0, 2.0, Quadratic{1.0, 0.0}), DomainError);
  CHECK_THROWS_AS(ScalarProblem(1, 1.0, Quadratic{1.0, 0.0}), DomainError);
  CHECK_THROWS_AS(ScalarProblem(1, 2.0, Quadratic{0.0, 0.0}), DomainError);
  CHECK_THROWS_AS(ScalarProblem(1, 2.0, Quadratic{1.0, -1.0}), DomainError);
  CHECK_NOTHROW(ScalarProblem(2, 2.0, AnisotropicQuadratic{1.0, 3.0, 0.5, 2.0}));
  CHECK_THROWS_AS(ScalarProblem(3, 2.0, AnisotropicQuadratic{1.0, 3.0, 0.5, 2.0}),
                  PreconditionError);
  // Hessian [[2, 5], [5, 6]] is indefinite.
  CHECK_THROWS_AS(ScalarProblem(2, 2.0, AnisotropicQuadratic{1.0, 3.0, 5.0, 0.0}), DomainError);
}

TEST_CASE("tabulated sources") {
  TabulatedRadial t{{0.0, 1.0, 2.0, 4.0}, {1.0, 2.0, 5.0, 17.0}};
  CHECK(source_at_radius(t, 0.5) == doctest::Approx(1.5));
  CHECK(source_at_radius(t, 3.0) == doctest::Approx(11.0));
  CHECK(source_at_radius(t, 4.0) == doctest::Approx(17.0));
  CHECK_THROWS_AS(source_at_radius(t, 4.5), PreconditionError);
  CHECK(source_at(t, 3.0, 0.0) == doctest::Approx(11.0));
  CHECK_NOTHROW(ScalarProblem(1, 2.0, t));

  TabulatedRadial unsorted{{0.0, 2.0, 1.0}, {1.0, 1.0, 1.0}};
  CHECK_THROWS_AS(ScalarProblem(1, 2.0, unsorted), PreconditionError);
  TabulatedRadial offset{{0.5, 1.0}, {1.0, 1.0}};
  CHECK_THROWS_AS(ScalarProblem(1, 2.0, offset), PreconditionError);
  // -r^2 fails the growth bound f r^{-q} >= 0 in the tail for q = 2.
  TabulatedRadial negative{{0.0, 5.0, 10.0}, {0.0, -25.0, -100.0}};
  CHECK(tabulated_power_bound(negative, 2.0) == doctest::Approx(-1.0));
  CHECK_THROWS_AS(ScalarProblem(1, 2.0, negative), DomainError);
}

TEST_CASE("anisotropic sources evaluate and report radiality") {
  const SourceSpec an = AnisotropicQuadratic{1.0, 3.0, 0.5, 2.0};
  CHECK(source_at(an, 1.0, 2.0) == doctest::Approx(1.0 + 12.0 + 1.0 + 2.0));
  CHECK_FALSE(is_radial(an));
  CHECK(is_radial(SourceSpec{AnisotropicQuadratic{2.0, 2.0, 0.0, 1.0}}));
  CHECK(is_radial(SourceSpec{Quadratic{1.0, 0.0}}));
  CHECK_THROWS_AS(source_at_radius(an, 1.0), PreconditionError);
}

namespace {

// Independent brute force: scan a fine 1D line through the minimizer direction
// is not enough for the oracle, so scan the full square directly.
double brute_force_conjugate(double x1, double x2, double p, double radius, int n) {
  const double q = p / (p - 1.0);
  double best = 1e300;
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      const double v1 = -radius + 2.0 * radius * i / (n - 1);
      const double v2 = -radius + 2.0 * radius * j / (n - 1);
      best = std::min(best, v1 * x1 + v2 * x2 + std::pow(std::hypot(v1, v2), q) / q);
    }
  }
  return best;
}

} // namespace

TEST_CASE("fenchel oracle examples") {
  {
    const std::vector<double> xi{0.0, 0.0};
    const auto r = fenchel_conjugate_numeric(xi, 2.0, 1.0, 41);
    CHECK(r.closed_form == 0.0);
    CHECK(std::abs(r.numeric_inf) <= 1e-15);
  }
  {
    const std::vector<double> xi{1.0, 0.0};
    const auto coarse = fenchel_conjugate_numeric(xi, 2.0, 2.0, 41);
    const auto fine = fenchel_conjugate_numeric(xi, 2.0, 2.0, 401);
    CHECK(coarse.closed_form == doctest::Approx(-0.5));
    CHECK(std::abs(fine.numeric_inf + 0.5) <= std::abs(coarse.numeric_inf + 0.5) + 1e-15);
    CHECK(std::abs(fine.numeric_inf + 0.5) <= fine.error_bound);
    CHECK(fine.numeric_inf == doctest::Approx(brute_force_conjugate(1.0, 0.0, 2.0, 2.0, 401)));
  }
  {
    const std::vector<double> xi{1.0, 1.0};
    const double radius = 2.0 * std::pow(std::sqrt(2.0), 1.0 / 2.0) + 0.1;
    const auto r = fenchel_conjugate_numeric(xi, 3.0, radius, 601);
    CHECK(r.closed_form == doctest::Approx(-std::pow(2.0, 1.5) / 3.0));
    CHECK(std::abs(r.numeric_inf - r.closed_form) <= r.error_bound);
    CHECK(r.numeric_inf == doctest::Approx(brute_force_conjugate(1.0, 1.0, 3.0, radius, 601)));
    CHECK(r.exact_argmin[0] == doctest::Approx(-std::sqrt(2.0)));
  }
  CHECK_THROWS_AS(fenchel_conjugate_numeric(std::vector<double>{1.0}, 2.0, 1.0, 2),
                  std::invalid_argument);
  CHECK_THROWS_AS(fenchel_conjugate_numeric(std::vector<double>{}, 2.0, 1.0, 11),
                  std::invalid_argument);
}

TEST_CASE("fenchel oracle converges at first order with its argmin") {
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> coord(-1.5, 1.5);
  for (double p : {1.5, 2.0, 3.0}) {
    for (int trial = 0; trial < 3; ++trial) {
      const std::vector<double> xi{coord(rng), coord(rng)};
      const double xn = std::hypot(xi[0], xi[1]);
      const double radius = 2.0 * std::pow(xn, 1.0 / (p - 1.0)) + 0.5;
      double prev_err = 1e300;
      double prev_bound = 1e300;
      double prev_dist = 1e300;
      for (int n : {51, 101, 201, 401}) {
        const auto r = fenchel_conjugate_numeric(xi, p, radius, n);
        const double err = r.numeric_inf - r.closed_form;
        CAPTURE(p);
        CAPTURE(n);
        CHECK(err >= -1e-12); // grid minimum never undercuts the infimum
        CHECK(err <= r.error_bound);
        CHECK(r.error_bound < prev_bound);
        CHECK(r.error_bound <= 0.55 * prev_bound); // bound halves with the spacing
        CHECK(err <= prev_err + 1e-12);
        const double dist = std::hypot(r.argmin[0] - r.exact_argmin[0],
                                       r.argmin[1] - r.exact_argmin[1]);
        CHECK(dist <= std::max(prev_dist, 4.0 * r.spacing));
        prev_err = err;
        prev_bound = r.error_bound;
        prev_dist = dist;
      }
      CHECK(prev_dist <= 0.1);
    }
  }
}

TEST_CASE("regime model validation") {
  const RegimeModel ref = reference_two_regime_model();
  CHECK(validate_regime_model(ref).empty());

  auto has = [](const std::vector<Violation>& v, const std::string& field,
                const std::string& predicate) {
    for (const auto& x : v) {
      if (x.field == field && x.predicate == predicate) return true;
    }
    return false;
  };

  RegimeModel m = ref;
  m.alpha[0][1] = -0.1;
  m.alpha[0][0] = 0.1;
  CHECK(has(validate_regime_model(m), "alpha[0][1]", "off-diagonal rate negative"));

  m = ref;
  m.delta[0] = 0.0;
  CHECK(has(validate_regime_model(m), "delta[0]", "discount must be positive"));

  m = ref;
  m.alpha[1][1] = -0.5;
  CHECK(has(validate_regime_model(m), "alpha[1]", "generator row must sum to 0"));

  m = ref;
  m.sigma[1] = 0.0;
  CHECK(has(validate_regime_model(m), "sigma[1]", "volatility must be positive"));

  m = ref;
  m.a[0] = -1.0;
  CHECK(has(validate_regime_model(m), "a[0]", "quadratic coefficient must be positive"));

  m = ref;
  m.b[1] = -0.5;
  CHECK(has(validate_regime_model(m), "b[1]", "constant term must be non-negative"));

  m = ref;
  m.p[0] = 3.0;
  CHECK(has(validate_regime_model(m), "p[0]", "exponent must equal 2"));

  m = ref;
  m.sigma.pop_back();
  CHECK(has(validate_regime_model(m), "sigma", "length must equal the regime count"));

  m = ref;
  m.N = 0;
  CHECK(has(validate_regime_model(m), "N", "state dimension must be >= 1"));
}

TEST_CASE("regime model single-field perturbations are all caught") {
  const RegimeModel ref = reference_two_regime_model();
  std::vector<RegimeModel> broken;
  for (std::size_t j = 0; j < 2; ++j) {
    RegimeModel m = ref;
    m.delta[j] = -1.0;
    broken.push_back(m);
    m = ref;
    m.sigma[j] = -0.3;
    broken.push_back(m);
    m = ref;
    m.a[j] = 0.0;
    broken.push_back(m);
    m = ref;
    m.b[j] = -1e-3;
    broken.push_back(m);
    m = ref;
    m.alpha[j][j] += 1e-6; // row sum off by more than 1e-12
    broken.push_back(m);
  }
  for (const auto& m : broken) CHECK_FALSE(validate_regime_model(m).empty());
}

TEST_CASE("coupling matrix and stationary law of the reference model") {
  const RegimeModel ref = reference_two_regime_model();
  const auto M = coupling_matrix(ref);
  CHECK(M[0][0] == doctest::Approx(1.4));
  CHECK(M[0][1] == doctest::Approx(-0.4));
  CHECK(M[1][0] == doctest::Approx(-0.6));
  CHECK(M[1][1] == doctest::Approx(1.6));
  const auto pi = stationary_distribution(ref);
  CHECK(pi[0] == doctest::Approx(0.6).epsilon(1e-14));
  CHECK(pi[1] == doctest::Approx(0.4).epsilon(1e-14));
}

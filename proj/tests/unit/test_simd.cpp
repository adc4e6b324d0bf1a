#include <doctest.h>

#include "hjb/simd/kernels.hpp"

#include <cmath>
#include <cstring>
#include <limits>
#include <random>
#include <string>
#include <vector>

using namespace hjb::simd;

namespace {

std::vector<double> random_vector(std::mt19937_64& rng, std::size_t n, double scale = 3.0) {
  std::normal_distribution<double> d(0.0, scale);
  std::vector<double> v(n);
  for (double& x : v) x = d(rng);
  return v;
}

bool bit_equal(const std::vector<double>& a, const std::vector<double>& b) {
  return a.size() == b.size() &&
         (a.empty() || std::memcmp(a.data(), b.data(), a.size() * sizeof(double)) == 0);
}

std::vector<Isa> variants() {
  std::vector<Isa> out{Isa::Scalar};
  for (Isa isa : {Isa::Avx2, Isa::Neon}) {
    if (isa_available(isa)) out.push_back(isa);
  }
  return out;
}

} // namespace

TEST_CASE("dispatch reports a usable table") {
  CHECK(isa_available(Isa::Scalar));
  const auto& k = kernels();
  CHECK(std::string(k.name) == isa_name(active_isa()));
  CHECK(std::string(kernels_for(Isa::Scalar).name) == "scalar");
  // Unavailable variants fall back to scalar.
  for (Isa isa : {Isa::Avx2, Isa::Neon}) {
    if (!isa_available(isa)) CHECK(std::string(kernels_for(isa).name) == "scalar");
  }
}

TEST_CASE("scalar kernels match plain loops") {
  const auto& k = kernels_for(Isa::Scalar);
  std::mt19937_64 rng(1);
  const std::size_t n = 13;
  auto x = random_vector(rng, n);
  const auto noise = random_vector(rng, n);
  auto expect = x;
  for (std::size_t i = 0; i < n; ++i) expect[i] = (expect[i] - 0.02 * expect[i]) + 0.1 * noise[i];
  k.euler_step(x.data(), noise.data(), n, 0.02, 0.1);
  CHECK(bit_equal(x, expect));

  const std::size_t paths = 5;
  const std::size_t dim = 3;
  const auto states = random_vector(rng, paths * dim);
  std::vector<double> sq(paths);
  k.squared_norms(states.data(), paths, dim, sq.data());
  for (std::size_t p = 0; p < paths; ++p) {
    double s = 0.0;
    for (std::size_t c = 0; c < dim; ++c) s = s + states[p * dim + c] * states[p * dim + c];
    CHECK(sq[p] == s);
  }

  const double row[] = {0.0, 0.0, 0.0};
  double out_clip = 0.0;
  const double big_prev[] = {0.0, -1e6, 0.0};
  const double big_next[] = {0.0, 1e6, 0.0};
  k.gradient_sq_row(big_prev + 1, row + 1, big_next + 1, 1, 1.0, 1e8, &out_clip);
  CHECK(out_clip == 1e8);
}

TEST_CASE("gradient row uses the documented stencil") {
  const auto& k = kernels_for(Isa::Scalar);
  // prev/next rows vary in x, row varies in y.
  const double prev[] = {1.0, 2.0, 3.0};
  const double row[] = {0.0, 10.0, 20.0, 30.0, 40.0};
  const double next[] = {5.0, 8.0, 11.0};
  double out[3];
  k.gradient_sq_row(prev, row + 1, next, 3, 0.5, 1e8, out);
  for (int j = 0; j < 3; ++j) {
    const double ux = (next[j] - prev[j]) * 0.5;
    const double uy = (row[j + 2] - row[j]) * 0.5;
    CHECK(out[j] == ux * ux + uy * uy);
  }
}

TEST_CASE("all variants are bit-identical") {
  const auto isas = variants();
  const auto& ref = kernels_for(Isa::Scalar);
  std::mt19937_64 rng(2024);
  for (Isa isa : isas) {
    const auto& k = kernels_for(isa);
    CAPTURE(isa_name(isa));
    for (std::size_t n : {0u, 1u, 2u, 3u, 4u, 5u, 7u, 8u, 9u, 16u, 31u, 33u, 257u}) {
      CAPTURE(n);
      const auto x0 = random_vector(rng, n);
      const auto noise = random_vector(rng, n, 1.0);
      auto a = x0;
      auto b = x0;
      ref.euler_step(a.data(), noise.data(), n, 0.013, 0.0707);
      k.euler_step(b.data(), noise.data(), n, 0.013, 0.0707);
      CHECK(bit_equal(a, b));

      const auto gains = random_vector(rng, n, 0.01);
      const auto vols = random_vector(rng, n, 0.1);
      a = x0;
      b = x0;
      ref.euler_step_varying(a.data(), noise.data(), gains.data(), vols.data(), n);
      k.euler_step_varying(b.data(), noise.data(), gains.data(), vols.data(), n);
      CHECK(bit_equal(a, b));

      for (std::size_t dim : {1u, 2u, 3u, 5u}) {
        const auto states = random_vector(rng, n * dim);
        std::vector<double> sa(n), sb(n);
        ref.squared_norms(states.data(), n, dim, sa.data());
        k.squared_norms(states.data(), n, dim, sb.data());
        CHECK(bit_equal(sa, sb));
      }

      const auto sq = random_vector(rng, n);
      auto acc_a = random_vector(rng, n);
      auto acc_b = acc_a;
      ref.accumulate_affine(acc_a.data(), sq.data(), n, 0.004975, 2.5, 0.3);
      k.accumulate_affine(acc_b.data(), sq.data(), n, 0.004975, 2.5, 0.3);
      CHECK(bit_equal(acc_a, acc_b));

      const auto prev = random_vector(rng, n, 50.0);
      const auto next = random_vector(rng, n, 50.0);
      auto row = random_vector(rng, n + 2, 50.0);
      if (n > 2) {
        row[1] = std::numeric_limits<double>::infinity();
        row[2] = std::numeric_limits<double>::quiet_NaN();
      }
      std::vector<double> ga(n), gb(n);
      ref.gradient_sq_row(prev.data(), row.data() + 1, next.data(), n, 8.5, 1e4, ga.data());
      k.gradient_sq_row(prev.data(), row.data() + 1, next.data(), n, 8.5, 1e4, gb.data());
      CHECK(bit_equal(ga, gb));

      const auto u = random_vector(rng, n);
      const auto f = random_vector(rng, n);
      std::vector<double> ra(n), rb(n);
      ref.relaxation_rhs_row(u.data(), f.data(), ga.data(), n, 20.0, 0.5, ra.data());
      k.relaxation_rhs_row(u.data(), f.data(), ga.data(), n, 20.0, 0.5, rb.data());
      CHECK(bit_equal(ra, rb));
    }
  }
}

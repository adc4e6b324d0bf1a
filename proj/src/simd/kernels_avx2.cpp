#include "variants.hpp"

#if defined(__x86_64__) || defined(_M_X64)

#include <immintrin.h>

#define HJB_AVX2 __attribute__((target("avx2")))

namespace hjb::simd::detail {

namespace {

HJB_AVX2 void euler_step(double* x, const double* noise, size_t n, double gain_dt,
                         double vol_sqdt) {
  const __m256d g = _mm256_set1_pd(gain_dt);
  const __m256d v = _mm256_set1_pd(vol_sqdt);
  size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    const __m256d xi = _mm256_loadu_pd(x + i);
    const __m256d drift = _mm256_sub_pd(xi, _mm256_mul_pd(g, xi));
    const __m256d shock = _mm256_mul_pd(v, _mm256_loadu_pd(noise + i));
    _mm256_storeu_pd(x + i, _mm256_add_pd(drift, shock));
  }
  for (; i < n; ++i) x[i] = euler_one(x[i], noise[i], gain_dt, vol_sqdt);
}

HJB_AVX2 void euler_step_varying(double* x, const double* noise, const double* gain_dt,
                                 const double* vol_sqdt, size_t n) {
  size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    const __m256d xi = _mm256_loadu_pd(x + i);
    const __m256d drift = _mm256_sub_pd(xi, _mm256_mul_pd(_mm256_loadu_pd(gain_dt + i), xi));
    const __m256d shock =
        _mm256_mul_pd(_mm256_loadu_pd(vol_sqdt + i), _mm256_loadu_pd(noise + i));
    _mm256_storeu_pd(x + i, _mm256_add_pd(drift, shock));
  }
  for (; i < n; ++i) x[i] = euler_one(x[i], noise[i], gain_dt[i], vol_sqdt[i]);
}

HJB_AVX2 void squared_norms(const double* x, size_t n_paths, size_t dim, double* out) {
  size_t i = 0;
  if (dim == 1) {
    for (; i + 4 <= n_paths; i += 4) {
      const __m256d v = _mm256_loadu_pd(x + i);
      _mm256_storeu_pd(out + i, _mm256_add_pd(_mm256_setzero_pd(), _mm256_mul_pd(v, v)));
    }
  } else {
    const long long stride = static_cast<long long>(dim);
    const __m256i lanes = _mm256_set_epi64x(3 * stride, 2 * stride, stride, 0);
    for (; i + 4 <= n_paths; i += 4) {
      __m256d s = _mm256_setzero_pd();
      for (size_t c = 0; c < dim; ++c) {
        const __m256d v = _mm256_i64gather_pd(x + i * dim + c, lanes, 8);
        s = _mm256_add_pd(s, _mm256_mul_pd(v, v));
      }
      _mm256_storeu_pd(out + i, s);
    }
  }
  for (; i < n_paths; ++i) {
    double s = 0.0;
    for (size_t c = 0; c < dim; ++c) {
      const double v = x[i * dim + c];
      s = s + v * v;
    }
    out[i] = s;
  }
}

HJB_AVX2 void accumulate_affine(double* acc, const double* sq, size_t n, double weight,
                                double quad, double constant) {
  const __m256d w = _mm256_set1_pd(weight);
  const __m256d q = _mm256_set1_pd(quad);
  const __m256d c = _mm256_set1_pd(constant);
  size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    const __m256d term = _mm256_add_pd(_mm256_mul_pd(q, _mm256_loadu_pd(sq + i)), c);
    _mm256_storeu_pd(acc + i, _mm256_add_pd(_mm256_loadu_pd(acc + i), _mm256_mul_pd(w, term)));
  }
  for (; i < n; ++i) acc[i] = acc[i] + weight * (quad * sq[i] + constant);
}

HJB_AVX2 void gradient_sq_row(const double* prev, const double* row, const double* next,
                              size_t count, double inv2h, double clip, double* out) {
  const __m256d s = _mm256_set1_pd(inv2h);
  const __m256d cap = _mm256_set1_pd(clip);
  size_t k = 0;
  for (; k + 4 <= count; k += 4) {
    const __m256d ux = _mm256_mul_pd(_mm256_sub_pd(_mm256_loadu_pd(next + k),
                                                   _mm256_loadu_pd(prev + k)),
                                     s);
    const __m256d uy = _mm256_mul_pd(_mm256_sub_pd(_mm256_loadu_pd(row + k + 1),
                                                   _mm256_loadu_pd(row + k - 1)),
                                     s);
    const __m256d g = _mm256_add_pd(_mm256_mul_pd(ux, ux), _mm256_mul_pd(uy, uy));
    // min_pd(g, cap) is g < cap ? g : cap, NaN included.
    _mm256_storeu_pd(out + k, _mm256_min_pd(g, cap));
  }
  for (; k < count; ++k) out[k] = gradient_sq_one(prev, row, next, k, inv2h, clip);
}

HJB_AVX2 void relaxation_rhs_row(const double* u, const double* f, const double* h, size_t count,
                                 double lambda, double h_scale, double* out) {
  const __m256d l = _mm256_set1_pd(lambda);
  const __m256d hs = _mm256_set1_pd(h_scale);
  size_t k = 0;
  for (; k + 4 <= count; k += 4) {
    const __m256d uk = _mm256_loadu_pd(u + k);
    const __m256d inner = _mm256_sub_pd(
        _mm256_add_pd(_mm256_mul_pd(hs, _mm256_loadu_pd(h + k)), uk), _mm256_loadu_pd(f + k));
    _mm256_storeu_pd(out + k, _mm256_sub_pd(_mm256_mul_pd(l, uk), inner));
  }
  for (; k < count; ++k) out[k] = rhs_one(u[k], f[k], h[k], lambda, h_scale);
}

} // namespace

const KernelTable avx2_table = {
    "avx2",          euler_step,      euler_step_varying, squared_norms, accumulate_affine,
    gradient_sq_row, relaxation_rhs_row,
};

} // namespace hjb::simd::detail

#endif

#include "variants.hpp"

#if defined(__aarch64__)

#include <arm_neon.h>

namespace hjb::simd::detail {

namespace {

void euler_step(double* x, const double* noise, size_t n, double gain_dt, double vol_sqdt) {
  const float64x2_t g = vdupq_n_f64(gain_dt);
  const float64x2_t v = vdupq_n_f64(vol_sqdt);
  size_t i = 0;
  for (; i + 2 <= n; i += 2) {
    const float64x2_t xi = vld1q_f64(x + i);
    const float64x2_t drift = vsubq_f64(xi, vmulq_f64(g, xi));
    const float64x2_t shock = vmulq_f64(v, vld1q_f64(noise + i));
    vst1q_f64(x + i, vaddq_f64(drift, shock));
  }
  for (; i < n; ++i) x[i] = euler_one(x[i], noise[i], gain_dt, vol_sqdt);
}

void euler_step_varying(double* x, const double* noise, const double* gain_dt,
                        const double* vol_sqdt, size_t n) {
  size_t i = 0;
  for (; i + 2 <= n; i += 2) {
    const float64x2_t xi = vld1q_f64(x + i);
    const float64x2_t drift = vsubq_f64(xi, vmulq_f64(vld1q_f64(gain_dt + i), xi));
    const float64x2_t shock = vmulq_f64(vld1q_f64(vol_sqdt + i), vld1q_f64(noise + i));
    vst1q_f64(x + i, vaddq_f64(drift, shock));
  }
  for (; i < n; ++i) x[i] = euler_one(x[i], noise[i], gain_dt[i], vol_sqdt[i]);
}

void squared_norms(const double* x, size_t n_paths, size_t dim, double* out) {
  size_t i = 0;
  if (dim == 1) {
    for (; i + 2 <= n_paths; i += 2) {
      const float64x2_t v = vld1q_f64(x + i);
      vst1q_f64(out + i, vaddq_f64(vdupq_n_f64(0.0), vmulq_f64(v, v)));
    }
  } else if (dim == 2) {
    for (; i + 2 <= n_paths; i += 2) {
      // vld2q splits interleaved (x0, y0, x1, y1) into (x0, x1) and (y0, y1).
      const float64x2x2_t v = vld2q_f64(x + 2 * i);
      float64x2_t s = vaddq_f64(vdupq_n_f64(0.0), vmulq_f64(v.val[0], v.val[0]));
      s = vaddq_f64(s, vmulq_f64(v.val[1], v.val[1]));
      vst1q_f64(out + i, s);
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

void accumulate_affine(double* acc, const double* sq, size_t n, double weight, double quad,
                       double constant) {
  const float64x2_t w = vdupq_n_f64(weight);
  const float64x2_t q = vdupq_n_f64(quad);
  const float64x2_t c = vdupq_n_f64(constant);
  size_t i = 0;
  for (; i + 2 <= n; i += 2) {
    const float64x2_t term = vaddq_f64(vmulq_f64(q, vld1q_f64(sq + i)), c);
    vst1q_f64(acc + i, vaddq_f64(vld1q_f64(acc + i), vmulq_f64(w, term)));
  }
  for (; i < n; ++i) acc[i] = acc[i] + weight * (quad * sq[i] + constant);
}

void gradient_sq_row(const double* prev, const double* row, const double* next, size_t count,
                     double inv2h, double clip, double* out) {
  const float64x2_t s = vdupq_n_f64(inv2h);
  const float64x2_t cap = vdupq_n_f64(clip);
  size_t k = 0;
  for (; k + 2 <= count; k += 2) {
    const float64x2_t ux = vmulq_f64(vsubq_f64(vld1q_f64(next + k), vld1q_f64(prev + k)), s);
    const float64x2_t uy = vmulq_f64(vsubq_f64(vld1q_f64(row + k + 1), vld1q_f64(row + k - 1)), s);
    const float64x2_t g = vaddq_f64(vmulq_f64(ux, ux), vmulq_f64(uy, uy));
    // Select g where g < cap, else cap (NaN maps to cap as in the scalar body).
    vst1q_f64(out + k, vbslq_f64(vcltq_f64(g, cap), g, cap));
  }
  for (; k < count; ++k) out[k] = gradient_sq_one(prev, row, next, k, inv2h, clip);
}

void relaxation_rhs_row(const double* u, const double* f, const double* h, size_t count,
                        double lambda, double h_scale, double* out) {
  const float64x2_t l = vdupq_n_f64(lambda);
  const float64x2_t hs = vdupq_n_f64(h_scale);
  size_t k = 0;
  for (; k + 2 <= count; k += 2) {
    const float64x2_t uk = vld1q_f64(u + k);
    const float64x2_t inner =
        vsubq_f64(vaddq_f64(vmulq_f64(hs, vld1q_f64(h + k)), uk), vld1q_f64(f + k));
    vst1q_f64(out + k, vsubq_f64(vmulq_f64(l, uk), inner));
  }
  for (; k < count; ++k) out[k] = rhs_one(u[k], f[k], h[k], lambda, h_scale);
}

} // namespace

const KernelTable neon_table = {
    "neon",          euler_step,      euler_step_varying, squared_norms, accumulate_affine,
    gradient_sq_row, relaxation_rhs_row,
};

} // namespace hjb::simd::detail

#endif

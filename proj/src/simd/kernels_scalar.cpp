#include "variants.hpp"

namespace hjb::simd::detail {

namespace {

void euler_step(double* x, const double* noise, size_t n, double gain_dt, double vol_sqdt) {
  for (size_t i = 0; i < n; ++i) x[i] = euler_one(x[i], noise[i], gain_dt, vol_sqdt);
}

void euler_step_varying(double* x, const double* noise, const double* gain_dt,
                        const double* vol_sqdt, size_t n) {
  for (size_t i = 0; i < n; ++i) x[i] = euler_one(x[i], noise[i], gain_dt[i], vol_sqdt[i]);
}

void squared_norms(const double* x, size_t n_paths, size_t dim, double* out) {
  for (size_t i = 0; i < n_paths; ++i) {
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
  for (size_t i = 0; i < n; ++i) acc[i] = acc[i] + weight * (quad * sq[i] + constant);
}

void gradient_sq_row(const double* prev, const double* row, const double* next, size_t count,
                     double inv2h, double clip, double* out) {
  for (size_t k = 0; k < count; ++k) out[k] = gradient_sq_one(prev, row, next, k, inv2h, clip);
}

void relaxation_rhs_row(const double* u, const double* f, const double* h, size_t count,
                        double lambda, double h_scale, double* out) {
  for (size_t k = 0; k < count; ++k) out[k] = rhs_one(u[k], f[k], h[k], lambda, h_scale);
}

} // namespace

const KernelTable scalar_table = {
    "scalar",        euler_step,      euler_step_varying, squared_norms, accumulate_affine,
    gradient_sq_row, relaxation_rhs_row,
};

} // namespace hjb::simd::detail

#pragma once

#include <stddef.h>

namespace hjb::simd {

// Elementwise kernels for the Monte Carlo path update and the 2D relaxation
// sweep. Every variant performs the same IEEE operations in the same order
// (no FMA), so results are bit-identical across variants.
struct KernelTable {
  const char* name;

  // x = (x - gain_dt * x) + vol_sqdt * noise
  void (*euler_step)(double* x, const double* noise, size_t n, double gain_dt, double vol_sqdt);

  // Same update with per-element coefficients.
  void (*euler_step_varying)(double* x, const double* noise, const double* gain_dt,
                             const double* vol_sqdt, size_t n);

  // out[i] = sum_c x[i*dim + c]^2, summed in coordinate order from 0.
  void (*squared_norms)(const double* x, size_t n_paths, size_t dim, double* out);

  // acc[i] += weight * (quad * sq[i] + constant)
  void (*accumulate_affine)(double* acc, const double* sq, size_t n, double weight, double quad,
                            double constant);

  // out[k] = min(ux^2 + uy^2, clip) with ux = (next[k] - prev[k]) * inv2h and
  // uy = (row[k+1] - row[k-1]) * inv2h; reads row[-1] .. row[count].
  void (*gradient_sq_row)(const double* prev, const double* row, const double* next, size_t count,
                          double inv2h, double clip, double* out);

  // out[k] = lambda * u[k] - ((h_scale * h[k] + u[k]) - f[k])
  void (*relaxation_rhs_row)(const double* u, const double* f, const double* h, size_t count,
                             double lambda, double h_scale, double* out);
};

enum class Isa { Scalar, Avx2, Neon };

const char* isa_name(Isa isa);
bool isa_available(Isa isa);

// Table for a specific variant; falls back to scalar when unavailable.
const KernelTable& kernels_for(Isa isa);

// Best available variant, chosen once. HJB_SIMD=scalar|avx2|neon overrides.
Isa active_isa();
const KernelTable& kernels();

} // namespace hjb::simd

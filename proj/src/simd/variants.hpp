#pragma once

// Kept free of the C++ standard library so the NEON translation unit can be
// syntax-checked with a freestanding cross compiler.

#include "hjb/simd/kernels.hpp"

namespace hjb::simd::detail {

extern const KernelTable scalar_table;
#if defined(__x86_64__) || defined(_M_X64)
extern const KernelTable avx2_table;
#endif
#if defined(__aarch64__)
extern const KernelTable neon_table;
#endif

// Scalar per-element bodies, shared by the vector variants for loop tails.
inline double euler_one(double x, double noise, double gain_dt, double vol_sqdt) {
  return (x - gain_dt * x) + vol_sqdt * noise;
}

inline double gradient_sq_one(const double* prev, const double* row, const double* next,
                              size_t k, double inv2h, double clip) {
  const double ux = (next[k] - prev[k]) * inv2h;
  const double uy = (row[k + 1] - row[k - 1]) * inv2h;
  const double g = ux * ux + uy * uy;
  return g < clip ? g : clip;
}

inline double rhs_one(double u, double f, double h, double lambda, double h_scale) {
  return lambda * u - ((h_scale * h + u) - f);
}

} // namespace hjb::simd::detail

#include "variants.hpp"

#include <cstdlib>
#include <string_view>

namespace hjb::simd {

const char* isa_name(Isa isa) {
  switch (isa) {
    case Isa::Avx2: return "avx2";
    case Isa::Neon: return "neon";
    case Isa::Scalar: break;
  }
  return "scalar";
}

bool isa_available(Isa isa) {
  switch (isa) {
    case Isa::Scalar: return true;
    case Isa::Avx2:
#if defined(__x86_64__) || defined(_M_X64)
      return __builtin_cpu_supports("avx2");
#else
      return false;
#endif
    case Isa::Neon:
#if defined(__aarch64__)
      return true;
#else
      return false;
#endif
  }
  return false;
}

const KernelTable& kernels_for(Isa isa) {
  if (!isa_available(isa)) return detail::scalar_table;
#if defined(__x86_64__) || defined(_M_X64)
  if (isa == Isa::Avx2) return detail::avx2_table;
#endif
#if defined(__aarch64__)
  if (isa == Isa::Neon) return detail::neon_table;
#endif
  return detail::scalar_table;
}

namespace {

Isa select() {
  if (const char* forced = std::getenv("HJB_SIMD")) {
    const std::string_view name(forced);
    for (Isa isa : {Isa::Scalar, Isa::Avx2, Isa::Neon}) {
      if (name == isa_name(isa) && isa_available(isa)) return isa;
    }
  }
  if (isa_available(Isa::Avx2)) return Isa::Avx2;
  if (isa_available(Isa::Neon)) return Isa::Neon;
  return Isa::Scalar;
}

} // namespace

Isa active_isa() {
  static const Isa chosen = select();
  return chosen;
}

const KernelTable& kernels() { return kernels_for(active_isa()); }

} // namespace hjb::simd

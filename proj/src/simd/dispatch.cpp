#include <cstdlib>
#include <stdexcept>
#include <string>

#include "cnls/simd.hpp"

namespace cnls::simd {

#ifdef CNLS_HAVE_AVX2
const KernelTable& avx2_kernels();
#endif

std::string_view isa_name(Isa isa) {
  switch (isa) {
    case Isa::scalar:
      return "scalar";
    case Isa::avx2:
      return "avx2";
  }
  return "unknown";
}

bool avx2_available() {
#if defined(CNLS_HAVE_AVX2) && (defined(__GNUC__) || defined(__clang__))
  static const bool ok = [] {
    __builtin_cpu_init();
    return __builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma");
  }();
  return ok;
#else
  return false;
#endif
}

const KernelTable& kernels_for(Isa isa) {
  if (isa == Isa::avx2) {
#ifdef CNLS_HAVE_AVX2
    if (avx2_available()) return avx2_kernels();
#endif
    throw std::runtime_error("AVX2 kernels are not available on this machine/build");
  }
  return scalar_kernels();
}

Isa active_isa() {
  static const Isa isa = [] {
    if (const char* env = std::getenv("CNLS_SIMD"); env != nullptr && std::string(env) == "scalar") {
      return Isa::scalar;
    }
    return avx2_available() ? Isa::avx2 : Isa::scalar;
  }();
  return isa;
}

const KernelTable& kernels() {
  static const KernelTable& table = kernels_for(active_isa());
  return table;
}

}  // namespace cnls::simd

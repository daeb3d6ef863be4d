#pragma once

// Data-parallel inner loops used by the spectral core and the stepper.
//
// Every kernel has a scalar reference implementation. When the binary is
// built with CNLS_ENABLE_AVX2 and the CPU reports AVX2+FMA, the AVX2 variant
// is selected at first use. Set CNLS_SIMD=scalar in the environment to pin
// the reference path.

#include <complex>
#include <cstddef>
#include <span>
#include <string_view>

namespace cnls::simd {

using cplx = std::complex<double>;

enum class Isa { scalar, avx2 };

std::string_view isa_name(Isa isa);

struct KernelTable {
  // sum_j w_j |u_j|^2
  double (*sum_w_abs2)(const cplx* u, const double* w, std::size_t n);
  // sum_j w_j |u_j|^4
  double (*sum_w_abs4)(const cplx* u, const double* w, std::size_t n);
  // sum_j w_j Im(conj(u_j) * du_j)
  double (*sum_w_im_conj)(const cplx* u, const cplx* du, const double* w, std::size_t n);
  // u_j *= m_j
  void (*mul_cplx)(cplx* u, const cplx* m, std::size_t n);
  // u_j *= m_j (real multiplier)
  void (*mul_real)(cplx* u, const double* m, std::size_t n);
  // max_j |u_j|^2
  double (*max_abs2)(const cplx* u, std::size_t n);
};

/// Reference kernels; always available.
const KernelTable& scalar_kernels();

/// True when the AVX2 variants were compiled in and the CPU supports them.
bool avx2_available();

/// Kernels for a specific ISA. Throws std::runtime_error if unavailable.
const KernelTable& kernels_for(Isa isa);

/// ISA picked by runtime dispatch (CPU features, CNLS_SIMD override).
Isa active_isa();

/// Dispatched kernel table.
const KernelTable& kernels();

inline double sum_w_abs2(std::span<const cplx> u, std::span<const double> w) {
  return kernels().sum_w_abs2(u.data(), w.data(), u.size());
}
inline double sum_w_abs4(std::span<const cplx> u, std::span<const double> w) {
  return kernels().sum_w_abs4(u.data(), w.data(), u.size());
}
inline double sum_w_im_conj(std::span<const cplx> u, std::span<const cplx> du,
                            std::span<const double> w) {
  return kernels().sum_w_im_conj(u.data(), du.data(), w.data(), u.size());
}
inline void mul_cplx(std::span<cplx> u, std::span<const cplx> m) {
  kernels().mul_cplx(u.data(), m.data(), u.size());
}
inline void mul_real(std::span<cplx> u, std::span<const double> m) {
  kernels().mul_real(u.data(), m.data(), u.size());
}
inline double max_abs2(std::span<const cplx> u) { return kernels().max_abs2(u.data(), u.size()); }

}  // namespace cnls::simd

#include "cnls/simd.hpp"

#include <algorithm>

namespace cnls::simd {
namespace {

double sum_w_abs2_scalar(const cplx* u, const double* w, std::size_t n) {
  double acc = 0.0;
  for (std::size_t j = 0; j < n; ++j) acc += w[j] * std::norm(u[j]);
  return acc;
}

double sum_w_abs4_scalar(const cplx* u, const double* w, std::size_t n) {
  double acc = 0.0;
  for (std::size_t j = 0; j < n; ++j) {
    const double a2 = std::norm(u[j]);
    acc += w[j] * a2 * a2;
  }
  return acc;
}

double sum_w_im_conj_scalar(const cplx* u, const cplx* du, const double* w, std::size_t n) {
  double acc = 0.0;
  for (std::size_t j = 0; j < n; ++j) {
    acc += w[j] * (u[j].real() * du[j].imag() - u[j].imag() * du[j].real());
  }
  return acc;
}

void mul_cplx_scalar(cplx* u, const cplx* m, std::size_t n) {
  for (std::size_t j = 0; j < n; ++j) {
    const double a = u[j].real(), b = u[j].imag();
    const double c = m[j].real(), d = m[j].imag();
    u[j] = cplx(a * c - b * d, a * d + b * c);
  }
}

void mul_real_scalar(cplx* u, const double* m, std::size_t n) {
  for (std::size_t j = 0; j < n; ++j) u[j] *= m[j];
}

double max_abs2_scalar(const cplx* u, std::size_t n) {
  double m = 0.0;
  for (std::size_t j = 0; j < n; ++j) m = std::max(m, std::norm(u[j]));
  return m;
}

}  // namespace

const KernelTable& scalar_kernels() {
  static const KernelTable table{sum_w_abs2_scalar, sum_w_abs4_scalar, sum_w_im_conj_scalar,
                                 mul_cplx_scalar,   mul_real_scalar,   max_abs2_scalar};
  return table;
}

}  // namespace cnls::simd

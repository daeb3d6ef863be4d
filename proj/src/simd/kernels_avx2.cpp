// AVX2/FMA variants of the kernels in kernels_scalar.cpp. This translation
// unit is compiled with -mavx2 -mfma and must only be entered after a
// runtime CPU check (see dispatch.cpp).

#include "cnls/simd.hpp"

#include <immintrin.h>

#include <algorithm>

namespace cnls::simd {
namespace {

// hadd/hsub over two registers of two complex numbers each leaves lanes in
// the order (j, j+2, j+1, j+3); permute the weights to match.
constexpr int kWeightOrder = 0xD8;

inline double hsum(__m256d v) {
  const __m128d lo = _mm256_castpd256_pd128(v);
  const __m128d hi = _mm256_extractf128_pd(v, 1);
  const __m128d s = _mm_add_pd(lo, hi);
  return _mm_cvtsd_f64(_mm_add_sd(s, _mm_unpackhi_pd(s, s)));
}

inline const double* as_doubles(const cplx* u) { return reinterpret_cast<const double*>(u); }
inline double* as_doubles(cplx* u) { return reinterpret_cast<double*>(u); }

double sum_w_abs2_avx2(const cplx* u, const double* w, std::size_t n) {
  const double* x = as_doubles(u);
  __m256d acc = _mm256_setzero_pd();
  std::size_t j = 0;
  for (; j + 4 <= n; j += 4) {
    const __m256d a = _mm256_loadu_pd(x + 2 * j);
    const __m256d b = _mm256_loadu_pd(x + 2 * j + 4);
    const __m256d m = _mm256_hadd_pd(_mm256_mul_pd(a, a), _mm256_mul_pd(b, b));
    const __m256d wv = _mm256_permute4x64_pd(_mm256_loadu_pd(w + j), kWeightOrder);
    acc = _mm256_fmadd_pd(m, wv, acc);
  }
  double tail = 0.0;
  for (; j < n; ++j) tail += w[j] * std::norm(u[j]);
  return hsum(acc) + tail;
}

double sum_w_abs4_avx2(const cplx* u, const double* w, std::size_t n) {
  const double* x = as_doubles(u);
  __m256d acc = _mm256_setzero_pd();
  std::size_t j = 0;
  for (; j + 4 <= n; j += 4) {
    const __m256d a = _mm256_loadu_pd(x + 2 * j);
    const __m256d b = _mm256_loadu_pd(x + 2 * j + 4);
    const __m256d m = _mm256_hadd_pd(_mm256_mul_pd(a, a), _mm256_mul_pd(b, b));
    const __m256d wv = _mm256_permute4x64_pd(_mm256_loadu_pd(w + j), kWeightOrder);
    acc = _mm256_fmadd_pd(_mm256_mul_pd(m, m), wv, acc);
  }
  double tail = 0.0;
  for (; j < n; ++j) {
    const double a2 = std::norm(u[j]);
    tail += w[j] * a2 * a2;
  }
  return hsum(acc) + tail;
}

double sum_w_im_conj_avx2(const cplx* u, const cplx* du, const double* w, std::size_t n) {
  const double* x = as_doubles(u);
  const double* d = as_doubles(du);
  __m256d acc = _mm256_setzero_pd();
  std::size_t j = 0;
  for (; j + 4 <= n; j += 4) {
    const __m256d a = _mm256_loadu_pd(x + 2 * j);
    const __m256d b = _mm256_loadu_pd(x + 2 * j + 4);
    const __m256d da = _mm256_permute_pd(_mm256_loadu_pd(d + 2 * j), 0x5);
    const __m256d db = _mm256_permute_pd(_mm256_loadu_pd(d + 2 * j + 4), 0x5);
    const __m256d im = _mm256_hsub_pd(_mm256_mul_pd(a, da), _mm256_mul_pd(b, db));
    const __m256d wv = _mm256_permute4x64_pd(_mm256_loadu_pd(w + j), kWeightOrder);
    acc = _mm256_fmadd_pd(im, wv, acc);
  }
  double tail = 0.0;
  for (; j < n; ++j) tail += w[j] * (u[j].real() * du[j].imag() - u[j].imag() * du[j].real());
  return hsum(acc) + tail;
}

void mul_cplx_avx2(cplx* u, const cplx* m, std::size_t n) {
  double* x = as_doubles(u);
  const double* y = as_doubles(m);
  std::size_t j = 0;
  for (; j + 2 <= n; j += 2) {
    const __m256d a = _mm256_loadu_pd(x + 2 * j);
    const __m256d b = _mm256_loadu_pd(y + 2 * j);
    const __m256d re = _mm256_movedup_pd(b);
    const __m256d im = _mm256_permute_pd(b, 0xF);
    const __m256d swapped = _mm256_permute_pd(a, 0x5);
    _mm256_storeu_pd(x + 2 * j, _mm256_fmaddsub_pd(a, re, _mm256_mul_pd(swapped, im)));
  }
  for (; j < n; ++j) {
    const double a = u[j].real(), b = u[j].imag();
    const double c = m[j].real(), d = m[j].imag();
    u[j] = cplx(a * c - b * d, a * d + b * c);
  }
}

void mul_real_avx2(cplx* u, const double* m, std::size_t n) {
  double* x = as_doubles(u);
  std::size_t j = 0;
  for (; j + 2 <= n; j += 2) {
    const __m256d s = _mm256_permute4x64_pd(_mm256_castpd128_pd256(_mm_loadu_pd(m + j)), 0x50);
    _mm256_storeu_pd(x + 2 * j, _mm256_mul_pd(_mm256_loadu_pd(x + 2 * j), s));
  }
  for (; j < n; ++j) u[j] *= m[j];
}

double max_abs2_avx2(const cplx* u, std::size_t n) {
  const double* x = as_doubles(u);
  __m256d best = _mm256_setzero_pd();
  std::size_t j = 0;
  for (; j + 4 <= n; j += 4) {
    const __m256d a = _mm256_loadu_pd(x + 2 * j);
    const __m256d b = _mm256_loadu_pd(x + 2 * j + 4);
    best = _mm256_max_pd(best, _mm256_hadd_pd(_mm256_mul_pd(a, a), _mm256_mul_pd(b, b)));
  }
  alignas(32) double lanes[4];
  _mm256_store_pd(lanes, best);
  double m = std::max(std::max(lanes[0], lanes[1]), std::max(lanes[2], lanes[3]));
  for (; j < n; ++j) m = std::max(m, std::norm(u[j]));
  return m;
}

}  // namespace

const KernelTable& avx2_kernels() {
  static const KernelTable table{sum_w_abs2_avx2, sum_w_abs4_avx2, sum_w_im_conj_avx2,
                                 mul_cplx_avx2,   mul_real_avx2,   max_abs2_avx2};
  return table;
}

}  // namespace cnls::simd

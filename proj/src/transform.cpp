#include "cnls/transform.hpp"

#include <fftw3.h>

#include <mutex>
#include <vector>

#include "cnls/error.hpp"

namespace cnls {
namespace {

using cplx = std::complex<double>;

std::mutex& planner_mutex() {
  static std::mutex m;
  return m;
}

fftw_plan make_plan(int length) {
  std::lock_guard lock(planner_mutex());
  fftw_complex* buf = fftw_alloc_complex(static_cast<std::size_t>(length));
  fftw_plan plan =
      fftw_plan_dft_1d(length, buf, buf, FFTW_FORWARD, FFTW_ESTIMATE | FFTW_UNALIGNED);
  fftw_free(buf);
  if (plan == nullptr) throw NumericalError("FFTW failed to create a plan");
  return plan;
}

void execute(void* plan, std::vector<cplx>& buf) {
  auto* p = reinterpret_cast<fftw_complex*>(buf.data());
  fftw_execute_dft(static_cast<fftw_plan>(plan), p, p);
}

}  // namespace

SineTransform::SineTransform(std::size_t n)
    : n_(n), plan_(make_plan(static_cast<int>(2 * (n + 1)))) {}

SineTransform::~SineTransform() {
  std::lock_guard lock(planner_mutex());
  fftw_destroy_plan(static_cast<fftw_plan>(plan_));
}

// Odd extension x_j = v_j, x_{N-j} = -v_j turns the DFT into -2i times the
// sine sum.
void SineTransform::forward(std::span<const cplx> v, std::span<cplx> c) const {
  if (v.size() != n_ || c.size() != n_) throw SizingError("sine transform: length mismatch");
  const std::size_t N = 2 * (n_ + 1);
  std::vector<cplx> buf(N);
  for (std::size_t j = 0; j < n_; ++j) {
    buf[j + 1] = v[j];
    buf[N - j - 1] = -v[j];
  }
  execute(plan_, buf);
  const cplx scale(0.0, 1.0 / static_cast<double>(n_ + 1));
  for (std::size_t k = 0; k < n_; ++k) c[k] = scale * buf[k + 1];
}

void SineTransform::inverse(std::span<const cplx> c, std::span<cplx> v) const {
  if (v.size() != n_ || c.size() != n_) throw SizingError("sine transform: length mismatch");
  const std::size_t N = 2 * (n_ + 1);
  std::vector<cplx> buf(N);
  for (std::size_t k = 0; k < n_; ++k) {
    buf[k + 1] = c[k];
    buf[N - k - 1] = -c[k];
  }
  execute(plan_, buf);
  for (std::size_t j = 0; j < n_; ++j) v[j] = cplx(0.0, 0.5) * buf[j + 1];
}

// Even extension: the DFT gives 2 sum_k a_k cos(pi j k/(n+1)).
void SineTransform::cosine_sum(std::span<const cplx> a, std::span<cplx> out) const {
  if (a.size() != n_ || out.size() != n_ + 2) throw SizingError("cosine sum: length mismatch");
  const std::size_t N = 2 * (n_ + 1);
  std::vector<cplx> buf(N);
  for (std::size_t k = 0; k < n_; ++k) {
    buf[k + 1] = a[k];
    buf[N - k - 1] = a[k];
  }
  execute(plan_, buf);
  for (std::size_t j = 0; j < n_ + 2; ++j) out[j] = 0.5 * buf[j];
}

}  // namespace cnls

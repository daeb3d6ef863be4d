#pragma once

#include <complex>
#include <cstddef>
#include <span>

namespace cnls {

/// Type-I sine/cosine sums on n interior nodes. Both are evaluated through one
/// complex FFTW plan of length 2(n+1) acting on the odd or even extension, so
/// real and imaginary parts go through a single transform.
///
/// The plan is created once (under a global planner lock) with FFTW_ESTIMATE so
/// that results are bit-reproducible; execution is thread-safe.
class SineTransform {
 public:
  explicit SineTransform(std::size_t n);
  ~SineTransform();
  SineTransform(const SineTransform&) = delete;
  SineTransform& operator=(const SineTransform&) = delete;

  std::size_t size() const noexcept { return n_; }

  /// c_k = 2/(n+1) * sum_j v_j sin(pi j k/(n+1)); inverse of `inverse`.
  void forward(std::span<const std::complex<double>> v, std::span<std::complex<double>> c) const;

  /// v_j = sum_k c_k sin(pi j k/(n+1)), j, k = 1..n.
  void inverse(std::span<const std::complex<double>> c, std::span<std::complex<double>> v) const;

  /// out_j = sum_{k=1..n} a_k cos(pi j k/(n+1)) for j = 0..n+1 (out has n+2 entries).
  void cosine_sum(std::span<const std::complex<double>> a,
                  std::span<std::complex<double>> out) const;

 private:
  std::size_t n_;
  void* plan_;
};

}  // namespace cnls

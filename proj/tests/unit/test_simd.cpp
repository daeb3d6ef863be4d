#include <doctest.h>

#include <cmath>
#include <random>
#include <vector>

#include "cnls/simd.hpp"

using namespace cnls::simd;

namespace {

struct Data {
  std::vector<cplx> u, du, m;
  std::vector<double> w, mr;
};

Data make_data(std::size_t n, unsigned seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> g;
  std::uniform_real_distribution<double> pos(0.0, 2.0);
  Data d;
  for (std::size_t j = 0; j < n; ++j) {
    d.u.emplace_back(g(rng), g(rng));
    d.du.emplace_back(g(rng), g(rng));
    d.m.emplace_back(std::polar(1.0, g(rng)));
    d.w.push_back(pos(rng));
    d.mr.push_back(g(rng));
  }
  return d;
}

bool close(double a, double b, double tol) { return std::abs(a - b) <= tol * std::max(1.0, std::abs(a)); }

}  // namespace

TEST_CASE("isa names and dispatch") {
  CHECK(isa_name(Isa::scalar) == "scalar");
  CHECK(isa_name(Isa::avx2) == "avx2");
  CHECK(&kernels_for(Isa::scalar) == &scalar_kernels());
  if (!avx2_available()) {
    CHECK(active_isa() == Isa::scalar);
    CHECK_THROWS(kernels_for(Isa::avx2));
  }
}

TEST_CASE("avx2 kernels agree with the scalar reference") {
  if (!avx2_available()) {
    MESSAGE("AVX2 unavailable on this machine; equivalence not exercised");
    return;
  }
  const KernelTable& ref = scalar_kernels();
  const KernelTable& vec = kernels_for(Isa::avx2);
  // Lengths cover the empty case, pure tails and full vector blocks.
  for (std::size_t n : {0u, 1u, 3u, 4u, 5u, 7u, 8u, 63u, 64u, 1001u, 4096u}) {
    CAPTURE(n);
    const Data d = make_data(n, 17 + n);
    CHECK(close(ref.sum_w_abs2(d.u.data(), d.w.data(), n), vec.sum_w_abs2(d.u.data(), d.w.data(), n), 1e-13));
    CHECK(close(ref.sum_w_abs4(d.u.data(), d.w.data(), n), vec.sum_w_abs4(d.u.data(), d.w.data(), n), 1e-13));
    CHECK(close(ref.sum_w_im_conj(d.u.data(), d.du.data(), d.w.data(), n),
                vec.sum_w_im_conj(d.u.data(), d.du.data(), d.w.data(), n), 1e-12));
    CHECK(ref.max_abs2(d.u.data(), n) == vec.max_abs2(d.u.data(), n));

    std::vector<cplx> a = d.u, b = d.u;
    ref.mul_cplx(a.data(), d.m.data(), n);
    vec.mul_cplx(b.data(), d.m.data(), n);
    for (std::size_t j = 0; j < n; ++j) CHECK(std::abs(a[j] - b[j]) <= 1e-15 * (1.0 + std::abs(a[j])));

    a = d.u;
    b = d.u;
    ref.mul_real(a.data(), d.mr.data(), n);
    vec.mul_real(b.data(), d.mr.data(), n);
    for (std::size_t j = 0; j < n; ++j) CHECK(a[j] == b[j]);
  }
}

TEST_CASE("scalar kernels compute what they document") {
  const std::vector<cplx> u = {{3.0, 4.0}, {0.0, 1.0}, {1.0, 1.0}};
  const std::vector<cplx> du = {{1.0, 2.0}, {1.0, 0.0}, {0.0, -1.0}};
  const std::vector<double> w = {1.0, 2.0, 0.5};
  const KernelTable& k = scalar_kernels();
  CHECK(k.sum_w_abs2(u.data(), w.data(), 3) == doctest::Approx(25.0 + 2.0 + 1.0));
  CHECK(k.sum_w_abs4(u.data(), w.data(), 3) == doctest::Approx(625.0 + 2.0 + 2.0));
  // Im(conj(u) du): (3-4i)(1+2i) = 11+2i; (-i)(1) = -i; (1-i)(-i) = -1-i
  CHECK(k.sum_w_im_conj(u.data(), du.data(), w.data(), 3) == doctest::Approx(2.0 - 2.0 - 0.5));
  CHECK(k.max_abs2(u.data(), 3) == doctest::Approx(25.0));
}

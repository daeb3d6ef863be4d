#pragma once

// Radial discretization of R^3.
//
// Nodes r_j = j*h, j = 1..n, h = r_max/(n+1). The origin and the outer wall
// are excluded; the substitution v = r*u with v(0) = v(r_max) = 0 turns the
// radial Laplacian into a Dirichlet second derivative that a type-I sine
// transform diagonalizes.

#include <complex>
#include <cstddef>
#include <memory>
#include <span>
#include <vector>

namespace cnls {

using cplx = std::complex<double>;

class SineTransform;

namespace detail {
struct GridTables;
}

class RadialGrid {
 public:
  /// Throws SizingError unless r_max > 0 (finite) and n >= kMinNodes.
  RadialGrid(double r_max, std::size_t n);

  static constexpr std::size_t kMinNodes = 8;

  double r_max() const noexcept { return r_max_; }
  std::size_t size() const noexcept { return n_; }
  double spacing() const noexcept { return h_; }

  /// r_{j+1} for 0-based j.
  double node(std::size_t j) const noexcept { return (static_cast<double>(j) + 1.0) * h_; }

  std::span<const double> nodes() const noexcept;
  std::span<const double> inv_nodes() const noexcept;
  /// kappa_k = k*pi/r_max, k = 1..n.
  std::span<const double> wavenumbers() const noexcept;
  /// 1/r_j, except the first node which carries the 13/12 origin correction.
  std::span<const double> coulomb_weights() const noexcept;
  /// 4*pi*h*r_j^m for m = 0..4 (quadrature of g(r)*r^m).
  std::span<const double> moment_weights(int m) const;

  const SineTransform& transform() const noexcept;

  friend bool operator==(const RadialGrid& a, const RadialGrid& b) noexcept {
    return a.n_ == b.n_ && a.r_max_ == b.r_max_;
  }

 private:
  double r_max_;
  std::size_t n_;
  double h_;
  std::shared_ptr<const detail::GridTables> tables_;
};

RadialGrid make_grid(double r_max, std::size_t n);

/// Complex radial samples u_j = u(r_j). Value type: copies are snapshots.
class Field {
 public:
  /// Throws SizingError on length mismatch and NumericalError on non-finite data.
  Field(RadialGrid grid, std::vector<cplx> values);

  static Field zeros(const RadialGrid& grid);

  template <class F>
  static Field sample(const RadialGrid& grid, F&& f) {
    std::vector<cplx> v(grid.size());
    for (std::size_t j = 0; j < v.size(); ++j) v[j] = cplx(f(grid.node(j)));
    return Field(grid, std::move(v));
  }

  const RadialGrid& grid() const noexcept { return grid_; }
  std::size_t size() const noexcept { return values_.size(); }
  std::span<const cplx> values() const noexcept { return values_; }
  /// Mutable access for in-place kernels; callers keep entries finite.
  std::span<cplx> data() noexcept { return values_; }
  const cplx& operator[](std::size_t j) const noexcept { return values_[j]; }

  bool all_finite() const noexcept;

 private:
  RadialGrid grid_;
  std::vector<cplx> values_;
};

/// Sine coefficients of v = r*u: v_j = sum_k c_k sin(kappa_k r_j).
struct SpectralField {
  RadialGrid grid;
  std::vector<cplx> coefficients;
};

/// Equation parameters for i u_t = -Lap u - (K/|x|) u + lambda |u|^{p-1} u.
struct PhysParams {
  double K = 0.0;
  int lambda = 0;
  double p = 3.0;

  /// Scaling-critical Sobolev index 3/2 - 2/(p-1).
  double s_c() const noexcept { return 1.5 - 2.0 / (p - 1.0); }
};

/// Validates lambda in {-1, 0, 1}, p in (1, 5], finite K. Throws DomainError.
PhysParams make_params(double K, int lambda, double p);

void check_same_grid(const Field& a, const Field& b);

}  // namespace cnls

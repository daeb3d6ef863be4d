#include "cnls/grid.hpp"

#include <cmath>
#include <numbers>
#include <string>

#include "cnls/error.hpp"
#include "cnls/transform.hpp"

namespace cnls {

namespace detail {

struct GridTables {
  std::vector<double> nodes;
  std::vector<double> inv_nodes;
  std::vector<double> wavenumbers;
  std::vector<double> coulomb;
  std::vector<double> moments[5];
  SineTransform transform;

  GridTables(double r_max, std::size_t n, double h) : transform(n) {
    nodes.resize(n);
    inv_nodes.resize(n);
    wavenumbers.resize(n);
    for (std::size_t j = 0; j < n; ++j) {
      nodes[j] = (static_cast<double>(j) + 1.0) * h;
      inv_nodes[j] = 1.0 / nodes[j];
      wavenumbers[j] = (static_cast<double>(j) + 1.0) * std::numbers::pi / r_max;
    }
    // Euler-Maclaurin origin term for the odd integrand r|u|^2: the node sum
    // misses h^2/12 * |u(0)|^2, restored on the first node.
    coulomb = inv_nodes;
    coulomb[0] *= 13.0 / 12.0;
    const double four_pi_h = 4.0 * std::numbers::pi * h;
    for (int m = 0; m < 5; ++m) {
      moments[m].resize(n);
      for (std::size_t j = 0; j < n; ++j) moments[m][j] = four_pi_h * std::pow(nodes[j], m);
    }
  }
};

}  // namespace detail

RadialGrid::RadialGrid(double r_max, std::size_t n) : r_max_(r_max), n_(n), h_(0.0) {
  if (!(r_max > 0.0) || !std::isfinite(r_max)) {
    throw SizingError("grid: r_max must be positive and finite, got " + std::to_string(r_max));
  }
  if (n < kMinNodes) {
    throw SizingError("grid: need at least " + std::to_string(kMinNodes) + " nodes, got " +
                      std::to_string(n));
  }
  h_ = r_max / static_cast<double>(n + 1);
  tables_ = std::make_shared<const detail::GridTables>(r_max, n, h_);
}

std::span<const double> RadialGrid::nodes() const noexcept { return tables_->nodes; }
std::span<const double> RadialGrid::inv_nodes() const noexcept { return tables_->inv_nodes; }
std::span<const double> RadialGrid::wavenumbers() const noexcept { return tables_->wavenumbers; }
std::span<const double> RadialGrid::coulomb_weights() const noexcept { return tables_->coulomb; }

std::span<const double> RadialGrid::moment_weights(int m) const {
  if (m < 0 || m > 4) throw DomainError("grid: moment power must be in 0..4");
  return tables_->moments[m];
}

const SineTransform& RadialGrid::transform() const noexcept { return tables_->transform; }

RadialGrid make_grid(double r_max, std::size_t n) { return RadialGrid(r_max, n); }

Field::Field(RadialGrid grid, std::vector<cplx> values)
    : grid_(std::move(grid)), values_(std::move(values)) {
  if (values_.size() != grid_.size()) {
    throw SizingError("field: " + std::to_string(values_.size()) + " values for a grid of " +
                      std::to_string(grid_.size()) + " nodes");
  }
  if (!all_finite()) throw NumericalError("field: non-finite sample");
}

Field Field::zeros(const RadialGrid& grid) {
  return Field(grid, std::vector<cplx>(grid.size(), cplx(0.0)));
}

bool Field::all_finite() const noexcept {
  for (const auto& z : values_) {
    if (!std::isfinite(z.real()) || !std::isfinite(z.imag())) return false;
  }
  return true;
}

PhysParams make_params(double K, int lambda, double p) {
  if (!std::isfinite(K)) throw DomainError("params: K must be finite");
  if (lambda < -1 || lambda > 1) throw DomainError("params: lambda must be one of {-1, 0, 1}");
  if (!(p > 1.0 && p <= 5.0)) throw DomainError("params: p must lie in (1, 5]");
  return PhysParams{K, lambda, p};
}

void check_same_grid(const Field& a, const Field& b) {
  if (!(a.grid() == b.grid())) throw SizingError("fields live on different grids");
}

}  // namespace cnls

#include "cnls/evolution.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "cnls/diagnostics.hpp"
#include "cnls/error.hpp"
#include "cnls/simd.hpp"
#include "cnls/spectral.hpp"
#include "cnls/transform.hpp"

namespace cnls {
namespace {

bool finite_values(std::span<const cplx> u) {
  return std::all_of(u.begin(), u.end(),
                     [](const cplx& z) { return std::isfinite(z.real()) && std::isfinite(z.imag()); });
}

double h1_of(const RadialGrid& g, std::span<const cplx> u, std::vector<cplx>& v,
             std::vector<cplx>& c) {
  std::copy(u.begin(), u.end(), v.begin());
  simd::mul_real(v, g.nodes());
  g.transform().forward(v, c);
  return std::sqrt(hdot_norm_squared(g, c, 1.0));
}

}  // namespace

StrangStepper::StrangStepper(const RadialGrid& grid, const PhysParams& params, CoulombSplit split,
                             double coulomb_sign)
    : grid_(grid), params_(params), split_(split) {
  const std::size_t n = grid.size();
  const auto coul = grid.coulomb_weights();
  potential_.resize(n);
  for (std::size_t j = 0; j < n; ++j) potential_[j] = -coulomb_sign * params.K * coul[j];
  has_potential_ = params.K != 0.0;
  for (auto* buf : {&v_, &c_, &mult_, &b_, &y_, &r_, &rhat_, &p_, &q_, &s_, &t_, &z_}) {
    buf->resize(n);
  }
}

void StrangStepper::phase(std::vector<cplx>& u, double half_dt) const {
  const double expo = 0.5 * (params_.p - 1.0);
  const double lam = static_cast<double>(params_.lambda);
  const bool coulomb = split_ == CoulombSplit::phase && has_potential_;
  if (lam == 0.0 && !coulomb) return;
  for (std::size_t j = 0; j < u.size(); ++j) {
    double b = coulomb ? potential_[j] : 0.0;
    if (lam != 0.0) b += lam * std::pow(std::norm(u[j]), expo);
    u[j] *= std::polar(1.0, -half_dt * b);
  }
}

void StrangStepper::apply_spectral(std::vector<cplx>& v, const std::vector<cplx>& multiplier) {
  grid_.transform().forward(v, c_);
  simd::mul_cplx(c_, multiplier);
  grid_.transform().inverse(c_, v);
}

void StrangStepper::kinetic(std::vector<cplx>& v, double dt) {
  const auto kappa = grid_.wavenumbers();
  for (std::size_t k = 0; k < mult_.size(); ++k) {
    mult_[k] = std::polar(1.0, -dt * kappa[k] * kappa[k]);
  }
  apply_spectral(v, mult_);
}

// Cayley step (1 + i d L) x = (1 - i d L) v with L = T + V, d = dt/2, T the
// sine-diagonal kinetic operator. Right preconditioning by M = 1 + i d T turns
// the system into y + i d V M^{-1} y = b, x = M^{-1} y.
void StrangStepper::cayley(std::vector<cplx>& v, double dt) {
  const std::size_t n = v.size();
  const double d = 0.5 * dt;
  const cplx id(0.0, d);
  const auto kappa = grid_.wavenumbers();
  const auto& V = potential_;

  for (std::size_t k = 0; k < n; ++k) mult_[k] = kappa[k] * kappa[k];
  z_ = v;
  apply_spectral(z_, mult_);
  for (std::size_t j = 0; j < n; ++j) b_[j] = v[j] - id * (z_[j] + V[j] * v[j]);
  for (std::size_t k = 0; k < n; ++k) mult_[k] = 1.0 / cplx(1.0, d * kappa[k] * kappa[k]);

  auto apply_B = [&](const std::vector<cplx>& x, std::vector<cplx>& out) {
    z_ = x;
    apply_spectral(z_, mult_);
    for (std::size_t j = 0; j < n; ++j) out[j] = x[j] + id * V[j] * z_[j];
  };
  auto dot = [](const std::vector<cplx>& a, const std::vector<cplx>& b) {
    cplx acc = 0.0;
    for (std::size_t j = 0; j < a.size(); ++j) acc += std::conj(a[j]) * b[j];
    return acc;
  };
  auto norm = [&](const std::vector<cplx>& a) { return std::sqrt(dot(a, a).real()); };

  constexpr double kTol = 1e-14;
  constexpr int kMaxIterations = 100;
  const double target = kTol * norm(b_);

  y_ = b_;
  apply_B(y_, q_);
  for (std::size_t j = 0; j < n; ++j) r_[j] = b_[j] - q_[j];
  rhat_ = r_;
  std::fill(p_.begin(), p_.end(), cplx(0.0));
  std::fill(q_.begin(), q_.end(), cplx(0.0));
  cplx rho_old = 1.0, alpha = 1.0, omega = 1.0;
  double residual = norm(r_);
  int it = 0;
  while (residual > target && it < kMaxIterations) {
    ++it;
    const cplx rho = dot(rhat_, r_);
    const cplx beta = (rho / rho_old) * (alpha / omega);
    for (std::size_t j = 0; j < n; ++j) p_[j] = r_[j] + beta * (p_[j] - omega * q_[j]);
    apply_B(p_, q_);
    alpha = rho / dot(rhat_, q_);
    for (std::size_t j = 0; j < n; ++j) {
      s_[j] = r_[j] - alpha * q_[j];
      y_[j] += alpha * p_[j];
    }
    residual = norm(s_);
    if (residual <= target) break;
    apply_B(s_, t_);
    omega = dot(t_, s_) / dot(t_, t_);
    for (std::size_t j = 0; j < n; ++j) {
      y_[j] += omega * s_[j];
      r_[j] = s_[j] - omega * t_[j];
    }
    residual = norm(r_);
    rho_old = rho;
  }
  last_iterations_ = it;
  if (!(residual <= 1e3 * target)) {
    throw ConvergenceError("strang: Cayley solve stalled");
  }
  v = y_;
  apply_spectral(v, mult_);
}

void StrangStepper::step(std::vector<cplx>& u, double dt) {
  if (u.size() != grid_.size()) throw SizingError("strang: field does not match the grid");
  phase(u, 0.5 * dt);
  std::copy(u.begin(), u.end(), v_.begin());
  simd::mul_real(v_, grid_.nodes());
  last_iterations_ = 0;
  if (split_ == CoulombSplit::linear && has_potential_) {
    cayley(v_, dt);
  } else {
    kinetic(v_, dt);
  }
  std::copy(v_.begin(), v_.end(), u.begin());
  simd::mul_real(u, grid_.inv_nodes());
  phase(u, 0.5 * dt);
}

Field strang_step(const Field& u, double dt, const PhysParams& params, CoulombSplit split) {
  if (!(dt >= 0.0)) throw DomainError("strang_step: dt must be non-negative");
  if (!u.all_finite()) throw NumericalError("strang_step: non-finite input field");
  std::vector<cplx> w(u.values().begin(), u.values().end());
  StrangStepper stepper(u.grid(), params, split);
  stepper.step(w, dt);
  if (!finite_values(w)) throw NumericalError("strang_step: non-finite output field");
  return Field(u.grid(), std::move(w));
}

Field cn_reference_step(const Field& u, double dt, const PhysParams& params) {
  if (!(dt > 0.0)) throw DomainError("cn_reference_step: dt must be positive");
  if (!u.all_finite()) throw NumericalError("cn_reference_step: non-finite input field");
  const RadialGrid& g = u.grid();
  const std::size_t n = g.size();
  const double h = g.spacing();
  const double inv_h2 = 1.0 / (h * h);
  const auto r = g.nodes();
  const cplx half_i(0.0, 0.5 * dt);
  const double expo = 0.5 * (params.p - 1.0);

  std::vector<cplx> v(n), next(n), mid(n), rhs(n), diag(n), x(n), cprime(n);
  for (std::size_t j = 0; j < n; ++j) v[j] = r[j] * u[j];
  next = v;

  auto potential = [&](std::size_t j, const std::vector<cplx>& vm) {
    double b = -params.K / r[j];
    if (params.lambda != 0) b += params.lambda * std::pow(std::norm(vm[j] / r[j]), expo);
    return b;
  };

  const cplx off = -half_i * inv_h2;
  for (int iter = 0; iter < 20; ++iter) {
    for (std::size_t j = 0; j < n; ++j) mid[j] = 0.5 * (v[j] + next[j]);
    for (std::size_t j = 0; j < n; ++j) {
      const double b = potential(j, mid);
      const cplx left = j > 0 ? v[j - 1] : cplx(0.0);
      const cplx right = j + 1 < n ? v[j + 1] : cplx(0.0);
      const cplx hv = (2.0 * v[j] - left - right) * inv_h2 + b * v[j];
      rhs[j] = v[j] - half_i * hv;
      diag[j] = 1.0 + half_i * (2.0 * inv_h2 + b);
    }
    // Thomas sweep with constant off-diagonals.
    cprime[0] = off / diag[0];
    x[0] = rhs[0] / diag[0];
    for (std::size_t j = 1; j < n; ++j) {
      const cplx m = diag[j] - off * cprime[j - 1];
      cprime[j] = off / m;
      x[j] = (rhs[j] - off * x[j - 1]) / m;
    }
    for (std::size_t j = n - 1; j-- > 0;) x[j] -= cprime[j] * x[j + 1];

    double diff = 0.0, norm = 0.0;
    for (std::size_t j = 0; j < n; ++j) {
      diff += std::norm(x[j] - next[j]);
      norm += std::norm(x[j]);
    }
    next.swap(x);
    if (diff <= 1e-24 * norm) {
      std::vector<cplx> out(n);
      for (std::size_t j = 0; j < n; ++j) out[j] = next[j] / r[j];
      if (!finite_values(out)) throw NumericalError("cn_reference_step: non-finite output");
      return Field(g, std::move(out));
    }
  }
  throw ConvergenceError("cn_reference_step: midpoint iteration did not converge in 20 sweeps");
}

std::vector<double> absorber_mask(const RadialGrid& grid) {
  const double R = grid.r_max();
  const double start = 0.9 * R;
  std::vector<double> mask(grid.size(), 1.0);
  for (std::size_t j = 0; j < grid.size(); ++j) {
    const double r = grid.node(j);
    if (r > start) {
      const double c = std::cos(0.5 * std::numbers::pi * (r - start) / (R - start));
      mask[j] = c * c;
    }
  }
  return mask;
}

TimeSeries evolve(const EvolveConfig& cfg) {
  const auto& det = cfg.detector;
  if (!(cfg.dt0 > 0.0)) throw ConfigError("time.dt", "must be positive");
  if (!(cfg.t_max > 0.0)) throw ConfigError("time.tmax", "must be positive");
  if (!(det.dt_min < cfg.dt0)) throw ConfigError("detector.dt_min", "must be below time.dt");
  if (!(cfg.safety >= 1.0)) throw ConfigError("time.safety", "must be at least 1");
  if (cfg.sample_stride < 1) throw ConfigError("time.sample_stride", "must be at least 1");
  if (cfg.snapshot_stride < 1) throw ConfigError("snapshot_stride", "must be at least 1");
  if (!cfg.initial.all_finite()) throw ConfigError("initial", "initial field is not finite");

  const RadialGrid& g = cfg.initial.grid();
  const PhysParams& pp = cfg.params;
  const double expo = 0.5 * (pp.p - 1.0);
  StrangStepper stepper(g, pp, cfg.split, cfg.flip_coulomb_sign ? -1.0 : 1.0);
  const std::vector<double> mask = cfg.absorber ? absorber_mask(g) : std::vector<double>{};

  TimeSeries ts;
  std::vector<cplx> u(cfg.initial.values().begin(), cfg.initial.values().end());
  std::vector<cplx> prev(u.size()), scratch_v(u.size()), scratch_c(u.size());

  auto record = [&](double t, double dt, bool last) {
    Field f(g, u);
    ts.samples.push_back(diagnose(f, pp, t, dt));
    const std::size_t index = ts.samples.size() - 1;
    if (cfg.keep_snapshots && (last || index % static_cast<std::size_t>(cfg.snapshot_stride) == 0)) {
      if (!ts.snapshot_times.empty() && ts.snapshot_times.back() == t) return;
      ts.snapshots.push_back(std::move(f));
      ts.snapshot_times.push_back(t);
    }
  };

  record(0.0, 0.0, false);
  const double h1_0 = ts.samples.front().h1;
  const double sup0 = ts.samples.front().sup;
  const double c_a = cfg.dt0 * (1.0 + std::pow(sup0 * sup0, expo));
  const long long fixed_steps =
      cfg.adaptive ? 0 : std::max(1LL, std::llround(cfg.t_max / cfg.dt0));

  double t = 0.0;
  double dt_prev = cfg.dt0;
  bool recorded_last = true;
  for (;;) {
    if (cfg.adaptive ? t >= cfg.t_max * (1.0 - 1e-14)
                     : static_cast<long long>(ts.steps) >= fixed_steps) {
      break;
    }
    double dt = cfg.dt0;
    if (cfg.adaptive) {
      const double m2 = simd::max_abs2(u);
      dt = std::min({cfg.dt0, c_a / (1.0 + std::pow(m2, expo)), cfg.safety * dt_prev});
      dt = std::min(dt, cfg.t_max - t);
      if (dt < det.dt_min) {
        ts.status = RunStatus::step_underflow;
        ts.note = "adaptive step fell below dt_min";
        break;
      }
    }

    std::copy(u.begin(), u.end(), prev.begin());
    try {
      stepper.step(u, dt);
    } catch (const NumericalError& e) {
      u.swap(prev);
      ts.status = RunStatus::step_underflow;
      ts.poisoned = true;
      ts.note = e.what();
      break;
    }
    if (cfg.absorber) simd::mul_real(u, mask);
    if (!finite_values(u)) {
      u.swap(prev);
      ts.status = RunStatus::step_underflow;
      ts.poisoned = true;
      ts.note = "non-finite field";
      break;
    }
    ++ts.steps;
    t = cfg.adaptive ? t + dt : static_cast<double>(ts.steps) * cfg.dt0;
    dt_prev = dt;

    const double sup = std::sqrt(simd::max_abs2(u));
    const double h1 = h1_of(g, u, scratch_v, scratch_c);
    const bool blown = h1 > det.h1_factor * h1_0 || sup > det.sup_max;
    recorded_last = false;
    const bool done = cfg.adaptive ? t >= cfg.t_max * (1.0 - 1e-14)
                                   : static_cast<long long>(ts.steps) >= fixed_steps;
    if (ts.steps % static_cast<std::size_t>(cfg.sample_stride) == 0 || blown || done) {
      record(t, dt, blown || done);
      recorded_last = true;
    }
    if (blown) {
      ts.status = RunStatus::blowup_detected;
      ts.note = h1 > det.h1_factor * h1_0 ? "H1 norm exceeded its threshold"
                                          : "sup norm exceeded its threshold";
      break;
    }
  }
  if (!recorded_last) record(t, dt_prev, true);
  ts.final_field = Field(g, u);
  return ts;
}

}  // namespace cnls

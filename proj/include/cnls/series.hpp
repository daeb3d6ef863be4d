#pragma once

#include <array>
#include <cstddef>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "cnls/grid.hpp"

namespace cnls {

/// One time slice of every monitored functional.
struct DiagnosticsRecord {
  double t = 0.0;
  double M = 0.0;            // mass
  double E = 0.0;            // energy with the Coulomb term
  double E0 = 0.0;           // energy without it
  double h1 = 0.0;           // ||u||_{H^1 dot}
  double hhalf = 0.0;        // ||u||_{H^{1/2} dot}
  double y = 0.0;            // int |x|^2 |u|^2
  double yprime = 0.0;       // 4 Im int x.grad(u) conj(u)
  double ysecond_rhs = 0.0;  // virial right-hand side
  double A = 0.0;            // Im int conj(u) (x/|x|).grad(u)
  double rate_lb = 0.0;      // lower bound for dA/dt
  double l4 = 0.0;           // ||u||_4^4
  double sup = 0.0;          // max |u|
  double dt = 0.0;           // step used to reach t
};

inline constexpr std::array<std::string_view, 14> kSeriesColumns = {
    "t", "M", "E", "E0", "h1", "hhalf", "y", "yprime", "ysecond_rhs", "A", "rate_lb", "l4", "sup",
    "dt"};

inline std::array<double, 14> as_row(const DiagnosticsRecord& r) {
  return {r.t, r.M, r.E, r.E0, r.h1, r.hhalf, r.y, r.yprime, r.ysecond_rhs, r.A, r.rate_lb, r.l4,
          r.sup, r.dt};
}

enum class RunStatus { completed, blowup_detected, step_underflow };

std::string_view status_name(RunStatus status);

struct TimeSeries {
  std::vector<DiagnosticsRecord> samples;
  RunStatus status = RunStatus::completed;
  /// Set when the run stopped on a non-finite field.
  bool poisoned = false;
  std::size_t steps = 0;
  /// Why the run stopped early, empty on normal completion.
  std::string note;
  /// Last finite state reached.
  std::optional<Field> final_field;
  /// Fields at the sample times, kept only on request.
  std::vector<Field> snapshots;
  std::vector<double> snapshot_times;
};

}  // namespace cnls

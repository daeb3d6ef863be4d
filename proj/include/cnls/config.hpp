#pragma once

// Run configuration in INI form:
//
//   [physics]   K, lambda, p                    (required)
//   [grid]      rmax, n                         (required)
//   [time]      dt, tmax                        (required)
//               adaptive, sample_stride, safety, split
//   [initial]   kind                            (required)
//               amplitude, width, scale, path
//   [detector]  h1_factor, sup_max, dt_min
//   [output]    dir, formats
//   [absorber]  enabled
//
// Unknown sections or keys, malformed numbers and missing required entries
// raise ConfigError naming the key as "section.key". `p` also accepts a ratio
// such as 7/3.

#include <cstddef>
#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include "cnls/evolution.hpp"
#include "cnls/grid.hpp"

namespace cnls {

enum class InitialKind { gaussian, bound_state, soliton, ground_state, file };

std::string_view initial_kind_name(InitialKind kind);

struct InitialSpec {
  InitialKind kind = InitialKind::gaussian;
  double amplitude = 1.0;
  double width = 1.0;
  double scale = 1.0;
  std::string path;

  friend bool operator==(const InitialSpec&, const InitialSpec&) = default;
};

struct SimConfig {
  double K = 0.0;
  int lambda = 0;
  double p = 3.0;

  double rmax = 30.0;
  std::size_t n = 4096;

  double dt = 1e-3;
  double tmax = 1.0;
  bool adaptive = false;
  int sample_stride = 1;
  double safety = 2.0;
  CoulombSplit split = CoulombSplit::linear;

  InitialSpec initial;

  double h1_factor = 10.0;
  double sup_max = 1e3;
  double dt_min = 1e-9;

  std::string output_dir = "out";
  bool write_csv = true;
  bool write_json = true;

  bool absorber = false;

  PhysParams params() const;
  RadialGrid grid() const;

  friend bool operator==(const SimConfig&, const SimConfig&) = default;
};

SimConfig parse_config(std::string_view text);
SimConfig load_config(const std::filesystem::path& path);

/// INI text that parses back to an equal SimConfig (numbers in %.17g).
std::string serialize_config(const SimConfig& config);

}  // namespace cnls

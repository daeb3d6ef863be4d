#pragma once

#include <filesystem>
#include <map>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include "cnls/config.hpp"
#include "cnls/diagnostics.hpp"
#include "cnls/ground_states.hpp"
#include "cnls/series.hpp"

namespace cnls {

/// Initial field described by the [initial] section, sampled on the config grid.
Field build_initial_field(const SimConfig& config);

/// Reads a CSV of r,re,im rows (optional header) whose radii match the grid.
Field read_field_csv(const std::filesystem::path& path, const RadialGrid& grid);
void write_field_csv(const std::filesystem::path& path, const Field& field);

/// Q for p in [7/3, 5) and W for p = 5, as needed by the decision table.
struct ReferenceProfiles {
  std::optional<GroundState> Q;
  std::optional<GroundState> W;

  GroundRefs refs() const { return {Q ? &*Q : nullptr, W ? &*W : nullptr}; }
};

ReferenceProfiles reference_profiles(const PhysParams& params, const RadialGrid& grid);

struct RunResult {
  TimeSeries series;
  Classification classification;
  std::filesystem::path output_dir;
  std::vector<std::filesystem::path> files;
  std::string summary_json;
};

/// COULOMB_NLS_OUT when set, else [output].dir.
std::filesystem::path resolve_output_dir(const SimConfig& config);

/// Evolves, classifies the initial data and writes series.csv,
/// final_field.csv and summary.json. If evolve throws, the partial series is
/// still written with status "error" before the exception propagates.
RunResult run_scenario(const SimConfig& config);

/// Writes the series as CSV with the fixed header and %.17g fields.
void write_series_csv(std::ostream& out, const TimeSeries& series);

/// Names of the built-in scenarios.
std::vector<std::string> catalog_names();

/// INI text of a built-in scenario. Throws ConfigError for unknown names.
std::string catalog_config(const std::string& name);

/// Resolves "@name" to a catalog entry, otherwise loads the file.
SimConfig load_config_or_catalog(const std::string& spec);

struct SelftestEntry {
  std::string name;
  bool pass = false;
  std::string detail;
};

struct SelftestOptions {
  /// Flips the sign of K inside the stepper only.
  bool inject_coulomb_sign = false;
};

std::vector<SelftestEntry> run_selftest(const SelftestOptions& options = {});

}  // namespace cnls

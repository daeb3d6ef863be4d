#include "cnls/runner.hpp"

#include <json.hpp>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <map>
#include <sstream>

#include "cnls/error.hpp"
#include "cnls/evolution.hpp"
#include "cnls/spectral.hpp"

namespace cnls {
namespace {

using json = nlohmann::ordered_json;

constexpr double kLocalRadius = 10.0;
constexpr std::size_t kMaxSnapshots = 256;

bool near(double a, double b) { return std::abs(a - b) <= 1e-12 * std::max(1.0, std::abs(b)); }

std::string fmt17(double x) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

double max_relative_drift(const TimeSeries& ts, double DiagnosticsRecord::*field) {
  const auto& s = ts.samples;
  if (s.empty()) return 0.0;
  const double ref = s.front().*field;
  double worst = 0.0;
  for (const auto& r : s) worst = std::max(worst, std::abs(r.*field - ref));
  return ref != 0.0 ? worst / std::abs(ref) : worst;
}

json classification_json(const Classification& c) {
  json w = json::object();
  for (const auto& [k, v] : c.witnesses) w[k] = v;
  return {{"regime", regime_name(c.regime)}, {"reason", c.reason}, {"witnesses", w}};
}

const std::map<std::string, std::string>& catalog() {
  static const std::map<std::string, std::string> entries = {
      {"bound_state",
       "[physics]\nK = 2\nlambda = 0\np = 3\n\n[grid]\nrmax = 30\nn = 4096\n\n"
       "[time]\ndt = 1e-3\ntmax = 1\nsample_stride = 10\n\n[initial]\nkind = bound_state\n\n"
       "[output]\ndir = out/bound_state\n"},
      {"soliton",
       "[physics]\nK = 3\nlambda = 1\np = 3\n\n[grid]\nrmax = 30\nn = 2048\n\n"
       "[time]\ndt = 2e-3\ntmax = 10\nsample_stride = 50\n\n[initial]\nkind = soliton\n\n"
       "[output]\ndir = out/soliton\n"},
      {"free_gaussian",
       "[physics]\nK = 0\nlambda = 0\np = 3\n\n[grid]\nrmax = 40\nn = 4096\n\n"
       "[time]\ndt = 1e-3\ntmax = 1\nsample_stride = 10\n\n"
       "[initial]\nkind = gaussian\namplitude = 1\nwidth = 1\n\n[output]\ndir = out/free_gaussian\n"},
      {"blowup_gaussian",
       "[physics]\nK = 0\nlambda = -1\np = 3\n\n[grid]\nrmax = 30\nn = 4096\n\n"
       "[time]\ndt = 1e-3\ntmax = 2\nadaptive = true\nsample_stride = 1\n\n"
       "[initial]\nkind = gaussian\namplitude = 5\nwidth = 1\n\n[output]\ndir = out/blowup_gaussian\n"},
      {"defocusing_scatter",
       "[physics]\nK = -1\nlambda = 1\np = 3\n\n[grid]\nrmax = 400\nn = 8192\n\n"
       "[time]\ndt = 5e-3\ntmax = 50\nsample_stride = 10\n\n"
       "[initial]\nkind = gaussian\namplitude = 1\nwidth = 2\n\n"
       "[output]\ndir = out/defocusing_scatter\n"},
      {"mass_critical_near_MQ",
       "[physics]\nK = 0\nlambda = -1\np = 7/3\n\n[grid]\nrmax = 30\nn = 2048\n\n"
       "[time]\ndt = 1e-3\ntmax = 1\nsample_stride = 10\n\n"
       "[initial]\nkind = ground_state\nscale = 0.99\n\n[output]\ndir = out/mass_critical_near_MQ\n"},
  };
  return entries;
}

}  // namespace

Field build_initial_field(const SimConfig& c) {
  const RadialGrid grid = c.grid();
  const InitialSpec& in = c.initial;
  switch (in.kind) {
    case InitialKind::gaussian:
      return Field::sample(grid, [&](double r) {
        const double x = r / in.width;
        return in.amplitude * std::exp(-x * x);
      });
    case InitialKind::bound_state:
      return Field::sample(grid, [&](double r) { return in.amplitude * std::exp(-0.5 * c.K * r); });
    case InitialKind::soliton:
    case InitialKind::ground_state: {
      const ProfileKind kind = in.kind == InitialKind::soliton ? ProfileKind::f : ProfileKind::Q;
      const GroundState gs = shoot_ground_state(kind, c.p, c.K, grid);
      std::vector<cplx> v(gs.profile.values().begin(), gs.profile.values().end());
      for (auto& z : v) z *= in.scale;
      return Field(grid, std::move(v));
    }
    case InitialKind::file:
      return read_field_csv(in.path, grid);
  }
  throw ConfigError("initial.kind", "unsupported kind");
}

Field read_field_csv(const std::filesystem::path& path, const RadialGrid& grid) {
  std::ifstream in(path);
  if (!in) throw ConfigError("initial.path", "cannot open " + path.string());
  std::vector<cplx> values;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty() || line[0] == '#') continue;
    double r = 0.0, re = 0.0, im = 0.0;
    if (std::sscanf(line.c_str(), "%lf,%lf,%lf", &r, &re, &im) != 3) {
      if (values.empty() && line_no == 1) continue;  // header
      throw ConfigError("initial.path", "line " + std::to_string(line_no) + " is not r,re,im");
    }
    const std::size_t j = values.size();
    if (j >= grid.size() || std::abs(r - grid.node(j)) > 1e-9 * std::max(1.0, grid.node(j))) {
      throw ConfigError("initial.path", "radii do not match the configured grid at line " +
                                            std::to_string(line_no));
    }
    values.emplace_back(re, im);
  }
  if (values.size() != grid.size()) {
    throw ConfigError("initial.path", "expected " + std::to_string(grid.size()) + " rows, found " +
                                          std::to_string(values.size()));
  }
  for (const auto& z : values) {
    if (!std::isfinite(z.real()) || !std::isfinite(z.imag())) {
      throw ConfigError("initial.path", "non-finite value");
    }
  }
  return Field(grid, std::move(values));
}

void write_field_csv(const std::filesystem::path& path, const Field& field) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot write " + path.string());
  out << "r,re,im\n";
  for (std::size_t j = 0; j < field.size(); ++j) {
    out << fmt17(field.grid().node(j)) << ',' << fmt17(field[j].real()) << ','
        << fmt17(field[j].imag()) << '\n';
  }
}

void write_series_csv(std::ostream& out, const TimeSeries& series) {
  for (std::size_t i = 0; i < kSeriesColumns.size(); ++i) {
    out << (i ? "," : "") << kSeriesColumns[i];
  }
  out << '\n';
  for (const auto& rec : series.samples) {
    const auto row = as_row(rec);
    for (std::size_t i = 0; i < row.size(); ++i) out << (i ? "," : "") << fmt17(row[i]);
    out << '\n';
  }
}

ReferenceProfiles reference_profiles(const PhysParams& params, const RadialGrid& grid) {
  ReferenceProfiles refs;
  if (params.lambda != -1) return refs;
  const double p = params.p;
  const bool mass_critical = near(p, 7.0 / 3.0);
  const bool intercritical = p > 7.0 / 3.0 && p < 5.0 && !near(p, 5.0);
  if (mass_critical || (intercritical && params.K < 0.0)) {
    refs.Q = shoot_ground_state(ProfileKind::Q, p, 0.0, grid);
  }
  if (near(p, 5.0) && params.K < 0.0) refs.W = explicit_W(grid);
  return refs;
}

std::filesystem::path resolve_output_dir(const SimConfig& config) {
  if (const char* env = std::getenv("COULOMB_NLS_OUT"); env != nullptr && *env != '\0') {
    return env;
  }
  return config.output_dir;
}

RunResult run_scenario(const SimConfig& config) {
  const PhysParams params = config.params();
  const RadialGrid grid = config.grid();
  const Field u0 = build_initial_field(config);
  const ReferenceProfiles refs = reference_profiles(params, grid);

  RunResult result;
  result.classification = classify_initial_data(u0, params, refs.refs());
  result.output_dir = resolve_output_dir(config);
  std::filesystem::create_directories(result.output_dir);

  EvolveConfig ec(u0, params);
  ec.dt0 = config.dt;
  ec.t_max = config.tmax;
  ec.adaptive = config.adaptive;
  ec.safety = config.safety;
  ec.split = config.split;
  ec.detector = {config.h1_factor, config.sup_max, config.dt_min};
  ec.absorber = config.absorber;
  ec.sample_stride = config.sample_stride;
  const bool local = params.K > 0.0;
  if (local) {
    ec.keep_snapshots = true;
    const double expected = config.tmax / config.dt / config.sample_stride;
    ec.snapshot_stride = std::max(1, static_cast<int>(std::ceil(expected / kMaxSnapshots)));
  }

  std::string error;
  try {
    result.series = evolve(ec);
  } catch (const NumericalError& e) {
    error = e.what();
  }

  json summary;
  summary["status"] = error.empty() ? std::string(status_name(result.series.status)) : "error";
  summary["poisoned"] = result.series.poisoned;
  summary["note"] = error.empty() ? result.series.note : error;
  summary["steps"] = result.series.steps;
  summary["t_final"] = result.series.samples.empty() ? 0.0 : result.series.samples.back().t;
  summary["samples"] = result.series.samples.size();
  summary["classification"] = classification_json(result.classification);
  if (!result.series.samples.empty()) {
    const InteractionL4 il4 = interaction_l4(result.series);
    summary["interaction_l4"] = {{"total", il4.total}, {"bound_witness", il4.bound_witness}};
    summary["drifts"] = {{"mass", max_relative_drift(result.series, &DiagnosticsRecord::M)},
                         {"energy", max_relative_drift(result.series, &DiagnosticsRecord::E)}};
    if (params.lambda == 1) {
      const H1Bound b = defocusing_h1_bound(result.series, params);
      summary["h1_bound"] = {{"sup_norm_sq", b.sup_norm_sq},
                             {"bound", b.bound},
                             {"C1", b.C1},
                             {"hardy_max", b.hardy_max}};
    }
    if (local && !result.series.snapshots.empty()) {
      const double R = std::min(kLocalRadius, grid.r_max());
      const LocalAverage m = local_time_average(result.series, R, LocalQuantity::mass, params);
      const LocalAverage g = local_time_average(result.series, R, LocalQuantity::gradient, params);
      summary["local_time_average"] = {
          {"radius", R},
          {"mass", {{"value", m.value}, {"bound", m.bound}}},
          {"gradient", {{"value", g.value}, {"bound", g.bound}}}};
    }
  }

  if (config.write_csv) {
    const auto series_path = result.output_dir / "series.csv";
    std::ofstream out(series_path, std::ios::binary);
    if (!out) throw Error("cannot write " + series_path.string());
    write_series_csv(out, result.series);
    result.files.push_back(series_path);
    if (result.series.final_field) {
      const auto field_path = result.output_dir / "final_field.csv";
      write_field_csv(field_path, *result.series.final_field);
      result.files.push_back(field_path);
    }
  }
  result.summary_json = summary.dump(2);
  if (config.write_json) {
    const auto path = result.output_dir / "summary.json";
    std::ofstream out(path, std::ios::binary);
    if (!out) throw Error("cannot write " + path.string());
    out << result.summary_json << '\n';
    result.files.push_back(path);
  }
  if (!error.empty()) throw NumericalError(error);
  return result;
}

std::vector<std::string> catalog_names() {
  std::vector<std::string> names;
  for (const auto& [name, text] : catalog()) names.push_back(name);
  return names;
}

std::string catalog_config(const std::string& name) {
  auto it = catalog().find(name);
  if (it == catalog().end()) throw ConfigError("", "unknown scenario '" + name + "'");
  return it->second;
}

SimConfig load_config_or_catalog(const std::string& spec) {
  if (!spec.empty() && spec[0] == '@') return parse_config(catalog_config(spec.substr(1)));
  return load_config(spec);
}

}  // namespace cnls

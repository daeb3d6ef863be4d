// coulomb-nls command line driver.
//
//   coulomb-nls run <config|@scenario>
//   coulomb-nls groundstate --kind {Q|W|f} --p <val> [--K <val>] [--rmax R] [--n N] [--profile out.csv]
//   coulomb-nls classify <config|@scenario>
//   coulomb-nls selftest [--inject-coulomb-sign]
//   coulomb-nls scenarios
//
// Exit status: 0 ok, 1 usage or configuration error, 2 numerical failure.

#include <CLI11.hpp>
#include <json.hpp>

#include <cstdio>
#include <iostream>

#include "cnls/error.hpp"
#include "cnls/runner.hpp"

namespace {

using json = nlohmann::ordered_json;
using namespace cnls;

constexpr int kOk = 0;
constexpr int kUsage = 1;
constexpr int kNumerical = 2;

int cmd_run(const std::string& spec) {
  const SimConfig config = load_config_or_catalog(spec);
  const RunResult result = run_scenario(config);
  std::cout << result.summary_json << '\n';
  for (const auto& f : result.files) std::cerr << "wrote " << f.string() << '\n';
  return result.series.poisoned ? kNumerical : kOk;
}

int cmd_classify(const std::string& spec) {
  const SimConfig config = load_config_or_catalog(spec);
  const PhysParams params = config.params();
  const Field u0 = build_initial_field(config);
  const ReferenceProfiles refs = reference_profiles(params, config.grid());
  const Classification c = classify_initial_data(u0, params, refs.refs());
  json w = json::object();
  for (const auto& [k, v] : c.witnesses) w[k] = v;
  json out = {{"regime", regime_name(c.regime)}, {"reason", c.reason}, {"witnesses", w}};
  std::cout << out.dump(2) << '\n';
  return kOk;
}

ProfileKind parse_kind(const std::string& s) {
  if (s == "Q") return ProfileKind::Q;
  if (s == "W") return ProfileKind::W;
  if (s == "f") return ProfileKind::f;
  throw ConfigError("kind", "must be Q, W or f");
}

int cmd_groundstate(const std::string& kind_text, double p, double K, double rmax, std::size_t n,
                    const std::string& profile_path) {
  const ProfileKind kind = parse_kind(kind_text);
  const RadialGrid grid(rmax, n);
  GroundState gs = [&] {
    if (kind == ProfileKind::W) return explicit_W(grid);
    return shoot_ground_state(kind, p, K, grid);
  }();
  json out;
  out["kind"] = kind_name(gs.kind);
  out["p"] = gs.p;
  out["K"] = gs.K;
  out["rmax"] = rmax;
  out["n"] = n;
  out["amplitude"] = gs.amplitude;
  out["residual"] = gs.residual;
  out["norms"] = {{"mass", gs.norms.mass},
                  {"h1_sq", gs.norms.h1_sq},
                  {"lp1", gs.norms.lp1},
                  {"mass_divergent", gs.norms.mass_divergent}};
  if (kind == ProfileKind::Q) {
    const ConstantsReport c = constants_report(gs, p);
    out["constants"] = {{"p", c.p},
                        {"s_c", c.s_c},
                        {"C0", c.C0},
                        {"M", c.M},
                        {"h1_sq", c.h1_sq},
                        {"lp1", c.lp1},
                        {"E0", c.E0},
                        {"identity_qah1_residual", c.identity_qah1_residual},
                        {"energy_identity_residuals",
                         {c.energy_identity_residuals[0], c.energy_identity_residuals[1]}},
                        {"mass_energy_threshold", c.mass_energy_threshold},
                        {"norm_threshold", c.norm_threshold}};
  }
  if (!profile_path.empty()) write_field_csv(profile_path, gs.profile);
  std::cout << out.dump(2) << '\n';
  return kOk;
}

int cmd_selftest(bool inject) {
  const auto report = run_selftest({.inject_coulomb_sign = inject});
  bool all = true;
  for (const auto& e : report) {
    std::printf("%-32s %s  %s\n", e.name.c_str(), e.pass ? "PASS" : "FAIL", e.detail.c_str());
    all = all && e.pass;
  }
  std::printf("%s\n", all ? "selftest: all invariants pass" : "selftest: FAILURES");
  return all ? kOk : kNumerical;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Radial spectral solver for NLS with a Coulomb potential", "coulomb-nls"};
  app.require_subcommand(1);

  std::string run_spec;
  auto* run = app.add_subcommand("run", "Evolve a scenario and write series.csv / summary.json");
  run->add_option("config", run_spec, "INI file or @scenario")->required();

  std::string classify_spec;
  auto* classify = app.add_subcommand("classify", "Classify the initial data of a scenario");
  classify->add_option("config", classify_spec, "INI file or @scenario")->required();

  std::string kind;
  double p = 3.0, K = 0.0, rmax = 30.0;
  std::size_t n = 4096;
  std::string profile_path;
  auto* gs = app.add_subcommand("groundstate", "Compute Q, W or f and print its constants");
  gs->add_option("--kind", kind, "Q, W or f")->required()->check(CLI::IsMember({"Q", "W", "f"}));
  gs->add_option("--p", p, "Nonlinearity exponent");
  gs->add_option("--K", K, "Coulomb strength (f only)");
  gs->add_option("--rmax", rmax, "Ball radius")->capture_default_str();
  gs->add_option("--n", n, "Interior nodes")->capture_default_str();
  gs->add_option("--profile", profile_path, "Write the profile as r,re,im CSV");

  bool inject = false;
  auto* selftest = app.add_subcommand("selftest", "Run the invariant suite at small scale");
  selftest->add_flag("--inject-coulomb-sign", inject, "Flip the Coulomb sign inside the stepper");

  auto* scenarios = app.add_subcommand("scenarios", "List built-in scenarios");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kOk : kUsage;
  }

  try {
    if (*run) return cmd_run(run_spec);
    if (*classify) return cmd_classify(classify_spec);
    if (*gs) {
      if (kind != "W" && gs->count("--p") == 0) throw ConfigError("p", "--p is required for Q and f");
      return cmd_groundstate(kind, kind == "W" ? 5.0 : p, K, rmax, n, profile_path);
    }
    if (*selftest) return cmd_selftest(inject);
    if (*scenarios) {
      for (const auto& name : catalog_names()) std::cout << name << '\n';
      return kOk;
    }
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return kUsage;
  } catch (const DomainError& e) {
    std::cerr << "invalid argument: " << e.what() << '\n';
    return kUsage;
  } catch (const SizingError& e) {
    std::cerr << "invalid grid: " << e.what() << '\n';
    return kUsage;
  } catch (const NumericalError& e) {
    std::cerr << "numerical failure: " << e.what() << '\n';
    return kNumerical;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kNumerical;
  }
  return kUsage;
}

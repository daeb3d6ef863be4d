#include "cnls/config.hpp"

#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <optional>
#include <set>
#include <sstream>

#include "cnls/error.hpp"

namespace cnls {
namespace {

namespace pt = boost::property_tree;

const std::map<std::string, std::set<std::string>>& schema() {
  static const std::map<std::string, std::set<std::string>> s = {
      {"physics", {"K", "lambda", "p"}},
      {"grid", {"rmax", "n"}},
      {"time", {"dt", "tmax", "adaptive", "sample_stride", "safety", "split"}},
      {"initial", {"kind", "amplitude", "width", "scale", "path"}},
      {"detector", {"h1_factor", "sup_max", "dt_min"}},
      {"output", {"dir", "formats"}},
      {"absorber", {"enabled"}},
  };
  return s;
}

const std::set<std::string> kRequiredSections = {"physics", "grid", "time", "initial"};

std::string trim(std::string s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return s.substr(first, last - first + 1);
}

class Reader {
 public:
  explicit Reader(const pt::ptree& tree) : tree_(tree) {}

  const pt::ptree* section(const std::string& name) const {
    auto it = tree_.find(name);
    return it == tree_.not_found() ? nullptr : &it->second;
  }

  std::optional<std::string> raw(const std::string& sec, const std::string& key) const {
    const pt::ptree* s = section(sec);
    if (s == nullptr) return std::nullopt;
    auto it = s->find(key);
    if (it == s->not_found()) return std::nullopt;
    return trim(it->second.data());
  }

  std::string require(const std::string& sec, const std::string& key) const {
    auto v = raw(sec, key);
    if (!v) throw ConfigError(sec + "." + key, "required key is missing");
    return *v;
  }

 private:
  const pt::ptree& tree_;
};

// from_chars rejects a leading '+', which INI authors write for K.
std::string_view unsigned_part(const std::string& text) {
  std::string_view v = text;
  if (v.size() > 1 && v.front() == '+' && v[1] != '-' && v[1] != '+') v.remove_prefix(1);
  return v;
}

double to_double(const std::string& key, const std::string& text) {
  double value = 0.0;
  const std::string_view v = unsigned_part(text);
  const char* end = v.data() + v.size();
  auto [ptr, ec] = std::from_chars(v.data(), end, value);
  if (ec != std::errc() || ptr != end || text.empty()) {
    throw ConfigError(key, "expected a number, got '" + text + "'");
  }
  if (!std::isfinite(value)) throw ConfigError(key, "must be finite");
  return value;
}

// Accepts a plain number or a ratio a/b.
double to_exponent(const std::string& key, const std::string& text) {
  const auto slash = text.find('/');
  if (slash == std::string::npos) return to_double(key, text);
  const double num = to_double(key, trim(text.substr(0, slash)));
  const double den = to_double(key, trim(text.substr(slash + 1)));
  if (den == 0.0) throw ConfigError(key, "zero denominator");
  return num / den;
}

long long to_integer(const std::string& key, const std::string& text) {
  long long value = 0;
  const std::string_view v = unsigned_part(text);
  const char* end = v.data() + v.size();
  auto [ptr, ec] = std::from_chars(v.data(), end, value);
  if (ec != std::errc() || ptr != end || text.empty()) {
    throw ConfigError(key, "expected an integer, got '" + text + "'");
  }
  return value;
}

bool to_bool(const std::string& key, const std::string& text) {
  if (text == "true" || text == "1") return true;
  if (text == "false" || text == "0") return false;
  throw ConfigError(key, "expected true or false, got '" + text + "'");
}

InitialKind to_kind(const std::string& text) {
  for (InitialKind k : {InitialKind::gaussian, InitialKind::bound_state, InitialKind::soliton,
                        InitialKind::ground_state, InitialKind::file}) {
    if (text == initial_kind_name(k)) return k;
  }
  throw ConfigError("initial.kind",
                    "'" + text + "' is not one of gaussian|bound_state|soliton|ground_state|file");
}

std::string fmt(double x) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

void validate(const SimConfig& c) {
  if (c.lambda < -1 || c.lambda > 1) {
    throw ConfigError("physics.lambda", "must be one of {-1, 0, 1}");
  }
  if (!(c.p > 1.0 && c.p <= 5.0)) throw ConfigError("physics.p", "must lie in (1, 5]");
  if (!(c.rmax > 0.0)) throw ConfigError("grid.rmax", "must be positive");
  if (c.n < RadialGrid::kMinNodes) throw ConfigError("grid.n", "must be at least 8");
  if (!(c.dt > 0.0)) throw ConfigError("time.dt", "must be positive");
  if (!(c.tmax > 0.0)) throw ConfigError("time.tmax", "must be positive");
  if (c.sample_stride < 1) throw ConfigError("time.sample_stride", "must be at least 1");
  if (!(c.safety >= 1.0)) throw ConfigError("time.safety", "must be at least 1");
  if (!(c.h1_factor > 1.0)) throw ConfigError("detector.h1_factor", "must exceed 1");
  if (!(c.sup_max > 0.0)) throw ConfigError("detector.sup_max", "must be positive");
  if (!(c.dt_min > 0.0 && c.dt_min < c.dt)) {
    throw ConfigError("detector.dt_min", "must be positive and below time.dt");
  }
  const InitialSpec& in = c.initial;
  switch (in.kind) {
    case InitialKind::gaussian:
      if (!(in.width > 0.0)) throw ConfigError("initial.width", "must be positive");
      break;
    case InitialKind::bound_state:
      if (!(c.K > 0.0)) throw ConfigError("initial.kind", "bound_state needs K > 0");
      break;
    case InitialKind::soliton:
      if (!(c.K > 0.0)) throw ConfigError("initial.kind", "soliton needs K > 0");
      break;
    case InitialKind::ground_state:
      if (!(c.p < 5.0)) throw ConfigError("initial.kind", "ground_state needs p < 5");
      break;
    case InitialKind::file:
      if (in.path.empty()) throw ConfigError("initial.path", "required for kind = file");
      break;
  }
  if (c.output_dir.empty()) throw ConfigError("output.dir", "must not be empty");
}

}  // namespace

std::string_view initial_kind_name(InitialKind kind) {
  switch (kind) {
    case InitialKind::gaussian: return "gaussian";
    case InitialKind::bound_state: return "bound_state";
    case InitialKind::soliton: return "soliton";
    case InitialKind::ground_state: return "ground_state";
    case InitialKind::file: return "file";
  }
  return "gaussian";
}

PhysParams SimConfig::params() const {
  try {
    return make_params(K, lambda, p);
  } catch (const DomainError& e) {
    throw ConfigError("physics", e.what());
  }
}

RadialGrid SimConfig::grid() const { return RadialGrid(rmax, n); }

SimConfig parse_config(std::string_view text) {
  pt::ptree tree;
  try {
    std::istringstream in{std::string(text)};
    pt::ini_parser::read_ini(in, tree);
  } catch (const pt::ini_parser_error& e) {
    throw ConfigError("", std::string("malformed INI: ") + e.what());
  }

  for (const auto& [name, sec] : tree) {
    if (sec.empty() && !sec.data().empty()) throw ConfigError(name, "key outside any section");
    auto it = schema().find(name);
    if (it == schema().end()) throw ConfigError(name, "unknown section");
    for (const auto& [key, value] : sec) {
      if (!it->second.contains(key)) throw ConfigError(name + "." + key, "unknown key");
    }
  }
  for (const auto& name : kRequiredSections) {
    if (tree.find(name) == tree.not_found()) throw ConfigError(name, "required section is missing");
  }

  Reader r(tree);
  SimConfig c;
  c.K = to_double("physics.K", r.require("physics", "K"));
  c.lambda = static_cast<int>(to_integer("physics.lambda", r.require("physics", "lambda")));
  c.p = to_exponent("physics.p", r.require("physics", "p"));

  c.rmax = to_double("grid.rmax", r.require("grid", "rmax"));
  const long long n = to_integer("grid.n", r.require("grid", "n"));
  if (n < 0) throw ConfigError("grid.n", "must be at least 8");
  c.n = static_cast<std::size_t>(n);

  c.dt = to_double("time.dt", r.require("time", "dt"));
  c.tmax = to_double("time.tmax", r.require("time", "tmax"));
  if (auto v = r.raw("time", "adaptive")) c.adaptive = to_bool("time.adaptive", *v);
  if (auto v = r.raw("time", "sample_stride")) {
    const long long s = to_integer("time.sample_stride", *v);
    if (s < 1 || s > 1'000'000'000) throw ConfigError("time.sample_stride", "must be at least 1");
    c.sample_stride = static_cast<int>(s);
  }
  if (auto v = r.raw("time", "safety")) c.safety = to_double("time.safety", *v);
  if (auto v = r.raw("time", "split")) {
    if (*v == "linear") {
      c.split = CoulombSplit::linear;
    } else if (*v == "phase") {
      c.split = CoulombSplit::phase;
    } else {
      throw ConfigError("time.split", "must be linear or phase");
    }
  }

  c.initial.kind = to_kind(r.require("initial", "kind"));
  if (auto v = r.raw("initial", "amplitude")) c.initial.amplitude = to_double("initial.amplitude", *v);
  if (auto v = r.raw("initial", "width")) c.initial.width = to_double("initial.width", *v);
  if (auto v = r.raw("initial", "scale")) c.initial.scale = to_double("initial.scale", *v);
  if (auto v = r.raw("initial", "path")) c.initial.path = *v;

  if (auto v = r.raw("detector", "h1_factor")) c.h1_factor = to_double("detector.h1_factor", *v);
  if (auto v = r.raw("detector", "sup_max")) c.sup_max = to_double("detector.sup_max", *v);
  if (auto v = r.raw("detector", "dt_min")) c.dt_min = to_double("detector.dt_min", *v);

  if (auto v = r.raw("output", "dir")) c.output_dir = *v;
  if (auto v = r.raw("output", "formats")) {
    c.write_csv = false;
    c.write_json = false;
    std::stringstream ss(*v);
    std::string item;
    while (std::getline(ss, item, ',')) {
      item = trim(item);
      if (item == "csv") {
        c.write_csv = true;
      } else if (item == "json") {
        c.write_json = true;
      } else {
        throw ConfigError("output.formats", "'" + item + "' is not one of csv|json");
      }
    }
  }

  if (auto v = r.raw("absorber", "enabled")) c.absorber = to_bool("absorber.enabled", *v);

  validate(c);
  return c;
}

SimConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("", "cannot open config file " + path.string());
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_config(ss.str());
}

std::string serialize_config(const SimConfig& c) {
  std::ostringstream o;
  o << "[physics]\n"
    << "K = " << fmt(c.K) << "\n"
    << "lambda = " << c.lambda << "\n"
    << "p = " << fmt(c.p) << "\n\n"
    << "[grid]\n"
    << "rmax = " << fmt(c.rmax) << "\n"
    << "n = " << c.n << "\n\n"
    << "[time]\n"
    << "dt = " << fmt(c.dt) << "\n"
    << "tmax = " << fmt(c.tmax) << "\n"
    << "adaptive = " << (c.adaptive ? "true" : "false") << "\n"
    << "sample_stride = " << c.sample_stride << "\n"
    << "safety = " << fmt(c.safety) << "\n"
    << "split = " << (c.split == CoulombSplit::linear ? "linear" : "phase") << "\n\n"
    << "[initial]\n"
    << "kind = " << initial_kind_name(c.initial.kind) << "\n"
    << "amplitude = " << fmt(c.initial.amplitude) << "\n"
    << "width = " << fmt(c.initial.width) << "\n"
    << "scale = " << fmt(c.initial.scale) << "\n";
  if (!c.initial.path.empty()) o << "path = " << c.initial.path << "\n";
  o << "\n[detector]\n"
    << "h1_factor = " << fmt(c.h1_factor) << "\n"
    << "sup_max = " << fmt(c.sup_max) << "\n"
    << "dt_min = " << fmt(c.dt_min) << "\n\n"
    << "[output]\n"
    << "dir = " << c.output_dir << "\n";
  std::string formats;
  if (c.write_csv) formats = "csv";
  if (c.write_json) formats += formats.empty() ? "json" : ",json";
  o << "formats = " << formats << "\n";
  o << "\n[absorber]\n"
    << "enabled = " << (c.absorber ? "true" : "false") << "\n";
  return o.str();
}

}  // namespace cnls

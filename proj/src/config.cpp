#include "thzqkd/config.hpp"

#include <cmath>
#include <cstdint>
#include <cstdio>
#include <fstream>
#include <set>
#include <sstream>

#include <yaml-cpp/yaml.h>

#include "thzqkd/csv.hpp"
#include "thzqkd/error.hpp"

namespace thzqkd {

namespace {

std::string at(const YAML::Node& node) {
  const YAML::Mark m = node.Mark();
  if (m.line < 0) return "";
  return " (line " + std::to_string(m.line + 1) + ")";
}

[[noreturn]] void fail(const std::string& field, const std::string& what, const YAML::Node& node) {
  throw ConfigError(field + ": " + what + at(node));
}

void check_keys(const YAML::Node& map, const std::string& field,
                const std::set<std::string>& allowed) {
  if (!map.IsMap()) fail(field, "expected a mapping", map);
  for (const auto& kv : map) {
    const auto key = kv.first.as<std::string>();
    if (!allowed.count(key)) fail(field + "." + key, "unknown key", kv.first);
  }
}

double get_double(const YAML::Node& node, const std::string& field) {
  if (!node.IsScalar()) fail(field, "expected a number", node);
  const std::string text = node.Scalar();
  double v = 0.0;
  std::size_t used = 0;
  try {
    v = std::stod(text, &used);
  } catch (const std::exception&) {
    fail(field, "'" + text + "' is not a number", node);
  }
  if (used != text.size()) fail(field, "'" + text + "' is not a number", node);
  if (!std::isfinite(v)) fail(field, "must be finite", node);
  return v;
}

int get_int(const YAML::Node& node, const std::string& field) {
  const double v = get_double(node, field);
  if (v != std::floor(v) || std::abs(v) > 1e9) fail(field, "expected an integer", node);
  return static_cast<int>(v);
}

bool get_bool(const YAML::Node& node, const std::string& field) {
  try {
    return node.as<bool>();
  } catch (const YAML::Exception&) {
    fail(field, "expected true or false", node);
  }
}

std::string get_string(const YAML::Node& node, const std::string& field) {
  if (!node.IsScalar()) fail(field, "expected a string", node);
  return node.Scalar();
}

void read_double(const YAML::Node& map, const char* key, const std::string& section, double& out) {
  if (const YAML::Node n = map[key]) out = get_double(n, section + "." + key);
}

std::complex<double> get_complex(const YAML::Node& node, const std::string& field) {
  if (node.IsSequence()) {
    if (node.size() != 2) fail(field, "expected [re, im]", node);
    return {get_double(node[0], field + "[0]"), get_double(node[1], field + "[1]")};
  }
  return {get_double(node, field), 0.0};
}

EnvironmentParams parse_environment(const YAML::Node& n) {
  EnvironmentParams env;
  if (!n) return env;
  check_keys(n, "environment",
             {"carrier_frequency_hz", "temperature_k", "signal_variance", "eve_noise"});
  read_double(n, "carrier_frequency_hz", "environment", env.carrier_frequency_hz);
  read_double(n, "temperature_k", "environment", env.temperature_k);
  read_double(n, "signal_variance", "environment", env.signal_variance);
  read_double(n, "eve_noise", "environment", env.eve_noise);
  try {
    env.validate();
  } catch (const DomainError& e) {
    throw ConfigError(e.what() + at(n));
  }
  return env;
}

ArrayConfig parse_arrays(const YAML::Node& n) {
  if (!n) throw ConfigError("arrays: section is required");
  check_keys(n, "arrays",
             {"n_tx", "n_rx", "element_gain", "element_gain_dbi", "element_spacing_over_lambda"});
  ArrayConfig a;
  if (!n["n_tx"]) fail("arrays.n_tx", "is required", n);
  if (!n["n_rx"]) fail("arrays.n_rx", "is required", n);
  a.n_tx = get_int(n["n_tx"], "arrays.n_tx");
  if (a.n_tx < 1) fail("arrays.n_tx", "must be >= 1", n["n_tx"]);
  a.n_rx = get_int(n["n_rx"], "arrays.n_rx");
  if (a.n_rx < 1) fail("arrays.n_rx", "must be >= 1", n["n_rx"]);
  if (n["element_gain"] && n["element_gain_dbi"]) {
    fail("arrays", "give element_gain or element_gain_dbi, not both", n);
  }
  if (n["element_gain_dbi"]) {
    a.element_gain = std::pow(10.0, get_double(n["element_gain_dbi"], "arrays.element_gain_dbi") / 10.0);
  }
  read_double(n, "element_gain", "arrays", a.element_gain);
  read_double(n, "element_spacing_over_lambda", "arrays", a.element_spacing_over_lambda);
  try {
    a.validate();
  } catch (const DomainError& e) {
    throw ConfigError(e.what() + at(n));
  }
  return a;
}

std::vector<PathSpec> parse_paths(const YAML::Node& root) {
  const YAML::Node n = root["paths"];
  const YAML::Node d = root["distance_m"];
  if (n && d) fail("distance_m", "give paths or distance_m, not both", d);
  std::vector<PathSpec> out;
  if (d) {
    PathSpec los;
    los.length_m = get_double(d, "distance_m");
    los.delay_s = los.length_m / constants::speed_of_light;
    out.push_back(los);
  } else {
    if (!n) throw ConfigError("paths: section is required (or a top-level distance_m)");
    if (!n.IsSequence()) fail("paths", "expected a list", n);
    for (std::size_t i = 0; i < n.size(); ++i) {
      const std::string field = "paths[" + std::to_string(i) + "]";
      const YAML::Node p = n[i];
      check_keys(p, field,
                 {"length_m", "aod_rad", "aoa_rad", "delay_s", "is_los", "roughness", "fresnel"});
      PathSpec s;
      if (!p["length_m"]) fail(field + ".length_m", "is required", p);
      s.length_m = get_double(p["length_m"], field + ".length_m");
      read_double(p, "aod_rad", field, s.aod_rad);
      read_double(p, "aoa_rad", field, s.aoa_rad);
      s.delay_s = s.length_m / constants::speed_of_light;
      read_double(p, "delay_s", field, s.delay_s);
      s.is_los = p["is_los"] ? get_bool(p["is_los"], field + ".is_los") : false;
      read_double(p, "roughness", field, s.roughness);
      if (p["fresnel"]) s.fresnel = get_complex(p["fresnel"], field + ".fresnel");
      out.push_back(s);
    }
    // a single path without is_los is the LoS path
    if (out.size() == 1 && !n[0]["is_los"]) out[0].is_los = true;
  }
  try {
    validate_paths(out);
  } catch (const DomainError& e) {
    throw ConfigError(e.what() + at(n ? n : d));
  }
  return out;
}

AbsorptionTable parse_absorption(const YAML::Node& n, const std::filesystem::path& base_dir) {
  if (!n) return AbsorptionTable::default_terahertz();
  try {
    if (n.IsScalar()) {
      const std::string v = n.Scalar();
      if (v == "default") return AbsorptionTable::default_terahertz();
      fail("absorption", "expected 'default', {file: ...}, {rows: ...} or {bands: ...}", n);
    }
    check_keys(n, "absorption", {"file", "rows", "bands"});
    if (n.size() != 1) fail("absorption", "give exactly one of file, rows, bands", n);
    if (const YAML::Node f = n["file"]) {
      std::filesystem::path p = get_string(f, "absorption.file");
      if (p.is_relative() && !base_dir.empty()) p = base_dir / p;
      return AbsorptionTable::load_csv(p);
    }
    if (const YAML::Node r = n["rows"]) {
      if (!r.IsSequence()) fail("absorption.rows", "expected a list of [frequency_hz, delta_db_per_km]", r);
      std::vector<std::pair<double, double>> rows;
      for (std::size_t i = 0; i < r.size(); ++i) {
        const std::string field = "absorption.rows[" + std::to_string(i) + "]";
        if (!r[i].IsSequence() || r[i].size() != 2) fail(field, "expected [frequency_hz, delta_db_per_km]", r[i]);
        rows.emplace_back(get_double(r[i][0], field), get_double(r[i][1], field));
      }
      return AbsorptionTable::from_rows(rows);
    }
    const YAML::Node b = n["bands"];
    if (!b.IsSequence()) fail("absorption.bands", "expected a list", b);
    std::vector<AbsorptionBand> bands;
    for (std::size_t i = 0; i < b.size(); ++i) {
      const std::string field = "absorption.bands[" + std::to_string(i) + "]";
      check_keys(b[i], field, {"lo_hz", "hi_hz", "lo_closed", "hi_closed", "delta_db_per_km"});
      AbsorptionBand band;
      for (const char* key : {"lo_hz", "hi_hz", "delta_db_per_km"}) {
        if (!b[i][key]) fail(field + "." + key, "is required", b[i]);
      }
      band.lo_hz = get_double(b[i]["lo_hz"], field + ".lo_hz");
      band.hi_hz = get_double(b[i]["hi_hz"], field + ".hi_hz");
      band.delta_db_per_km = get_double(b[i]["delta_db_per_km"], field + ".delta_db_per_km");
      if (b[i]["lo_closed"]) band.lo_closed = get_bool(b[i]["lo_closed"], field + ".lo_closed");
      if (b[i]["hi_closed"]) band.hi_closed = get_bool(b[i]["hi_closed"], field + ".hi_closed");
      bands.push_back(band);
    }
    return AbsorptionTable(std::move(bands));
  } catch (const DomainError& e) {
    throw ConfigError(e.what() + at(n));
  }
}

void parse_options(const YAML::Node& n, ScenarioConfig& cfg) {
  if (!n) return;
  check_keys(n, "options",
             {"method", "clamp_negative_channels", "fresnel_mode", "rank_tolerance",
              "zeta_constant_mode"});
  try {
    if (n["method"]) cfg.method = parse_rate_method(get_string(n["method"], "options.method"));
    if (n["zeta_constant_mode"]) {
      cfg.scenario.keyrate.zeta_constant =
          parse_zeta_constant(get_string(n["zeta_constant_mode"], "options.zeta_constant_mode"));
    }
  } catch (const DomainError& e) {
    throw ConfigError(std::string("options: ") + e.what() + at(n));
  }
  if (n["clamp_negative_channels"]) {
    cfg.scenario.keyrate.clamp_negative_channels =
        get_bool(n["clamp_negative_channels"], "options.clamp_negative_channels");
  }
  if (n["fresnel_mode"]) {
    const std::string m = get_string(n["fresnel_mode"], "options.fresnel_mode");
    if (m == "power") {
      cfg.scenario.channel.fresnel_mode = FresnelMode::power;
    } else if (m == "raw") {
      cfg.scenario.channel.fresnel_mode = FresnelMode::raw;
    } else {
      fail("options.fresnel_mode", "expected power or raw, got '" + m + "'", n["fresnel_mode"]);
    }
  }
  if (n["rank_tolerance"]) {
    const double tol = get_double(n["rank_tolerance"], "options.rank_tolerance");
    if (!(tol > 0.0 && tol < 1.0)) fail("options.rank_tolerance", "must lie in (0, 1)", n["rank_tolerance"]);
    cfg.scenario.channel.rank_tolerance = tol;
  }
}

}  // namespace

ScenarioConfig parse_config(std::string_view text, const std::filesystem::path& base_dir) {
  YAML::Node root;
  try {
    root = YAML::Load(std::string(text));
  } catch (const YAML::ParserException& e) {
    throw ConfigError(std::string("config: ") + e.what());
  }
  if (!root || root.IsNull()) throw ConfigError("config: document is empty");
  check_keys(root, "config",
             {"environment", "arrays", "paths", "distance_m", "absorption", "options"});

  ScenarioConfig cfg;
  cfg.scenario.env = parse_environment(root["environment"]);
  cfg.scenario.arrays = parse_arrays(root["arrays"]);
  cfg.scenario.paths = parse_paths(root);
  cfg.scenario.absorption = parse_absorption(root["absorption"], base_dir);
  parse_options(root["options"], cfg);
  if (!cfg.scenario.absorption.covers(cfg.scenario.env.carrier_frequency_hz)) {
    throw ConfigError("environment.carrier_frequency_hz: " +
                      format_number(cfg.scenario.env.carrier_frequency_hz) +
                      " Hz is outside the absorption table");
  }
  return cfg;
}

ScenarioConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("config: cannot open " + path.string());
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_config(ss.str(), path.parent_path());
}

std::string canonical_text(const Scenario& s) {
  const auto num = [](double x) { return format_number(x); };
  const auto flag = [](bool b) { return b ? "true" : "false"; };
  std::ostringstream o;
  o << "environment:\n"
    << "  carrier_frequency_hz: " << num(s.env.carrier_frequency_hz) << "\n"
    << "  temperature_k: " << num(s.env.temperature_k) << "\n"
    << "  signal_variance: " << num(s.env.signal_variance) << "\n"
    << "  eve_noise: " << num(s.env.eve_noise) << "\n"
    << "arrays:\n"
    << "  n_tx: " << s.arrays.n_tx << "\n"
    << "  n_rx: " << s.arrays.n_rx << "\n"
    << "  element_gain: " << num(s.arrays.element_gain) << "\n"
    << "  element_spacing_over_lambda: " << num(s.arrays.element_spacing_over_lambda) << "\n"
    << "paths:\n";
  for (const auto& p : s.paths) {
    o << "  - length_m: " << num(p.length_m) << "\n"
      << "    aod_rad: " << num(p.aod_rad) << "\n"
      << "    aoa_rad: " << num(p.aoa_rad) << "\n"
      << "    delay_s: " << num(p.delay_s) << "\n"
      << "    is_los: " << flag(p.is_los) << "\n"
      << "    roughness: " << num(p.roughness) << "\n"
      << "    fresnel: [" << num(p.fresnel.real()) << ", " << num(p.fresnel.imag()) << "]\n";
  }
  o << "absorption:\n  bands:\n";
  for (const auto& b : s.absorption.bands()) {
    o << "    - lo_hz: " << num(b.lo_hz) << "\n"
      << "      hi_hz: " << num(b.hi_hz) << "\n"
      << "      lo_closed: " << flag(b.lo_closed) << "\n"
      << "      hi_closed: " << flag(b.hi_closed) << "\n"
      << "      delta_db_per_km: " << num(b.delta_db_per_km) << "\n";
  }
  o << "options:\n"
    << "  clamp_negative_channels: " << flag(s.keyrate.clamp_negative_channels) << "\n"
    << "  fresnel_mode: " << (s.channel.fresnel_mode == FresnelMode::power ? "power" : "raw") << "\n"
    << "  rank_tolerance: " << num(s.channel.rank_tolerance) << "\n"
    << "  zeta_constant_mode: " << to_string(s.keyrate.zeta_constant) << "\n";
  return o.str();
}

std::string scenario_hash(const Scenario& scenario) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : canonical_text(scenario)) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

}  // namespace thzqkd

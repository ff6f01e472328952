#include "thzqkd/cli.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <limits>
#include <optional>
#include <ostream>
#include <sstream>

#include <CLI11.hpp>

#include "thzqkd/config.hpp"
#include "thzqkd/error.hpp"
#include "thzqkd/units_physics.hpp"

namespace thzqkd {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

Cell num(double x) { return Cell{x}; }
Cell integer(std::int64_t x) { return Cell{x}; }
Cell text(std::string_view s) { return Cell{std::string(s)}; }

std::string join_numbers(const std::vector<double>& xs) {
  std::string out;
  for (std::size_t i = 0; i < xs.size(); ++i) out += (i ? ";" : "") + format_number(xs[i]);
  return out;
}

std::filesystem::path output_path(const std::string& p) {
  std::filesystem::path path(p);
  if (path.is_relative()) {
    if (const char* dir = std::getenv("THZQKD_OUT_DIR"); dir && *dir) return dir / path;
  }
  return path;
}

struct CommonOptions {
  std::string config;
  std::string out;
  std::string plot_script;
  std::vector<std::string> methods;
};

Scenario load_scenario(const CommonOptions& o, RateMethod* method) {
  if (o.config.empty()) throw ConfigError("--config is required");
  ScenarioConfig cfg = load_config(o.config);
  if (method) *method = cfg.method;
  return cfg.scenario;
}

RateMethod single_method(const CommonOptions& o, RateMethod fallback) {
  if (o.methods.empty()) return fallback;
  if (o.methods.size() > 1) throw ConfigError("--method: this subcommand takes one method");
  try {
    return parse_rate_method(o.methods.front());
  } catch (const DomainError& e) {
    throw ConfigError(std::string("--method: ") + e.what());
  }
}

void finish(const Table& table, const CommonOptions& o, std::string_view x, std::string_view y,
            bool log_x, bool log_y) {
  if (o.out.empty()) {
    if (!o.plot_script.empty()) throw ConfigError("--emit-plot-script needs --out");
    return;
  }
  const auto csv_path = output_path(o.out);
  write_csv(table, csv_path);
  if (!o.plot_script.empty()) {
    emit_plot_script(table, csv_path, output_path(o.plot_script), x, y, "method", log_x, log_y);
  }
}

void require_out(const CommonOptions& o) {
  if (o.out.empty()) throw ConfigError("--out is required for this subcommand");
}

}  // namespace

std::vector<std::pair<std::string, std::string>> base_metadata(const Scenario& scenario) {
  return {{"tool", std::string(kToolVersion)},
          {"constants", std::string(constants::version)},
          {"scenario_hash", scenario_hash(scenario)}};
}

Table rate_table(const Scenario& scenario, const RateBreakdown& breakdown) {
  Table t;
  t.metadata = base_metadata(scenario);
  t.metadata.emplace_back("method", std::string(to_string(breakdown.method)));
  t.metadata.emplace_back("total_rate_bits", format_number(breakdown.total_rate_bits));
  t.columns = {"channel", "transmittance", "mutual_info_bits", "holevo_bits", "rate_bits"};
  for (std::size_t i = 0; i < breakdown.per_channel.size(); ++i) {
    const auto& c = breakdown.per_channel[i];
    t.rows.push_back({integer(static_cast<std::int64_t>(i)), num(c.transmittance),
                      num(c.mutual_info_bits), num(c.holevo_bits), num(c.rate_bits)});
  }
  return t;
}

Table distance_sweep_table(const Scenario& scenario, const std::vector<SweepRow>& rows) {
  Table t;
  t.metadata = base_metadata(scenario);
  t.columns = {"distance_m", "method", "total_rate_bits", "zeta", "alpha", "feasible", "status"};
  for (const auto& r : rows) {
    if (r.ok()) {
      t.rows.push_back({num(r.parameter_value), text(to_string(r.method)), num(r.total_rate_bits),
                        num(r.zeta), num(r.alpha), integer(r.feasible ? 1 : 0), text("ok")});
    } else {
      t.rows.push_back({num(r.parameter_value), text(to_string(r.method)), num(kNaN), num(kNaN),
                        num(kNaN), integer(0), text("error: " + r.error)});
    }
  }
  return t;
}

Table frequency_sweep_table(const Scenario& scenario, const std::vector<FrequencyPoint>& points,
                            double target_rate, RateMethod method) {
  Table t;
  t.metadata = base_metadata(scenario);
  t.metadata.emplace_back("target_rate_bits", format_number(target_rate));
  t.columns = {"frequency_hz", "method", "zeta", "max_distance_m", "status"};
  for (const auto& p : points) {
    t.rows.push_back({num(p.frequency_hz), text(to_string(method)), num(p.zeta),
                      num(p.max_distance_m.value_or(kNaN)), text(p.status)});
  }
  return t;
}

Table zeta_table(const Scenario& scenario, const std::vector<ZetaPoint>& points) {
  Table t;
  t.metadata = base_metadata(scenario);
  t.metadata.emplace_back("zeta_constant", std::string(to_string(scenario.keyrate.zeta_constant)));
  t.columns = {"temperature_k", "frequency_hz", "vacuum_variance", "zeta"};
  for (const auto& p : points) {
    t.rows.push_back(
        {num(p.temperature_k), num(p.frequency_hz), num(p.vacuum_variance), num(p.zeta)});
  }
  return t;
}

Table max_distance_table(const Scenario& scenario, const MaxDistanceResult& result,
                         double target_rate, RateMethod method) {
  Table t;
  t.metadata = base_metadata(scenario);
  t.columns = {"target_rate_bits", "method",    "max_distance_m", "rate_bits",
               "iterations",       "residual", "residual_bound"};
  t.rows.push_back({num(target_rate), text(to_string(method)), num(result.distance_m),
                    num(result.rate_bits), integer(result.iterations), num(result.residual),
                    num(result.residual_bound)});
  return t;
}

std::vector<McValidationRow> mc_validate(const ProtocolRun& run) {
  const double n = static_cast<double>(run.n_rounds);
  const double va = run.signal_variance + run.vacuum_variance;
  std::vector<McValidationRow> rows;
  for (std::size_t i = 0; i < run.channels.size(); ++i) {
    const auto& ch = run.channels[i];
    McValidationRow r;
    r.channel = static_cast<int>(i);
    r.transmittance = ch.transmittance;
    r.var_bob = sample_variance(ch.x_bob);
    r.var_bob_expected = ch.transmittance * va + (1.0 - ch.transmittance) * run.eve_noise;
    r.var_bob_se = r.var_bob_expected * std::sqrt(2.0 / (n - 1.0));
    const MutualInfoEstimate mi = estimate_mutual_information(ch.x_alice, ch.x_bob);
    r.mi_bits = mi.bits;
    r.mi_se = mi.standard_error;
    r.mi_expected_bits = mutual_information(ch.transmittance, run.signal_variance,
                                            run.vacuum_variance, run.eve_noise);
    r.within_3se = std::abs(r.var_bob - r.var_bob_expected) <= 3.0 * r.var_bob_se &&
                   std::abs(r.mi_bits - r.mi_expected_bits) <= 3.0 * r.mi_se;
    rows.push_back(r);
  }
  return rows;
}

Table mc_table(const Scenario& scenario, const ProtocolRun& run,
               const std::vector<McValidationRow>& rows) {
  Table t;
  t.metadata = base_metadata(scenario);
  t.metadata.emplace_back("rng", std::string(kRngId));
  t.metadata.emplace_back("seed", std::to_string(run.seed));
  t.metadata.emplace_back("n_rounds", std::to_string(run.n_rounds));
  t.columns = {"channel", "transmittance", "var_bob",         "var_bob_expected", "var_bob_se",
               "mi_bits", "mi_expected_bits", "mi_se", "within_3se"};
  for (const auto& r : rows) {
    t.rows.push_back({integer(r.channel), num(r.transmittance), num(r.var_bob),
                      num(r.var_bob_expected), num(r.var_bob_se), num(r.mi_bits),
                      num(r.mi_expected_bits), num(r.mi_se), integer(r.within_3se ? 1 : 0)});
  }
  return t;
}

int run_cli(std::span<const std::string> args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Terahertz MIMO CV-QKD key-rate toolkit", "thzqkd"};
  app.set_version_flag("--version", std::string(kToolVersion));
  app.require_subcommand(1);

  CommonOptions common;
  const auto add_common = [&](CLI::App* sub) {
    sub->add_option("--config", common.config, "scenario YAML file");
    sub->add_option("--out", common.out, "output CSV path");
    sub->add_option("--emit-plot-script", common.plot_script, "write a matplotlib script for the CSV");
  };
  const auto add_method = [&](CLI::App* sub, bool many) {
    auto* opt = sub->add_option("--method", common.methods,
                                many ? "rate method(s): exact, large_modulation, taylor"
                                     : "rate method: exact, large_modulation, taylor");
    if (many) opt->delimiter(',');
  };

  auto* rate = app.add_subcommand("rate", "key rate of the configured scenario");
  add_common(rate);
  add_method(rate, false);

  double grid_min = 0.01, grid_max = 1000.0;
  int grid_points = 141;
  auto* sweep_d = app.add_subcommand("sweep-distance", "rate against distance (log grid)");
  add_common(sweep_d);
  add_method(sweep_d, true);
  sweep_d->add_option("--grid-min", grid_min, "first distance in m")->capture_default_str();
  sweep_d->add_option("--grid-max", grid_max, "last distance in m")->capture_default_str();
  sweep_d->add_option("--grid-points", grid_points)->capture_default_str();

  double target_rate = 1e-5;
  double f_min = 10e12, f_max = 30e12;
  int f_points = 201;
  double d_hi = 1e4;
  auto* sweep_f = app.add_subcommand("sweep-frequency", "max distance against carrier frequency");
  add_common(sweep_f);
  add_method(sweep_f, false);
  sweep_f->add_option("--target-rate", target_rate, "target rate in bits")->capture_default_str();
  sweep_f->add_option("--f-min", f_min)->capture_default_str();
  sweep_f->add_option("--f-max", f_max)->capture_default_str();
  sweep_f->add_option("--f-points", f_points)->capture_default_str();
  sweep_f->add_option("--d-max", d_hi, "upper end of the distance bracket in m")->capture_default_str();

  double t_min = 100.0, t_max = 400.0;
  int t_points = 301;
  std::vector<double> zeta_freqs{1e12, 10e12, 15e12, 30e12};
  std::string zeta_mode;
  auto* sweep_z = app.add_subcommand("sweep-temperature-zeta", "zeta against temperature");
  add_common(sweep_z);
  sweep_z->add_option("--t-min", t_min)->capture_default_str();
  sweep_z->add_option("--t-max", t_max)->capture_default_str();
  sweep_z->add_option("--t-points", t_points)->capture_default_str();
  sweep_z->add_option("--frequencies", zeta_freqs, "carrier frequencies in Hz")->delimiter(',');
  sweep_z->add_option("--zeta-constant", zeta_mode, "literal or analytic");

  std::optional<double> d_lo;
  auto* maxd = app.add_subcommand("max-distance", "distance at which the rate falls to a target");
  add_common(maxd);
  add_method(maxd, false);
  maxd->add_option("--target-rate", target_rate, "target rate in bits")->capture_default_str();
  maxd->add_option("--d-min", d_lo, "lower end of the bracket in m (default: nearest physical distance)");
  maxd->add_option("--d-max", d_hi, "upper end of the bracket in m")->capture_default_str();

  std::uint64_t seed = 0;
  std::uint64_t rounds = 100000;
  std::string samples;
  auto* mc = app.add_subcommand("mc-validate", "Monte Carlo check of variances and mutual information");
  add_common(mc);
  mc->add_option("--seed", seed)->capture_default_str();
  mc->add_option("--rounds", rounds)->capture_default_str();
  mc->add_option("--samples", samples, "also dump raw samples to this CSV");

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kExitOk : kExitConfig;
  }

  try {
    if (rate->parsed()) {
      RateMethod method = RateMethod::large_modulation;
      const Scenario s = load_scenario(common, &method);
      method = single_method(common, method);
      const RateBreakdown rb = scenario_rate(s, method);
      const Table t = rate_table(s, rb);
      finish(t, common, "channel", "rate_bits", false, false);
      std::vector<double> per;
      for (const auto& c : rb.per_channel) per.push_back(c.rate_bits);
      out << "method=" << to_string(method) << " total_rate_bits=" << format_number(rb.total_rate_bits)
          << " channels=" << per.size() << " per_channel_bits=" << join_numbers(per) << "\n";
    } else if (sweep_d->parsed()) {
      require_out(common);
      SweepSpec spec;
      RateMethod method = RateMethod::large_modulation;
      spec.scenario = load_scenario(common, &method);
      spec.parameter = SweepParameter::distance_m;
      if (!(grid_min > 0.0 && grid_max > grid_min && grid_points >= 2)) {
        throw ConfigError("--grid-min/--grid-max/--grid-points: need 0 < min < max and >= 2 points");
      }
      spec.grid = logspace(grid_min, grid_max, grid_points);
      spec.methods.clear();
      try {
        for (const auto& m : common.methods) spec.methods.push_back(parse_rate_method(m));
      } catch (const DomainError& e) {
        throw ConfigError(std::string("--method: ") + e.what());
      }
      if (spec.methods.empty()) spec.methods.push_back(method);
      const auto rows = sweep(spec);
      const Table t = distance_sweep_table(spec.scenario, rows);
      finish(t, common, "distance_m", "total_rate_bits", true, true);
      const auto failed = std::count_if(rows.begin(), rows.end(), [](const SweepRow& r) { return !r.ok(); });
      out << "rows=" << rows.size() << " failed=" << failed << " out=" << output_path(common.out).string() << "\n";
    } else if (sweep_f->parsed()) {
      require_out(common);
      RateMethod method = RateMethod::large_modulation;
      const Scenario s = load_scenario(common, &method);
      method = single_method(common, method);
      if (!(target_rate > 0.0)) throw ConfigError("--target-rate must be positive");
      if (!(f_min > 0.0 && f_max >= f_min && f_points >= 1)) {
        throw ConfigError("--f-min/--f-max/--f-points: need 0 < min <= max and >= 1 point");
      }
      const auto points = frequency_profile(s, target_rate, method, linspace(f_min, f_max, f_points), d_hi);
      const Table t = frequency_sweep_table(s, points, target_rate, method);
      finish(t, common, "frequency_hz", "max_distance_m", false, true);
      const auto ok = std::count_if(points.begin(), points.end(),
                                    [](const FrequencyPoint& p) { return p.max_distance_m.has_value(); });
      out << "rows=" << points.size() << " with_distance=" << ok << " out=" << output_path(common.out).string() << "\n";
    } else if (sweep_z->parsed()) {
      require_out(common);
      Scenario s = common.config.empty() ? los_scenario(15e12, 1, 1.0) : load_scenario(common, nullptr);
      if (!zeta_mode.empty()) {
        try {
          s.keyrate.zeta_constant = parse_zeta_constant(zeta_mode);
        } catch (const DomainError& e) {
          throw ConfigError(std::string("--zeta-constant: ") + e.what());
        }
      }
      if (!(t_min > 0.0 && t_max >= t_min && t_points >= 1)) {
        throw ConfigError("--t-min/--t-max/--t-points: need 0 < min <= max and >= 1 point");
      }
      const auto points = zeta_temperature_sweep(s.env.signal_variance, s.env.eve_noise, zeta_freqs,
                                                 linspace(t_min, t_max, t_points), s.keyrate.zeta_constant);
      const Table t = zeta_table(s, points);
      finish(t, common, "temperature_k", "zeta", false, false);
      out << "rows=" << points.size() << " out=" << output_path(common.out).string() << "\n";
    } else if (maxd->parsed()) {
      RateMethod method = RateMethod::large_modulation;
      const Scenario s = load_scenario(common, &method);
      method = single_method(common, method);
      if (!(target_rate > 0.0)) throw ConfigError("--target-rate must be positive");
      const double lo = d_lo ? *d_lo : min_physical_distance(s, d_hi);
      const MaxDistanceResult r = max_distance(s, target_rate, method, lo, d_hi);
      const Table t = max_distance_table(s, r, target_rate, method);
      finish(t, common, "target_rate_bits", "max_distance_m", false, false);
      out << "method=" << to_string(method) << " target_rate_bits=" << format_number(target_rate)
          << " max_distance_m=" << format_number(r.distance_m) << " iterations=" << r.iterations << "\n";
    } else if (mc->parsed()) {
      require_out(common);
      const Scenario s = load_scenario(common, nullptr);
      if (rounds < 10000) throw ConfigError("--rounds must be >= 10000");
      const auto transmittances = scenario_transmittances(s);
      const ProtocolRun run = simulate(transmittances, s.env, rounds, seed);
      const auto rows = mc_validate(run);
      const Table t = mc_table(s, run, rows);
      finish(t, common, "transmittance", "mi_bits", false, false);
      if (!samples.empty()) write_samples_csv(run, output_path(samples));
      const auto ok = std::count_if(rows.begin(), rows.end(), [](const McValidationRow& r) { return r.within_3se; });
      out << "channels=" << rows.size() << " within_3se=" << ok << " seed=" << seed
          << " out=" << output_path(common.out).string() << "\n";
    }
  } catch (const ConfigError& e) {
    err << "config error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const NumericalError& e) {
    err << "numerical error: " << e.what() << "\n";
    return kExitNumerical;
  } catch (const DomainError& e) {
    err << "domain error: " << e.what() << "\n";
    return kExitNumerical;
  } catch (const Error& e) {
    err << "error: " << e.what() << "\n";
    return kExitConfig;
  }
  return kExitOk;
}

}  // namespace thzqkd

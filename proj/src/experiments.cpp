#include "thzqkd/experiments.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "thzqkd/error.hpp"

namespace thzqkd {

namespace {

constexpr double kBisectionRelativeWidth = 1e-4;
constexpr double kMinProbeDistance = 1e-6;

constexpr double kOpaqueSingularValue = 1e-30;

// An opaque channel carries no eigenmodes and so no key.
double total_rate_at(const Scenario& scenario, double distance_m, RateMethod method) {
  const Scenario moved = with_distance(scenario, distance_m);
  const auto sv = factored_singular_values(moved.paths, moved.env, moved.arrays, moved.absorption,
                                           moved.channel.fresnel_mode);
  if (sv.empty() || sv.front() <= kOpaqueSingularValue) return 0.0;
  return scenario_rate(moved, method).total_rate_bits;
}

double max_transmittance_at(const Scenario& s, double distance_m) {
  const Scenario moved = with_distance(s, distance_m);
  const auto sv = factored_singular_values(moved.paths, moved.env, moved.arrays, moved.absorption,
                                           moved.channel.fresnel_mode);
  return sv.empty() ? 0.0 : sv.front() * sv.front();
}

Scenario at_grid_point(const Scenario& base, SweepParameter parameter, double value) {
  switch (parameter) {
    case SweepParameter::distance_m:
      return with_distance(base, value);
    case SweepParameter::frequency_hz:
      return with_frequency(base, value);
    case SweepParameter::temperature_k:
      return with_temperature(base, value);
    case SweepParameter::array_size: {
      const double n = std::round(value);
      if (n < 1.0 || n != value) {
        throw DomainError("array_size grid values must be positive integers");
      }
      return with_array_size(base, static_cast<int>(n));
    }
  }
  return base;
}

}  // namespace

void Scenario::validate() const {
  env.validate();
  arrays.validate();
  validate_paths(paths);
  if (absorption.empty()) throw DomainError("absorption: table is empty");
  if (!(channel.rank_tolerance > 0.0 && channel.rank_tolerance < 1.0)) {
    throw DomainError("options.rank_tolerance must lie in (0, 1)");
  }
}

Scenario los_scenario(double carrier_frequency_hz, int n_antennas, double distance_m) {
  Scenario s;
  s.env.carrier_frequency_hz = carrier_frequency_hz;
  s.env.temperature_k = 296.0;
  s.env.signal_variance = 1e3;
  s.env.eve_noise = 1.0;
  s.arrays.n_tx = n_antennas;
  s.arrays.n_rx = n_antennas;
  s.arrays.element_gain = 1000.0;  // 30 dBi
  PathSpec los;
  los.length_m = distance_m;
  los.delay_s = distance_m / constants::speed_of_light;
  los.is_los = true;
  s.paths = {los};
  return s;
}

Scenario with_distance(Scenario scenario, double distance_m) {
  if (!(distance_m > 0.0)) throw DomainError("distance must be positive");
  auto los = std::find_if(scenario.paths.begin(), scenario.paths.end(),
                          [](const PathSpec& p) { return p.is_los; });
  if (los == scenario.paths.end()) throw DomainError("paths: no LoS path to rescale");
  const double factor = distance_m / los->length_m;
  for (auto& p : scenario.paths) {
    p.length_m *= factor;
    p.delay_s *= factor;
  }
  los->length_m = distance_m;
  return scenario;
}

Scenario with_frequency(Scenario scenario, double carrier_frequency_hz) {
  scenario.env.carrier_frequency_hz = carrier_frequency_hz;
  return scenario;
}

Scenario with_temperature(Scenario scenario, double temperature_k) {
  scenario.env.temperature_k = temperature_k;
  return scenario;
}

Scenario with_array_size(Scenario scenario, int n_antennas) {
  scenario.arrays.n_tx = n_antennas;
  scenario.arrays.n_rx = n_antennas;
  return scenario;
}

std::vector<double> scenario_transmittances(const Scenario& scenario) {
  scenario.validate();
  return factored_transmittances(scenario.paths, scenario.env, scenario.arrays,
                                 scenario.absorption, scenario.channel);
}

RateBreakdown scenario_rate(const Scenario& scenario, RateMethod method) {
  const auto t = scenario_transmittances(scenario);
  return rate_mimo(t, scenario.env, method, scenario.keyrate);
}

std::string_view to_string(SweepParameter parameter) {
  switch (parameter) {
    case SweepParameter::distance_m:
      return "distance_m";
    case SweepParameter::frequency_hz:
      return "frequency_hz";
    case SweepParameter::temperature_k:
      return "temperature_k";
    case SweepParameter::array_size:
      return "array_size";
  }
  return "unknown";
}

std::vector<SweepRow> sweep(const SweepSpec& spec) {
  if (spec.grid.empty()) throw DomainError("sweep: grid is empty");
  for (std::size_t i = 1; i < spec.grid.size(); ++i) {
    if (!(spec.grid[i] > spec.grid[i - 1])) {
      throw DomainError("sweep: grid must be strictly increasing");
    }
  }
  if (spec.methods.empty()) throw DomainError("sweep: no rate methods requested");

  std::vector<SweepRow> rows;
  rows.reserve(spec.grid.size() * spec.methods.size());
  for (double value : spec.grid) {
    std::vector<double> t;
    Scenario point;
    std::string failure;
    try {
      point = at_grid_point(spec.scenario, spec.parameter, value);
      t = scenario_transmittances(point);
    } catch (const Error& e) {
      failure = e.what();
    }
    for (RateMethod method : spec.methods) {
      SweepRow row;
      row.parameter_value = value;
      row.method = method;
      row.error = failure;
      if (failure.empty()) {
        try {
          const RateBreakdown rb = rate_mimo(t, point.env, method, point.keyrate);
          row.total_rate_bits = rb.total_rate_bits;
          for (const auto& c : rb.per_channel) row.per_channel_rates.push_back(c.rate_bits);
          const Feasibility f = feasibility_threshold(t, point.env, point.keyrate);
          row.zeta = f.zeta;
          row.alpha = f.alpha;
          row.feasible = f.feasible;
        } catch (const Error& e) {
          row.error = e.what();
        }
      }
      rows.push_back(std::move(row));
    }
  }
  return rows;
}

MaxDistanceResult max_distance(const Scenario& scenario, double target_rate, RateMethod method,
                               double d_lo, double d_hi) {
  if (!(target_rate > 0.0)) throw DomainError("max_distance: target rate must be positive");
  if (!(d_lo > 0.0 && d_hi > d_lo)) {
    throw DomainError("max_distance: need 0 < d_lo < d_hi");
  }
  double r_lo = total_rate_at(scenario, d_lo, method);
  double r_hi = total_rate_at(scenario, d_hi, method);
  if (!(r_lo > target_rate && target_rate > r_hi)) {
    throw BracketError("max_distance: target " + std::to_string(target_rate) +
                           " not bracketed: rate(" + std::to_string(d_lo) + " m) = " +
                           std::to_string(r_lo) + ", rate(" + std::to_string(d_hi) +
                           " m) = " + std::to_string(r_hi),
                       r_lo, r_hi);
  }

  MaxDistanceResult result;
  double lo = d_lo;
  double hi = d_hi;
  while (hi - lo > kBisectionRelativeWidth * lo) {
    // geometric steps while the bracket spans decades
    const double mid = hi > 2.0 * lo ? std::sqrt(lo * hi) : 0.5 * (lo + hi);
    const double r_mid = total_rate_at(scenario, mid, method);
    ++result.iterations;
    if (r_mid > r_lo || r_mid < r_hi) {
      throw NumericalError("max_distance: rate is not decreasing in distance near " +
                           std::to_string(mid) + " m");
    }
    if (r_mid > target_rate) {
      lo = mid;
      r_lo = r_mid;
    } else {
      hi = mid;
      r_hi = r_mid;
    }
  }
  result.distance_m = 0.5 * (lo + hi);
  result.rate_bits = total_rate_at(scenario, result.distance_m, method);
  result.residual = std::abs(result.rate_bits - target_rate);
  result.residual_bound = std::abs(r_lo - r_hi);
  return result;
}

double min_physical_distance(const Scenario& scenario, double d_max) {
  scenario.validate();
  if (max_transmittance_at(scenario, kMinProbeDistance) <= 1.0) return kMinProbeDistance;
  if (max_transmittance_at(scenario, d_max) > 1.0) {
    throw DomainError("min_physical_distance: transmittance exceeds 1 even at " +
                      std::to_string(d_max) + " m");
  }
  double lo = kMinProbeDistance;
  double hi = d_max;
  while (hi - lo > 1e-9 * hi) {
    const double mid = hi > 2.0 * lo ? std::sqrt(lo * hi) : 0.5 * (lo + hi);
    (max_transmittance_at(scenario, mid) > 1.0 ? lo : hi) = mid;
  }
  return hi;
}

FrequencyPoint max_distance_at_frequency(const Scenario& scenario, double target_rate,
                                         RateMethod method, double frequency_hz, double d_hi) {
  FrequencyPoint pt;
  pt.frequency_hz = frequency_hz;
  try {
    const Scenario s = with_frequency(scenario, frequency_hz);
    s.env.validate();
    pt.zeta = zeta_coefficient(s.env.signal_variance, vacuum_variance(s.env), s.env.eve_noise,
                               s.keyrate.zeta_constant);
    // alpha >= 0, so zeta <= 0 already fails the necessary condition
    if (pt.zeta <= 0.0) {
      pt.status = "infeasible: zeta <= 0";
      return pt;
    }
    if (!s.absorption.covers(frequency_hz)) {
      pt.status = "error: frequency outside the absorption table";
      return pt;
    }
    const double d_lo = min_physical_distance(s, d_hi);
    const double r_lo = total_rate_at(s, d_lo, method);
    if (!(r_lo > target_rate)) {
      pt.status = "infeasible: rate below target at every physical distance";
      return pt;
    }
    pt.max_distance_m = max_distance(s, target_rate, method, d_lo, d_hi).distance_m;
    pt.status = "ok";
  } catch (const Error& e) {
    pt.status = std::string("error: ") + e.what();
  }
  return pt;
}

std::vector<FrequencyPoint> frequency_profile(const Scenario& scenario, double target_rate,
                                              RateMethod method,
                                              const std::vector<double>& frequency_grid,
                                              double d_hi) {
  std::vector<FrequencyPoint> out;
  out.reserve(frequency_grid.size());
  for (double f : frequency_grid) {
    out.push_back(max_distance_at_frequency(scenario, target_rate, method, f, d_hi));
  }
  return out;
}

std::vector<ZetaPoint> zeta_temperature_sweep(double signal_variance, double eve_noise,
                                              const std::vector<double>& frequencies_hz,
                                              const std::vector<double>& temperatures_k,
                                              ZetaConstant mode) {
  std::vector<ZetaPoint> out;
  for (double temperature : temperatures_k) {
    for (double f : frequencies_hz) {
      EnvironmentParams env{f, temperature, signal_variance, eve_noise};
      ZetaPoint p;
      p.temperature_k = temperature;
      p.frequency_hz = f;
      p.vacuum_variance = vacuum_variance(env);
      p.zeta = zeta_coefficient(signal_variance, p.vacuum_variance, eve_noise, mode);
      out.push_back(p);
    }
  }
  return out;
}

std::vector<double> linspace(double lo, double hi, int n) {
  if (n < 1) throw DomainError("linspace: n must be >= 1");
  if (n == 1) return {lo};
  std::vector<double> out(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) out[i] = lo + (hi - lo) * i / (n - 1);
  out.back() = hi;
  return out;
}

std::vector<double> logspace(double lo, double hi, int n) {
  if (!(lo > 0.0 && hi > 0.0)) throw DomainError("logspace: bounds must be positive");
  auto exps = linspace(std::log10(lo), std::log10(hi), n);
  for (auto& e : exps) e = std::pow(10.0, e);
  exps.front() = lo;
  exps.back() = hi;
  return exps;
}

std::vector<double> default_distance_grid() { return logspace(0.01, 1000.0, 141); }

std::vector<double> default_frequency_grid() {
  std::vector<double> out;
  for (int k = 0; k <= 200; ++k) out.push_back(10e12 + k * 0.1e12);
  return out;
}

std::vector<double> default_temperature_grid() { return linspace(100.0, 400.0, 301); }

}  // namespace thzqkd

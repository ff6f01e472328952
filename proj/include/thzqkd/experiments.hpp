#pragma once

// Parameter sweeps and max-distance root finding on top of the channel and
// key-rate modules.

#include <optional>
#include <string>
#include <vector>

#include "thzqkd/channel_model.hpp"
#include "thzqkd/keyrate.hpp"
#include "thzqkd/units_physics.hpp"

namespace thzqkd {

struct Scenario {
  EnvironmentParams env;
  ArrayConfig arrays;
  std::vector<PathSpec> paths;
  AbsorptionTable absorption = AbsorptionTable::default_terahertz();
  ChannelOptions channel;
  KeyRateOptions keyrate;

  void validate() const;
};

// Single LoS path at `distance_m`, broadside, G_a = 30 dBi, V_s = 1e3, W = 1,
// 296 K.
Scenario los_scenario(double carrier_frequency_hz, int n_antennas, double distance_m);

// Rescales every path length (and delay) so the LoS path has length d.
Scenario with_distance(Scenario scenario, double distance_m);
Scenario with_frequency(Scenario scenario, double carrier_frequency_hz);
Scenario with_temperature(Scenario scenario, double temperature_k);
Scenario with_array_size(Scenario scenario, int n_antennas);

std::vector<double> scenario_transmittances(const Scenario& scenario);
RateBreakdown scenario_rate(const Scenario& scenario, RateMethod method);

enum class SweepParameter { distance_m, frequency_hz, temperature_k, array_size };

std::string_view to_string(SweepParameter parameter);

struct SweepSpec {
  SweepParameter parameter = SweepParameter::distance_m;
  std::vector<double> grid;
  Scenario scenario;
  std::vector<RateMethod> methods{RateMethod::large_modulation};
};

struct SweepRow {
  double parameter_value = 0.0;
  RateMethod method = RateMethod::large_modulation;
  double total_rate_bits = 0.0;
  std::vector<double> per_channel_rates;
  double zeta = 0.0;
  double alpha = 0.0;
  bool feasible = false;
  std::string error;  // empty on success

  bool ok() const { return error.empty(); }
};

// One row per (grid point, method), grid-major. Failures at a grid point are
// recorded in the row. Throws DomainError for an empty or non-increasing
// grid.
std::vector<SweepRow> sweep(const SweepSpec& spec);

struct MaxDistanceResult {
  double distance_m = 0.0;
  double rate_bits = 0.0;  // rate at distance_m
  int iterations = 0;
  // |rate(d) - target| and the bound |slope| * bracket width it should sit
  // under.
  double residual = 0.0;
  double residual_bound = 0.0;
};

// Bisection on d in [d_lo, d_hi] to relative width 1e-4. Throws BracketError
// unless rate(d_lo) > target > rate(d_hi), NumericalError if the rate is
// seen increasing with distance.
MaxDistanceResult max_distance(const Scenario& scenario, double target_rate, RateMethod method,
                               double d_lo, double d_hi);

// Smallest distance at which every eigenmode transmittance is <= 1.
double min_physical_distance(const Scenario& scenario, double d_max = 1e4);

struct FrequencyPoint {
  double frequency_hz = 0.0;
  double zeta = 0.0;
  std::optional<double> max_distance_m;
  std::string status;  // "ok", "infeasible: ...", or an error message
};

FrequencyPoint max_distance_at_frequency(const Scenario& scenario, double target_rate,
                                         RateMethod method, double frequency_hz,
                                         double d_hi = 1e4);

std::vector<FrequencyPoint> frequency_profile(const Scenario& scenario, double target_rate,
                                              RateMethod method,
                                              const std::vector<double>& frequency_grid,
                                              double d_hi = 1e4);

struct ZetaPoint {
  double temperature_k = 0.0;
  double frequency_hz = 0.0;
  double vacuum_variance = 1.0;
  double zeta = 0.0;
};

// Temperature-major.
std::vector<ZetaPoint> zeta_temperature_sweep(double signal_variance, double eve_noise,
                                              const std::vector<double>& frequencies_hz,
                                              const std::vector<double>& temperatures_k,
                                              ZetaConstant mode = ZetaConstant::literal);

std::vector<double> linspace(double lo, double hi, int n);
std::vector<double> logspace(double lo, double hi, int n);

// 0.01 to 1000 m log-spaced; 10 to 30 THz in 0.1 THz steps; 100 to 400 K.
std::vector<double> default_distance_grid();
std::vector<double> default_frequency_grid();
std::vector<double> default_temperature_grid();

}  // namespace thzqkd

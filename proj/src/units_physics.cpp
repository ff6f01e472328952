#include "thzqkd/units_physics.hpp"

#include <cmath>
#include <limits>
#include <string>

#include "thzqkd/error.hpp"

namespace thzqkd {

void EnvironmentParams::validate() const {
  if (!(carrier_frequency_hz > 0.0) || !std::isfinite(carrier_frequency_hz)) {
    throw DomainError("environment.carrier_frequency_hz must be positive and finite");
  }
  if (!(temperature_k > 0.0) || !std::isfinite(temperature_k)) {
    throw DomainError("environment.temperature_k must be positive and finite");
  }
  if (!(signal_variance > 0.0) || !std::isfinite(signal_variance)) {
    throw DomainError("environment.signal_variance must be positive and finite");
  }
  if (!(eve_noise >= 1.0) || !std::isfinite(eve_noise)) {
    throw DomainError("environment.eve_noise must be >= 1 (shot-noise units)");
  }
}

double wavelength_m(double carrier_frequency_hz) {
  return constants::speed_of_light / carrier_frequency_hz;
}

double mean_thermal_photons(double carrier_frequency_hz, double temperature_k) {
  const double x =
      constants::planck_h * carrier_frequency_hz / (constants::boltzmann_k * temperature_k);
  // exp(x) overflows past ~709.78
  if (x > std::log(std::numeric_limits<double>::max())) return 0.0;
  return 1.0 / std::expm1(x);
}

double mean_thermal_photons(const EnvironmentParams& env) {
  env.validate();
  return mean_thermal_photons(env.carrier_frequency_hz, env.temperature_k);
}

double vacuum_variance(const EnvironmentParams& env) { return 2.0 * mean_thermal_photons(env) + 1.0; }

double bosonic_entropy(double x) {
  if (std::isnan(x) || x < 1.0 - kEntropyClampTolerance) {
    throw DomainError("bosonic_entropy: argument " + std::to_string(x) + " is below 1");
  }
  if (x <= 1.0) return 0.0;
  const double plus = 0.5 * (x + 1.0);
  const double minus = 0.5 * (x - 1.0);
  return plus * std::log2(plus) - minus * std::log2(minus);
}

double lambda_mix(double transmittance, double x, double y) {
  constexpr double tol = 1e-12;
  if (!(transmittance >= -tol && transmittance <= 1.0 + tol)) {
    throw DomainError("lambda_mix: transmittance " + std::to_string(transmittance) +
                      " outside [0, 1]");
  }
  return transmittance * x + (1.0 - transmittance) * y;
}

}  // namespace thzqkd

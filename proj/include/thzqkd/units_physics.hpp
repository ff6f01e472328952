#pragma once

// Physical constants, thermal photon statistics and the bosonic entropy
// function.
//
// Shot-noise units throughout: quadratures are q = a + a^dag and
// p = i(a^dag - a), so the zero-temperature vacuum has quadrature variance 1
// and a thermal vacuum at mean occupation nbar has variance 2*nbar + 1.

#include <string_view>

namespace thzqkd {

namespace constants {
// CODATA-2018 (exact SI values).
inline constexpr double planck_h = 6.62607015e-34;      // J s
inline constexpr double boltzmann_k = 1.380649e-23;     // J / K
inline constexpr double speed_of_light = 299792458.0;   // m / s
inline constexpr std::string_view version = "CODATA-2018";
}  // namespace constants

// Symplectic eigenvalues of pure states come out of the eigensolver slightly
// below 1; inputs in [1 - kEntropyClampTolerance, 1) are treated as 1.
inline constexpr double kEntropyClampTolerance = 1e-9;

struct EnvironmentParams {
  double carrier_frequency_hz = 15e12;
  double temperature_k = 296.0;
  double signal_variance = 1e3;  // V_s, SNU
  double eve_noise = 1.0;        // W, SNU; 1 means vacuum injection

  // Throws DomainError naming the first violated invariant.
  void validate() const;
};

double wavelength_m(double carrier_frequency_hz);

// Bose-Einstein occupation 1 / (exp(h f / k T) - 1). Returns 0 once the
// exponent exceeds the double range.
double mean_thermal_photons(const EnvironmentParams& env);
double mean_thermal_photons(double carrier_frequency_hz, double temperature_k);

// V_0 = 2 nbar + 1.
double vacuum_variance(const EnvironmentParams& env);

// h(x) = (x+1)/2 log2((x+1)/2) - (x-1)/2 log2((x-1)/2), with h(1) = 0.
double bosonic_entropy(double x);

// T x + (1 - T) y.
double lambda_mix(double transmittance, double x, double y);

}  // namespace thzqkd

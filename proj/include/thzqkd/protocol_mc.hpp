#pragma once

// Sample-level simulation of the Gaussian-modulated coherent-state protocol
// over parallel eigenmode channels. All states and measurements are
// Gaussian, so classical Gaussian draws reproduce homodyne outcomes exactly.

#include <cstdint>
#include <filesystem>
#include <span>
#include <string_view>
#include <vector>

#include "thzqkd/channel_model.hpp"
#include "thzqkd/gaussian_core.hpp"
#include "thzqkd/units_physics.hpp"

namespace thzqkd {

// One mt19937_64 stream per channel, seeded with seed_seq{seed_lo, seed_hi,
// channel}; normals by Box-Muller. std::normal_distribution is avoided
// because its output is implementation-defined.
inline constexpr std::string_view kRngId = "mt19937_64+seed_seq(seed,channel)+box-muller/v1";

struct ChannelSamples {
  double transmittance = 0.0;
  std::vector<Quadrature> quadrature;
  std::vector<double> x_alice;  // encoded signal s
  std::vector<double> x_bob;    // sqrt(T)(s + v) + sqrt(1-T) e
  std::vector<double> x_eve;    // -sqrt(1-T)(s + v) + sqrt(T) e
};

struct ProtocolRun {
  std::uint64_t n_rounds = 0;
  std::uint64_t seed = 0;
  double signal_variance = 0.0;
  double vacuum_variance = 1.0;
  double eve_noise = 1.0;
  std::vector<ChannelSamples> channels;
};

ProtocolRun simulate(std::span<const double> transmittances, const EnvironmentParams& env,
                     std::uint64_t n_rounds, std::uint64_t seed);
ProtocolRun simulate(const ChannelDecomposition& dec, const EnvironmentParams& env,
                     std::uint64_t n_rounds, std::uint64_t seed);

double sample_mean(std::span<const double> x);
double sample_variance(std::span<const double> x);
double sample_covariance(std::span<const double> x, std::span<const double> y);

struct MutualInfoEstimate {
  double bits = 0.0;
  // Delta-method standard error rho / (ln 2 sqrt(n)).
  double standard_error = 0.0;
};

// Gaussian plug-in estimate 1/2 log2(Var(bob) / Var(bob | alice)), the
// conditional variance taken from the least-squares residual. Throws
// DomainError for fewer than 2 samples or Var(alice) < 1e-12.
MutualInfoEstimate estimate_mutual_information(std::span<const double> x_alice,
                                               std::span<const double> x_bob);

// Per channel; requires n_rounds >= 1e4.
std::vector<double> empirical_mutual_information(const ProtocolRun& run);

std::vector<std::span<const double>> eve_ancilla_samples(const ProtocolRun& run);

// Columns: round, channel, quadrature, x_alice, x_bob.
void write_samples_csv(const ProtocolRun& run, const std::filesystem::path& path);

}  // namespace thzqkd

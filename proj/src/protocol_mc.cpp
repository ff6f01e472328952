#include "thzqkd/protocol_mc.hpp"

#include <cmath>
#include <fstream>
#include <numbers>
#include <random>
#include <string>

#include "thzqkd/csv.hpp"
#include "thzqkd/error.hpp"

namespace thzqkd {

namespace {

class NormalStream {
 public:
  NormalStream(std::uint64_t seed, std::uint64_t channel) {
    std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                      static_cast<std::uint32_t>(channel),
                      static_cast<std::uint32_t>(channel >> 32)};
    engine_.seed(seq);
  }

  bool coin() { return (engine_() >> 63) != 0; }

  double standard_normal() {
    if (has_spare_) {
      has_spare_ = false;
      return spare_;
    }
    const double u1 = uniform_open_closed();
    const double u2 = uniform_open_closed();
    const double radius = std::sqrt(-2.0 * std::log(u1));
    const double angle = 2.0 * std::numbers::pi * u2;
    spare_ = radius * std::sin(angle);
    has_spare_ = true;
    return radius * std::cos(angle);
  }

 private:
  // (0, 1] with 53 random bits.
  double uniform_open_closed() {
    return static_cast<double>((engine_() >> 11) + 1) * 0x1.0p-53;
  }

  std::mt19937_64 engine_;
  double spare_ = 0.0;
  bool has_spare_ = false;
};

}  // namespace

ProtocolRun simulate(std::span<const double> transmittances, const EnvironmentParams& env,
                     std::uint64_t n_rounds, std::uint64_t seed) {
  env.validate();
  if (n_rounds < 1) throw DomainError("simulate: n_rounds must be >= 1");
  ProtocolRun run;
  run.n_rounds = n_rounds;
  run.seed = seed;
  run.signal_variance = env.signal_variance;
  run.vacuum_variance = vacuum_variance(env);
  run.eve_noise = env.eve_noise;

  const double sd_signal = std::sqrt(run.signal_variance);
  const double sd_prep = std::sqrt(run.vacuum_variance);
  const double sd_eve = std::sqrt(run.eve_noise);
  for (std::size_t c = 0; c < transmittances.size(); ++c) {
    const double t = transmittances[c];
    if (!(t >= 0.0 && t <= 1.0)) throw DomainError("simulate: transmittance outside [0, 1]");
    const double through = std::sqrt(t);
    const double leak = std::sqrt(1.0 - t);

    ChannelSamples ch;
    ch.transmittance = t;
    ch.quadrature.reserve(n_rounds);
    ch.x_alice.reserve(n_rounds);
    ch.x_bob.reserve(n_rounds);
    ch.x_eve.reserve(n_rounds);
    NormalStream rng(seed, c);
    for (std::uint64_t n = 0; n < n_rounds; ++n) {
      ch.quadrature.push_back(rng.coin() ? Quadrature::p : Quadrature::q);
      const double s = sd_signal * rng.standard_normal();
      const double v = sd_prep * rng.standard_normal();
      const double e = sd_eve * rng.standard_normal();
      const double sent = s + v;
      ch.x_alice.push_back(s);
      ch.x_bob.push_back(through * sent + leak * e);
      ch.x_eve.push_back(-leak * sent + through * e);
    }
    run.channels.push_back(std::move(ch));
  }
  return run;
}

ProtocolRun simulate(const ChannelDecomposition& dec, const EnvironmentParams& env,
                     std::uint64_t n_rounds, std::uint64_t seed) {
  return simulate(dec.transmittances, env, n_rounds, seed);
}

double sample_mean(std::span<const double> x) {
  if (x.empty()) throw DomainError("sample_mean: no samples");
  double sum = 0.0;
  for (double v : x) sum += v;
  return sum / static_cast<double>(x.size());
}

double sample_covariance(std::span<const double> x, std::span<const double> y) {
  if (x.size() != y.size()) throw DomainError("sample_covariance: length mismatch");
  if (x.size() < 2) throw DomainError("sample_covariance: need at least 2 samples");
  const double mx = sample_mean(x);
  const double my = sample_mean(y);
  double acc = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) acc += (x[i] - mx) * (y[i] - my);
  return acc / static_cast<double>(x.size() - 1);
}

double sample_variance(std::span<const double> x) { return sample_covariance(x, x); }

MutualInfoEstimate estimate_mutual_information(std::span<const double> x_alice,
                                               std::span<const double> x_bob) {
  const double var_a = sample_variance(x_alice);
  if (var_a < 1e-12) throw DomainError("estimate_mutual_information: degenerate Alice samples");
  const double var_b = sample_variance(x_bob);
  const double cov_ab = sample_covariance(x_alice, x_bob);
  const double residual = var_b - cov_ab * cov_ab / var_a;
  MutualInfoEstimate est;
  est.bits = 0.5 * std::log2(var_b / residual);
  const double rho = cov_ab / std::sqrt(var_a * var_b);
  est.standard_error =
      std::abs(rho) / (std::numbers::ln2 * std::sqrt(static_cast<double>(x_alice.size())));
  return est;
}

std::vector<double> empirical_mutual_information(const ProtocolRun& run) {
  if (run.n_rounds < 10000) {
    throw DomainError("empirical_mutual_information: needs at least 1e4 rounds");
  }
  std::vector<double> out;
  for (const auto& ch : run.channels) {
    out.push_back(estimate_mutual_information(ch.x_alice, ch.x_bob).bits);
  }
  return out;
}

std::vector<std::span<const double>> eve_ancilla_samples(const ProtocolRun& run) {
  std::vector<std::span<const double>> out;
  for (const auto& ch : run.channels) out.emplace_back(ch.x_eve);
  return out;
}

void write_samples_csv(const ProtocolRun& run, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw Error("cannot open " + path.string() + " for writing");
  out << "# rng: " << kRngId << "\n# seed: " << run.seed << "\n";
  out << "round,channel,quadrature,x_alice,x_bob\n";
  for (std::size_t c = 0; c < run.channels.size(); ++c) {
    const auto& ch = run.channels[c];
    for (std::size_t n = 0; n < ch.x_alice.size(); ++n) {
      out << n << ',' << c << ',' << (ch.quadrature[n] == Quadrature::q ? 'q' : 'p') << ','
          << format_number(ch.x_alice[n]) << ',' << format_number(ch.x_bob[n]) << '\n';
    }
  }
  if (!out) throw Error("write failed for " + path.string());
}

}  // namespace thzqkd

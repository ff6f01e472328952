#include "thzqkd/keyrate.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <numeric>
#include <string>

#include "thzqkd/error.hpp"
#include "thzqkd/gaussian_core.hpp"

namespace thzqkd {

namespace {

constexpr double kDiscriminantTolerance = 1e-8;

void check_rate_inputs(double t, double vs, double v0, double w) {
  if (!(t >= 0.0 && t <= 1.0)) throw DomainError("transmittance must lie in [0, 1]");
  if (!(vs > 0.0)) throw DomainError("signal variance V_s must be positive");
  if (!(v0 >= 1.0)) throw DomainError("vacuum variance V_0 must be >= 1");
  if (!(w >= 1.0)) throw DomainError("Eve's noise variance W must be >= 1");
}

}  // namespace

std::string_view to_string(RateMethod method) {
  switch (method) {
    case RateMethod::exact:
      return "exact";
    case RateMethod::large_modulation:
      return "large_modulation";
    case RateMethod::taylor:
      return "taylor";
  }
  return "unknown";
}

RateMethod parse_rate_method(std::string_view name) {
  if (name == "exact") return RateMethod::exact;
  if (name == "large_modulation") return RateMethod::large_modulation;
  if (name == "taylor") return RateMethod::taylor;
  throw DomainError("unknown rate method '" + std::string(name) +
                    "' (expected exact, large_modulation or taylor)");
}

std::string_view to_string(ZetaConstant mode) {
  return mode == ZetaConstant::literal ? "literal" : "analytic";
}

ZetaConstant parse_zeta_constant(std::string_view name) {
  if (name == "literal") return ZetaConstant::literal;
  if (name == "analytic") return ZetaConstant::analytic;
  throw DomainError("unknown zeta constant mode '" + std::string(name) +
                    "' (expected literal or analytic)");
}

double mutual_information(double t, double vs, double v0, double w) {
  check_rate_inputs(t, vs, v0, w);
  return 0.5 * std::log2(1.0 + t * vs / lambda_mix(t, v0, w));
}

ApproxEigs approx_symplectic_eigs(double t, double va, double w) {
  if (!(t >= 0.0 && t <= 1.0)) throw DomainError("approx_symplectic_eigs: T must lie in [0, 1]");
  if (!(va > 1.0)) throw DomainError("approx_symplectic_eigs: V_a must exceed 1");
  if (!(w >= 1.0)) throw DomainError("approx_symplectic_eigs: W must be >= 1");

  ApproxEigs e;
  const double eve_mix = lambda_mix(t, w, va);
  const double bob_mix = lambda_mix(t, va, w);
  const double cross_mix = lambda_mix(t, w * va, 1.0);
  e.nu1 = eve_mix;
  e.nu2 = w;
  e.delta = (va * w * eve_mix + w * cross_mix) / bob_mix;
  e.upsilon = va * w * w * cross_mix * eve_mix / (bob_mix * bob_mix);

  double disc = e.delta * e.delta - 4.0 * e.upsilon;
  if (disc < -kDiscriminantTolerance * e.delta * e.delta) {
    throw NumericalError("approx_symplectic_eigs: negative discriminant " + std::to_string(disc));
  }
  disc = std::max(disc, 0.0);
  const double nu3_sq = 0.5 * (e.delta + std::sqrt(disc));
  // The smaller root via Vieta avoids cancellation in delta - sqrt(disc).
  const double nu4_sq = e.upsilon / nu3_sq;
  e.nu3 = std::sqrt(nu3_sq);
  e.nu4 = std::sqrt(nu4_sq);
  return e;
}

double holevo_large_modulation(double t, double va, double w) {
  const ApproxEigs e = approx_symplectic_eigs(t, va, w);
  auto h = [](double x) { return bosonic_entropy(std::max(x, 1.0)); };
  return h(e.nu1) + h(e.nu2) - h(e.nu3) - h(e.nu4);
}

double zeta_coefficient(double vs, double v0, double w, ZetaConstant mode) {
  const double va = vs + v0;
  if (!(va > 1.0)) throw DomainError("zeta_coefficient: V_a = V_s + V_0 must exceed 1");
  if (!(w > 0.0)) throw DomainError("zeta_coefficient: W must be positive");
  const double prefactor = mode == ZetaConstant::literal ? 0.72 : 0.5 / std::numbers::ln2;
  // log1p keeps ln((Va+1)/(Va-1)) accurate for large Va.
  const double log_ratio = std::log1p(2.0 / (va - 1.0));
  return prefactor * (vs / w - log_ratio * ((va * va - w * w) / (2.0 * w) - va));
}

ChannelRate channel_rate(double t, double vs, double v0, double w, RateMethod method,
                         const KeyRateOptions& options) {
  check_rate_inputs(t, vs, v0, w);
  ChannelRate r;
  r.transmittance = t;
  r.mutual_info_bits = mutual_information(t, vs, v0, w);
  const double va = vs + v0;
  switch (method) {
    case RateMethod::exact:
      r.holevo_bits = holevo_exact(t, va, w);
      r.rate_bits = r.mutual_info_bits - r.holevo_bits;
      break;
    case RateMethod::large_modulation:
      r.holevo_bits = holevo_large_modulation(t, va, w);
      r.rate_bits = r.mutual_info_bits - r.holevo_bits;
      break;
    case RateMethod::taylor:
      r.rate_bits =
          zeta_coefficient(vs, v0, w, options.zeta_constant) * t - bosonic_entropy(w);
      r.holevo_bits = r.mutual_info_bits - r.rate_bits;
      break;
  }
  if (options.clamp_negative_channels && r.rate_bits < 0.0) {
    r.rate_bits = 0.0;
    r.holevo_bits = r.mutual_info_bits;
  }
  return r;
}

double rate_per_channel(double t, double vs, double v0, double w, RateMethod method,
                        const KeyRateOptions& options) {
  return channel_rate(t, vs, v0, w, method, options).rate_bits;
}

RateBreakdown rate_mimo(std::span<const double> transmittances, const EnvironmentParams& env,
                        RateMethod method, const KeyRateOptions& options) {
  env.validate();
  if (method == RateMethod::taylor) return rate_taylor(transmittances, env, options);
  const double v0 = vacuum_variance(env);
  RateBreakdown out;
  out.method = method;
  for (double t : transmittances) {
    out.per_channel.push_back(
        channel_rate(t, env.signal_variance, v0, env.eve_noise, method, options));
    out.total_rate_bits += out.per_channel.back().rate_bits;
  }
  return out;
}

RateBreakdown rate_mimo(const ChannelDecomposition& dec, const EnvironmentParams& env,
                        RateMethod method, const KeyRateOptions& options) {
  return rate_mimo(dec.transmittances, env, method, options);
}

RateBreakdown rate_taylor(std::span<const double> transmittances, const EnvironmentParams& env,
                          const KeyRateOptions& options) {
  env.validate();
  const double v0 = vacuum_variance(env);
  RateBreakdown out;
  out.method = RateMethod::taylor;
  for (double t : transmittances) {
    out.per_channel.push_back(channel_rate(t, env.signal_variance, v0, env.eve_noise,
                                           RateMethod::taylor, options));
    out.total_rate_bits += out.per_channel.back().rate_bits;
  }
  return out;
}

RateBreakdown rate_taylor(const ChannelDecomposition& dec, const EnvironmentParams& env,
                          const KeyRateOptions& options) {
  return rate_taylor(dec.transmittances, env, options);
}

Feasibility feasibility_threshold(std::span<const double> transmittances,
                                  const EnvironmentParams& env, const KeyRateOptions& options) {
  env.validate();
  Feasibility f;
  f.zeta = zeta_coefficient(env.signal_variance, vacuum_variance(env), env.eve_noise,
                            options.zeta_constant);
  const double trace = std::accumulate(transmittances.begin(), transmittances.end(), 0.0);
  const double h_w = bosonic_entropy(env.eve_noise);
  if (h_w == 0.0) {
    f.alpha = 0.0;
  } else if (trace > 0.0) {
    f.alpha = static_cast<double>(transmittances.size()) * h_w / trace;
  } else {
    f.alpha = std::numeric_limits<double>::infinity();
  }
  f.feasible = f.zeta > f.alpha;
  return f;
}

Feasibility feasibility_threshold(const ChannelDecomposition& dec, const EnvironmentParams& env,
                                  const KeyRateOptions& options) {
  return feasibility_threshold(dec.transmittances, env, options);
}

}  // namespace thzqkd

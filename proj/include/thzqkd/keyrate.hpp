#pragma once

// Reverse-reconciliation secret key rates per parallel channel and summed
// over the MIMO eigenmodes, in bits per channel use.

#include <span>
#include <string_view>
#include <vector>

#include "thzqkd/channel_model.hpp"
#include "thzqkd/units_physics.hpp"

namespace thzqkd {

enum class RateMethod { exact, large_modulation, taylor };

std::string_view to_string(RateMethod method);
// Throws DomainError for an unknown name.
RateMethod parse_rate_method(std::string_view name);

// `literal` uses the rounded 0.72 prefactor of the small-T slope, `analytic`
// uses 1 / (2 ln 2) = 0.72135.
enum class ZetaConstant { literal, analytic };

std::string_view to_string(ZetaConstant mode);
ZetaConstant parse_zeta_constant(std::string_view name);

struct KeyRateOptions {
  bool clamp_negative_channels = false;
  ZetaConstant zeta_constant = ZetaConstant::literal;
};

struct ChannelRate {
  double transmittance = 0.0;
  double mutual_info_bits = 0.0;
  double holevo_bits = 0.0;
  double rate_bits = 0.0;
};

struct RateBreakdown {
  std::vector<ChannelRate> per_channel;
  double total_rate_bits = 0.0;
  RateMethod method = RateMethod::large_modulation;
};

// Large-modulation symplectic eigenvalues of Eve's state (nu1, nu2) and of
// her state conditioned on Bob's homodyne outcome (nu3, nu4).
struct ApproxEigs {
  double nu1 = 1.0;
  double nu2 = 1.0;
  double nu3 = 1.0;
  double nu4 = 1.0;
  double delta = 2.0;
  double upsilon = 1.0;
};

// 1/2 log2(1 + T V_s / Lambda(V_0, W)).
double mutual_information(double transmittance, double signal_variance, double vacuum_variance,
                          double eve_noise);

ApproxEigs approx_symplectic_eigs(double transmittance, double alice_variance, double eve_noise);

// h(nu1) + h(nu2) - h(nu3) - h(nu4) from approx_symplectic_eigs.
double holevo_large_modulation(double transmittance, double alice_variance, double eve_noise);

double zeta_coefficient(double signal_variance, double vacuum_variance, double eve_noise,
                        ZetaConstant mode = ZetaConstant::literal);

ChannelRate channel_rate(double transmittance, double signal_variance, double vacuum_variance,
                         double eve_noise, RateMethod method, const KeyRateOptions& options = {});

// May be negative: key distillation on that eigenmode is then impossible.
double rate_per_channel(double transmittance, double signal_variance, double vacuum_variance,
                        double eve_noise, RateMethod method, const KeyRateOptions& options = {});

RateBreakdown rate_mimo(std::span<const double> transmittances, const EnvironmentParams& env,
                        RateMethod method, const KeyRateOptions& options = {});
RateBreakdown rate_mimo(const ChannelDecomposition& dec, const EnvironmentParams& env,
                        RateMethod method, const KeyRateOptions& options = {});

// zeta * sum(T_i) - r h(W), per channel zeta * T_i - h(W).
RateBreakdown rate_taylor(std::span<const double> transmittances, const EnvironmentParams& env,
                          const KeyRateOptions& options = {});
RateBreakdown rate_taylor(const ChannelDecomposition& dec, const EnvironmentParams& env,
                          const KeyRateOptions& options = {});

struct Feasibility {
  double alpha = 0.0;
  double zeta = 0.0;
  bool feasible = false;
};

// Necessary condition for a positive rate: zeta > alpha = r h(W) / tr(H^dag H).
Feasibility feasibility_threshold(std::span<const double> transmittances,
                                  const EnvironmentParams& env, const KeyRateOptions& options = {});
Feasibility feasibility_threshold(const ChannelDecomposition& dec, const EnvironmentParams& env,
                                  const KeyRateOptions& options = {});

}  // namespace thzqkd

#pragma once

// Terahertz MIMO channel: ULA steering vectors, LoS/NLoS path loss with
// atmospheric absorption, the multipath channel matrix and its SVD split into
// parallel eigenmode transmittances.

#include <complex>
#include <filesystem>
#include <span>
#include <string_view>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "thzqkd/units_physics.hpp"

namespace thzqkd {

using ComplexMatrix = Eigen::MatrixXcd;
using ComplexVector = Eigen::VectorXcd;

struct ArrayConfig {
  int n_tx = 1;
  int n_rx = 1;
  double element_gain = 1.0;  // G_a, linear
  double element_spacing_over_lambda = 0.5;

  void validate() const;
  double tx_gain() const { return n_tx * element_gain; }
  double rx_gain() const { return n_rx * element_gain; }
};

struct PathSpec {
  double length_m = 1.0;
  double aod_rad = 0.0;
  double aoa_rad = 0.0;
  double delay_s = 0.0;
  bool is_los = true;
  // NLoS only.
  double roughness = 1.0;
  std::complex<double> fresnel{1.0, 0.0};
};

// Exactly one LoS path, and it is the shortest one.
void validate_paths(std::span<const PathSpec> paths);

// One frequency band of constant absorption. Endpoints may be open or closed
// independently so both the "(10, 14] THz" style and left-closed CSV bands
// can be represented.
struct AbsorptionBand {
  double lo_hz = 0.0;
  double hi_hz = 0.0;
  bool lo_closed = true;
  bool hi_closed = false;
  double delta_db_per_km = 0.0;

  bool contains(double frequency_hz) const;
};

class AbsorptionTable {
 public:
  AbsorptionTable() = default;
  explicit AbsorptionTable(std::vector<AbsorptionBand> bands);

  // 1000 dB/km at exactly 10 THz, 100 dB/km on (10, 14] THz and 50 dB/km on
  // (14, 30] THz.
  static AbsorptionTable default_terahertz();

  // Rows (f_k, delta_k) sorted by frequency. Row k opens the band
  // [f_k, f_{k+1}); the last row covers the single point f_last.
  static AbsorptionTable from_rows(std::span<const std::pair<double, double>> rows);
  static AbsorptionTable from_csv_text(std::string_view text);
  static AbsorptionTable load_csv(const std::filesystem::path& path);

  bool covers(double frequency_hz) const;
  // Throws DomainError outside the covered range.
  double delta_db_per_km(double frequency_hz) const;

  const std::vector<AbsorptionBand>& bands() const { return bands_; }
  bool empty() const { return bands_.empty(); }

 private:
  std::vector<AbsorptionBand> bands_;
};

// How the NLoS Fresnel coefficient enters the path power: |r|^2 or Re(r).
enum class FresnelMode { power, raw };

struct ChannelOptions {
  FresnelMode fresnel_mode = FresnelMode::power;
  double rank_tolerance = 1e-12;
};

ComplexVector steering_vector(int k, double theta_rad, double spacing_over_lambda = 0.5);

// Power gain gamma_l of one path, antenna array gains G_t = N_t G_a and
// G_r = N_r G_a included.
double path_loss(const PathSpec& path, const EnvironmentParams& env, const ArrayConfig& arrays,
                 const AbsorptionTable& absorption, FresnelMode fresnel_mode = FresnelMode::power);

// H = sum_l sqrt(gamma_l) exp(j 2 pi f_c tau_l) psi_Nr(aoa_l) psi_Nt(aod_l)^dag.
ComplexMatrix build_channel(std::span<const PathSpec> paths, const EnvironmentParams& env,
                            const ArrayConfig& arrays, const AbsorptionTable& absorption,
                            FresnelMode fresnel_mode = FresnelMode::power);

struct ChannelDecomposition {
  ComplexMatrix matrix_h;
  ComplexMatrix left_u;   // N_r x N_r
  ComplexMatrix right_v;  // N_t x N_t
  std::vector<double> transmittances;  // descending, all in (0, 1]
  int rank = 0;
  std::vector<double> eve_mix;  // sqrt(1 - T_i) for i < r, then 1 up to min(N_r, N_t)

  double trace_hdh() const;
};

// Full SVD of H. Singular values at or below rank_tolerance * s_max count as
// zero. Throws DomainError for an all-zero channel (s_max <= 1e-30) and for
// a transmittance above 1, which happens when the far-field gain model is
// pushed inside its near field.
ChannelDecomposition decompose(const ComplexMatrix& h, double rank_tolerance = 1e-12);

// Transmittances T_1..T_r. Checks that U^dag H V is diagonal with entries
// sqrt(T_i) and throws NumericalError otherwise.
std::vector<double> effective_parallel_channels(const ChannelDecomposition& dec);

// Singular values of H, descending, from the factored form without rank
// truncation or the T <= 1 check.
std::vector<double> factored_singular_values(std::span<const PathSpec> paths,
                                             const EnvironmentParams& env,
                                             const ArrayConfig& arrays,
                                             const AbsorptionTable& absorption,
                                             FresnelMode fresnel_mode = FresnelMode::power);

// Nonzero eigenvalues of H^dag H for H built from `paths`, computed from the
// QR-reduced L x L core of the factored form H = A D B^dag instead of an
// N_r x N_t SVD. Used by the sweeps, where arrays reach 1024 x 1024.
std::vector<double> factored_transmittances(std::span<const PathSpec> paths,
                                            const EnvironmentParams& env,
                                            const ArrayConfig& arrays,
                                            const AbsorptionTable& absorption,
                                            const ChannelOptions& options = {});

}  // namespace thzqkd

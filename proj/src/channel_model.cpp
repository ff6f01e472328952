#include "thzqkd/channel_model.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <numbers>
#include <sstream>
#include <string>

#include <Eigen/SVD>

#include "thzqkd/error.hpp"

namespace thzqkd {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;
constexpr double kOpaqueFloor = 1e-30;
constexpr double kTransmittanceSlack = 1e-12;

std::string band_text(const AbsorptionBand& b) {
  std::ostringstream os;
  os << (b.lo_closed ? '[' : '(') << b.lo_hz << ", " << b.hi_hz << (b.hi_closed ? ']' : ')');
  return os.str();
}

bool overlaps(const AbsorptionBand& a, const AbsorptionBand& b) {
  // a precedes b when a ends before b starts, touching only at an endpoint
  // that at most one of them includes.
  auto before = [](const AbsorptionBand& x, const AbsorptionBand& y) {
    return x.hi_hz < y.lo_hz || (x.hi_hz == y.lo_hz && !(x.hi_closed && y.lo_closed));
  };
  return !(before(a, b) || before(b, a));
}

}  // namespace

void ArrayConfig::validate() const {
  if (n_tx < 1) throw DomainError("arrays.n_tx must be >= 1");
  if (n_rx < 1) throw DomainError("arrays.n_rx must be >= 1");
  if (!(element_gain > 0.0) || !std::isfinite(element_gain)) {
    throw DomainError("arrays.element_gain must be positive");
  }
  if (!(element_spacing_over_lambda > 0.0)) {
    throw DomainError("arrays.element_spacing_over_lambda must be positive");
  }
}

void validate_paths(std::span<const PathSpec> paths) {
  if (paths.empty()) throw DomainError("paths: at least one path is required");
  int los_count = 0;
  double los_length = 0.0;
  double min_length = paths.front().length_m;
  for (std::size_t i = 0; i < paths.size(); ++i) {
    const auto& p = paths[i];
    const std::string where = "paths[" + std::to_string(i) + "]";
    if (!(p.length_m > 0.0) || !std::isfinite(p.length_m)) {
      throw DomainError(where + ".length_m must be positive");
    }
    if (!(std::abs(p.aod_rad) < std::numbers::pi / 2)) {
      throw DomainError(where + ".aod_rad must lie in (-pi/2, pi/2)");
    }
    if (!(std::abs(p.aoa_rad) < std::numbers::pi / 2)) {
      throw DomainError(where + ".aoa_rad must lie in (-pi/2, pi/2)");
    }
    if (!(p.delay_s >= 0.0)) throw DomainError(where + ".delay_s must be >= 0");
    if (p.is_los) {
      ++los_count;
      los_length = p.length_m;
    } else {
      if (!(p.roughness >= 0.0 && p.roughness <= 1.0)) {
        throw DomainError(where + ".roughness must lie in [0, 1]");
      }
      if (!(std::abs(p.fresnel) <= 1.0)) {
        throw DomainError(where + ".fresnel must satisfy |r| <= 1");
      }
    }
    min_length = std::min(min_length, p.length_m);
  }
  if (los_count != 1) {
    throw DomainError("paths: exactly one LoS path required, found " + std::to_string(los_count));
  }
  if (los_length > min_length) {
    throw DomainError("paths: the LoS path must be the shortest path");
  }
}

bool AbsorptionBand::contains(double f) const {
  const bool above = lo_closed ? f >= lo_hz : f > lo_hz;
  const bool below = hi_closed ? f <= hi_hz : f < hi_hz;
  return above && below;
}

AbsorptionTable::AbsorptionTable(std::vector<AbsorptionBand> bands) : bands_(std::move(bands)) {
  for (const auto& b : bands_) {
    if (!(b.delta_db_per_km >= 0.0) || !std::isfinite(b.delta_db_per_km)) {
      throw DomainError("absorption: delta_db_per_km must be finite and >= 0 in band " +
                        band_text(b));
    }
    const bool degenerate = b.lo_hz == b.hi_hz && b.lo_closed && b.hi_closed;
    if (!(b.lo_hz < b.hi_hz || degenerate)) {
      throw DomainError("absorption: empty band " + band_text(b));
    }
  }
  std::sort(bands_.begin(), bands_.end(),
            [](const AbsorptionBand& a, const AbsorptionBand& b) { return a.lo_hz < b.lo_hz; });
  for (std::size_t i = 0; i < bands_.size(); ++i) {
    for (std::size_t j = i + 1; j < bands_.size(); ++j) {
      if (overlaps(bands_[i], bands_[j])) {
        throw DomainError("absorption: bands " + band_text(bands_[i]) + " and " +
                          band_text(bands_[j]) + " overlap");
      }
    }
  }
}

AbsorptionTable AbsorptionTable::default_terahertz() {
  return AbsorptionTable({
      {10e12, 10e12, true, true, 1000.0},
      {10e12, 14e12, false, true, 100.0},
      {14e12, 30e12, false, true, 50.0},
  });
}

AbsorptionTable AbsorptionTable::from_rows(std::span<const std::pair<double, double>> rows) {
  if (rows.empty()) throw DomainError("absorption: table has no rows");
  std::vector<AbsorptionBand> bands;
  for (std::size_t i = 0; i + 1 < rows.size(); ++i) {
    if (!(rows[i].first < rows[i + 1].first)) {
      throw DomainError("absorption: frequencies must be strictly increasing");
    }
    bands.push_back({rows[i].first, rows[i + 1].first, true, false, rows[i].second});
  }
  bands.push_back({rows.back().first, rows.back().first, true, true, rows.back().second});
  return AbsorptionTable(std::move(bands));
}

AbsorptionTable AbsorptionTable::from_csv_text(std::string_view text) {
  std::vector<std::pair<double, double>> rows;
  std::istringstream in{std::string(text)};
  std::string line;
  int line_no = 0;
  auto parse = [&](std::string_view field, double& out) {
    while (!field.empty() && std::isspace(static_cast<unsigned char>(field.front()))) {
      field.remove_prefix(1);
    }
    while (!field.empty() && std::isspace(static_cast<unsigned char>(field.back()))) {
      field.remove_suffix(1);
    }
    auto [ptr, ec] = std::from_chars(field.data(), field.data() + field.size(), out);
    return ec == std::errc{} && ptr == field.data() + field.size();
  };
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty() || line[0] == '#') continue;
    const auto comma = line.find(',');
    if (comma == std::string::npos) {
      throw DomainError("absorption csv line " + std::to_string(line_no) + ": expected 2 columns");
    }
    double f = 0.0;
    double delta = 0.0;
    const std::string_view sv(line);
    if (!parse(sv.substr(0, comma), f) || !parse(sv.substr(comma + 1), delta)) {
      if (rows.empty()) continue;  // header row
      throw DomainError("absorption csv line " + std::to_string(line_no) + ": not numeric");
    }
    rows.emplace_back(f, delta);
  }
  return from_rows(rows);
}

AbsorptionTable AbsorptionTable::load_csv(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw DomainError("absorption: cannot open " + path.string());
  std::stringstream buf;
  buf << in.rdbuf();
  return from_csv_text(buf.str());
}

bool AbsorptionTable::covers(double f) const {
  return std::any_of(bands_.begin(), bands_.end(),
                     [f](const AbsorptionBand& b) { return b.contains(f); });
}

double AbsorptionTable::delta_db_per_km(double f) const {
  for (const auto& b : bands_) {
    if (b.contains(f)) return b.delta_db_per_km;
  }
  throw DomainError("absorption: carrier frequency " + std::to_string(f) +
                    " Hz is outside the absorption table");
}

ComplexVector steering_vector(int k, double theta_rad, double spacing_over_lambda) {
  if (k < 1) throw DomainError("steering_vector: k must be >= 1");
  ComplexVector v(k);
  const double scale = 1.0 / std::sqrt(static_cast<double>(k));
  const double phase_step = kTwoPi * spacing_over_lambda * std::sin(theta_rad);
  for (int m = 0; m < k; ++m) {
    v(m) = std::polar(scale, phase_step * m);
  }
  return v;
}

double path_loss(const PathSpec& path, const EnvironmentParams& env, const ArrayConfig& arrays,
                 const AbsorptionTable& absorption, FresnelMode fresnel_mode) {
  env.validate();
  arrays.validate();
  const double delta = absorption.delta_db_per_km(env.carrier_frequency_hz);
  const double lambda = wavelength_m(env.carrier_frequency_hz);
  const double spread = lambda / (4.0 * std::numbers::pi * path.length_m);
  const double distance_km = path.length_m * 1e-3;
  double gamma = spread * spread * arrays.tx_gain() * arrays.rx_gain() *
                 std::pow(10.0, -0.1 * delta * distance_km);
  if (!path.is_los) {
    const double reflection =
        fresnel_mode == FresnelMode::power ? std::norm(path.fresnel) : path.fresnel.real();
    gamma *= path.roughness * reflection;
  }
  return gamma;
}

ComplexMatrix build_channel(std::span<const PathSpec> paths, const EnvironmentParams& env,
                            const ArrayConfig& arrays, const AbsorptionTable& absorption,
                            FresnelMode fresnel_mode) {
  validate_paths(paths);
  ComplexMatrix h = ComplexMatrix::Zero(arrays.n_rx, arrays.n_tx);
  for (const auto& p : paths) {
    const double gamma = path_loss(p, env, arrays, absorption, fresnel_mode);
    if (!std::isfinite(gamma) || gamma < 0.0) {
      throw DomainError("build_channel: path loss is not a finite non-negative value");
    }
    const std::complex<double> gain =
        std::sqrt(gamma) * std::polar(1.0, kTwoPi * env.carrier_frequency_hz * p.delay_s);
    h.noalias() += gain * steering_vector(arrays.n_rx, p.aoa_rad, arrays.element_spacing_over_lambda) *
                   steering_vector(arrays.n_tx, p.aod_rad, arrays.element_spacing_over_lambda).adjoint();
  }
  return h;
}

double ChannelDecomposition::trace_hdh() const { return matrix_h.squaredNorm(); }

ChannelDecomposition decompose(const ComplexMatrix& h, double rank_tolerance) {
  if (h.size() == 0 || !h.allFinite()) {
    throw DomainError("decompose: channel matrix must be non-empty and finite");
  }
  Eigen::BDCSVD<ComplexMatrix> svd(h, Eigen::ComputeFullU | Eigen::ComputeFullV);
  const Eigen::VectorXd& s = svd.singularValues();
  const double s_max = s.size() > 0 ? s(0) : 0.0;
  if (!(s_max > kOpaqueFloor)) {
    throw DomainError("decompose: channel is fully opaque (all singular values <= 1e-30)");
  }

  ChannelDecomposition dec;
  dec.matrix_h = h;
  dec.left_u = svd.matrixU();
  dec.right_v = svd.matrixV();
  for (Eigen::Index i = 0; i < s.size(); ++i) {
    if (s(i) <= rank_tolerance * s_max) break;
    double t = s(i) * s(i);
    if (t > 1.0 + kTransmittanceSlack) {
      throw DomainError("decompose: eigenmode transmittance " + std::to_string(t) +
                        " exceeds 1 (distance inside the near field of the gain model)");
    }
    dec.transmittances.push_back(std::min(t, 1.0));
  }
  dec.rank = static_cast<int>(dec.transmittances.size());
  const auto m = std::min(h.rows(), h.cols());
  dec.eve_mix.assign(static_cast<std::size_t>(m), 1.0);
  for (int i = 0; i < dec.rank; ++i) {
    dec.eve_mix[i] = std::sqrt(1.0 - dec.transmittances[i]);
  }
  return dec;
}

std::vector<double> effective_parallel_channels(const ChannelDecomposition& dec) {
  const ComplexMatrix beamformed = dec.left_u.adjoint() * dec.matrix_h * dec.right_v;
  ComplexMatrix expected = ComplexMatrix::Zero(beamformed.rows(), beamformed.cols());
  for (int i = 0; i < dec.rank; ++i) expected(i, i) = std::sqrt(dec.transmittances[i]);
  const double residual = (beamformed - expected).norm();
  if (residual > 1e-10 * dec.matrix_h.norm()) {
    throw NumericalError("effective_parallel_channels: U^dag H V is not diagonal (residual " +
                         std::to_string(residual) + ")");
  }
  return dec.transmittances;
}

std::vector<double> factored_singular_values(std::span<const PathSpec> paths,
                                             const EnvironmentParams& env,
                                             const ArrayConfig& arrays,
                                             const AbsorptionTable& absorption,
                                             FresnelMode fresnel_mode) {
  validate_paths(paths);
  const auto n_paths = static_cast<Eigen::Index>(paths.size());
  ComplexMatrix a(arrays.n_rx, n_paths);
  ComplexMatrix b(arrays.n_tx, n_paths);
  ComplexVector d(n_paths);
  for (Eigen::Index l = 0; l < n_paths; ++l) {
    const auto& p = paths[static_cast<std::size_t>(l)];
    const double gamma = path_loss(p, env, arrays, absorption, fresnel_mode);
    if (!std::isfinite(gamma) || gamma < 0.0) {
      throw DomainError("factored_singular_values: path loss is not a finite non-negative value");
    }
    d(l) = std::sqrt(gamma) * std::polar(1.0, kTwoPi * env.carrier_frequency_hz * p.delay_s);
    a.col(l) = steering_vector(arrays.n_rx, p.aoa_rad, arrays.element_spacing_over_lambda);
    b.col(l) = steering_vector(arrays.n_tx, p.aod_rad, arrays.element_spacing_over_lambda);
  }
  // With A = Q_a R_a and B = Q_b R_b, H = A D B^dag = Q_a (R_a D R_b^dag) Q_b^dag,
  // so H and the small core R_a D R_b^dag share their singular values.
  auto upper_r = [](const ComplexMatrix& m) {
    Eigen::HouseholderQR<ComplexMatrix> qr(m);
    const auto rows = std::min(m.rows(), m.cols());
    return ComplexMatrix(qr.matrixQR().topRows(rows).triangularView<Eigen::Upper>());
  };
  const ComplexMatrix core = upper_r(a) * d.asDiagonal() * upper_r(b).adjoint();
  Eigen::JacobiSVD<ComplexMatrix> svd(core);
  const Eigen::VectorXd& s = svd.singularValues();
  return {s.data(), s.data() + s.size()};
}

std::vector<double> factored_transmittances(std::span<const PathSpec> paths,
                                            const EnvironmentParams& env,
                                            const ArrayConfig& arrays,
                                            const AbsorptionTable& absorption,
                                            const ChannelOptions& options) {
  const auto s = factored_singular_values(paths, env, arrays, absorption, options.fresnel_mode);
  const double s_max = s.empty() ? 0.0 : s.front();
  if (!(s_max > kOpaqueFloor)) {
    throw DomainError("factored_transmittances: channel is fully opaque");
  }
  std::vector<double> t;
  for (double si : s) {
    if (si <= options.rank_tolerance * s_max) break;
    const double ti = si * si;
    if (ti > 1.0 + kTransmittanceSlack) {
      throw DomainError("factored_transmittances: eigenmode transmittance " + std::to_string(ti) +
                        " exceeds 1 (distance inside the near field of the gain model)");
    }
    t.push_back(std::min(ti, 1.0));
  }
  return t;
}

}  // namespace thzqkd

#include "thzqkd/gaussian_core.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <limits>
#include <string>

#include <Eigen/Eigenvalues>
#include <Eigen/SVD>

#include "thzqkd/error.hpp"
#include "thzqkd/units_physics.hpp"

namespace thzqkd {

namespace {

constexpr double kSymmetryTolerance = 1e-12;
constexpr double kPhysicalTolerance = 1e-9;
constexpr double kUnphysicalTolerance = 1e-6;
constexpr double kSymplecticTolerance = 1e-10;
constexpr double kPinvCutoff = 1e-12;

void check_modes(int n_modes, std::span<const int> indices, const char* what) {
  if (indices.empty()) throw DomainError(std::string(what) + ": no mode indices given");
  std::vector<int> seen;
  for (int i : indices) {
    if (i < 0 || i >= n_modes) {
      throw DomainError(std::string(what) + ": mode index " + std::to_string(i) +
                        " out of range for " + std::to_string(n_modes) + " modes");
    }
    if (std::find(seen.begin(), seen.end(), i) != seen.end()) {
      throw DomainError(std::string(what) + ": duplicate mode index " + std::to_string(i));
    }
    seen.push_back(i);
  }
}

// Eigenvalues of the Hermitian matrix i R Omega R with R = cov^{1/2} are
// +/- nu_k; it has the same spectrum as i Omega cov.
// `condition` receives lambda_max / lambda_min of cov when non-null.
std::vector<double> raw_symplectic_eigenvalues(const Eigen::MatrixXd& cov, double* condition = nullptr) {
  const int n = static_cast<int>(cov.rows() / 2);
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(cov);
  if (es.info() != Eigen::Success) {
    throw NumericalError("symplectic_eigenvalues: eigendecomposition failed");
  }
  if (es.eigenvalues().minCoeff() <= 0.0) {
    throw NumericalError("symplectic_eigenvalues: covariance matrix is not positive definite");
  }
  if (condition) *condition = es.eigenvalues().maxCoeff() / es.eigenvalues().minCoeff();
  const Eigen::MatrixXd root = es.operatorSqrt();
  const Eigen::MatrixXcd m =
      std::complex<double>(0.0, 1.0) * (root * symplectic_form(n) * root).cast<std::complex<double>>();
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> hs(m, Eigen::EigenvaluesOnly);
  const Eigen::VectorXd& ev = hs.eigenvalues();  // ascending, +/- pairs
  std::vector<double> nu;
  nu.reserve(n);
  for (Eigen::Index i = ev.size() - 1; i >= n; --i) nu.push_back(ev(i));
  return nu;
}

}  // namespace

Eigen::MatrixXd symplectic_form(int n_modes) {
  Eigen::MatrixXd omega = Eigen::MatrixXd::Zero(2 * n_modes, 2 * n_modes);
  for (int k = 0; k < n_modes; ++k) {
    omega(2 * k, 2 * k + 1) = 1.0;
    omega(2 * k + 1, 2 * k) = -1.0;
  }
  return omega;
}

GaussianState::GaussianState(Eigen::MatrixXd cov)
    : GaussianState(cov, Eigen::VectorXd::Zero(cov.rows())) {}

GaussianState::GaussianState(Eigen::MatrixXd cov, Eigen::VectorXd mean)
    : cov_(std::move(cov)), mean_(std::move(mean)) {
  if (cov_.rows() == 0 || cov_.rows() != cov_.cols() || cov_.rows() % 2 != 0) {
    throw DomainError("GaussianState: covariance must be a non-empty 2n x 2n matrix");
  }
  if (mean_.size() != cov_.rows()) {
    throw DomainError("GaussianState: mean vector length does not match covariance");
  }
  if (!cov_.allFinite()) throw DomainError("GaussianState: covariance has non-finite entries");
  const double scale = std::max(1.0, cov_.cwiseAbs().maxCoeff());
  if ((cov_ - cov_.transpose()).cwiseAbs().maxCoeff() > kSymmetryTolerance * scale) {
    throw DomainError("GaussianState: covariance is not symmetric");
  }
  cov_ = 0.5 * (cov_ + cov_.transpose()).eval();
  std::vector<double> nu;
  double condition = 1.0;
  try {
    nu = raw_symplectic_eigenvalues(cov_, &condition);
  } catch (const NumericalError& e) {
    throw DomainError(std::string("GaussianState: ") + e.what());
  }
  // Strongly squeezed states cannot be stored more accurately than about
  // eps * cond(cov), e.g. ~1e-8 for a TMSV with variance 1e4.
  const double slack = kPhysicalTolerance + std::numeric_limits<double>::epsilon() * condition;
  if (nu.back() < 1.0 - slack) {
    throw DomainError("GaussianState: uncertainty principle violated (symplectic eigenvalue " +
                      std::to_string(nu.back()) + ")");
  }
}

SymplecticTransform::SymplecticTransform(Eigen::MatrixXd s) : s_(std::move(s)) {
  if (s_.rows() == 0 || s_.rows() != s_.cols() || s_.rows() % 2 != 0) {
    throw DomainError("SymplecticTransform: matrix must be a non-empty 2n x 2n matrix");
  }
  const Eigen::MatrixXd omega = symplectic_form(n_modes());
  if ((s_ * omega * s_.transpose() - omega).cwiseAbs().maxCoeff() > kSymplecticTolerance) {
    throw DomainError("SymplecticTransform: S Omega S^T != Omega");
  }
}

SymplecticTransform SymplecticTransform::inverse() const {
  // S^{-1} = -Omega S^T Omega
  const Eigen::MatrixXd omega = symplectic_form(n_modes());
  return SymplecticTransform(-omega * s_.transpose() * omega);
}

GaussianState vacuum_state(int n_modes) {
  if (n_modes < 1) throw DomainError("vacuum_state: n_modes must be >= 1");
  return GaussianState(Eigen::MatrixXd::Identity(2 * n_modes, 2 * n_modes));
}

GaussianState thermal_state(double variance) {
  if (!(variance >= 1.0 - kEntropyClampTolerance) || !std::isfinite(variance)) {
    throw DomainError("thermal_state: variance must be >= 1");
  }
  return GaussianState(std::max(variance, 1.0) * Eigen::MatrixXd::Identity(2, 2));
}

GaussianState two_mode_squeezed(double variance) {
  if (!(variance >= 1.0) || !std::isfinite(variance)) {
    throw DomainError("two_mode_squeezed: variance must be >= 1");
  }
  const double c = std::sqrt(variance * variance - 1.0);
  Eigen::MatrixXd cov = variance * Eigen::MatrixXd::Identity(4, 4);
  cov(0, 2) = cov(2, 0) = c;
  cov(1, 3) = cov(3, 1) = -c;
  return GaussianState(std::move(cov));
}

GaussianState tensor_product(const GaussianState& a, const GaussianState& b) {
  const auto na = a.cov().rows();
  const auto nb = b.cov().rows();
  Eigen::MatrixXd cov = Eigen::MatrixXd::Zero(na + nb, na + nb);
  cov.topLeftCorner(na, na) = a.cov();
  cov.bottomRightCorner(nb, nb) = b.cov();
  Eigen::VectorXd mean(na + nb);
  mean << a.mean(), b.mean();
  return GaussianState(std::move(cov), std::move(mean));
}

SymplecticTransform beam_splitter(double eta) {
  if (!(eta >= 0.0 && eta <= 1.0)) throw DomainError("beam_splitter: eta must lie in [0, 1]");
  const double t = std::sqrt(eta);
  const double r = std::sqrt(1.0 - eta);
  Eigen::Matrix2d mix;
  mix << t, r, -r, t;
  Eigen::MatrixXd s = Eigen::MatrixXd::Zero(4, 4);
  for (int i = 0; i < 2; ++i) {
    for (int j = 0; j < 2; ++j) {
      s.block(2 * i, 2 * j, 2, 2) = mix(i, j) * Eigen::Matrix2d::Identity();
    }
  }
  return SymplecticTransform(std::move(s));
}

SymplecticTransform phase_shift(double theta) {
  Eigen::MatrixXd s(2, 2);
  s << std::cos(theta), std::sin(theta), -std::sin(theta), std::cos(theta);
  return SymplecticTransform(std::move(s));
}

SymplecticTransform single_mode_squeezer(double r) {
  Eigen::MatrixXd s = Eigen::MatrixXd::Zero(2, 2);
  s(0, 0) = std::exp(-r);
  s(1, 1) = std::exp(r);
  return SymplecticTransform(std::move(s));
}

GaussianState apply(const SymplecticTransform& transform, const GaussianState& state,
                    std::span<const int> mode_indices) {
  check_modes(state.n_modes(), mode_indices, "apply");
  if (static_cast<int>(mode_indices.size()) != transform.n_modes()) {
    throw DomainError("apply: transform acts on " + std::to_string(transform.n_modes()) +
                      " modes but " + std::to_string(mode_indices.size()) + " indices given");
  }
  const auto dim = state.cov().rows();
  Eigen::MatrixXd s = Eigen::MatrixXd::Identity(dim, dim);
  const auto& local = transform.matrix();
  for (std::size_t a = 0; a < mode_indices.size(); ++a) {
    for (std::size_t b = 0; b < mode_indices.size(); ++b) {
      s.block(2 * mode_indices[a], 2 * mode_indices[b], 2, 2) =
          local.block(2 * static_cast<Eigen::Index>(a), 2 * static_cast<Eigen::Index>(b), 2, 2);
    }
  }
  return GaussianState(s * state.cov() * s.transpose(), s * state.mean());
}

GaussianState partial_trace(const GaussianState& state, std::span<const int> keep_indices) {
  check_modes(state.n_modes(), keep_indices, "partial_trace");
  const auto k = static_cast<Eigen::Index>(keep_indices.size());
  Eigen::MatrixXd cov(2 * k, 2 * k);
  Eigen::VectorXd mean(2 * k);
  for (Eigen::Index a = 0; a < k; ++a) {
    mean.segment(2 * a, 2) = state.mean().segment(2 * keep_indices[a], 2);
    for (Eigen::Index b = 0; b < k; ++b) {
      cov.block(2 * a, 2 * b, 2, 2) =
          state.cov().block(2 * keep_indices[a], 2 * keep_indices[b], 2, 2);
    }
  }
  return GaussianState(std::move(cov), std::move(mean));
}

GaussianState homodyne_condition(const GaussianState& state, int measured_mode,
                                 Quadrature quadrature) {
  const int n = state.n_modes();
  if (n < 2) throw DomainError("homodyne_condition: state needs at least 2 modes");
  const int measured[] = {measured_mode};
  check_modes(n, measured, "homodyne_condition");

  std::vector<int> keep;
  for (int i = 0; i < n; ++i) {
    if (i != measured_mode) keep.push_back(i);
  }
  const GaussianState rest = partial_trace(state, keep);
  const auto k = static_cast<Eigen::Index>(keep.size());
  Eigen::MatrixXd cross(2 * k, 2);
  for (Eigen::Index a = 0; a < k; ++a) {
    cross.block(2 * a, 0, 2, 2) = state.cov().block(2 * keep[a], 2 * measured_mode, 2, 2);
  }
  const Eigen::Matrix2d block = state.cov().block(2 * measured_mode, 2 * measured_mode, 2, 2);
  Eigen::Matrix2d projector = Eigen::Matrix2d::Zero();
  projector(quadrature == Quadrature::q ? 0 : 1, quadrature == Quadrature::q ? 0 : 1) = 1.0;
  const Eigen::Matrix2d projected = projector * block * projector;

  Eigen::JacobiSVD<Eigen::Matrix2d> svd(projected, Eigen::ComputeFullU | Eigen::ComputeFullV);
  const Eigen::Vector2d sv = svd.singularValues();
  if (!(sv(0) > 0.0)) {
    throw NumericalError("homodyne_condition: measured quadrature has zero variance");
  }
  Eigen::Vector2d inv_sv = Eigen::Vector2d::Zero();
  for (int i = 0; i < 2; ++i) {
    if (sv(i) > kPinvCutoff * sv(0)) inv_sv(i) = 1.0 / sv(i);
  }
  const Eigen::Matrix2d pinv = svd.matrixV() * inv_sv.asDiagonal() * svd.matrixU().transpose();

  return GaussianState(rest.cov() - cross * pinv * cross.transpose(), rest.mean());
}

std::vector<double> symplectic_eigenvalues(const Eigen::MatrixXd& cov) {
  auto nu = raw_symplectic_eigenvalues(cov);
  if (nu.back() < 1.0 - kUnphysicalTolerance) {
    throw NumericalError("symplectic_eigenvalues: unphysical state (eigenvalue " +
                         std::to_string(nu.back()) + " < 1)");
  }
  return nu;
}

std::vector<double> symplectic_eigenvalues(const GaussianState& state) {
  return symplectic_eigenvalues(state.cov());
}

double von_neumann_entropy(const GaussianState& state) {
  double s = 0.0;
  for (double nu : symplectic_eigenvalues(state)) s += bosonic_entropy(std::max(nu, 1.0));
  return s;
}

double holevo_exact(double transmittance, double alice_variance, double eve_noise) {
  if (!(transmittance >= 0.0 && transmittance <= 1.0)) {
    throw DomainError("holevo_exact: transmittance must lie in [0, 1]");
  }
  if (!(alice_variance >= 1.0)) throw DomainError("holevo_exact: V_a must be >= 1");
  if (!(eve_noise >= 1.0)) throw DomainError("holevo_exact: W must be >= 1");

  // modes: 0 Alice -> Bob, 1 Eve's kept arm e, 2 Eve's injected arm E -> E'
  GaussianState state = tensor_product(thermal_state(alice_variance), two_mode_squeezed(eve_noise));
  const int mixed[] = {0, 2};
  state = apply(beam_splitter(transmittance), state, mixed);

  const int eve[] = {1, 2};
  const double s_eve = von_neumann_entropy(partial_trace(state, eve));
  const double s_eve_given_bob = von_neumann_entropy(homodyne_condition(state, 0, Quadrature::q));
  return std::max(0.0, s_eve - s_eve_given_bob);
}

}  // namespace thzqkd

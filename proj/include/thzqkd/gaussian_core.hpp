#pragma once

// Gaussian-state machinery in shot-noise units with quadrature ordering
// (q1, p1, q2, p2, ...). Entropies depend only on covariance matrices, so
// first moments are carried along but never enter any result here.

#include <span>
#include <vector>

#include <Eigen/Dense>

namespace thzqkd {

enum class Quadrature { q, p };

// Block-diagonal symplectic form, one [[0, 1], [-1, 0]] block per mode.
Eigen::MatrixXd symplectic_form(int n_modes);

class GaussianState {
 public:
  // Throws DomainError if cov is not square of even size, not symmetric
  // within 1e-12 (relative), or violates the uncertainty principle.
  explicit GaussianState(Eigen::MatrixXd cov);
  GaussianState(Eigen::MatrixXd cov, Eigen::VectorXd mean);

  int n_modes() const { return static_cast<int>(cov_.rows() / 2); }
  const Eigen::MatrixXd& cov() const { return cov_; }
  const Eigen::VectorXd& mean() const { return mean_; }

 private:
  Eigen::MatrixXd cov_;
  Eigen::VectorXd mean_;
};

class SymplecticTransform {
 public:
  // Throws DomainError unless S Omega S^T = Omega within 1e-10.
  explicit SymplecticTransform(Eigen::MatrixXd s);

  int n_modes() const { return static_cast<int>(s_.rows() / 2); }
  const Eigen::MatrixXd& matrix() const { return s_; }
  SymplecticTransform inverse() const;

 private:
  Eigen::MatrixXd s_;
};

GaussianState vacuum_state(int n_modes);
GaussianState thermal_state(double variance);
GaussianState two_mode_squeezed(double variance);
// Direct sum: modes of `a` first, then modes of `b`.
GaussianState tensor_product(const GaussianState& a, const GaussianState& b);

// a_out1 = sqrt(eta) a_in1 + sqrt(1-eta) a_in2,
// a_out2 = -sqrt(1-eta) a_in1 + sqrt(eta) a_in2, on q and p alike.
SymplecticTransform beam_splitter(double eta);
SymplecticTransform phase_shift(double theta);
SymplecticTransform single_mode_squeezer(double r);

GaussianState apply(const SymplecticTransform& transform, const GaussianState& state,
                    std::span<const int> mode_indices);
GaussianState partial_trace(const GaussianState& state, std::span<const int> keep_indices);

// State of the remaining modes after homodyne detection of one quadrature of
// `measured_mode`. The covariance does not depend on the outcome.
GaussianState homodyne_condition(const GaussianState& state, int measured_mode,
                                 Quadrature quadrature);

// Descending, one value per mode. Throws NumericalError below 1 - 1e-6.
std::vector<double> symplectic_eigenvalues(const GaussianState& state);
std::vector<double> symplectic_eigenvalues(const Eigen::MatrixXd& cov);

double von_neumann_entropy(const GaussianState& state);

// Eve's Holevo information on Bob's homodyne outcome under an entangling
// cloner: Alice's averaged mode thermal(V_a) meets one arm of a TMSV(W) on a
// beam splitter of transmittance T; Eve keeps the other TMSV arm and the
// reflected mode.
double holevo_exact(double transmittance, double alice_variance, double eve_noise);

}  // namespace thzqkd

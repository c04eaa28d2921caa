#pragma once

#include <complex>
#include <string_view>
#include <vector>

#include <Eigen/Dense>

#include "uscgibbs/errors.hpp"

namespace uscgibbs {

using Complex = std::complex<double>;
using Matrix = Eigen::MatrixXcd;
using RealMatrix = Eigen::MatrixXd;
using RealVector = Eigen::VectorXd;
using Index = Eigen::Index;

/// Dense complex square matrix that is Hermitian up to round-off.
///
/// Construction measures the largest entrywise asymmetry |H_ij - conj(H_ji)|.
/// Anything above `kRepairTolerance` relative to the largest entry is rejected;
/// smaller asymmetries (grid assembly noise) are removed by symmetrizing once.
class HermitianOperator {
public:
  static constexpr double kRepairTolerance = 1e-12;

  /// 1x1 zero operator.
  HermitianOperator();
  explicit HermitianOperator(Matrix entries);

  static HermitianOperator from_real(const RealMatrix& entries);
  static HermitianOperator identity(Index dim);
  static HermitianOperator zero(Index dim);
  static HermitianOperator diagonal(const RealVector& diag);

  [[nodiscard]] Index dim() const { return m_.rows(); }
  [[nodiscard]] const Matrix& matrix() const { return m_; }
  [[nodiscard]] Complex operator()(Index i, Index j) const { return m_(i, j); }

  /// True when every entry has an exactly zero imaginary part.
  [[nodiscard]] bool is_real() const;
  [[nodiscard]] double trace() const { return m_.trace().real(); }
  [[nodiscard]] RealVector real_diagonal() const { return m_.diagonal().real(); }

  HermitianOperator operator+(const HermitianOperator& other) const;
  HermitianOperator operator-(const HermitianOperator& other) const;
  HermitianOperator operator*(double s) const;

private:
  Matrix m_;
};

/// Largest entrywise |A_ij - conj(A_ji)|.
double max_asymmetry(const Matrix& a);

struct SpectralDecomposition {
  RealVector eigenvalues;  // ascending
  Matrix eigenvectors;     // columns orthonormal
};

/// Unit-trace positive-semidefinite operator.
class DensityMatrix {
public:
  static constexpr double kTraceTolerance = 1e-10;
  static constexpr double kPositivityTolerance = 1e-10;

  explicit DensityMatrix(HermitianOperator op);

  /// Divides by the trace, then validates.
  static DensityMatrix normalized(const HermitianOperator& op);
  /// Diagonal state from nonnegative weights (normalized here).
  static DensityMatrix from_weights(const RealVector& weights);

  [[nodiscard]] const HermitianOperator& op() const { return op_; }
  [[nodiscard]] const Matrix& matrix() const { return op_.matrix(); }
  [[nodiscard]] Index dim() const { return op_.dim(); }
  [[nodiscard]] RealVector populations() const { return op_.real_diagonal(); }

private:
  HermitianOperator op_;
};

/// Tensor-factor bookkeeping for system (first) x environment (second).
struct CompositeDims {
  Index sys_dim = 1;
  Index env_dim = 1;
  [[nodiscard]] Index total() const { return sys_dim * env_dim; }
};

/// Eigenvalue clusters of a coupling operator and their orthogonal projectors.
class ProjectorFamily {
public:
  static constexpr double kTolerance = 1e-10;

  ProjectorFamily(std::vector<double> cluster_values,
                  std::vector<HermitianOperator> projectors,
                  double cluster_tolerance,
                  bool collapsed = false);

  [[nodiscard]] const std::vector<double>& cluster_values() const { return values_; }
  [[nodiscard]] const std::vector<HermitianOperator>& projectors() const { return projectors_; }
  [[nodiscard]] double cluster_tolerance() const { return tolerance_; }
  [[nodiscard]] std::size_t size() const { return values_.size(); }
  [[nodiscard]] Index dim() const { return projectors_.front().dim(); }
  /// Set when the tolerance swallowed a spectrum with nonzero spread.
  [[nodiscard]] bool collapsed() const { return collapsed_; }

private:
  std::vector<double> values_;
  std::vector<HermitianOperator> projectors_;
  double tolerance_;
  bool collapsed_;
};

SpectralDecomposition hermitian_eig(const HermitianOperator& h);
RealVector hermitian_eigenvalues(const HermitianOperator& h);
/// "lapacke (...)" when a working LAPACK was loaded at runtime, else "eigen".
std::string_view eigensolver_backend();

/// e^{-beta H} = exp(log_prefactor) * kernel, with the kernel's largest eigenvalue equal to 1.
struct BoltzmannFactor {
  HermitianOperator kernel;
  double log_prefactor = 0.0;
};

BoltzmannFactor boltzmann_exp(const HermitianOperator& h, double beta);
BoltzmannFactor boltzmann_exp(const SpectralDecomposition& spectrum, double beta);

HermitianOperator kron(const HermitianOperator& a, const HermitianOperator& b);
HermitianOperator partial_trace_env(const HermitianOperator& rho, const CompositeDims& dims);

double trace_distance(const DensityMatrix& rho, const DensityMatrix& sigma);
/// Sum of |eigenvalues|.
double trace_norm(const HermitianOperator& h);

HermitianOperator project_block_diagonal(const HermitianOperator& h, const ProjectorFamily& family);
/// ||rho - sum_i P_i rho P_i||_1, the weight outside the projector blocks.
double off_block_trace_norm(const HermitianOperator& rho, const ProjectorFamily& family);
/// max_i ||[H, P_i]||_max.
double max_commutator(const HermitianOperator& h, const ProjectorFamily& family);

} // namespace uscgibbs

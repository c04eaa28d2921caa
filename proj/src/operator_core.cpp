#include "uscgibbs/operator_core.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "lapack_backend.hpp"

namespace uscgibbs {

namespace {

std::string dim_message(const char* what, Index a, Index b) {
  std::ostringstream os;
  os << what << ": dimension " << a << " does not match " << b;
  return os.str();
}

} // namespace

double max_asymmetry(const Matrix& a) {
  double worst = 0.0;
  for (Index j = 0; j < a.cols(); ++j)
    for (Index i = 0; i <= j; ++i)
      worst = std::max(worst, std::abs(a(i, j) - std::conj(a(j, i))));
  return worst;
}

HermitianOperator::HermitianOperator() : m_(Matrix::Zero(1, 1)) {}

HermitianOperator::HermitianOperator(Matrix entries) : m_(std::move(entries)) {
  if (m_.rows() < 1 || m_.rows() != m_.cols()) {
    std::ostringstream os;
    os << "HermitianOperator requires a nonempty square matrix, got " << m_.rows() << "x" << m_.cols();
    throw InvariantError(os.str());
  }
  for (Index j = 0; j < m_.cols(); ++j)
    for (Index i = 0; i < m_.rows(); ++i)
      if (!std::isfinite(m_(i, j).real()) || !std::isfinite(m_(i, j).imag()))
        throw InvariantError("HermitianOperator has non-finite entries");

  const double scale = m_.cwiseAbs().maxCoeff();
  const double asym = max_asymmetry(m_);
  if (asym > kRepairTolerance * scale) {
    std::ostringstream os;
    os << "operator is not Hermitian: max |H_ij - conj(H_ji)| = " << asym << " (largest entry " << scale
       << ")";
    throw InvariantError(os.str());
  }
  if (asym > 0.0) m_ = (0.5 * (m_ + m_.adjoint())).eval();
  for (Index i = 0; i < m_.rows(); ++i) m_(i, i) = Complex(m_(i, i).real(), 0.0);
}

HermitianOperator HermitianOperator::from_real(const RealMatrix& entries) {
  return HermitianOperator(entries.cast<Complex>());
}

HermitianOperator HermitianOperator::identity(Index dim) { return HermitianOperator(Matrix::Identity(dim, dim)); }

HermitianOperator HermitianOperator::zero(Index dim) { return HermitianOperator(Matrix::Zero(dim, dim)); }

HermitianOperator HermitianOperator::diagonal(const RealVector& diag) {
  return HermitianOperator(diag.cast<Complex>().asDiagonal().toDenseMatrix());
}

bool HermitianOperator::is_real() const {
  return (m_.imag().array() == 0.0).all();
}

HermitianOperator HermitianOperator::operator+(const HermitianOperator& other) const {
  if (dim() != other.dim()) throw InvariantError(dim_message("operator sum", dim(), other.dim()));
  return HermitianOperator(m_ + other.m_);
}

HermitianOperator HermitianOperator::operator-(const HermitianOperator& other) const {
  if (dim() != other.dim()) throw InvariantError(dim_message("operator difference", dim(), other.dim()));
  return HermitianOperator(m_ - other.m_);
}

HermitianOperator HermitianOperator::operator*(double s) const { return HermitianOperator(m_ * s); }

// ---------------------------------------------------------------------------

SpectralDecomposition hermitian_eig(const HermitianOperator& h) {
  const auto n = static_cast<int>(h.dim());
  SpectralDecomposition out;
  out.eigenvalues.resize(n);
  if (h.is_real()) {
    RealMatrix a = h.matrix().real();
    if (detail::lapack_syevd('V', n, a.data(), out.eigenvalues.data())) {
      out.eigenvectors = a.cast<Complex>();
      return out;
    }
    const Eigen::SelfAdjointEigenSolver<RealMatrix> es(h.matrix().real());
    if (es.info() != Eigen::Success) throw std::runtime_error("Hermitian eigensolver failed to converge");
    out.eigenvalues = es.eigenvalues();
    out.eigenvectors = es.eigenvectors().cast<Complex>();
    return out;
  }
  Matrix a = h.matrix();
  if (detail::lapack_heevd('V', n, a.data(), out.eigenvalues.data())) {
    out.eigenvectors = std::move(a);
    return out;
  }
  const Eigen::SelfAdjointEigenSolver<Matrix> es(h.matrix());
  if (es.info() != Eigen::Success) throw std::runtime_error("Hermitian eigensolver failed to converge");
  out.eigenvalues = es.eigenvalues();
  out.eigenvectors = es.eigenvectors();
  return out;
}

RealVector hermitian_eigenvalues(const HermitianOperator& h) {
  const auto n = static_cast<int>(h.dim());
  RealVector w(n);
  if (h.is_real()) {
    RealMatrix a = h.matrix().real();
    if (detail::lapack_syevd('N', n, a.data(), w.data())) return w;
    return Eigen::SelfAdjointEigenSolver<RealMatrix>(h.matrix().real(), Eigen::EigenvaluesOnly).eigenvalues();
  }
  Matrix a = h.matrix();
  if (detail::lapack_heevd('N', n, a.data(), w.data())) return w;
  return Eigen::SelfAdjointEigenSolver<Matrix>(h.matrix(), Eigen::EigenvaluesOnly).eigenvalues();
}

std::string_view eigensolver_backend() { return detail::lapack_backend_name(); }

BoltzmannFactor boltzmann_exp(const SpectralDecomposition& spectrum, double beta) {
  if (!(beta > 0.0) || !std::isfinite(beta)) {
    std::ostringstream os;
    os << "beta must be finite and positive, got " << beta;
    throw InvariantError(os.str());
  }
  const RealVector& w = spectrum.eigenvalues;
  const double shift = w.minCoeff();
  const RealVector weights = (-beta * (w.array() - shift)).exp().matrix();
  const Matrix& v = spectrum.eigenvectors;
  Matrix kernel = v * weights.cast<Complex>().asDiagonal() * v.adjoint();
  return {HermitianOperator(std::move(kernel)), -beta * shift};
}

BoltzmannFactor boltzmann_exp(const HermitianOperator& h, double beta) {
  if (!(beta > 0.0) || !std::isfinite(beta)) {
    std::ostringstream os;
    os << "beta must be finite and positive, got " << beta;
    throw InvariantError(os.str());
  }
  return boltzmann_exp(hermitian_eig(h), beta);
}

HermitianOperator kron(const HermitianOperator& a, const HermitianOperator& b) {
  const Index na = a.dim();
  const Index nb = b.dim();
  Matrix out(na * nb, na * nb);
  for (Index i = 0; i < na; ++i)
    for (Index j = 0; j < na; ++j) out.block(i * nb, j * nb, nb, nb) = a(i, j) * b.matrix();
  return HermitianOperator(std::move(out));
}

HermitianOperator partial_trace_env(const HermitianOperator& rho, const CompositeDims& dims) {
  if (dims.sys_dim < 1 || dims.env_dim < 1 || rho.dim() != dims.total())
    throw InvariantError(dim_message("partial_trace_env", rho.dim(), dims.total()));
  const Index ns = dims.sys_dim;
  const Index ne = dims.env_dim;
  Matrix out = Matrix::Zero(ns, ns);
  for (Index a = 0; a < ns; ++a)
    for (Index b = 0; b < ns; ++b) out(a, b) = rho.matrix().block(a * ne, b * ne, ne, ne).trace();
  return HermitianOperator(std::move(out));
}

// ---------------------------------------------------------------------------

DensityMatrix::DensityMatrix(HermitianOperator op) : op_(std::move(op)) {
  const double tr = op_.trace();
  if (std::abs(tr - 1.0) > kTraceTolerance) {
    std::ostringstream os;
    os << "density matrix trace is " << tr << ", expected 1";
    throw InvariantError(os.str());
  }
  const double lowest = hermitian_eigenvalues(op_).minCoeff();
  if (lowest < -kPositivityTolerance) {
    std::ostringstream os;
    os << "density matrix has negative eigenvalue " << lowest;
    throw InvariantError(os.str());
  }
}

DensityMatrix DensityMatrix::normalized(const HermitianOperator& op) {
  const double tr = op.trace();
  if (!(tr > 0.0) || !std::isfinite(tr)) throw InvariantError("cannot normalize an operator with nonpositive trace");
  return DensityMatrix(op * (1.0 / tr));
}

DensityMatrix DensityMatrix::from_weights(const RealVector& weights) {
  if ((weights.array() < 0.0).any()) throw InvariantError("diagonal state weights must be nonnegative");
  const double total = weights.sum();
  if (!(total > 0.0)) throw InvariantError("diagonal state weights sum to zero");
  return DensityMatrix(HermitianOperator::diagonal(weights / total));
}

double trace_norm(const HermitianOperator& h) { return hermitian_eigenvalues(h).cwiseAbs().sum(); }

double trace_distance(const DensityMatrix& rho, const DensityMatrix& sigma) {
  if (rho.dim() != sigma.dim()) throw InvariantError(dim_message("trace_distance", rho.dim(), sigma.dim()));
  // Canonical argument order so that D(rho, sigma) == D(sigma, rho) bit for bit.
  const Complex* a = rho.matrix().data();
  const Complex* b = sigma.matrix().data();
  const auto n = rho.matrix().size();
  const bool swap = std::lexicographical_compare(b, b + n, a, a + n, [](Complex x, Complex y) {
    return x.real() != y.real() ? x.real() < y.real() : x.imag() < y.imag();
  });
  const double d = swap ? 0.5 * trace_norm(sigma.op() - rho.op()) : 0.5 * trace_norm(rho.op() - sigma.op());
  return std::clamp(d, 0.0, 1.0);
}

// ---------------------------------------------------------------------------

ProjectorFamily::ProjectorFamily(std::vector<double> cluster_values, std::vector<HermitianOperator> projectors,
                                 double cluster_tolerance, bool collapsed)
    : values_(std::move(cluster_values)),
      projectors_(std::move(projectors)),
      tolerance_(cluster_tolerance),
      collapsed_(collapsed) {
  if (values_.empty() || values_.size() != projectors_.size())
    throw InvariantError("projector family needs one projector per cluster value");
  if (tolerance_ < 0.0) throw InvariantError("cluster tolerance must be nonnegative");
  for (std::size_t i = 1; i < values_.size(); ++i)
    if (!(values_[i] - values_[i - 1] > tolerance_))
      throw InvariantError("cluster values must be strictly increasing with gaps above the tolerance");

  const Index n = projectors_.front().dim();
  Matrix sum = Matrix::Zero(n, n);
  for (std::size_t i = 0; i < projectors_.size(); ++i) {
    const Matrix& p = projectors_[i].matrix();
    if (p.rows() != n) throw InvariantError("projectors have inconsistent dimensions");
    if ((p * p - p).cwiseAbs().maxCoeff() > kTolerance) throw InvariantError("projector is not idempotent");
    for (std::size_t j = i + 1; j < projectors_.size(); ++j)
      if ((p * projectors_[j].matrix()).cwiseAbs().maxCoeff() > kTolerance)
        throw InvariantError("projectors are not mutually orthogonal");
    sum += p;
  }
  if ((sum - Matrix::Identity(n, n)).cwiseAbs().maxCoeff() > kTolerance)
    throw InvariantError("projectors do not resolve the identity");
}

HermitianOperator project_block_diagonal(const HermitianOperator& h, const ProjectorFamily& family) {
  if (h.dim() != family.dim()) throw InvariantError(dim_message("project_block_diagonal", h.dim(), family.dim()));
  Matrix out = Matrix::Zero(h.dim(), h.dim());
  for (const auto& p : family.projectors()) out += p.matrix() * h.matrix() * p.matrix();
  return HermitianOperator(std::move(out));
}

double off_block_trace_norm(const HermitianOperator& rho, const ProjectorFamily& family) {
  return trace_norm(rho - project_block_diagonal(rho, family));
}

double max_commutator(const HermitianOperator& h, const ProjectorFamily& family) {
  if (h.dim() != family.dim()) throw InvariantError(dim_message("max_commutator", h.dim(), family.dim()));
  double worst = 0.0;
  for (const auto& p : family.projectors()) {
    const Matrix c = h.matrix() * p.matrix() - p.matrix() * h.matrix();
    worst = std::max(worst, c.cwiseAbs().maxCoeff());
  }
  return worst;
}

} // namespace uscgibbs

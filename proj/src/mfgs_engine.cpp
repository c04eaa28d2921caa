#include "uscgibbs/mfgs_engine.hpp"

#include <cmath>
#include <sstream>

#include "uscgibbs/usc_analytics.hpp"

namespace uscgibbs {

DensityMatrix compute_gibbs(const HermitianOperator& h, double beta) {
  return DensityMatrix::normalized(boltzmann_exp(h, beta).kernel);
}

DensityMatrix compute_mfgs(const HermitianOperator& h_se, const CompositeDims& dims, double beta) {
  if (h_se.dim() != dims.total()) {
    std::ostringstream os;
    os << "compute_mfgs: Hamiltonian dimension " << h_se.dim() << " != " << dims.sys_dim << " x " << dims.env_dim;
    throw InvariantError(os.str());
  }
  if (!(beta > 0.0) || !std::isfinite(beta)) throw InvariantError("beta must be finite and positive");

  // Tr_E sum_k w_k |v_k><v_k| without forming the full kernel.
  const SpectralDecomposition eig = hermitian_eig(h_se);
  const double shift = eig.eigenvalues.minCoeff();
  const Index ns = dims.sys_dim;
  const Index ne = dims.env_dim;
  const Index n = h_se.dim();
  Matrix reduced = Matrix::Zero(ns, ns);
  const RealVector root_weights = (-0.5 * beta * (eig.eigenvalues.array() - shift)).exp().matrix();
  Matrix scaled(ns, n);
  for (Index j = 0; j < ne; ++j) {
    for (Index k = 0; k < n; ++k)
      for (Index s = 0; s < ns; ++s) scaled(s, k) = root_weights(k) * eig.eigenvectors(s * ne + j, k);
    reduced.noalias() += scaled * scaled.adjoint();
  }
  return DensityMatrix::normalized(HermitianOperator(std::move(reduced)));
}

DensityMatrix compute_mfgs(const ModelSpec& spec) {
  const AssembledHamiltonian h = assemble(spec);
  return compute_mfgs(h.h, h.dims, spec.beta);
}

std::vector<EnvGrid> GridSchedule::stages() const {
  initial.validate();
  if (max_stages < 1) throw InvariantError("grid schedule needs at least one stage");
  std::vector<EnvGrid> out;
  const double center = initial.center();
  double half = initial.half_width();
  long points = initial.n_points;
  for (int k = 0; k < max_stages && points <= max_points; ++k) {
    EnvGrid g = initial;
    g.q_min = center - half;
    g.q_max = center + half;
    g.n_points = static_cast<int>(points);
    out.push_back(g);
    half *= box_growth;
    points *= 2;
  }
  if (out.empty()) throw InvariantError("grid schedule starts above its point budget");
  return out;
}

ConvergedMfgs converge_mfgs(const ModelSpec& spec, const GridSchedule& schedule, double tol,
                            ConvergenceObservable observable) {
  std::optional<DensityMatrix> reference;
  if (observable == ConvergenceObservable::trace_distance_to_usc) reference = usc_reference(spec);

  ConvergenceReport report;
  std::optional<DensityMatrix> previous;
  double previous_value = 0.0;
  for (const EnvGrid& grid : schedule.stages()) {
    ModelSpec staged = spec;
    staged.env = grid;
    DensityMatrix state = compute_mfgs(staged);

    ConvergenceStage stage{grid, 0.0, std::nullopt};
    if (reference) {
      stage.value = trace_distance(state, *reference);
      if (previous) stage.delta = std::abs(stage.value - previous_value);
    } else if (previous) {
      stage.delta = trace_distance(state, *previous);
    }
    previous_value = stage.value;
    previous = std::move(state);
    report.stages.push_back(stage);
    report.final_grid = grid;
    if (stage.delta && *stage.delta <= tol) {
      report.converged = true;
      break;
    }
  }
  return {std::move(*previous), std::move(report)};
}

} // namespace uscgibbs

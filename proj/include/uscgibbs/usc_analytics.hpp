#pragma once

#include <vector>

#include "uscgibbs/model_builders.hpp"

namespace uscgibbs {

/// Closed-form ultrastrong-coupling state of one model family.
struct UscState {
  DensityMatrix state;
  HermitianOperator effective_hamiltonian;  // H~ = sum_i P_i (H_S + V0) P_i
  Family family;
  ProjectorFamily projectors;
  /// Energy shift V0(A_i) added on each cluster (zero for CL/GCL2).
  std::vector<double> cluster_shifts;
  /// ln Z_env(A_i) per cluster (GCL only, empty otherwise).
  std::vector<double> log_partition;
};

/// One GCL environment mode: grid shape (recentered per cluster), well, coupling.
struct EnvModeSpec {
  EnvGrid grid;
  PolynomialPotential potential;
  double coupling = 0.0;
};

/// Environment particle attached to a continuous-variable system.
struct CvEnvMode {
  double mass = 1.0;
  ScalarPotential u_free = ScalarPotential::morse();
  double spring_min = 0.0;
};

UscState usc_cl_gcl2(const SystemModel& system, double beta, double tol = 1e-8);

/// ln Tr exp(-beta [K + V(Q, c a)]) on the mode grid recentered on the well minimum Q = c a.
/// Throws PreconditionError when the thermal density comes within 4 widths of a wall.
double mode_log_partition(const EnvModeSpec& mode, double cluster_value, double beta);

/// Well-escape check on the exact environment grid: every well minimum c A_i must sit at least
/// 4 thermal widths inside the walls. No-op for the Zwanzig families.
void check_wells_inside(const ModelSpec& spec);

UscState usc_gcl(const SystemModel& system, const std::vector<EnvModeSpec>& modes, double beta,
                 double tol = 1e-8);

UscState usc_zwanzig_discrete(const SystemModel& system, const std::vector<ZwanzigEnvSpec>& modes, double beta,
                              double tol = 1e-8);

/// Position distribution of exp(-beta H_eff) with M_eff = m + sum m_k and V_eff = V + sum U_k(q + x_k).
DensityMatrix usc_zwanzig_cv(const CvSystem& sys, const std::vector<CvEnvMode>& envs, double beta);

/// Normalized exp(-beta V(q_j)) over the grid.
template <class Potential>
DensityMatrix usc_cl_cv(const Potential& potential, const EnvGrid& grid, double beta) {
  grid.validate();
  if (!(beta > 0.0)) throw InvariantError("beta must be positive");
  const RealVector q = grid.points();
  RealVector v(q.size());
  for (Index j = 0; j < q.size(); ++j) v(j) = potential(q(j));
  const double vmin = v.minCoeff();
  return DensityMatrix::from_weights((-beta * (v.array() - vmin)).exp().matrix());
}

/// USC reference state for a model spec (the analytic target of the exact MFGS).
DensityMatrix usc_reference(const ModelSpec& spec);
/// Full USC record for the discrete families; throws for ZWANZIG_CV.
UscState usc_for_spec(const ModelSpec& spec);

} // namespace uscgibbs

#include "uscgibbs/usc_analytics.hpp"

#include <cmath>
#include <sstream>

#include "uscgibbs/mfgs_engine.hpp"

namespace uscgibbs {

namespace {

void require_beta(double beta) {
  if (!(beta > 0.0) || !std::isfinite(beta)) throw InvariantError("beta must be finite and positive");
}

UscState assemble_state(const SystemModel& system, const ProjectorFamily& projectors, std::vector<double> shifts,
                        double beta, Family family, std::vector<double> log_partition = {}) {
  Matrix h = project_block_diagonal(system.h_sys, projectors).matrix();
  for (std::size_t i = 0; i < projectors.size(); ++i) h += shifts[i] * projectors.projectors()[i].matrix();
  HermitianOperator h_eff(std::move(h));
  DensityMatrix state = compute_gibbs(h_eff, beta);
  return {std::move(state), std::move(h_eff), family, projectors, std::move(shifts), std::move(log_partition)};
}

// Diagonal of the (shifted) Boltzmann kernel: sum_k exp(-beta (l_k - l_min)) |v_jk|^2.
RealVector kernel_diagonal(const SpectralDecomposition& eig, double beta) {
  const RealVector w = (-beta * (eig.eigenvalues.array() - eig.eigenvalues.minCoeff())).exp().matrix();
  return eig.eigenvectors.cwiseAbs2() * w;
}

} // namespace

UscState usc_cl_gcl2(const SystemModel& system, double beta, double tol) {
  require_beta(beta);
  ProjectorFamily projectors = cluster_coupling_operator(system.coupling_op, tol);
  std::vector<double> shifts(projectors.size(), 0.0);
  return assemble_state(system, projectors, std::move(shifts), beta, Family::gcl2);
}

namespace {

struct ModeThermal {
  double log_partition = 0.0;
  double mean = 0.0;
  double width = 0.0;
};

// Thermal state of one mode on its grid recentered on the well minimum Q = c a.
ModeThermal mode_thermal(const EnvModeSpec& mode, double cluster_value, double beta) {
  require_beta(beta);
  mode.potential.validate();
  const double y = mode.coupling * cluster_value;
  const EnvGrid grid = mode.grid.recentered(y);
  const HermitianOperator h =
      grid_hamiltonian(grid, [&](double q) { return mode.potential.interaction(q, y); });
  const SpectralDecomposition eig = hermitian_eig(h);
  const double lowest = eig.eigenvalues.minCoeff();
  const double shifted_partition = (-beta * (eig.eigenvalues.array() - lowest)).exp().sum();

  RealVector density = kernel_diagonal(eig, beta);
  density /= density.sum();
  const RealVector q = grid.points();
  ModeThermal out;
  out.mean = density.dot(q);
  const double var = density.dot((q.array() - out.mean).square().matrix());
  out.width = std::sqrt(std::max(var, 0.0));
  const double room = std::min(out.mean - grid.q_min, grid.q_max - out.mean);
  if (room < 4.0 * out.width) {
    std::ostringstream os;
    os << "thermal well for cluster value A = " << cluster_value << " (minimum at Q = " << y
       << ") is within 4 thermal widths (" << out.width << ") of the grid walls [" << grid.q_min << ", "
       << grid.q_max << "]";
    throw PreconditionError(os.str());
  }
  out.log_partition = -beta * lowest + std::log(shifted_partition);
  return out;
}

} // namespace

double mode_log_partition(const EnvModeSpec& mode, double cluster_value, double beta) {
  return mode_thermal(mode, cluster_value, beta).log_partition;
}

void check_wells_inside(const ModelSpec& spec) {
  spec.validate();
  if (spec.family != Family::cl && spec.family != Family::gcl && spec.family != Family::gcl2) return;
  const EnvModeSpec mode{spec.env, std::get<PolynomialPotential>(spec.potential), spec.coupling};
  const ProjectorFamily projectors =
      cluster_coupling_operator(std::get<SystemModel>(spec.system).coupling_op, spec.cluster_tol);
  for (double a : projectors.cluster_values()) {
    const ModeThermal t = mode_thermal(mode, a, spec.beta);
    if (t.mean - 4.0 * t.width < spec.env.q_min || t.mean + 4.0 * t.width > spec.env.q_max) {
      std::ostringstream os;
      os << "well minimum Q = " << spec.coupling * a << " for A = " << a << " lies within 4 thermal widths ("
         << t.width << ") of the environment grid walls [" << spec.env.q_min << ", " << spec.env.q_max << "]";
      throw PreconditionError(os.str());
    }
  }
}

UscState usc_gcl(const SystemModel& system, const std::vector<EnvModeSpec>& modes, double beta, double tol) {
  require_beta(beta);
  ProjectorFamily projectors = cluster_coupling_operator(system.coupling_op, tol);
  std::vector<double> log_z(projectors.size(), 0.0);
  std::vector<double> shifts(projectors.size(), 0.0);
  for (std::size_t i = 0; i < projectors.size(); ++i) {
    for (std::size_t k = 0; k < modes.size(); ++k) {
      try {
        log_z[i] += mode_log_partition(modes[k], projectors.cluster_values()[i], beta);
      } catch (const PreconditionError& e) {
        std::ostringstream os;
        os << "mode " << k << ": " << e.what();
        throw PreconditionError(os.str());
      }
    }
    shifts[i] = -log_z[i] / beta;
  }
  return assemble_state(system, projectors, std::move(shifts), beta, Family::gcl, std::move(log_z));
}

UscState usc_zwanzig_discrete(const SystemModel& system, const std::vector<ZwanzigEnvSpec>& modes, double beta,
                              double tol) {
  require_beta(beta);
  ProjectorFamily projectors = cluster_coupling_operator(system.coupling_op, tol);
  std::vector<double> shifts(projectors.size(), 0.0);
  for (std::size_t i = 0; i < projectors.size(); ++i)
    for (const auto& m : modes) shifts[i] += m.u_free(projectors.cluster_values()[i] + m.spring_min);
  return assemble_state(system, projectors, std::move(shifts), beta, Family::zwanzig);
}

DensityMatrix usc_zwanzig_cv(const CvSystem& sys, const std::vector<CvEnvMode>& envs, double beta) {
  require_beta(beta);
  EnvGrid grid = sys.grid;
  for (const auto& e : envs) {
    if (!(e.mass > 0.0)) throw InvariantError("environment masses must be positive");
    grid.mass += e.mass;
  }
  const auto v_eff = [&](double q) {
    double v = sys.potential(q);
    for (const auto& e : envs) v += e.u_free(q + e.spring_min);
    return v;
  };
  const SpectralDecomposition eig = hermitian_eig(grid_hamiltonian(grid, v_eff));
  return DensityMatrix::from_weights(kernel_diagonal(eig, beta));
}

UscState usc_for_spec(const ModelSpec& spec) {
  spec.validate();
  switch (spec.family) {
    case Family::cl:
    case Family::gcl2: {
      UscState s = usc_cl_gcl2(std::get<SystemModel>(spec.system), spec.beta, spec.cluster_tol);
      s.family = spec.family;
      return s;
    }
    case Family::gcl: {
      const EnvModeSpec mode{spec.env, std::get<PolynomialPotential>(spec.potential), spec.coupling};
      return usc_gcl(std::get<SystemModel>(spec.system), {mode}, spec.beta, spec.cluster_tol);
    }
    case Family::zwanzig:
      return usc_zwanzig_discrete(std::get<SystemModel>(spec.system), {std::get<ZwanzigEnvSpec>(spec.potential)},
                                  spec.beta, spec.cluster_tol);
    case Family::zwanzig_cv:
      break;
  }
  throw InvariantError("ZWANZIG_CV has a position-distribution USC state, not a projector-family state");
}

DensityMatrix usc_reference(const ModelSpec& spec) {
  if (spec.family == Family::zwanzig_cv) {
    spec.validate();
    const auto& z = std::get<ZwanzigEnvSpec>(spec.potential);
    return usc_zwanzig_cv(std::get<CvSystem>(spec.system), {CvEnvMode{spec.env.mass, z.u_free, z.spring_min}},
                          spec.beta);
  }
  return usc_for_spec(spec).state;
}

} // namespace uscgibbs

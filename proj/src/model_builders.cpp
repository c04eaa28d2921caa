#include "uscgibbs/model_builders.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

namespace uscgibbs {

SystemModel::SystemModel(HermitianOperator h, HermitianOperator a) : h_sys(std::move(h)), coupling_op(std::move(a)) {
  if (h_sys.dim() != coupling_op.dim()) {
    std::ostringstream os;
    os << "system Hamiltonian (dim " << h_sys.dim() << ") and coupling operator (dim " << coupling_op.dim()
       << ") differ in dimension";
    throw InvariantError(os.str());
  }
}

SystemModel reference_qutrit() {
  RealMatrix h(3, 3);
  h << 1, 1, 0, 1, 0, 1, 0, 1, -1;
  RealVector a(3);
  a << 1.0, 0.0, -0.5;
  return {HermitianOperator::from_real(h), HermitianOperator::diagonal(a)};
}

// ---------------------------------------------------------------------------

void EnvGrid::validate() const {
  std::ostringstream os;
  if (!std::isfinite(q_min) || !std::isfinite(q_max) || !(q_max > q_min))
    os << "grid bounds must satisfy q_max > q_min (got [" << q_min << ", " << q_max << "])";
  else if (n_points < 3)
    os << "grid needs at least 3 points (got " << n_points << ")";
  else if (!(mass > 0.0))
    os << "grid mass must be positive (got " << mass << ")";
  else
    return;
  throw InvariantError(os.str());
}

RealVector EnvGrid::points() const {
  RealVector q(n_points);
  const double dq = spacing();
  for (int j = 0; j < n_points; ++j) q(j) = q_min + j * dq;
  q(n_points - 1) = q_max;
  return q;
}

EnvGrid EnvGrid::recentered(double new_center) const {
  EnvGrid g = *this;
  const double shift = new_center - center();
  g.q_min += shift;
  g.q_max += shift;
  return g;
}

bool operator==(const EnvGrid& a, const EnvGrid& b) {
  return a.q_min == b.q_min && a.q_max == b.q_max && a.n_points == b.n_points && a.mass == b.mass;
}

// ---------------------------------------------------------------------------

namespace {

double even_poly(const std::array<double, 3>& a, double x) {
  const double x2 = x * x;
  return x2 * (a[0] + x2 * (a[1] + x2 * a[2]));
}

} // namespace

void PolynomialPotential::validate() const {
  for (double a : coeffs_even)
    if (!(a >= 0.0) || !std::isfinite(a))
      throw InvariantError("polynomial potential coefficients must be finite and nonnegative "
                           "(the well must be bounded from below)");
  if (std::all_of(coeffs_even.begin(), coeffs_even.end(), [](double a) { return a == 0.0; }))
    throw InvariantError("polynomial potential needs at least one positive coefficient");
  if (!(stiffening >= 0.0) || !std::isfinite(stiffening))
    throw InvariantError("polynomial potential stiffening must be finite and nonnegative");
}

double PolynomialPotential::operator()(double x) const { return even_poly(coeffs_even, x); }

double PolynomialPotential::interaction(double env_position, double system_value) const {
  return (1.0 + stiffening * system_value * system_value) * even_poly(coeffs_even, env_position - system_value);
}

ScalarPotential ScalarPotential::zero() {
  ScalarPotential p;
  p.kind = Kind::zero;
  return p;
}

ScalarPotential ScalarPotential::morse(double depth, double width, double center) {
  ScalarPotential p;
  p.kind = Kind::morse;
  p.depth = depth;
  p.width = width;
  p.center = center;
  return p;
}

ScalarPotential ScalarPotential::polynomial(double a2, double a4, double a6) {
  ScalarPotential p;
  p.kind = Kind::polynomial;
  p.even = {a2, a4, a6};
  return p;
}

double ScalarPotential::operator()(double x) const {
  switch (kind) {
    case Kind::zero:
      return offset;
    case Kind::morse: {
      const double s = 1.0 - std::exp(-width * (x - center));
      return depth * s * s + offset;
    }
    case Kind::polynomial:
      return even_poly(even, x) + offset;
  }
  return offset;
}

std::string_view to_string(ScalarPotential::Kind kind) {
  switch (kind) {
    case ScalarPotential::Kind::zero:
      return "zero";
    case ScalarPotential::Kind::morse:
      return "morse";
    case ScalarPotential::Kind::polynomial:
      return "polynomial";
  }
  return "?";
}

// ---------------------------------------------------------------------------

std::string_view to_string(Family family) {
  switch (family) {
    case Family::cl:
      return "CL";
    case Family::gcl:
      return "GCL";
    case Family::gcl2:
      return "GCL2";
    case Family::zwanzig:
      return "ZWANZIG";
    case Family::zwanzig_cv:
      return "ZWANZIG_CV";
  }
  return "?";
}

Family family_from_string(std::string_view name) {
  for (Family f : {Family::cl, Family::gcl, Family::gcl2, Family::zwanzig, Family::zwanzig_cv})
    if (to_string(f) == name) return f;
  std::ostringstream os;
  os << "unknown model family \"" << name << "\" (valid: CL, GCL, GCL2, ZWANZIG, ZWANZIG_CV)";
  throw InvariantError(os.str());
}

void ModelSpec::validate() const {
  if (!(beta > 0.0) || !std::isfinite(beta)) throw InvariantError("beta must be finite and positive");
  if (!(coupling >= 0.0) || !std::isfinite(coupling)) throw InvariantError("coupling must be finite and >= 0");
  if (!(cluster_tol >= 0.0)) throw InvariantError("cluster tolerance must be >= 0");
  env.validate();

  const bool discrete = std::holds_alternative<SystemModel>(system);
  const bool polynomial = std::holds_alternative<PolynomialPotential>(potential);
  switch (family) {
    case Family::cl:
    case Family::gcl:
    case Family::gcl2: {
      if (!discrete) throw InvariantError("CL/GCL/GCL2 models need a discrete system");
      if (!polynomial) throw InvariantError("CL/GCL/GCL2 models need a polynomial potential");
      const auto& v = std::get<PolynomialPotential>(potential);
      v.validate();
      if (family != Family::gcl && !v.is_shift_invariant())
        throw InvariantError("stiffening is only meaningful for the GCL family");
      if (family == Family::cl && (v.coeffs_even[1] != 0.0 || v.coeffs_even[2] != 0.0))
        throw InvariantError("the CL family is harmonic: only a2 may be nonzero");
      break;
    }
    case Family::zwanzig:
      if (!discrete || polynomial) throw InvariantError("ZWANZIG models need a discrete system and a Zwanzig payload");
      break;
    case Family::zwanzig_cv:
      if (discrete || polynomial) throw InvariantError("ZWANZIG_CV models need a CV system and a Zwanzig payload");
      std::get<CvSystem>(system).grid.validate();
      break;
  }
}

// ---------------------------------------------------------------------------

ProjectorFamily cluster_coupling_operator(const HermitianOperator& a, double tol) {
  if (!(tol >= 0.0)) throw InvariantError("cluster tolerance must be >= 0");
  const SpectralDecomposition eig = hermitian_eig(a);
  const Index n = a.dim();
  const RealVector& w = eig.eigenvalues;

  std::vector<double> values;
  std::vector<HermitianOperator> projectors;
  Index start = 0;
  for (Index i = 1; i <= n; ++i) {
    if (i < n && w(i) - w(i - 1) <= tol) continue;
    const Matrix cols = eig.eigenvectors.middleCols(start, i - start);
    values.push_back(w.segment(start, i - start).mean());
    projectors.emplace_back(cols * cols.adjoint());
    start = i;
  }
  const double range = w(n - 1) - w(0);
  const bool collapsed = values.size() == 1 && range > 0.0;
  return ProjectorFamily(std::move(values), std::move(projectors), tol, collapsed);
}

GridOperators build_grid_operators(const EnvGrid& grid) {
  grid.validate();
  const int n = grid.n_points;
  const double dq = grid.spacing();
  const double t = std::isinf(grid.mass) ? 0.0 : 1.0 / (grid.mass * dq * dq);
  RealMatrix k = RealMatrix::Zero(n, n);
  for (int j = 0; j < n; ++j) {
    k(j, j) = t;
    if (j + 1 < n) k(j, j + 1) = k(j + 1, j) = -0.5 * t;
  }
  return {HermitianOperator::diagonal(grid.points()), HermitianOperator::from_real(k)};
}

namespace {

// H_S (x) I + I (x) H_env + F(Q, A), with F evaluated in the joint eigenbasis of A and Q:
// block (s, s') at grid point j is sum_r U_sr F(q_j, a_r) conj(U_s'r).
template <class Interaction>
AssembledHamiltonian assemble_composite(const HermitianOperator& h_sys, const HermitianOperator& coupling_op,
                                        const HermitianOperator& h_env, const RealVector& q,
                                        const Interaction& interaction) {
  const Index ns = h_sys.dim();
  const Index ne = h_env.dim();
  const SpectralDecomposition a = hermitian_eig(coupling_op);
  const Matrix& u = a.eigenvectors;

  Matrix h = kron(h_sys, HermitianOperator::identity(ne)).matrix();
  for (Index s = 0; s < ns; ++s) h.block(s * ne, s * ne, ne, ne) += h_env.matrix();

  RealVector f(ns);
  for (Index j = 0; j < ne; ++j) {
    for (Index r = 0; r < ns; ++r) f(r) = interaction(q(j), a.eigenvalues(r));
    const Matrix block = u * f.cast<Complex>().asDiagonal() * u.adjoint();
    for (Index s = 0; s < ns; ++s)
      for (Index t = 0; t < ns; ++t) h(s * ne + j, t * ne + j) += block(s, t);
  }
  return {HermitianOperator(std::move(h)), {ns, ne}};
}

} // namespace

AssembledHamiltonian build_gcl_hamiltonian(const ModelSpec& spec) {
  if (spec.family != Family::cl && spec.family != Family::gcl && spec.family != Family::gcl2)
    throw InvariantError("build_gcl_hamiltonian needs a CL, GCL or GCL2 spec");
  spec.validate();
  const auto& sys = std::get<SystemModel>(spec.system);
  const auto& v = std::get<PolynomialPotential>(spec.potential);
  const GridOperators env = build_grid_operators(spec.env);
  const double c = spec.coupling;
  return assemble_composite(sys.h_sys, sys.coupling_op, env.kinetic, spec.env.points(),
                            [&](double q, double a) { return v.interaction(q, c * a); });
}

AssembledHamiltonian build_zwanzig_hamiltonian(const ModelSpec& spec) {
  if (spec.family != Family::zwanzig) throw InvariantError("build_zwanzig_hamiltonian needs a ZWANZIG spec");
  spec.validate();
  const auto& sys = std::get<SystemModel>(spec.system);
  const auto& z = std::get<ZwanzigEnvSpec>(spec.potential);
  const HermitianOperator h_env = grid_hamiltonian(spec.env, z.u_free);
  const double half_c = 0.5 * spec.coupling;
  return assemble_composite(sys.h_sys, sys.coupling_op, h_env, spec.env.points(), [&](double q, double a) {
    const double x = q - a - z.spring_min;
    return half_c * x * x;
  });
}

AssembledHamiltonian build_cv_zwanzig_hamiltonian(const CvSystem& sys, const ZwanzigEnvSpec& env,
                                                  const EnvGrid& env_grid, double coupling) {
  sys.grid.validate();
  env_grid.validate();
  const HermitianOperator h_sys = grid_hamiltonian(sys.grid, sys.potential);
  const HermitianOperator h_env = grid_hamiltonian(env_grid, env.u_free);
  const Index ns = h_sys.dim();
  const Index ne = h_env.dim();
  Matrix h = kron(h_sys, HermitianOperator::identity(ne)).matrix();
  for (Index s = 0; s < ns; ++s) h.block(s * ne, s * ne, ne, ne) += h_env.matrix();
  const RealVector qs = sys.grid.points();
  const RealVector qe = env_grid.points();
  for (Index s = 0; s < ns; ++s)
    for (Index j = 0; j < ne; ++j) {
      const double x = qe(j) - qs(s) - env.spring_min;
      h(s * ne + j, s * ne + j) += 0.5 * coupling * x * x;
    }
  return {HermitianOperator(std::move(h)), {ns, ne}};
}

AssembledHamiltonian assemble(const ModelSpec& spec) {
  switch (spec.family) {
    case Family::cl:
    case Family::gcl:
    case Family::gcl2:
      return build_gcl_hamiltonian(spec);
    case Family::zwanzig:
      return build_zwanzig_hamiltonian(spec);
    case Family::zwanzig_cv:
      spec.validate();
      return build_cv_zwanzig_hamiltonian(std::get<CvSystem>(spec.system), std::get<ZwanzigEnvSpec>(spec.potential),
                                          spec.env, spec.coupling);
  }
  throw InvariantError("unknown family");
}

// ---------------------------------------------------------------------------

EnvGrid default_gcl_grid(double coupling, const HermitianOperator& coupling_op, int n_points, double mass) {
  const double amax = hermitian_eigenvalues(coupling_op).cwiseAbs().maxCoeff();
  const double half = 8.0 + std::abs(coupling) * amax;
  return {-half, half, n_points, mass};
}

EnvGrid default_zwanzig_grid(const HermitianOperator& coupling_op, double spring_min, int n_points, double mass) {
  const RealVector w = hermitian_eigenvalues(coupling_op);
  return {w.minCoeff() - 6.0 + spring_min, w.maxCoeff() + 6.0 + spring_min, n_points, mass};
}

EnvGrid default_grid(const ModelSpec& spec, int n_points) {
  const double mass = spec.env.mass;
  switch (spec.family) {
    case Family::cl:
    case Family::gcl:
    case Family::gcl2:
      return default_gcl_grid(spec.coupling, std::get<SystemModel>(spec.system).coupling_op, n_points, mass);
    case Family::zwanzig:
      return default_zwanzig_grid(std::get<SystemModel>(spec.system).coupling_op,
                                  std::get<ZwanzigEnvSpec>(spec.potential).spring_min, n_points, mass);
    case Family::zwanzig_cv: {
      EnvGrid g = std::get<CvSystem>(spec.system).grid;
      g.n_points = n_points;
      g.mass = mass;
      g.q_min += std::get<ZwanzigEnvSpec>(spec.potential).spring_min;
      g.q_max += std::get<ZwanzigEnvSpec>(spec.potential).spring_min;
      return g;
    }
  }
  return spec.env;
}

} // namespace uscgibbs

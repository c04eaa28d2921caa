#pragma once

#include <array>
#include <string>
#include <string_view>
#include <variant>

#include "uscgibbs/operator_core.hpp"

namespace uscgibbs {

/// Discrete system: free Hamiltonian and the operator through which it couples.
struct SystemModel {
  HermitianOperator h_sys;
  HermitianOperator coupling_op;

  SystemModel() = default;
  SystemModel(HermitianOperator h, HermitianOperator a);
};

/// The qutrit used throughout the numerics: tridiagonal H_S and A = diag(1, 0, -0.5).
SystemModel reference_qutrit();

/// Uniform position grid of one particle. Infinite mass switches the kinetic term off.
struct EnvGrid {
  double q_min = -1.0;
  double q_max = 1.0;
  int n_points = 3;
  double mass = 1.0;

  void validate() const;
  [[nodiscard]] double spacing() const { return (q_max - q_min) / (n_points - 1); }
  [[nodiscard]] double center() const { return 0.5 * (q_min + q_max); }
  [[nodiscard]] double half_width() const { return 0.5 * (q_max - q_min); }
  [[nodiscard]] RealVector points() const;
  /// Same shape and mass, translated so the midpoint sits at `new_center`.
  [[nodiscard]] EnvGrid recentered(double new_center) const;
};

bool operator==(const EnvGrid& a, const EnvGrid& b);

/// Even polynomial well V(x) = a2 x^2 + a4 x^4 + a6 x^6.
///
/// As a GCL interaction it is evaluated as V(x, y) = (1 + stiffening * y^2) V(x - y);
/// stiffening = 0 is the shift-invariant (GCL2) case.
struct PolynomialPotential {
  std::array<double, 3> coeffs_even{1.0, 0.0, 0.0};
  double stiffening = 0.0;

  void validate() const;
  [[nodiscard]] double operator()(double x) const;
  [[nodiscard]] double interaction(double env_position, double system_value) const;
  [[nodiscard]] bool is_shift_invariant() const { return stiffening == 0.0; }
};

/// Scalar potential used for free environment terms and continuous-variable systems.
struct ScalarPotential {
  enum class Kind { zero, morse, polynomial };

  Kind kind = Kind::morse;
  // morse: depth * (1 - exp(-width * (x - center)))^2
  double depth = 1.0;
  double width = 1.0;
  double center = 0.0;
  // polynomial: a2 x^2 + a4 x^4 + a6 x^6
  std::array<double, 3> even{0.0, 0.0, 0.0};
  double offset = 0.0;

  static ScalarPotential zero();
  static ScalarPotential morse(double depth = 1.0, double width = 1.0, double center = 0.0);
  static ScalarPotential polynomial(double a2, double a4 = 0.0, double a6 = 0.0);

  [[nodiscard]] double operator()(double x) const;
};

std::string_view to_string(ScalarPotential::Kind kind);

/// Spring-coupled environment particle: H = p^2/2M + U_free(Q) + (c/2)(Q - A - spring_min)^2.
struct ZwanzigEnvSpec {
  ScalarPotential u_free = ScalarPotential::morse();
  double spring_min = 0.0;
};

/// Continuous-variable system p^2/2m + V(q) on a grid (mass lives in the grid).
struct CvSystem {
  EnvGrid grid;
  ScalarPotential potential = ScalarPotential::polynomial(0.5);
};

enum class Family { cl, gcl, gcl2, zwanzig, zwanzig_cv };

std::string_view to_string(Family family);
Family family_from_string(std::string_view name);

struct ModelSpec {
  Family family = Family::gcl2;
  std::variant<SystemModel, CvSystem> system = reference_qutrit();
  EnvGrid env;
  std::variant<PolynomialPotential, ZwanzigEnvSpec> potential = PolynomialPotential{};
  double coupling = 0.0;
  double beta = 5.0;
  double cluster_tol = 1e-8;

  /// Throws InvariantError when the payloads do not fit the family.
  void validate() const;
};

struct AssembledHamiltonian {
  HermitianOperator h;
  CompositeDims dims;
};

/// Groups the spectrum of `a` greedily in ascending order (a gap <= tol joins the cluster).
ProjectorFamily cluster_coupling_operator(const HermitianOperator& a, double tol = 1e-8);

struct GridOperators {
  HermitianOperator position;  // Q
  HermitianOperator kinetic;   // P^2 / 2M, central differences with hard walls
};

GridOperators build_grid_operators(const EnvGrid& grid);

/// K + V(Q) on a grid for a scalar function of position.
template <class Potential>
HermitianOperator grid_hamiltonian(const EnvGrid& grid, const Potential& potential) {
  const GridOperators ops = build_grid_operators(grid);
  const RealVector q = grid.points();
  RealVector v(q.size());
  for (Index j = 0; j < q.size(); ++j) v(j) = potential(q(j));
  Matrix h = ops.kinetic.matrix();
  h.diagonal() += v.cast<Complex>();
  return HermitianOperator(std::move(h));
}

AssembledHamiltonian build_gcl_hamiltonian(const ModelSpec& spec);
AssembledHamiltonian build_zwanzig_hamiltonian(const ModelSpec& spec);
AssembledHamiltonian build_cv_zwanzig_hamiltonian(const CvSystem& sys, const ZwanzigEnvSpec& env,
                                                  const EnvGrid& env_grid, double coupling);
/// Dispatches on `spec.family`.
AssembledHamiltonian assemble(const ModelSpec& spec);

/// Box [-8 - |c| max|A_i|, 8 + |c| max|A_i|] so every well minimum Q = c A_i stays inside.
EnvGrid default_gcl_grid(double coupling, const HermitianOperator& coupling_op, int n_points, double mass = 1.0);
/// Box [min A_i - 6, max A_i + 6] shifted by the spring minimum.
EnvGrid default_zwanzig_grid(const HermitianOperator& coupling_op, double spring_min, int n_points,
                             double mass = 1.0);
/// Family-appropriate default environment grid for `spec` (CV family: the system grid).
EnvGrid default_grid(const ModelSpec& spec, int n_points);

} // namespace uscgibbs

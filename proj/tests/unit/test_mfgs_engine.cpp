#include <doctest.h>

#include <cmath>

#include "support.hpp"
#include "uscgibbs/mfgs_engine.hpp"
#include "uscgibbs/usc_analytics.hpp"

using namespace uscgibbs;
using namespace testing_support;

namespace {

ModelSpec gcl2(std::array<double, 3> coeffs, double c, EnvGrid grid) {
  ModelSpec s;
  s.family = Family::gcl2;
  s.potential = PolynomialPotential{coeffs, 0.0};
  s.coupling = c;
  s.env = grid;
  return s;
}

// exp(-beta H) through Eigen, traced over the environment index by hand.
Matrix naive_mfgs(const HermitianOperator& h, Index ns, Index ne, double beta) {
  const Eigen::SelfAdjointEigenSolver<Matrix> es(h.matrix());
  const RealVector w = (-beta * (es.eigenvalues().array() - es.eigenvalues().minCoeff())).exp().matrix();
  const Matrix k = es.eigenvectors() * w.cast<Complex>().asDiagonal() * es.eigenvectors().adjoint();
  Matrix r = Matrix::Zero(ns, ns);
  for (Index s = 0; s < ns; ++s)
    for (Index t = 0; t < ns; ++t)
      for (Index j = 0; j < ne; ++j) r(s, t) += k(s * ne + j, t * ne + j);
  return r / r.trace();
}

} // namespace

TEST_CASE("compute_gibbs") {
  const DensityMatrix flat = compute_gibbs(HermitianOperator::zero(2), 5.0);
  CHECK(max_abs(flat.matrix() - 0.5 * Matrix::Identity(2, 2)) <= 1e-15);

  const double beta = 3.0;
  const DensityMatrix two = compute_gibbs(HermitianOperator::diagonal(RealVector{{0.0, std::log(2.0) / beta}}), beta);
  CHECK(two.populations()(0) == doctest::Approx(2.0 / 3.0));
  CHECK(two.populations()(1) == doctest::Approx(1.0 / 3.0));

  const HermitianOperator hs = HermitianOperator::from_real(qutrit_h());
  const DensityMatrix rho = compute_gibbs(hs, 5.0);
  const SpectralDecomposition e = hermitian_eig(hs);
  const double p0 = (e.eigenvectors.col(0).adjoint() * rho.matrix() * e.eigenvectors.col(0))(0, 0).real();
  const double s3 = std::sqrt(3.0);
  CHECK(p0 == doctest::Approx(1.0 / (1.0 + std::exp(-5.0 * s3) + std::exp(-10.0 * s3))).epsilon(1e-12));
}

TEST_CASE("compute_mfgs matches a naive full-kernel partial trace") {
  std::mt19937_64 rng(41);
  for (Index ns : {1, 2, 3})
    for (Index ne : {1, 4, 9}) {
      const HermitianOperator h = random_hermitian(ns * ne, rng);
      const DensityMatrix fast = compute_mfgs(h, {ns, ne}, 1.3);
      CHECK(max_abs(fast.matrix() - naive_mfgs(h, ns, ne, 1.3)) <= 1e-12);
    }
  const ModelSpec spec = gcl2({0.0, 1.0, 0.0}, 3.0, {-12.0, 12.0, 40, 1.0});
  const AssembledHamiltonian h = assemble(spec);
  CHECK(max_abs(compute_mfgs(spec).matrix() - naive_mfgs(h.h, 3, 40, 5.0)) <= 1e-10);
  CHECK_THROWS_AS(compute_mfgs(h.h, {3, 41}, 5.0), InvariantError);
}

TEST_CASE("decoupled composites reduce to the system Gibbs state") {
  const HermitianOperator hs = reference_qutrit().h_sys;
  const DensityMatrix gibbs = compute_gibbs(hs, 5.0);

  const DensityMatrix trivial = compute_mfgs(kron(hs, HermitianOperator::identity(6)), {3, 6}, 5.0);
  CHECK(trace_distance(trivial, gibbs) <= 1e-14);

  std::mt19937_64 rng(2);
  const HermitianOperator he = random_hermitian(10, rng);
  const HermitianOperator sep = kron(hs, HermitianOperator::identity(10)) + kron(HermitianOperator::identity(3), he);
  CHECK(trace_distance(compute_mfgs(sep, {3, 10}, 5.0), gibbs) <= 1e-10);
}

TEST_CASE("zero-coupling factorization for every family") {
  const DensityMatrix gibbs = compute_gibbs(reference_qutrit().h_sys, 5.0);
  for (Family f : {Family::cl, Family::gcl, Family::gcl2, Family::zwanzig}) {
    CAPTURE(to_string(f));
    ModelSpec s;
    s.family = f;
    s.coupling = 0.0;
    if (f == Family::zwanzig) {
      s.potential = ZwanzigEnvSpec{};
    } else {
      s.potential = PolynomialPotential{{1.0, f == Family::cl ? 0.0 : 0.5, 0.0}, f == Family::gcl ? 0.4 : 0.0};
    }
    s.env = default_grid(s, 96);
    CHECK(trace_distance(compute_mfgs(s), gibbs) <= 1e-8);
  }
}

TEST_CASE("GCL2 distance to the USC state shrinks with c") {
  const auto at = [](double c) {
    ModelSpec s = gcl2({1.0, 0.0, 0.0}, c, {});
    s.env = default_grid(s, 256);
    return trace_distance(compute_mfgs(s), usc_reference(s));
  };
  CHECK(at(6.0) < at(1.0));
}

TEST_CASE("MFGS properties") {
  SUBCASE("beta and beta/2 give distinct valid states at c > 0") {
    ModelSpec s = gcl2({0.0, 1.0, 0.0}, 2.0, {-10.0, 10.0, 64, 1.0});
    const DensityMatrix a = compute_mfgs(s);
    s.beta = 2.5;
    const DensityMatrix b = compute_mfgs(s);
    CHECK(trace_distance(a, b) > 1e-3);
  }
  SUBCASE("basis covariance") {
    std::mt19937_64 rng(77);
    const SystemModel base = reference_qutrit();
    ModelSpec s = gcl2({0.3, 0.4, 0.0}, 1.7, {-9.0, 9.0, 48, 1.0});
    const DensityMatrix plain = compute_mfgs(s);
    for (int t = 0; t < 3; ++t) {
      const Matrix u = random_unitary(3, rng);
      s.system = SystemModel(HermitianOperator(u * base.h_sys.matrix() * u.adjoint()),
                             HermitianOperator(u * base.coupling_op.matrix() * u.adjoint()));
      const DensityMatrix rotated = compute_mfgs(s);
      CHECK(max_abs(rotated.matrix() - u * plain.matrix() * u.adjoint()) <= 1e-9);
    }
  }
}

TEST_CASE("grid schedule") {
  GridSchedule sch;
  sch.initial = {-4.0, 4.0, 100, 1.0};
  const auto st = sch.stages();
  REQUIRE(st.size() == 4);  // 100, 200, 400, 800 under the 1024 cap
  CHECK(st[1].n_points == 200);
  CHECK(st[1].q_max == doctest::Approx(5.0));
  CHECK(st[3].q_max == doctest::Approx(4.0 * 1.25 * 1.25 * 1.25));
  sch.initial.n_points = 2000;
  CHECK_THROWS_AS((void)sch.stages(), InvariantError);
}

TEST_CASE("converge_mfgs") {
  SUBCASE("loose tolerance converges at stage two") {
    ModelSpec s = gcl2({1.0, 0.0, 0.0}, 2.0, {});
    s.env = default_grid(s, 96);
    GridSchedule sch;
    sch.initial = s.env;
    const ConvergedMfgs r = converge_mfgs(s, sch, 1e-3);
    CHECK(r.report.converged);
    REQUIRE(r.report.stages.size() == 2);
    CHECK_FALSE(r.report.stages[0].delta.has_value());
    CHECK(*r.report.stages[1].delta <= 1e-3);
    CHECK(r.report.final_grid == r.report.stages[1].grid);
  }
  SUBCASE("box doubling at fixed spacing leaves a harmonic MFGS unchanged") {
    // thermal width of the env well is ~0.5, well centers within |c A| <= 1
    ModelSpec s = gcl2({1.0, 0.0, 0.0}, 1.0, {-8.0, 8.0, 81, 1.0});
    const DensityMatrix tight = compute_mfgs(s);
    s.env = {-16.0, 16.0, 161, 1.0};
    CHECK(trace_distance(compute_mfgs(s), tight) <= 1e-6);
  }
  SUBCASE("a6 well, three N-doubling stages on a fixed box") {
    const ModelSpec s = gcl2({0.0, 0.0, 1.0}, 10.0, {-14.0, 14.0, 64, 1.0});
    GridSchedule sch;
    sch.initial = s.env;
    sch.max_stages = 3;
    sch.box_growth = 1.0;
    const ConvergedMfgs r = converge_mfgs(s, sch, 1e-12, ConvergenceObservable::state_itself);
    REQUIRE(r.report.stages.size() == 3);
    CHECK_FALSE(r.report.converged);
    CHECK(*r.report.stages[2].delta < *r.report.stages[1].delta);
    for (const auto& stage : r.report.stages) CHECK(stage.grid.q_max == doctest::Approx(14.0));
  }
}

// One PASS/FAIL line per acceptance criterion. Exit status 1 when any line fails.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include "uscgibbs/sweep.hpp"

using namespace uscgibbs;

namespace {

constexpr double kBeta = 5.0;

int g_failures = 0;

void verdict(const std::string& name, bool pass, const std::string& detail) {
  if (!pass) ++g_failures;
  std::printf("%s %s: %s\n", pass ? "PASS" : "FAIL", name.c_str(), detail.c_str());
  std::fflush(stdout);
}

std::string num(double x) {
  char buf[48];
  std::snprintf(buf, sizeof buf, "%.4g", x);
  return buf;
}

struct Timer {
  std::chrono::steady_clock::time_point t0 = std::chrono::steady_clock::now();
  [[nodiscard]] std::string elapsed() const {
    return num(std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count()) + " s";
  }
};

SweepResult sweep(const std::string& doc) { return run_sweep(parse_config_text(doc)); }

bool strictly_decreasing(const std::vector<double>& v) {
  for (std::size_t i = 1; i < v.size(); ++i)
    if (!(v[i] < v[i - 1])) return false;
  return true;
}

bool non_increasing(const std::vector<double>& v) {
  for (std::size_t i = 1; i < v.size(); ++i)
    if (!(v[i] <= v[i - 1])) return false;
  return true;
}

std::vector<double> distances(const SweepResult& r) {
  std::vector<double> out;
  for (const auto& row : r.rows) out.push_back(row.trace_distance);
  return out;
}

std::vector<double> off_blocks(const SweepResult& r) {
  std::vector<double> out;
  for (const auto& row : r.rows) out.push_back(row.off_block_norm);
  return out;
}

// ---------------------------------------------------------------------------

void zero_coupling() {
  const DensityMatrix gibbs = compute_gibbs(reference_qutrit().h_sys, kBeta);
  double worst = 0.0;
  std::string detail;
  for (Family f : {Family::cl, Family::gcl, Family::gcl2, Family::zwanzig}) {
    ModelSpec s;
    s.family = f;
    s.coupling = 0.0;
    if (f == Family::zwanzig)
      s.potential = ZwanzigEnvSpec{};
    else if (f == Family::gcl)
      s.potential = PolynomialPotential{{1.0, 0.5, 0.0}, 0.4};
    else
      s.potential = PolynomialPotential{{1.0, 0.0, 0.0}, 0.0};
    s.env = default_grid(s, 128);
    const double d = trace_distance(compute_mfgs(s), gibbs);
    worst = std::max(worst, d);
    detail += std::string(to_string(f)) + "=" + num(d) + " ";
  }
  verdict("zero-coupling factorization", worst <= 1e-8, detail + "(tol 1e-8)");
}

void cl_gcl2_invariance() {
  const SystemModel sys = reference_qutrit();
  const UscState cl = usc_cl_gcl2(sys, kBeta);
  double worst_d = 0.0;
  double worst_spread = 0.0;
  for (double a2 : {0.5, 1.0, 3.0})
    for (double c : {0.5, 4.0, 16.0}) {
      const EnvModeSpec mode{{-10.0, 10.0, 801, 1.0}, PolynomialPotential{{a2, 0.0, 0.0}, 0.0}, c};
      const UscState g = usc_gcl(sys, {mode}, kBeta);
      worst_d = std::max(worst_d, trace_distance(g.state, cl.state));
      const auto [lo, hi] = std::minmax_element(g.cluster_shifts.begin(), g.cluster_shifts.end());
      worst_spread = std::max(worst_spread, *hi - *lo);
    }
  verdict("CL/GCL2 invariance", worst_d <= 1e-8 && worst_spread <= 1e-8,
          "max trace distance " + num(worst_d) + ", max V0 spread " + num(worst_spread) + " (tol 1e-8)");
}

struct Fig2 {
  SweepResult a2, a4, a6;
};

Fig2 fig2() {
  const Timer t;
  Fig2 r;
  r.a2 = sweep(R"({"family": "GCL2", "potential": {"a2": 1, "a4": 0, "a6": 0}})");
  r.a4 = sweep(R"({"family": "GCL2", "potential": {"a2": 0, "a4": 1, "a6": 0}})");
  r.a6 = sweep(R"({"family": "GCL2", "potential": {"a2": 0, "a4": 0, "a6": 1}})");

  bool ok = true;
  std::string detail;
  for (const auto& [name, s] : {std::pair{"a2", &r.a2}, std::pair{"a4", &r.a4}, std::pair{"a6", &r.a6}}) {
    const auto d = distances(*s);
    const bool complete = s->errors.empty() && d.size() == 20;
    const bool dec = strictly_decreasing(d);
    const bool drop = !d.empty() && d.back() <= 0.1 * d.front();
    int max_n = 0;
    for (const auto& row : s->rows) max_n = std::max(max_n, row.n_points);
    ok = ok && complete && dec && drop && max_n <= 1024;
    detail += std::string(name) + ": " + num(d.empty() ? 0 : d.front()) + " -> " + num(d.empty() ? 0 : d.back()) +
              (dec ? " decreasing" : " NOT decreasing") + (complete ? "" : " (incomplete)") + "; ";
  }
  bool ordered = r.a2.rows.size() == r.a4.rows.size() && r.a4.rows.size() == r.a6.rows.size();
  for (std::size_t i = 0; ordered && i < r.a2.rows.size(); ++i)
    ordered = r.a6.rows[i].trace_distance <= r.a4.rows[i].trace_distance &&
              r.a4.rows[i].trace_distance <= r.a2.rows[i].trace_distance;
  detail += ordered ? "a6 <= a4 <= a2 at every c" : "ordering a6 <= a4 <= a2 violated";
  verdict("GCL2 sweep (three wells)", ok && ordered, detail + " [" + t.elapsed() + "]");
  return r;
}

SweepResult fig3() {
  const Timer t;
  SweepResult z = sweep(R"({"family": "ZWANZIG"})");
  const auto d = distances(z);
  const bool complete = z.errors.empty() && d.size() == 20;
  const bool dec = strictly_decreasing(d);
  const bool drop = !d.empty() && d.back() <= 0.25 * d.front();

  // GCL2 harmonic series evaluated at the Zwanzig couplings inside the GCL2 sweep range
  std::vector<double> matched;
  for (const auto& row : z.rows)
    if (row.c <= 16.0) matched.push_back(row.c);
  nlohmann::json doc{{"family", "GCL2"}, {"potential", {{"a2", 1}}}, {"couplings", matched}};
  const SweepResult g = run_sweep(parse_config_text(doc.dump()));
  bool slower = g.errors.empty() && g.rows.size() == matched.size() && !matched.empty();
  for (std::size_t i = 0; slower && i < g.rows.size(); ++i) slower = z.rows[i].trace_distance >= g.rows[i].trace_distance;

  std::string detail = num(d.empty() ? 0 : d.front()) + " -> " + num(d.empty() ? 0 : d.back()) +
                       (dec ? ", strictly decreasing" : ", NOT strictly decreasing") +
                       (drop ? ", final <= 0.25 x initial" : ", final > 0.25 x initial") +
                       (complete ? "" : ", incomplete sweep") + "; " + std::to_string(matched.size()) +
                       " matched c vs GCL2 a2: " + (slower ? "Zwanzig >= GCL2" : "Zwanzig < GCL2 somewhere");
  verdict("Zwanzig sweep", complete && dec && drop && slower, detail + " [" + t.elapsed() + "]");
  return z;
}

void diagonality(const std::map<std::string, const SweepResult*>& series) {
  bool ok = true;
  std::string detail;
  for (const auto& [name, s] : series) {
    const auto o = off_blocks(*s);
    const bool mono = non_increasing(o);
    const bool small = !o.empty() && o.back() <= 0.05;
    ok = ok && mono && small && s->errors.empty();
    detail += name + ": final " + num(o.empty() ? -1 : o.back()) + (mono ? "" : " (not monotone)") + "; ";
  }
  verdict("diagonality emergence", ok, detail + "tol 0.05");
}

// Partition function of one stiffened quartic mode: own finite-difference matrix
// centered on the well minimum, Eigen eigenvalues.
double oracle_log_z(double a4, double stiffening, double y, double half, int n) {
  const double dq = 2.0 * half / (n - 1);
  RealMatrix h = RealMatrix::Zero(n, n);
  for (int j = 0; j < n; ++j) {
    const double x = -half + j * dq;
    h(j, j) = 1.0 / (dq * dq) + (1.0 + stiffening * y * y) * a4 * std::pow(x, 4);
    if (j + 1 < n) h(j, j + 1) = h(j + 1, j) = -0.5 / (dq * dq);
  }
  const RealVector w = Eigen::SelfAdjointEigenSolver<RealMatrix>(h, Eigen::EigenvaluesOnly).eigenvalues();
  double z = 0.0;
  for (Index k = 0; k < w.size(); ++k) z += std::exp(-kBeta * w(k));
  return std::log(z);
}

void gcl_quartic_partition() {
  const double stiff = 0.5;
  const double c = 3.0;
  const EnvModeSpec mode{{-6.0, 6.0, 300, 1.0}, PolynomialPotential{{0.0, 1.0, 0.0}, stiff}, c};
  const UscState g = usc_gcl(reference_qutrit(), {mode}, kBeta);
  double worst = 0.0;
  std::string detail;
  const auto values = g.projectors.cluster_values();
  for (std::size_t i = 0; i < g.log_partition.size(); ++i) {
    const double rel = std::abs(std::exp(g.log_partition[i] - oracle_log_z(1.0, stiff, c * values[i], 6.0, 300)) - 1.0);
    worst = std::max(worst, rel);
    detail += "A=" + num(values[i]) + " rel " + num(rel) + "; ";
  }
  verdict("GCL quartic partition functions", g.log_partition.size() == 3 && worst <= 1e-6, detail + "tol 1e-6");
}

void zwanzig_cv() {
  const Timer t;
  const SweepConfig cfg = parse_config_text(
      R"({"family": "ZWANZIG_CV", "couplings": [200], "grid": {"policy": "auto", "n_points": 48}})");
  const ModelSpec spec = spec_at(cfg, 200.0);
  const auto& sys = std::get<CvSystem>(spec.system);
  const RealVector exact = compute_mfgs(spec).populations();
  const RealVector usc = usc_reference(spec).populations();
  const double tv = 0.5 * (exact - usc).cwiseAbs().sum();
  const bool grids_ok = sys.grid.n_points == 48 && spec.env.n_points == 48;

  const CvSystem heavy{sys.grid, sys.potential};
  const CvEnvMode env{1e4 - sys.grid.mass, std::get<ZwanzigEnvSpec>(spec.potential).u_free, 0.0};
  const DensityMatrix z = usc_zwanzig_cv(heavy, {env}, kBeta);
  const DensityMatrix classical = usc_cl_cv([&](double q) { return heavy.potential(q) + env.u_free(q); }, heavy.grid, kBeta);
  const double pointwise = (z.populations() - classical.populations()).cwiseAbs().maxCoeff();

  verdict("Zwanzig CV limit", grids_ok && tv <= 0.05 && pointwise <= 1e-3,
          "TV(exact diag, USC) at c=200 = " + num(tv) + " (tol 0.05); M_eff=1e4 pointwise " + num(pointwise) +
              " (tol 1e-3) [" + t.elapsed() + "]");
}

void appendix_c() {
  const Timer t;
  ModelSpec s;
  s.family = Family::gcl2;
  s.potential = PolynomialPotential{{0.0, 0.0, 1.0}, 0.0};
  s.coupling = 10.0;
  s.env = {-14.0, 14.0, 64, 1.0};
  GridSchedule sch;
  sch.initial = s.env;
  sch.box_growth = 1.0;
  sch.max_stages = 5;
  const ConvergedMfgs r = converge_mfgs(s, sch, 1e-4, ConvergenceObservable::state_itself);
  // the same schedule without early stopping, so every doubling contributes a delta
  const ConvergedMfgs full = converge_mfgs(s, sch, 0.0, ConvergenceObservable::state_itself);
  std::vector<double> deltas;
  std::string detail = "all-stage deltas";
  for (const auto& st : full.report.stages)
    if (st.delta) {
      deltas.push_back(*st.delta);
      detail += " N=" + std::to_string(st.grid.n_points) + ":" + num(*st.delta);
    }
  const bool dec = deltas.size() == 4 && strictly_decreasing(deltas);
  verdict("N-doubling convergence (a6, c=10)", r.report.converged && dec && r.report.stages.size() <= 5,
          detail + (dec ? " strictly decreasing" : " NOT strictly decreasing") + "; tol 1e-4 " +
              (r.report.converged ? "reached" : "not reached") + " after " + std::to_string(r.report.stages.size()) +
              " stages [" + t.elapsed() + "]");
}

void propositions() {
  const Timer t;
  const PropsConfig cfg;
  const PropsReport r = run_props(cfg);
  int p1_checked = 0, p1_bad = 0, p2_checked = 0, p2_bad = 0;
  for (const auto& c : r.prop1)
    if (c.status == BoundStatus::checked) {
      ++p1_checked;
      if (!c.satisfied) ++p1_bad;
    }
  for (const auto& c : r.prop2) {
    if (c.status == BoundStatus::checked) ++p2_checked;
    if (c.status != BoundStatus::checked || !c.satisfied) ++p2_bad;
  }
  const bool ok = r.sin_min.h > 0.0 && r.hyp_min.h > 0.0 && r.sin_min.h < 12.0 && p1_checked == 10000 &&
                  p1_bad == 0 && p2_checked == 1000 && p2_bad == 0;
  verdict("propositions bench", ok,
          "min h_sin " + num(r.sin_min.h) + " at x=" + num(r.sin_min.x) + ", min h_hyp " + num(r.hyp_min.h) +
              "; prop1 " + std::to_string(p1_checked) + " in regime, " + std::to_string(p1_bad) + " violations; prop2 " +
              std::to_string(p2_checked) + " checked, " + std::to_string(p2_bad) + " violations [" + t.elapsed() + "]");
}

std::string csv_without_wall_time(const std::filesystem::path& file) {
  std::ifstream in(file);
  std::string out;
  for (std::string l; std::getline(in, l);) out += l.substr(0, l.rfind(',')) + "\n";
  return out;
}

void determinism() {
  const SweepConfig cfg = parse_config_text(
      R"({"family": "GCL2", "potential": {"a2": 0, "a4": 1}, "couplings": [0.5, 1, 2, 4, 8], "seed": 11})");
  const auto base = std::filesystem::temp_directory_path() / "uscgibbs_acceptance_determinism";
  std::filesystem::remove_all(base);
  for (const char* run : {"first", "second"}) {
    std::filesystem::create_directories(base / run);
    write_sweep_outputs(cfg, run_sweep(cfg), base / run);
  }
  const std::string a = csv_without_wall_time(base / "first" / "sweep.csv");
  const std::string b = csv_without_wall_time(base / "second" / "sweep.csv");
  std::filesystem::remove_all(base);
  verdict("determinism", !a.empty() && a == b,
          a == b ? "two sweep runs give byte-identical CSV apart from wall_time_s" : "CSV differs between runs");
}

} // namespace

int main() {
  const Timer total;
  std::printf("eigensolver backend: %s\n", std::string(eigensolver_backend()).c_str());
  zero_coupling();
  cl_gcl2_invariance();
  gcl_quartic_partition();
  appendix_c();
  zwanzig_cv();
  propositions();
  determinism();
  const Fig2 f2 = fig2();
  const SweepResult z = fig3();
  const SweepResult cl = sweep(R"({"family": "CL"})");
  const SweepResult gcl = sweep(R"({"family": "GCL", "potential": {"a2": 1, "a4": 0.5, "stiffening": 0.2}})");
  diagonality({{"CL", &cl},
               {"GCL", &gcl},
               {"GCL2-a2", &f2.a2},
               {"GCL2-a4", &f2.a4},
               {"GCL2-a6", &f2.a6},
               {"ZWANZIG", &z}});
  std::printf("%d failing criteria, total %s\n", g_failures, total.elapsed().c_str());
  return g_failures == 0 ? 0 : 1;
}

#include "uscgibbs/sweep.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <numbers>
#include <set>
#include <sstream>
#include <thread>

namespace uscgibbs {

using nlohmann::json;

std::string_view to_string(GridPolicy policy) {
  switch (policy) {
    case GridPolicy::fixed:
      return "fixed";
    case GridPolicy::automatic:
      return "auto";
    case GridPolicy::converge:
      return "converge";
  }
  return "?";
}

std::vector<double> log_spaced(double from, double to, int count) {
  if (!(from > 0.0) || !(to > from) || count < 2) throw InvariantError("log_spaced needs 0 < from < to, count >= 2");
  std::vector<double> out(count);
  const double a = std::log(from);
  const double b = std::log(to);
  for (int i = 0; i < count; ++i) out[i] = std::exp(a + (b - a) * i / (count - 1));
  out.front() = from;
  out.back() = to;
  return out;
}

std::vector<double> default_couplings(Family family) {
  switch (family) {
    case Family::cl:
    case Family::gcl:
    case Family::gcl2:
      return log_spaced(0.1, 16.0, 20);
    case Family::zwanzig:
      return log_spaced(3.0, 3000.0, 20);
    case Family::zwanzig_cv:
      return log_spaced(1.0, 200.0, 20);
  }
  return {};
}

// ---------------------------------------------------------------------------
// Config parsing

namespace {

int line_of(std::string_view text, std::string_view key) {
  const std::string needle = "\"" + std::string(key) + "\"";
  const auto pos = text.find(needle);
  if (pos == std::string_view::npos) return 0;
  return 1 + static_cast<int>(std::count(text.begin(), text.begin() + static_cast<std::ptrdiff_t>(pos), '\n'));
}

// Walks a JSON object, tracking the key path for diagnostics and rejecting unknown keys.
class Reader {
public:
  Reader(const json& node, std::string path, std::string_view text) : node_(node), path_(std::move(path)), text_(text) {
    if (!node_.is_object()) fail(path_, "expected an object");
  }

  void allow(std::initializer_list<std::string_view> keys) const {
    const std::set<std::string_view> ok(keys);
    for (const auto& item : node_.items())
      if (!ok.count(item.key())) {
        std::ostringstream os;
        os << "unknown key (allowed:";
        for (auto k : keys) os << ' ' << k;
        os << ")";
        fail(item.key(), os.str());
      }
  }

  [[nodiscard]] bool has(std::string_view key) const { return node_.contains(std::string(key)); }
  [[nodiscard]] const json& at(std::string_view key) const { return node_.at(std::string(key)); }

  [[nodiscard]] double number(std::string_view key, double fallback) const {
    if (!has(key)) return fallback;
    const json& v = at(key);
    if (!v.is_number()) fail(key, "expected a number");
    return v.get<double>();
  }

  [[nodiscard]] int integer(std::string_view key, int fallback) const {
    if (!has(key)) return fallback;
    const json& v = at(key);
    if (!v.is_number_integer()) fail(key, "expected an integer");
    return v.get<int>();
  }

  [[nodiscard]] std::uint64_t unsigned_integer(std::string_view key, std::uint64_t fallback) const {
    if (!has(key)) return fallback;
    const json& v = at(key);
    if (!v.is_number_unsigned() && !(v.is_number_integer() && v.get<long long>() >= 0))
      fail(key, "expected a nonnegative integer");
    return v.get<std::uint64_t>();
  }

  [[nodiscard]] std::string string(std::string_view key, std::string fallback) const {
    if (!has(key)) return fallback;
    const json& v = at(key);
    if (!v.is_string()) fail(key, "expected a string");
    return v.get<std::string>();
  }

  [[nodiscard]] Reader child(std::string_view key) const {
    return Reader(at(key), path_ + "/" + std::string(key), text_);
  }

  [[noreturn]] void fail(std::string_view key, std::string_view message) const {
    std::ostringstream os;
    os << "config error at " << path_ << "/" << key;
    if (const int line = line_of(text_, key); line > 0) os << " (line " << line << ")";
    os << ": " << message;
    throw ConfigError(os.str());
  }

private:
  const json& node_;
  std::string path_;
  std::string_view text_;
};

Matrix parse_matrix(const json& node, const Reader& parent, std::string_view key) {
  if (!node.is_array() || node.empty()) parent.fail(key, "expected a nonempty array of rows");
  const auto n = static_cast<Index>(node.size());
  Matrix m(n, n);
  for (Index i = 0; i < n; ++i) {
    const json& row = node[static_cast<std::size_t>(i)];
    if (!row.is_array() || static_cast<Index>(row.size()) != n) parent.fail(key, "matrix must be square");
    for (Index j = 0; j < n; ++j) {
      const json& e = row[static_cast<std::size_t>(j)];
      if (e.is_number()) {
        m(i, j) = Complex(e.get<double>(), 0.0);
      } else if (e.is_array() && e.size() == 2 && e[0].is_number() && e[1].is_number()) {
        m(i, j) = Complex(e[0].get<double>(), e[1].get<double>());
      } else {
        parent.fail(key, "matrix entries must be numbers or [re, im] pairs");
      }
    }
  }
  return m;
}

HermitianOperator parse_operator(const Reader& r, std::string_view key) {
  try {
    return HermitianOperator(parse_matrix(r.at(key), r, key));
  } catch (const InvariantError& e) {
    r.fail(key, e.what());
  }
}

ScalarPotential parse_scalar_potential(const Reader& r) {
  r.allow({"kind", "depth", "width", "center", "a2", "a4", "a6", "offset"});
  const std::string kind = r.string("kind", "morse");
  ScalarPotential p;
  if (kind == "morse") {
    p = ScalarPotential::morse(r.number("depth", 1.0), r.number("width", 1.0), r.number("center", 0.0));
  } else if (kind == "polynomial") {
    p = ScalarPotential::polynomial(r.number("a2", 0.0), r.number("a4", 0.0), r.number("a6", 0.0));
  } else if (kind == "zero") {
    p = ScalarPotential::zero();
  } else {
    r.fail("kind", "unknown potential kind \"" + kind + "\" (valid: morse, polynomial, zero)");
  }
  p.offset = r.number("offset", 0.0);
  return p;
}

EnvGrid parse_grid_box(const Reader& r, EnvGrid fallback) {
  EnvGrid g = fallback;
  g.q_min = r.number("q_min", g.q_min);
  g.q_max = r.number("q_max", g.q_max);
  g.n_points = r.integer("n_points", g.n_points);
  g.mass = r.number("mass", g.mass);
  return g;
}

json scalar_potential_to_json(const ScalarPotential& p) {
  json j{{"kind", std::string(to_string(p.kind))}, {"offset", p.offset}};
  if (p.kind == ScalarPotential::Kind::morse) {
    j["depth"] = p.depth;
    j["width"] = p.width;
    j["center"] = p.center;
  } else if (p.kind == ScalarPotential::Kind::polynomial) {
    j["a2"] = p.even[0];
    j["a4"] = p.even[1];
    j["a6"] = p.even[2];
  }
  return j;
}

} // namespace

SweepConfig parse_config_text(std::string_view text) {
  json root;
  try {
    root = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ConfigError(std::string("malformed config: ") + e.what());
  }
  const Reader r(root, "", text);
  r.allow({"family", "system", "cv_system", "beta", "potential", "couplings", "coupling", "grid", "cluster_tol",
           "output", "seed", "workers", "props"});

  SweepConfig cfg;
  ModelSpec& m = cfg.model;
  if (!r.has("family")) r.fail("family", "missing required key");
  try {
    m.family = family_from_string(r.string("family", ""));
  } catch (const InvariantError& e) {
    r.fail("family", e.what());
  }
  const bool cv = m.family == Family::zwanzig_cv;
  const bool zwanzig = m.family == Family::zwanzig || cv;

  // System
  if (cv) {
    if (r.has("system")) r.fail("system", "ZWANZIG_CV takes its system from \"cv_system\"");
    CvSystem sys;
    sys.grid = {-3.0, 3.0, 48, 1.0};
    if (r.has("cv_system")) {
      const Reader s = r.child("cv_system");
      s.allow({"grid", "potential"});
      if (s.has("grid")) {
        const Reader g = s.child("grid");
        g.allow({"q_min", "q_max", "n_points", "mass"});
        sys.grid = parse_grid_box(g, sys.grid);
      }
      if (s.has("potential")) sys.potential = parse_scalar_potential(s.child("potential"));
    }
    m.system = sys;
    cfg.default_system = false;
  } else {
    if (r.has("cv_system")) r.fail("cv_system", "only the ZWANZIG_CV family takes a CV system");
    if (!r.has("system") || (r.at("system").is_string() && r.at("system").get<std::string>() == "default-qutrit")) {
      m.system = reference_qutrit();
      cfg.default_system = true;
    } else if (r.at("system").is_object()) {
      const Reader s = r.child("system");
      s.allow({"h_sys", "coupling_op"});
      if (!s.has("h_sys") || !s.has("coupling_op")) r.fail("system", "needs both h_sys and coupling_op");
      try {
        m.system = SystemModel(parse_operator(s, "h_sys"), parse_operator(s, "coupling_op"));
      } catch (const InvariantError& e) {
        r.fail("system", e.what());
      }
      cfg.default_system = false;
    } else {
      r.fail("system", "expected \"default-qutrit\" or an object with h_sys and coupling_op");
    }
  }
  m.beta = r.number("beta", 5.0);
  if (!(m.beta > 0.0)) r.fail("beta", "beta must be positive");
  m.cluster_tol = r.number("cluster_tol", 1e-8);
  if (!(m.cluster_tol >= 0.0)) r.fail("cluster_tol", "must be >= 0");

  // Potential payload
  if (zwanzig) {
    ZwanzigEnvSpec z;
    if (r.has("potential")) {
      const Reader p = r.child("potential");
      p.allow({"u_free", "spring_min"});
      if (p.has("u_free")) z.u_free = parse_scalar_potential(p.child("u_free"));
      z.spring_min = p.number("spring_min", 0.0);
    }
    m.potential = z;
  } else {
    PolynomialPotential v;
    if (r.has("potential")) {
      const Reader p = r.child("potential");
      p.allow({"a2", "a4", "a6", "stiffening"});
      v.coeffs_even = {p.number("a2", 0.0), p.number("a4", 0.0), p.number("a6", 0.0)};
      v.stiffening = p.number("stiffening", 0.0);
    }
    try {
      v.validate();
    } catch (const InvariantError& e) {
      r.fail("potential", e.what());
    }
    m.potential = v;
  }

  // Couplings
  if (r.has("couplings") && r.has("coupling")) r.fail("coupling", "give either coupling or couplings, not both");
  if (r.has("coupling")) {
    cfg.couplings = {r.number("coupling", 0.0)};
  } else if (r.has("couplings")) {
    const json& c = r.at("couplings");
    if (c.is_array()) {
      for (const auto& v : c) {
        if (!v.is_number()) r.fail("couplings", "expected an array of numbers");
        cfg.couplings.push_back(v.get<double>());
      }
    } else if (c.is_object()) {
      const Reader l = r.child("couplings");
      l.allow({"log_from", "log_to", "count"});
      try {
        cfg.couplings = log_spaced(l.number("log_from", 0.0), l.number("log_to", 0.0), l.integer("count", 20));
      } catch (const InvariantError& e) {
        r.fail("couplings", e.what());
      }
    } else {
      r.fail("couplings", "expected an array or a {log_from, log_to, count} object");
    }
  } else {
    cfg.couplings = default_couplings(m.family);
  }
  if (cfg.couplings.empty()) r.fail("couplings", "at least one coupling value is required");
  for (std::size_t i = 0; i < cfg.couplings.size(); ++i) {
    if (!(cfg.couplings[i] >= 0.0)) r.fail("couplings", "coupling values must be >= 0");
    if (i > 0 && !(cfg.couplings[i] > cfg.couplings[i - 1]))
      r.fail("couplings", "coupling values must be strictly increasing");
  }

  // Grid policy
  GridConfig& g = cfg.grid;
  if (cv) {
    g.policy = GridPolicy::automatic;
    g.n_points = 48;
  }
  if (r.has("grid")) {
    const Reader gr = r.child("grid");
    gr.allow({"policy", "q_min", "q_max", "n_points", "mass", "tol", "max_stages", "max_points", "box_growth",
              "observable"});
    const std::string policy = gr.string("policy", std::string(to_string(g.policy)));
    if (policy == "fixed")
      g.policy = GridPolicy::fixed;
    else if (policy == "auto")
      g.policy = GridPolicy::automatic;
    else if (policy == "converge")
      g.policy = GridPolicy::converge;
    else
      gr.fail("policy", "unknown grid policy \"" + policy + "\" (valid: fixed, auto, converge)");
    g.n_points = gr.integer("n_points", g.n_points);
    g.mass = gr.number("mass", g.mass);
    g.fixed = parse_grid_box(gr, g.fixed);
    g.fixed.mass = g.mass;
    if (g.policy == GridPolicy::fixed && (!gr.has("q_min") || !gr.has("q_max")))
      gr.fail("policy", "the fixed policy needs q_min and q_max");
    g.tol = gr.number("tol", g.tol);
    g.max_stages = gr.integer("max_stages", g.max_stages);
    g.max_points = gr.integer("max_points", g.max_points);
    g.box_growth = gr.number("box_growth", g.box_growth);
    const std::string obs = gr.string("observable", "trace_distance_to_usc");
    if (obs == "trace_distance_to_usc")
      g.observable = ConvergenceObservable::trace_distance_to_usc;
    else if (obs == "state_itself")
      g.observable = ConvergenceObservable::state_itself;
    else
      gr.fail("observable", "unknown observable (valid: trace_distance_to_usc, state_itself)");
  }
  g.fixed.n_points = g.policy == GridPolicy::fixed ? g.fixed.n_points : g.n_points;
  try {
    EnvGrid probe = g.fixed;
    probe.n_points = std::max(g.n_points, 3);
    probe.validate();
    if (g.n_points < 3) throw InvariantError("grid needs at least 3 points");
    if (g.policy == GridPolicy::fixed) g.fixed.validate();
  } catch (const InvariantError& e) {
    r.fail("grid", e.what());
  }
  if (!(g.tol > 0.0) || g.max_stages < 1 || !(g.box_growth >= 1.0))
    r.fail("grid", "need tol > 0, max_stages >= 1 and box_growth >= 1");
  m.env = g.fixed;

  cfg.output = r.string("output", cfg.output);
  cfg.seed = r.unsigned_integer("seed", 0);
  cfg.workers = r.integer("workers", 1);
  if (cfg.workers < 1) r.fail("workers", "must be >= 1");

  // Proposition bench settings
  PropsConfig& pc = cfg.props;
  pc.prop1.seed = 42 + cfg.seed;
  pc.prop2.seed = 7 + cfg.seed;
  if (r.has("props")) {
    const Reader p = r.child("props");
    p.allow({"prop1_trials", "prop2_trials", "prop1_seed", "prop2_seed", "n_t", "beta", "modes", "delta_ratio",
             "x_max", "n_scan"});
    pc.prop1.n_trials = p.integer("prop1_trials", pc.prop1.n_trials);
    pc.prop2.n_trials = p.integer("prop2_trials", pc.prop2.n_trials);
    pc.prop1.seed = p.unsigned_integer("prop1_seed", pc.prop1.seed);
    pc.prop2.seed = p.unsigned_integer("prop2_seed", pc.prop2.seed);
    pc.prop1.n_t = pc.prop2.n_t = p.integer("n_t", pc.prop1.n_t);
    pc.prop1.beta = pc.prop2.beta = p.number("beta", pc.prop1.beta);
    pc.prop1.g_modes = pc.prop2.g_modes = p.integer("modes", pc.prop1.g_modes);
    pc.prop1.delta_ratio = p.number("delta_ratio", pc.prop1.delta_ratio);
    pc.x_max = p.number("x_max", pc.x_max);
    pc.n_scan = p.integer("n_scan", pc.n_scan);
    if (pc.prop1.n_trials < 0 || pc.prop2.n_trials < 0 || pc.prop1.n_t < 64)
      r.fail("props", "need nonnegative trial counts and n_t >= 64");
  }

  try {
    ModelSpec probe = m;
    probe.coupling = cfg.couplings.front();
    probe.validate();
  } catch (const InvariantError& e) {
    r.fail("family", e.what());
  }
  return cfg;
}

SweepConfig parse_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_config_text(buf.str());
}

// ---------------------------------------------------------------------------
// JSON helpers

json matrix_to_json(const Matrix& m) {
  const bool real = (m.imag().array() == 0.0).all();
  json rows = json::array();
  for (Index i = 0; i < m.rows(); ++i) {
    json row = json::array();
    for (Index j = 0; j < m.cols(); ++j) {
      if (real)
        row.push_back(m(i, j).real());
      else
        row.push_back(json::array({m(i, j).real(), m(i, j).imag()}));
    }
    rows.push_back(std::move(row));
  }
  return rows;
}

json density_to_json(const DensityMatrix& rho) {
  const RealVector p = rho.populations();
  return {{"matrix", matrix_to_json(rho.matrix())}, {"populations", std::vector<double>(p.begin(), p.end())}};
}

json grid_to_json(const EnvGrid& grid) {
  return {{"q_min", grid.q_min}, {"q_max", grid.q_max}, {"n_points", grid.n_points}, {"mass", grid.mass}};
}

json usc_to_json(const UscState& usc) {
  const RealVector d = usc.effective_hamiltonian.real_diagonal();
  return {{"family", std::string(to_string(usc.family))},
          {"state", density_to_json(usc.state)},
          {"effective_hamiltonian", matrix_to_json(usc.effective_hamiltonian.matrix())},
          {"effective_hamiltonian_diagonal", std::vector<double>(d.begin(), d.end())},
          {"cluster_values", usc.projectors.cluster_values()},
          {"cluster_shifts", usc.cluster_shifts},
          {"log_partition", usc.log_partition}};
}

json config_to_json(const SweepConfig& cfg) {
  const ModelSpec& m = cfg.model;
  json j;
  j["family"] = std::string(to_string(m.family));
  if (const auto* sys = std::get_if<SystemModel>(&m.system)) {
    j["system"] = {{"h_sys", matrix_to_json(sys->h_sys.matrix())},
                   {"coupling_op", matrix_to_json(sys->coupling_op.matrix())}};
  } else {
    const auto& cvs = std::get<CvSystem>(m.system);
    j["cv_system"] = {{"grid", grid_to_json(cvs.grid)}, {"potential", scalar_potential_to_json(cvs.potential)}};
  }
  j["beta"] = m.beta;
  if (const auto* v = std::get_if<PolynomialPotential>(&m.potential)) {
    j["potential"] = {{"a2", v->coeffs_even[0]},
                      {"a4", v->coeffs_even[1]},
                      {"a6", v->coeffs_even[2]},
                      {"stiffening", v->stiffening}};
  } else {
    const auto& z = std::get<ZwanzigEnvSpec>(m.potential);
    j["potential"] = {{"u_free", scalar_potential_to_json(z.u_free)}, {"spring_min", z.spring_min}};
  }
  j["couplings"] = cfg.couplings;
  const GridConfig& g = cfg.grid;
  j["grid"] = {{"policy", std::string(to_string(g.policy))},
               {"n_points", g.policy == GridPolicy::fixed ? g.fixed.n_points : g.n_points},
               {"mass", g.mass},
               {"tol", g.tol},
               {"max_stages", g.max_stages},
               {"max_points", g.max_points},
               {"box_growth", g.box_growth},
               {"observable", g.observable == ConvergenceObservable::state_itself ? "state_itself"
                                                                                 : "trace_distance_to_usc"}};
  if (g.policy == GridPolicy::fixed) {
    j["grid"]["q_min"] = g.fixed.q_min;
    j["grid"]["q_max"] = g.fixed.q_max;
  }
  j["cluster_tol"] = m.cluster_tol;
  j["output"] = cfg.output;
  j["seed"] = cfg.seed;
  j["workers"] = cfg.workers;
  const PropsConfig& p = cfg.props;
  j["props"] = {{"prop1_trials", p.prop1.n_trials}, {"prop2_trials", p.prop2.n_trials},
                {"prop1_seed", p.prop1.seed},       {"prop2_seed", p.prop2.seed},
                {"n_t", p.prop1.n_t},               {"beta", p.prop1.beta},
                {"modes", p.prop1.g_modes},         {"delta_ratio", p.prop1.delta_ratio},
                {"x_max", p.x_max},                 {"n_scan", p.n_scan}};
  return j;
}

// ---------------------------------------------------------------------------
// Sweeps

ModelSpec spec_at(const SweepConfig& config, double c) {
  ModelSpec spec = config.model;
  spec.coupling = c;
  spec.env.mass = config.grid.mass;
  if (config.grid.policy == GridPolicy::fixed)
    spec.env = config.grid.fixed;
  else
    spec.env = default_grid(spec, config.grid.n_points);
  return spec;
}

namespace {

ProjectorFamily pointer_basis(const ModelSpec& spec) {
  if (const auto* sys = std::get_if<SystemModel>(&spec.system))
    return cluster_coupling_operator(sys->coupling_op, spec.cluster_tol);
  // CV system couples through its position: rank-one projectors on the grid points.
  const auto& cvs = std::get<CvSystem>(spec.system);
  return cluster_coupling_operator(HermitianOperator::diagonal(cvs.grid.points()), 0.0);
}

} // namespace

SweepRow run_point(const SweepConfig& config, double c) {
  const auto start = std::chrono::steady_clock::now();
  ModelSpec spec = spec_at(config, c);
  check_wells_inside(spec);
  SweepRow row;
  row.c = c;

  std::optional<DensityMatrix> state;
  if (config.grid.policy == GridPolicy::converge) {
    GridSchedule schedule;
    schedule.initial = spec.env;
    schedule.max_stages = config.grid.max_stages;
    schedule.max_points = config.grid.max_points;
    schedule.box_growth = config.grid.box_growth;
    ConvergedMfgs result = converge_mfgs(spec, schedule, config.grid.tol, config.grid.observable);
    state = std::move(result.state);
    row.converged = result.report.converged;
    spec.env = result.report.final_grid;
  } else {
    state = compute_mfgs(spec);
  }

  const DensityMatrix reference = usc_reference(spec);
  row.trace_distance = trace_distance(*state, reference);
  row.n_points = spec.env.n_points;
  row.q_min = spec.env.q_min;
  row.q_max = spec.env.q_max;
  row.off_block_norm = off_block_trace_norm(state->op(), pointer_basis(spec));
  if (spec.family != Family::zwanzig_cv) {
    const RealVector d = usc_for_spec(spec).effective_hamiltonian.real_diagonal();
    row.usc_h_diagonal.assign(d.begin(), d.end());
  }
  row.wall_time_s = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return row;
}

SweepResult run_sweep(const SweepConfig& config) {
  const std::size_t n = config.couplings.size();
  std::vector<std::optional<SweepRow>> rows(n);
  std::vector<std::optional<std::string>> failures(n);
  std::atomic<std::size_t> next{0};

  const auto worker = [&] {
    for (std::size_t i = next++; i < n; i = next++) {
      try {
        rows[i] = run_point(config, config.couplings[i]);
      } catch (const InvariantError& e) {
        failures[i] = e.what();
      } catch (const PreconditionError& e) {
        failures[i] = e.what();
      }
    }
  };
  const int workers = std::clamp<int>(config.workers, 1, static_cast<int>(std::max<std::size_t>(n, 1)));
  if (workers == 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (int w = 0; w < workers; ++w) pool.emplace_back(worker);
    for (auto& t : pool) t.join();
  }

  SweepResult out;
  for (std::size_t i = 0; i < n; ++i) {
    if (rows[i]) out.rows.push_back(std::move(*rows[i]));
    if (failures[i]) out.errors.push_back({config.couplings[i], *failures[i]});
  }
  return out;
}

namespace {

std::string fmt17(double x) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

void write_file(const std::filesystem::path& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out << content;
}

} // namespace

std::string sweep_csv(const SweepResult& result) {
  std::ostringstream os;
  os << kSweepCsvHeader << '\n';
  for (const auto& r : result.rows)
    os << fmt17(r.c) << ',' << fmt17(r.trace_distance) << ',' << r.n_points << ',' << fmt17(r.q_min) << ','
       << fmt17(r.q_max) << ',' << (r.converged ? "true" : "false") << ',' << fmt17(r.wall_time_s) << '\n';
  return os.str();
}

json sweep_report(const SweepConfig& config, const SweepResult& result) {
  json rows = json::array();
  for (const auto& r : result.rows)
    rows.push_back({{"c", r.c},
                    {"trace_distance", r.trace_distance},
                    {"n_points", r.n_points},
                    {"q_min", r.q_min},
                    {"q_max", r.q_max},
                    {"converged", r.converged},
                    {"off_block_norm", r.off_block_norm},
                    {"usc_h_diagonal", r.usc_h_diagonal},
                    {"wall_time_s", r.wall_time_s}});
  json errors = json::array();
  for (const auto& e : result.errors) errors.push_back({{"c", e.c}, {"message", e.message}});

  json meta{{"tool_version", std::string(kToolVersion)},
            {"system_source", config.default_system ? "default-qutrit" : "explicit"},
            {"units", "Hartree atomic units, hbar = 1"},
            {"coupling_grid", "couplings listed in config; defaults are 20 log-spaced points per family"}};
  if (const auto* v = std::get_if<PolynomialPotential>(&config.model.potential))
    meta["potential_coefficients"] = {{"a2", v->coeffs_even[0]}, {"a4", v->coeffs_even[1]}, {"a6", v->coeffs_even[2]}};

  json report{{"command", "sweep"}, {"config", config_to_json(config)}, {"rows", rows}, {"errors", errors},
              {"metadata", meta}};
  if (config.model.family != Family::zwanzig_cv && !config.couplings.empty()) {
    try {
      report["usc"] = usc_to_json(usc_for_spec(spec_at(config, config.couplings.front())));
    } catch (const std::exception& e) {
      report["usc_error"] = e.what();
    }
  }
  return report;
}

void write_sweep_outputs(const SweepConfig& config, const SweepResult& result, const std::filesystem::path& dir) {
  std::filesystem::create_directories(dir);
  write_file(dir / "sweep.csv", sweep_csv(result));
  write_file(dir / "report.json", sweep_report(config, result).dump(2) + "\n");
}

// ---------------------------------------------------------------------------
// Proposition bench

PropsReport run_props(const PropsConfig& config) {
  PropsReport r;
  r.sin_min = minimize_h(HKind::sin, config.x_max, config.n_scan);
  r.hyp_min = minimize_h(HKind::hyp, config.x_max, config.n_scan);
  r.mu = std::min(r.sin_min.h, r.hyp_min.h);
  Prop1Config p1 = config.prop1;
  p1.mu = r.mu;
  r.prop1 = check_prop1(p1);
  const MonotoneMap f{[](double x) { return x + 0.5 * std::sin(x); }, [](double x) { return 1.0 + 0.5 * std::cos(x); },
                      0.5};
  r.prop2 = check_prop2(f, config.prop2);
  return r;
}

namespace {

json summarize(const std::vector<BoundCheck>& checks) {
  int in_regime = 0;
  int violations = 0;
  int excluded = 0;
  double worst = std::numeric_limits<double>::infinity();
  json margins = json::array();
  for (const auto& c : checks) {
    if (c.status != BoundStatus::checked) {
      ++excluded;
      continue;
    }
    ++in_regime;
    if (!c.satisfied) ++violations;
    worst = std::min(worst, c.margin);
    margins.push_back(c.margin);
  }
  json j{{"trials", checks.size()}, {"in_regime", in_regime}, {"excluded", excluded},
         {"violations", violations}, {"margins", margins}};
  j["worst_margin"] = in_regime > 0 ? json(worst) : json(nullptr);
  return j;
}

} // namespace

json props_report_json(const PropsConfig& config, const PropsReport& report) {
  const json p1 = summarize(report.prop1);
  const json p2 = summarize(report.prop2);
  return {{"command", "props"},
          {"tool_version", std::string(kToolVersion)},
          {"minimize_h",
           {{"sin", {{"x", report.sin_min.x}, {"h", report.sin_min.h}}},
            {"hyp", {{"x", report.hyp_min.x}, {"h", report.hyp_min.h}}}}},
          {"mu", report.mu},
          {"quadrature_tolerance", kQuadratureTolerance},
          {"prop1", p1},
          {"prop2", p2},
          {"prop1_violations", p1["violations"]},
          {"prop2_violations", p2["violations"]},
          {"config",
           {{"prop1_trials", config.prop1.n_trials},
            {"prop2_trials", config.prop2.n_trials},
            {"prop1_seed", config.prop1.seed},
            {"prop2_seed", config.prop2.seed},
            {"n_t", config.prop1.n_t},
            {"beta", config.prop1.beta},
            {"delta_ratio", config.prop1.delta_ratio},
            {"x_max", config.x_max},
            {"n_scan", config.n_scan}}}};
}

std::string h_curves_csv() {
  std::ostringstream os;
  os << "x,h_sin,h_hyp\n";
  const auto row = [&](double x) { os << fmt17(x) << ',' << fmt17(h_sin(x)) << ',' << fmt17(h_hyp(x)) << '\n'; };
  for (int k = 1; k <= 200; ++k) {
    row(k / 10.0);
    if (k == 31) row(std::numbers::pi);  // the h_sin minimum
  }
  return os.str();
}

} // namespace uscgibbs

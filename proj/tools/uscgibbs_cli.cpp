// uscgibbs command line: single MFGS / USC evaluations, coupling sweeps,
// grid convergence reports and the proposition bench.

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "uscgibbs/sweep.hpp"

namespace fs = std::filesystem;
using nlohmann::json;
using namespace uscgibbs;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitConfig = 2;
constexpr int kExitPrecondition = 3;

struct Options {
  std::string config;
  std::string out;
  std::optional<int> workers;
  std::optional<std::uint64_t> seed;
};

SweepConfig load(const Options& opt, bool config_required) {
  SweepConfig cfg;
  if (!opt.config.empty())
    cfg = parse_config(opt.config);
  else if (config_required)
    throw ConfigError("--config is required for this subcommand");
  if (opt.seed) {
    cfg.seed = *opt.seed;
    cfg.props.prop1.seed = 42 + cfg.seed;
    cfg.props.prop2.seed = 7 + cfg.seed;
  }
  if (opt.workers) {
    if (*opt.workers < 1) throw ConfigError("--workers must be >= 1");
    cfg.workers = *opt.workers;
  }
  if (!opt.out.empty()) cfg.output = opt.out;
  return cfg;
}

void write_text(const fs::path& path, const std::string& text) {
  fs::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out << text;
}

double single_coupling(const SweepConfig& cfg) {
  if (cfg.couplings.size() != 1)
    std::cerr << "note: using the first of " << cfg.couplings.size() << " coupling values\n";
  return cfg.couplings.front();
}

int cmd_compute(const SweepConfig& cfg) {
  const double c = single_coupling(cfg);
  const SweepRow row = run_point(cfg, c);
  ModelSpec spec = spec_at(cfg, c);
  spec.env = {row.q_min, row.q_max, row.n_points, spec.env.mass};
  const DensityMatrix rho = compute_mfgs(spec);

  json report{{"command", "compute"},
              {"tool_version", std::string(kToolVersion)},
              {"config", config_to_json(cfg)},
              {"coupling", c},
              {"grid", grid_to_json(spec.env)},
              {"converged", row.converged},
              {"mfgs", density_to_json(rho)},
              {"trace_distance_to_usc", row.trace_distance},
              {"off_block_norm", row.off_block_norm},
              {"wall_time_s", row.wall_time_s}};
  write_text(fs::path(cfg.output) / "report.json", report.dump(2) + "\n");
  std::cout << "c=" << c << " N=" << row.n_points << " trace_distance=" << row.trace_distance << "\n";
  return kExitOk;
}

int cmd_usc(const SweepConfig& cfg) {
  const double c = single_coupling(cfg);
  const ModelSpec spec = spec_at(cfg, c);
  json report{{"command", "usc"},
              {"tool_version", std::string(kToolVersion)},
              {"config", config_to_json(cfg)},
              {"coupling", c}};
  if (spec.family == Family::zwanzig_cv) {
    report["state"] = density_to_json(usc_reference(spec));
  } else {
    report["usc"] = usc_to_json(usc_for_spec(spec));
  }
  write_text(fs::path(cfg.output) / "report.json", report.dump(2) + "\n");
  std::cout << "wrote " << (fs::path(cfg.output) / "report.json").string() << "\n";
  return kExitOk;
}

int cmd_sweep(const SweepConfig& cfg) {
  const SweepResult result = run_sweep(cfg);
  write_sweep_outputs(cfg, result, cfg.output);
  for (const auto& r : result.rows)
    std::cout << "c=" << r.c << " N=" << r.n_points << " D=" << r.trace_distance << (r.converged ? "" : " (unconverged)")
              << "\n";
  for (const auto& e : result.errors) std::cerr << "row c=" << e.c << " failed: " << e.message << "\n";
  return kExitOk;
}

int cmd_converge(const SweepConfig& cfg) {
  json points = json::array();
  bool all = true;
  for (double c : cfg.couplings) {
    const ModelSpec spec = spec_at(cfg, c);
    check_wells_inside(spec);
    GridSchedule schedule;
    schedule.initial = spec.env;
    schedule.max_stages = cfg.grid.max_stages;
    schedule.max_points = cfg.grid.max_points;
    schedule.box_growth = cfg.grid.box_growth;
    const ConvergedMfgs res = converge_mfgs(spec, schedule, cfg.grid.tol, cfg.grid.observable);
    json stages = json::array();
    for (const auto& s : res.report.stages) {
      json st{{"grid", grid_to_json(s.grid)}, {"value", s.value}};
      st["delta"] = s.delta ? json(*s.delta) : json(nullptr);
      stages.push_back(std::move(st));
      std::cout << "c=" << c << " N=" << s.grid.n_points << " value=" << s.value;
      if (s.delta) std::cout << " delta=" << *s.delta;
      std::cout << "\n";
    }
    all = all && res.report.converged;
    points.push_back({{"c", c},
                      {"converged", res.report.converged},
                      {"final_grid", grid_to_json(res.report.final_grid)},
                      {"stages", stages},
                      {"state", density_to_json(res.state)}});
  }
  json report{{"command", "converge"},
              {"tool_version", std::string(kToolVersion)},
              {"config", config_to_json(cfg)},
              {"all_converged", all},
              {"points", points}};
  write_text(fs::path(cfg.output) / "report.json", report.dump(2) + "\n");
  return kExitOk;
}

int cmd_props(const SweepConfig& cfg) {
  const PropsReport r = run_props(cfg.props);
  const json report = props_report_json(cfg.props, r);
  write_text(fs::path(cfg.output) / "report.json", report.dump(2) + "\n");
  write_text(fs::path(cfg.output) / "hcurves.csv", h_curves_csv());
  std::cout << "min h_sin=" << r.sin_min.h << " at x=" << r.sin_min.x << ", min h_hyp=" << r.hyp_min.h
            << " at x=" << r.hyp_min.x << "\n"
            << "prop1 violations=" << report["prop1_violations"] << " prop2 violations=" << report["prop2_violations"]
            << "\n";
  return kExitOk;
}

} // namespace

int main(int argc, char** argv) {
  CLI::App app{"Mean-force Gibbs states and their ultrastrong-coupling limits"};
  app.set_version_flag("--version", std::string(kToolVersion));
  app.require_subcommand(1);

  Options opt;
  const auto add_common = [&](CLI::App* sub, bool needs_config) {
    auto* c = sub->add_option("--config", opt.config, "JSON experiment config");
    if (needs_config) c->required();
    sub->add_option("--out", opt.out, "output directory (overrides config \"output\")");
    sub->add_option("--workers", opt.workers, "parallel sweep workers");
    sub->add_option("--seed", opt.seed, "base seed");
  };
  auto* compute = app.add_subcommand("compute", "mean-force Gibbs state at one coupling");
  auto* usc = app.add_subcommand("usc", "ultrastrong-coupling state at one coupling");
  auto* sweep = app.add_subcommand("sweep", "trace distance MFGS vs USC over the coupling list");
  auto* converge = app.add_subcommand("converge", "grid convergence report per coupling");
  auto* props = app.add_subcommand("props", "h-function minima and bound ensembles");
  for (auto* s : {compute, usc, sweep, converge}) add_common(s, true);
  add_common(props, false);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitConfig;
  }

  try {
    if (*props) return cmd_props(load(opt, false));
    const SweepConfig cfg = load(opt, true);
    if (*compute) return cmd_compute(cfg);
    if (*usc) return cmd_usc(cfg);
    if (*sweep) return cmd_sweep(cfg);
    if (*converge) return cmd_converge(cfg);
  } catch (const ConfigError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const PreconditionError& e) {
    std::cerr << "precondition failed: " << e.what() << "\n";
    return kExitPrecondition;
  } catch (const InvariantError& e) {
    std::cerr << "invalid input: " << e.what() << "\n";
    return kExitConfig;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return kExitOk;
}

#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

#include "uscgibbs/mfgs_engine.hpp"
#include "uscgibbs/propositions.hpp"
#include "uscgibbs/usc_analytics.hpp"

namespace uscgibbs {

inline constexpr std::string_view kToolVersion = "uscgibbs 0.1.0";
inline constexpr std::string_view kSweepCsvHeader = "c,trace_distance,n_points,q_min,q_max,converged,wall_time_s";

enum class GridPolicy { fixed, automatic, converge };

std::string_view to_string(GridPolicy policy);

struct GridConfig {
  GridPolicy policy = GridPolicy::converge;
  EnvGrid fixed{-8.0, 8.0, 128, 1.0};  // used by the fixed policy
  int n_points = 128;                  // auto grid size / first converge stage
  double mass = 1.0;
  double tol = 1e-4;
  int max_stages = 5;
  int max_points = 1024;
  double box_growth = 1.25;
  ConvergenceObservable observable = ConvergenceObservable::trace_distance_to_usc;
};

struct PropsConfig {
  Prop1Config prop1;
  Prop2Config prop2;
  double x_max = 50.0;
  int n_scan = 20000;
};

struct SweepConfig {
  ModelSpec model;            // coupling/env are filled per row
  bool default_system = true;
  std::vector<double> couplings;
  GridConfig grid;
  std::string output = "out";
  std::uint64_t seed = 0;
  int workers = 1;
  PropsConfig props;
};

struct SweepRow {
  double c = 0.0;
  double trace_distance = 0.0;
  int n_points = 0;
  double q_min = 0.0;
  double q_max = 0.0;
  bool converged = true;
  double wall_time_s = 0.0;
  double off_block_norm = 0.0;          // ||rho - sum P rho P||_1 of the exact state
  std::vector<double> usc_h_diagonal;   // diagonal of the USC effective Hamiltonian
};

struct RowError {
  double c = 0.0;
  std::string message;
};

struct SweepResult {
  std::vector<SweepRow> rows;
  std::vector<RowError> errors;
};

/// 20 log-spaced couplings per family: [0.1, 16] for CL/GCL/GCL2, [3, 3000] for ZWANZIG,
/// [1, 200] for ZWANZIG_CV.
std::vector<double> default_couplings(Family family);
std::vector<double> log_spaced(double from, double to, int count);

/// Strict parse: unknown keys, unknown families and non-increasing couplings are ConfigErrors.
SweepConfig parse_config(const std::filesystem::path& path);
SweepConfig parse_config_text(std::string_view text);
nlohmann::json config_to_json(const SweepConfig& config);

/// Model spec at coupling c with the environment grid chosen by the grid policy's first stage.
ModelSpec spec_at(const SweepConfig& config, double c);

/// Evaluates one coupling. Throws on invariant or precondition failures.
SweepRow run_point(const SweepConfig& config, double c);
SweepResult run_sweep(const SweepConfig& config);

std::string sweep_csv(const SweepResult& result);
nlohmann::json sweep_report(const SweepConfig& config, const SweepResult& result);
/// Writes sweep.csv and report.json under `dir`.
void write_sweep_outputs(const SweepConfig& config, const SweepResult& result, const std::filesystem::path& dir);

struct PropsReport {
  HMinimum sin_min;
  HMinimum hyp_min;
  double mu = 0.0;
  std::vector<BoundCheck> prop1;
  std::vector<BoundCheck> prop2;
};

PropsReport run_props(const PropsConfig& config);
nlohmann::json props_report_json(const PropsConfig& config, const PropsReport& report);
/// x from 0.1 to 20 in steps of 0.1, plus x = pi, with columns x,h_sin,h_hyp.
std::string h_curves_csv();

nlohmann::json matrix_to_json(const Matrix& m);
nlohmann::json density_to_json(const DensityMatrix& rho);
nlohmann::json grid_to_json(const EnvGrid& grid);
nlohmann::json usc_to_json(const UscState& usc);

} // namespace uscgibbs

#pragma once

#include <optional>
#include <vector>

#include "uscgibbs/model_builders.hpp"

namespace uscgibbs {

DensityMatrix compute_gibbs(const HermitianOperator& h, double beta);

/// Tr_E exp(-beta H_SE), normalized.
DensityMatrix compute_mfgs(const HermitianOperator& h_se, const CompositeDims& dims, double beta);

/// MFGS of an assembled model.
DensityMatrix compute_mfgs(const ModelSpec& spec);

/// Grid growth rule: stage k uses n_initial * 2^k points on a box whose half-width
/// grows by box_growth^k around the initial center.
struct GridSchedule {
  EnvGrid initial;
  int max_stages = 5;
  double box_growth = 1.25;
  int max_points = 1024;

  [[nodiscard]] std::vector<EnvGrid> stages() const;
};

enum class ConvergenceObservable { trace_distance_to_usc, state_itself };

struct ConvergenceStage {
  EnvGrid grid;
  double value = 0.0;                // observable at this stage (0 for state_itself)
  std::optional<double> delta;       // change from the previous stage
};

struct ConvergenceReport {
  std::vector<ConvergenceStage> stages;
  bool converged = false;
  EnvGrid final_grid;
};

struct ConvergedMfgs {
  DensityMatrix state;
  ConvergenceReport report;
};

/// Runs the schedule until the observable changes by <= tol between stages.
/// An exhausted schedule returns converged = false with every stage delta.
ConvergedMfgs converge_mfgs(const ModelSpec& spec, const GridSchedule& schedule, double tol = 1e-4,
                            ConvergenceObservable observable = ConvergenceObservable::trace_distance_to_usc);

} // namespace uscgibbs

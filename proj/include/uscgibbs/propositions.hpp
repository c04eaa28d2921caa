#pragma once

#include <cstdint>
#include <functional>
#include <vector>

#include "uscgibbs/operator_core.hpp"

namespace uscgibbs {

/// Time average, mean square and variance of a sampled path.
struct PathStats {
  double mean = 0.0;
  double mean_sq = 0.0;
  double variance = 0.0;
};

enum class PathEnds { periodic, clamped };

/// Samples of f(t) on [0, beta].
///
/// Periodic paths use t_j = j beta / n_t (the endpoint is the first sample) with equal
/// weights; clamped paths include both endpoints and use trapezoid weights.
struct SampledPath {
  double beta = 1.0;
  PathEnds ends = PathEnds::periodic;
  RealVector times;
  RealVector values;
  RealVector derivatives;

  /// Derivatives by centered differences (one-sided at clamped ends).
  static SampledPath from_values(double beta, RealVector values, PathEnds ends);
  static SampledPath from_function(double beta, int n_t, PathEnds ends, const std::function<double(double)>& f);

  [[nodiscard]] int size() const { return static_cast<int>(values.size()); }
  [[nodiscard]] RealVector weights() const;  // quadrature weights, summing to 1
  void validate() const;
};

/// Periodic trigonometric polynomial on [0, beta]; sampled with exact derivatives.
struct FourierPath {
  double beta = 1.0;
  double offset = 0.0;
  std::vector<double> cos_coeffs;  // harmonic n = index + 1
  std::vector<double> sin_coeffs;

  [[nodiscard]] double value(double t) const;
  [[nodiscard]] double derivative(double t) const;
  [[nodiscard]] SampledPath sample(int n_t) const;
  /// Analytic time variance, (1/2) sum (a_n^2 + b_n^2).
  [[nodiscard]] double variance() const;
};

PathStats path_stats(const SampledPath& path);
/// Quadrature of the squared derivative, <f'^2>.
double mean_square_derivative(const SampledPath& path);

enum class HKind { sin, hyp };

/// x^2 (x + sin x)/(x - sin x) and x^2 (sinh x + x)/(sinh x - x); both tend to 12 as x -> 0.
double h_sin(double x);
double h_hyp(double x);
double h_value(HKind kind, double x);

struct HMinimum {
  double x = 0.0;
  double h = 0.0;
};

/// Grid scan over (0, x_max] followed by golden-section refinement of the best bracket.
/// The x -> 0 limit (value 12) takes part in the scan as x = 0.
HMinimum minimize_h(HKind kind, double x_max = 50.0, int n_scan = 20000);

enum class BoundStatus { checked, out_of_regime, ill_posed };

struct BoundCheck {
  double lhs = 0.0;
  double rhs = 0.0;
  double margin = 0.0;
  bool satisfied = false;
  BoundStatus status = BoundStatus::checked;
};

constexpr double kQuadratureTolerance = 1e-6;

/// <f'^2> >= mu sigma_g^2 / beta^2 for f = g + eps; out of regime when sigma_g < 10 delta.
BoundCheck check_kinetic_bound(const SampledPath& f, const SampledPath& g, double delta, double mu,
                               double tol = kQuadratureTolerance);

struct Prop1Config {
  int n_trials = 10000;
  std::uint64_t seed = 42;
  int n_t = 1024;
  double beta = 5.0;
  int g_modes = 10;
  int eps_modes = 24;
  double delta_ratio = 1.0 / 20.0;  // delta = ratio * sigma_g
  double mu = 0.0;                  // <= 0: certified min over minimize_h branches
};

/// Random Fourier g with Gaussian coefficients, band-limited noise eps with |eps| <= delta.
std::vector<BoundCheck> check_prop1(const Prop1Config& config);

/// Differentiable map with f'(x) >= lower_bound on the region of interest.
struct MonotoneMap {
  std::function<double(double)> f;
  std::function<double(double)> derivative;
  double lower_bound = 1.0;
};

/// sigma^2_{f o g} >= C^2 sigma_g^2 for one sampled g; ill-posed when f' < C on g's range.
BoundCheck check_composition_bound(const MonotoneMap& f, const SampledPath& g, double tol = kQuadratureTolerance);

struct Prop2Config {
  int n_trials = 1000;
  std::uint64_t seed = 7;
  int n_t = 1024;
  double beta = 5.0;
  int g_modes = 10;
};

std::vector<BoundCheck> check_prop2(const MonotoneMap& f, const Prop2Config& config);

/// Random Fourier path used by the ensembles (trial-seeded).
FourierPath random_fourier_path(double beta, int modes, std::uint64_t seed);
/// Band-limited noise with sup-norm exactly `bound` on a 16x-oversampled reference grid.
FourierPath random_bounded_noise(double beta, int modes, double bound, std::uint64_t seed);

} // namespace uscgibbs

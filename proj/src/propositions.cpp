#include "uscgibbs/propositions.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>
#include <sstream>

namespace uscgibbs {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

RealVector uniform_times(double beta, int n_t, PathEnds ends) {
  RealVector t(n_t);
  const double h = ends == PathEnds::periodic ? beta / n_t : beta / (n_t - 1);
  for (int j = 0; j < n_t; ++j) t(j) = j * h;
  return t;
}

} // namespace

SampledPath SampledPath::from_values(double beta, RealVector values, PathEnds ends) {
  SampledPath p;
  p.beta = beta;
  p.ends = ends;
  const int n = static_cast<int>(values.size());
  p.times = uniform_times(beta, n, ends);
  p.values = std::move(values);
  p.derivatives.resize(n);
  if (n < 2) {
    p.derivatives.setZero();
    return p;
  }
  const double h = p.times(1) - p.times(0);
  for (int j = 0; j < n; ++j) {
    if (ends == PathEnds::periodic) {
      p.derivatives(j) = (p.values((j + 1) % n) - p.values((j + n - 1) % n)) / (2.0 * h);
    } else if (j == 0) {
      p.derivatives(j) = (p.values(1) - p.values(0)) / h;
    } else if (j == n - 1) {
      p.derivatives(j) = (p.values(n - 1) - p.values(n - 2)) / h;
    } else {
      p.derivatives(j) = (p.values(j + 1) - p.values(j - 1)) / (2.0 * h);
    }
  }
  return p;
}

SampledPath SampledPath::from_function(double beta, int n_t, PathEnds ends,
                                       const std::function<double(double)>& f) {
  const RealVector t = uniform_times(beta, n_t, ends);
  RealVector v(n_t);
  for (int j = 0; j < n_t; ++j) v(j) = f(t(j));
  return from_values(beta, std::move(v), ends);
}

RealVector SampledPath::weights() const {
  const int n = size();
  if (ends == PathEnds::periodic) return RealVector::Constant(n, 1.0 / n);
  RealVector w = RealVector::Constant(n, 1.0 / (n - 1));
  w(0) *= 0.5;
  w(n - 1) *= 0.5;
  return w;
}

void SampledPath::validate() const {
  if (!(beta > 0.0)) throw InvariantError("path beta must be positive");
  if (size() < 64) throw InvariantError("sampled paths need at least 64 points");
  if (times.size() != values.size() || derivatives.size() != values.size())
    throw InvariantError("sampled path arrays differ in length");
  if (!values.allFinite() || !derivatives.allFinite()) throw InvariantError("sampled path has non-finite values");
}

double FourierPath::value(double t) const {
  double v = offset;
  const double w = kTwoPi / beta;
  for (std::size_t n = 0; n < cos_coeffs.size(); ++n) v += cos_coeffs[n] * std::cos(w * (n + 1) * t);
  for (std::size_t n = 0; n < sin_coeffs.size(); ++n) v += sin_coeffs[n] * std::sin(w * (n + 1) * t);
  return v;
}

double FourierPath::derivative(double t) const {
  double d = 0.0;
  const double w = kTwoPi / beta;
  for (std::size_t n = 0; n < cos_coeffs.size(); ++n) d -= cos_coeffs[n] * w * (n + 1) * std::sin(w * (n + 1) * t);
  for (std::size_t n = 0; n < sin_coeffs.size(); ++n) d += sin_coeffs[n] * w * (n + 1) * std::cos(w * (n + 1) * t);
  return d;
}

SampledPath FourierPath::sample(int n_t) const {
  SampledPath p;
  p.beta = beta;
  p.ends = PathEnds::periodic;
  p.times = uniform_times(beta, n_t, PathEnds::periodic);
  p.values.resize(n_t);
  p.derivatives.resize(n_t);
  for (int j = 0; j < n_t; ++j) {
    p.values(j) = value(p.times(j));
    p.derivatives(j) = derivative(p.times(j));
  }
  return p;
}

double FourierPath::variance() const {
  double s = 0.0;
  for (double a : cos_coeffs) s += a * a;
  for (double b : sin_coeffs) s += b * b;
  return 0.5 * s;
}

PathStats path_stats(const SampledPath& path) {
  const RealVector w = path.weights();
  const double mean = w.dot(path.values);
  const double mean_sq = w.dot(path.values.cwiseAbs2());
  // Centered second moment avoids cancellation for paths with a large offset.
  const double variance = w.dot((path.values.array() - mean).square().matrix());
  return {mean, mean_sq, variance};
}

double mean_square_derivative(const SampledPath& path) { return path.weights().dot(path.derivatives.cwiseAbs2()); }

// ---------------------------------------------------------------------------

double h_sin(double x) {
  x = std::abs(x);
  if (x == 0.0) return 12.0;
  const double x2 = x * x;
  double diff = 0.0;  // x - sin x
  if (x < 0.1) {
    diff = x * x2 / 6.0 * (1.0 - x2 / 20.0 * (1.0 - x2 / 42.0 * (1.0 - x2 / 72.0)));
  } else {
    diff = x - std::sin(x);
  }
  return x2 * (x + std::sin(x)) / diff;
}

double h_hyp(double x) {
  x = std::abs(x);
  if (x == 0.0) return 12.0;
  const double x2 = x * x;
  if (x < 0.1) {
    const double diff = x * x2 / 6.0 * (1.0 + x2 / 20.0 * (1.0 + x2 / 42.0 * (1.0 + x2 / 72.0)));
    return x2 * (std::sinh(x) + x) / diff;
  }
  // r = x / sinh x, stable for large x
  const double e = std::exp(-x);
  const double r = 2.0 * x * e / (1.0 - e * e);
  return x2 * (1.0 + r) / (1.0 - r);
}

double h_value(HKind kind, double x) { return kind == HKind::sin ? h_sin(x) : h_hyp(x); }

HMinimum minimize_h(HKind kind, double x_max, int n_scan) {
  if (!(x_max > 0.0) || n_scan < 2) throw InvariantError("minimize_h needs x_max > 0 and n_scan >= 2");
  const double step = x_max / n_scan;
  int best = 0;
  double best_h = h_value(kind, 0.0);
  for (int k = 1; k <= n_scan; ++k) {
    const double h = h_value(kind, k * step);
    if (h < best_h) {
      best_h = h;
      best = k;
    }
  }
  double lo = std::max(0.0, (best - 1) * step);
  double hi = std::min(x_max, (best + 1) * step);
  const double inv_phi = (std::sqrt(5.0) - 1.0) / 2.0;
  double a = hi - inv_phi * (hi - lo);
  double b = lo + inv_phi * (hi - lo);
  double fa = h_value(kind, a);
  double fb = h_value(kind, b);
  for (int it = 0; it < 200 && hi - lo > 1e-12 * std::max(1.0, hi); ++it) {
    if (fa < fb) {
      hi = b;
      b = a;
      fb = fa;
      a = hi - inv_phi * (hi - lo);
      fa = h_value(kind, a);
    } else {
      lo = a;
      a = b;
      fa = fb;
      b = lo + inv_phi * (hi - lo);
      fb = h_value(kind, b);
    }
  }
  HMinimum out{0.5 * (lo + hi), h_value(kind, 0.5 * (lo + hi))};
  if (best_h < out.h) out = {best * step, best_h};
  return out;
}

// ---------------------------------------------------------------------------

BoundCheck check_kinetic_bound(const SampledPath& f, const SampledPath& g, double delta, double mu, double tol) {
  f.validate();
  g.validate();
  if (f.size() != g.size()) throw InvariantError("f and g must share the time grid");
  const double sigma_g2 = path_stats(g).variance;
  BoundCheck c;
  c.lhs = mean_square_derivative(f);
  c.rhs = mu * sigma_g2 / (f.beta * f.beta);
  c.margin = c.lhs - c.rhs;
  c.satisfied = c.margin >= -tol;
  if (std::sqrt(sigma_g2) < 10.0 * delta) c.status = BoundStatus::out_of_regime;
  return c;
}

FourierPath random_fourier_path(double beta, int modes, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  FourierPath p;
  p.beta = beta;
  p.offset = normal(rng);
  p.cos_coeffs.resize(modes);
  p.sin_coeffs.resize(modes);
  for (int n = 0; n < modes; ++n) {
    p.cos_coeffs[n] = normal(rng);
    p.sin_coeffs[n] = normal(rng);
  }
  return p;
}

FourierPath random_bounded_noise(double beta, int modes, double bound, std::uint64_t seed) {
  // Low-pass filter of uniform white noise: keep the DC term and the first `modes` harmonics.
  constexpr int kRaw = 256;
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> uniform(-1.0, 1.0);
  std::vector<double> raw(kRaw);
  for (double& u : raw) u = uniform(rng);

  FourierPath p;
  p.beta = beta;
  p.cos_coeffs.assign(modes, 0.0);
  p.sin_coeffs.assign(modes, 0.0);
  for (int j = 0; j < kRaw; ++j) p.offset += raw[j] / kRaw;
  for (int n = 1; n <= modes; ++n)
    for (int j = 0; j < kRaw; ++j) {
      const double phase = kTwoPi * n * j / kRaw;
      p.cos_coeffs[n - 1] += 2.0 * raw[j] * std::cos(phase) / kRaw;
      p.sin_coeffs[n - 1] += 2.0 * raw[j] * std::sin(phase) / kRaw;
    }

  const int n_ref = 16 * 2 * (modes + 1) * 8;
  double sup = 0.0;
  for (int j = 0; j < n_ref; ++j) sup = std::max(sup, std::abs(p.value(beta * j / n_ref)));
  // Leave headroom for the sup between reference samples.
  const double scale = sup > 0.0 ? 0.99 * bound / sup : 0.0;
  p.offset *= scale;
  for (double& a : p.cos_coeffs) a *= scale;
  for (double& b : p.sin_coeffs) b *= scale;
  return p;
}

std::vector<BoundCheck> check_prop1(const Prop1Config& config) {
  double mu = config.mu;
  if (!(mu > 0.0)) mu = std::min(minimize_h(HKind::sin).h, minimize_h(HKind::hyp).h);
  std::vector<BoundCheck> out;
  out.reserve(std::max(config.n_trials, 0));
  for (int trial = 0; trial < config.n_trials; ++trial) {
    const std::uint64_t seed = config.seed + static_cast<std::uint64_t>(trial);
    const FourierPath g = random_fourier_path(config.beta, config.g_modes, seed);
    const SampledPath gs = g.sample(config.n_t);
    const double delta = config.delta_ratio * std::sqrt(path_stats(gs).variance);
    const FourierPath eps = random_bounded_noise(config.beta, config.eps_modes, delta, ~seed);

    FourierPath f = g;
    f.offset += eps.offset;
    const auto add = [](std::vector<double>& into, const std::vector<double>& from) {
      if (into.size() < from.size()) into.resize(from.size(), 0.0);
      for (std::size_t n = 0; n < from.size(); ++n) into[n] += from[n];
    };
    add(f.cos_coeffs, eps.cos_coeffs);
    add(f.sin_coeffs, eps.sin_coeffs);
    out.push_back(check_kinetic_bound(f.sample(config.n_t), gs, delta, mu));
  }
  return out;
}

BoundCheck check_composition_bound(const MonotoneMap& f, const SampledPath& g, double tol) {
  g.validate();
  if (!(f.lower_bound > 0.0)) throw InvariantError("composition bound needs a positive derivative lower bound");
  BoundCheck c;
  RealVector composed(g.size());
  for (int j = 0; j < g.size(); ++j) {
    if (f.derivative(g.values(j)) < f.lower_bound * (1.0 - 1e-12)) c.status = BoundStatus::ill_posed;
    composed(j) = f.f(g.values(j));
  }
  SampledPath fg = g;
  fg.values = std::move(composed);
  c.lhs = path_stats(fg).variance;
  c.rhs = f.lower_bound * f.lower_bound * path_stats(g).variance;
  c.margin = c.lhs - c.rhs;
  c.satisfied = c.margin >= -tol;
  return c;
}

std::vector<BoundCheck> check_prop2(const MonotoneMap& f, const Prop2Config& config) {
  std::vector<BoundCheck> out;
  out.reserve(std::max(config.n_trials, 0));
  for (int trial = 0; trial < config.n_trials; ++trial) {
    const FourierPath g =
        random_fourier_path(config.beta, config.g_modes, config.seed + static_cast<std::uint64_t>(trial));
    out.push_back(check_composition_bound(f, g.sample(config.n_t)));
  }
  return out;
}

} // namespace uscgibbs

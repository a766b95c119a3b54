#pragma once

#include <cstddef>
#include <functional>
#include <optional>
#include <stdexcept>

#include "nlosbound/geometry.hpp"

namespace nlosbound {

struct PocsOptions {
  int max_iters = 500;
  /// Stop once residual <= this (meters). Unset means 1e-6 * largest radius.
  std::optional<double> residual_tol;
  /// Starting point; the algorithm's tuning vector.
  Point init;

  double tolerance_for(const Region& r) const {
    const double tol = residual_tol.value_or(1e-6 * r.scale());
    if (!(tol > 0.0)) throw std::invalid_argument("residual_tol must be > 0");
    return tol;
  }
};

struct Estimate {
  Point point;
  double residual = 0.0;
  int iterations_used = 0;
  bool converged = false;
};

/// Called as observer(k, x_{k+1}, j) after the projection onto ball j.
struct NoObserver {
  void operator()(int, const Point&, std::size_t) const noexcept {}
};

/// Alternating projections: repeatedly project onto the farthest ball.
template <class Observer = NoObserver>
Estimate pocs_estimate(const Region& r, const PocsOptions& opts, Observer&& observe = {}) {
  if (opts.max_iters < 1) throw std::invalid_argument("max_iters must be >= 1");
  r.check_dim(opts.init);
  const double tol = opts.tolerance_for(r);

  Point x = opts.init;
  int k = 0;
  double f = residual(r, x);
  while (f > tol && k < opts.max_iters) {
    const std::size_t j = *farthest_index(r, x);
    x = project_onto_ball(x, r[j]);
    observe(k, x, j);
    ++k;
    f = residual(r, x);
  }
  return Estimate{std::move(x), f, k, f <= tol};
}

/// What a step rule sees at iteration k.
struct StepContext {
  int k = 0;
  double residual = 0.0;
  double grad_norm_sq = 0.0;
};

using StepRule = std::function<double(const StepContext&)>;

/// alpha_k = c / (k + 1).
inline StepRule diminishing_step(double c = 1.0) {
  return [c](const StepContext& s) { return c / (s.k + 1.0); };
}

/// alpha_k = f(x_k) / |g_k|^2; with unit subgradients this is one projection.
inline StepRule polyak_step() {
  return [](const StepContext& s) { return s.grad_norm_sq > 0.0 ? s.residual / s.grad_norm_sq : 0.0; };
}

/// Negative-subgradient iteration on f(x) = max_i dist(x, B_i).
/// g is zero when x is feasible, else the unit vector from the projection onto
/// the farthest ball back to x.
inline Estimate subgradient_estimate(const Region& r, const Point& x0, const StepRule& step, int max_iters,
                                     std::optional<double> residual_tol = std::nullopt) {
  if (max_iters < 1) throw std::invalid_argument("max_iters must be >= 1");
  r.check_dim(x0);
  const double tol = residual_tol.value_or(1e-6 * r.scale());

  Point x = x0;
  int k = 0;
  for (; k < max_iters; ++k) {
    const auto j = farthest_index(r, x);
    if (!j) break;
    const double f = distance_to_ball(x, r[*j]);
    Point g = x - project_onto_ball(x, r[*j]);
    const double gn = norm(g);
    if (gn == 0.0) break;
    g *= 1.0 / gn;
    const double alpha = step(StepContext{k, f, 1.0});
    if (!(alpha > 0.0)) throw std::invalid_argument("step rule must return alpha > 0");
    for (std::size_t i = 0; i < x.dim(); ++i) x[i] -= alpha * g[i];
  }
  const double f = residual(r, x);
  return Estimate{std::move(x), f, k, f <= tol};
}

}  // namespace nlosbound

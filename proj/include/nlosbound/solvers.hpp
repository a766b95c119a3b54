#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <functional>
#include <limits>
#include <numeric>
#include <optional>
#include <stdexcept>
#include <vector>

#include "nlosbound/barrier.hpp"
#include "nlosbound/geometry.hpp"
#include "nlosbound/linalg.hpp"
#include "nlosbound/solver_types.hpp"

namespace nlosbound {

// ---------------------------------------------------------------------------
// Simplex

/// Euclidean projection onto {l >= 0, sum l = 1} by sort-and-threshold.
inline std::vector<double> simplex_project(const std::vector<double>& v) {
  if (v.empty()) throw std::invalid_argument("simplex_project: empty vector");
  std::vector<double> u = v;
  std::sort(u.begin(), u.end(), std::greater<>());
  double prefix = 0.0;
  double tau = 0.0;
  for (std::size_t j = 0; j < u.size(); ++j) {
    prefix += u[j];
    const double candidate = (prefix - 1.0) / static_cast<double>(j + 1);
    if (u[j] - candidate > 0.0) tau = candidate;
  }
  std::vector<double> out(v.size());
  for (std::size_t i = 0; i < v.size(); ++i) out[i] = std::max(v[i] - tau, 0.0);
  return out;
}

struct SimplexQpResult {
  std::vector<double> lambda;
  double value = 0.0;
  SolverOutcome outcome;
};

namespace detail {
inline std::vector<double> sym_times(const SymMat& g, const std::vector<double>& x) {
  const std::size_t n = g.order();
  std::vector<double> out(n, 0.0);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) out[i] += g(i, j) * x[j];
  return out;
}

inline double simplex_qp_value(const SymMat& g, const std::vector<double>& b, const std::vector<double>& l) {
  return dot(l, sym_times(g, l)) - dot(b, l);
}
}  // namespace detail

/// min l^T G l - b^T l over the unit simplex, G positive semidefinite.
/// Projected gradient with step 1/L, L = 2 lambda_max(G); stops when the
/// first-order (Frank-Wolfe) gap grad^T l - min_i grad_i is below tol * scale,
/// scale = max(1, |b|_inf, lambda_max).
inline SimplexQpResult solve_simplex_qp(const SymMat& g, const std::vector<double>& b,
                                        const SolverOptions& opts = {}) {
  opts.validate();
  const std::size_t n = g.order();
  if (n == 0 || b.size() != n) throw std::invalid_argument("solve_simplex_qp: G and b sizes differ or are empty");
  if (n > kMaxBalls) throw std::invalid_argument("solve_simplex_qp: more than 64 variables");

  SimplexQpResult res;
  const SymEig eig = sym_eig_small(g);
  const double lmax = eig.values.back();
  const double lmin = eig.values.front();
  if (!std::isfinite(lmax) || !std::isfinite(lmin)) {
    res.outcome.status = SolverStatus::NumericalFailure;
    res.outcome.message = "eigenvalue estimation failed";
    return res;
  }
  double bmax = 0.0;
  for (double v : b) bmax = std::max(bmax, std::abs(v));
  const double scale = std::max({1.0, bmax, lmax});
  if (lmin < -1e-9 * scale) throw std::invalid_argument("solve_simplex_qp: G is not positive semidefinite");

  if (lmax <= 1e-15 * scale) {
    // Linear objective: the vertex with the largest b_i.
    const auto best = static_cast<std::size_t>(std::max_element(b.begin(), b.end()) - b.begin());
    res.lambda.assign(n, 0.0);
    res.lambda[best] = 1.0;
    res.value = detail::simplex_qp_value(g, b, res.lambda);
    res.outcome.status = SolverStatus::Converged;
    res.outcome.value = res.value;
    return res;
  }

  const double inv_l = 1.0 / (2.0 * lmax);
  std::vector<double> lambda(n, 1.0 / static_cast<double>(n));
  std::vector<double> grad(n);
  double fw_gap = std::numeric_limits<double>::infinity();
  int k = 0;
  for (;; ++k) {
    const auto gl = detail::sym_times(g, lambda);
    for (std::size_t i = 0; i < n; ++i) grad[i] = 2.0 * gl[i] - b[i];
    fw_gap = dot(grad, lambda) - *std::min_element(grad.begin(), grad.end());
    if (fw_gap <= opts.tol * scale || k >= opts.max_first_order_iters) break;
    std::vector<double> step(n);
    for (std::size_t i = 0; i < n; ++i) step[i] = lambda[i] - inv_l * grad[i];
    lambda = simplex_project(step);
  }

  res.lambda = std::move(lambda);
  res.value = detail::simplex_qp_value(g, b, res.lambda);
  SolverOutcome& out = res.outcome;
  out.value = res.value;
  out.gap = std::max(0.0, fw_gap);
  out.inner_iterations = k;
  double sum = 0.0;
  double neg = 0.0;
  for (double v : res.lambda) {
    sum += v;
    neg = std::max(neg, -v);
  }
  out.residuals.primal = std::abs(sum - 1.0) + neg;
  out.residuals.gap = out.gap / scale;
  out.status = out.residuals.gap <= opts.tol ? SolverStatus::Converged : SolverStatus::IterationLimit;
  if (out.residuals.primal > opts.tol) {
    out.status = SolverStatus::NumericalFailure;
    out.message = "iterate left the simplex";
  }
  return res;
}

// ---------------------------------------------------------------------------
// Ball intersections

inline void check_solver_region(const Region& r) {
  if (r.size() > kMaxBalls) throw std::invalid_argument("solver: more than 64 balls");
  if (r.dim() > kMaxSolverDim) throw std::invalid_argument("solver: dimension above 3");
}

/// A strictly interior starting point, found on an inflated copy of the
/// region when the original has (numerically) empty interior.
struct InteriorStart {
  SolverStatus status = SolverStatus::NumericalFailure;
  bool inflated = false;
  double inflation = 0.0;
  Point point;
  std::optional<Region> region;  // the region actually solved on

  bool ok() const noexcept { return region.has_value(); }
};

namespace detail {

/// Phase I: minimize s s.t. |x - a_i|^2 - d_i^2 < s, in local coordinates.
/// Returns the x part when the optimum is below -margin.
inline std::optional<Point> phase_one(const Region& r, const SolverOptions& opts) {
  constexpr double kMargin = 1e-9;  // in units of scale^2
  const Box box = relaxed_bounding_box(r);
  if (box.empty()) return std::nullopt;
  const LocalBalls balls(r, box.center());
  const std::size_t n = balls.dim();

  Vec y(n + 1, 0.0);
  double worst = -std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < balls.size(); ++i) worst = std::max(worst, -balls.slack(i, y));
  y[n] = worst + 1.0;

  Vec coeffs(n + 1, 0.0);
  coeffs[n] = 1.0;
  const BallBarrierProblem<LinearObjective> problem(balls, LinearObjective{coeffs}, true);
  const double m = problem.barrier_order();
  const auto done = [&](const Vec& yy, double t) {
    const double s = yy[n];
    const double gap = m / t;
    if (s < -kMargin && gap <= 0.1 * std::abs(s)) return true;
    return s - gap > -kMargin;
  };
  SolverOptions phase_opts = opts;
  phase_opts.barrier_growth = 10.0;
  const PathResult path = follow_central_path(problem, std::move(y), m, phase_opts, 30, done);
  if (path.y.empty() || !(path.y[n] < -kMargin)) return std::nullopt;
  Point local(n);
  for (std::size_t l = 0; l < n; ++l) local[l] = path.y[l];
  return balls.to_world(local);
}

}  // namespace detail

inline InteriorStart find_interior_point(const Region& r, const SolverOptions& opts = {}) {
  check_solver_region(r);
  InteriorStart out;
  if (auto p = detail::phase_one(r, opts)) {
    out.status = SolverStatus::Converged;
    out.point = std::move(*p);
    out.region = r;
    return out;
  }
  const double delta = 1e-7 * r.scale();
  Region grown = r.inflated(delta);
  if (auto p = detail::phase_one(grown, opts)) {
    out.status = SolverStatus::NeedsInflation;
    out.inflated = true;
    out.inflation = delta;
    out.point = std::move(*p);
    out.region = std::move(grown);
    return out;
  }
  out.status = SolverStatus::Infeasible;
  return out;
}

struct BallSolveResult {
  Point x;
  double value = 0.0;
  SolverOutcome outcome;
};

namespace detail {

inline double max_violation(const Region& r, const Point& x) { return residual(r, x) / r.scale(); }

template <class Objective, class ToWorldValue>
BallSolveResult solve_over_balls(const InteriorStart& start, Objective obj, const SolverOptions& opts,
                                 ToWorldValue&& world_value, double world_gap_per_unit) {
  const Region& w = *start.region;
  const LocalBalls balls(w, start.point);
  const BallBarrierProblem<Objective> problem(balls, std::move(obj), false);
  const double m = problem.barrier_order();
  const PathResult path = follow_central_path(problem, Vec(balls.dim(), 0.0), m, opts, opts.max_outer,
                                              [&](const Vec&, double t) { return m / t <= opts.tol; });

  BallSolveResult res;
  Point local(balls.dim());
  for (std::size_t l = 0; l < balls.dim(); ++l) local[l] = path.y[l];
  res.x = balls.to_world(local);
  res.value = world_value(res.x);
  SolverOutcome& out = res.outcome;
  out.value = res.value;
  out.gap = world_gap_per_unit * m / path.t;
  out.inflated = start.inflated;
  out.outer_iterations = path.outer;
  out.inner_iterations = path.inner;
  out.message = path.message;
  for (double h : path.history) out.history.push_back(h);
  out.residuals.primal = max_violation(w, res.x);
  out.residuals.gap = m / path.t;
  out.status = path.status;
  if (out.status == SolverStatus::Converged && !out.residuals.within(opts.tol)) {
    out.status = SolverStatus::NumericalFailure;
    out.message = "post-condition check failed";
  }
  if (out.status == SolverStatus::Converged && start.inflated) out.status = SolverStatus::NeedsInflation;
  return res;
}

inline BallSolveResult failed_start(const InteriorStart& start, std::size_t dim) {
  BallSolveResult res;
  res.x = Point(dim, std::numeric_limits<double>::quiet_NaN());
  res.value = std::numeric_limits<double>::quiet_NaN();
  res.outcome.status = start.status;
  res.outcome.value = res.value;
  res.outcome.message = "no strictly feasible point";
  return res;
}

}  // namespace detail

/// max c^T x over the ball intersection, by log-barrier path following.
/// The true maximum lies in [value, value + outcome.gap].
inline BallSolveResult maximize_linear_over_balls(const Point& c, const Region& r, const SolverOptions& opts,
                                                  const InteriorStart& start) {
  opts.validate();
  check_solver_region(r);
  r.check_dim(c);
  if (!start.ok()) return detail::failed_start(start, r.dim());
  const double cn = norm(c);
  if (cn == 0.0) {
    BallSolveResult res{start.point, 0.0, {}};
    res.outcome.status = start.inflated ? SolverStatus::NeedsInflation : SolverStatus::Converged;
    res.outcome.inflated = start.inflated;
    return res;
  }
  const double scale = start.region->scale();
  detail::Vec coeffs(c.dim());
  for (std::size_t l = 0; l < c.dim(); ++l) coeffs[l] = -c[l] / cn;
  auto res = detail::solve_over_balls(
      start, detail::LinearObjective{coeffs}, opts, [&](const Point& x) { return dot(c, x); }, cn * scale);
  // history holds -c^T y / |c| in local units; report c^T x instead.
  for (double& h : res.outcome.history) h = dot(c, start.point) - cn * scale * h;
  return res;
}

inline BallSolveResult maximize_linear_over_balls(const Point& c, const Region& r, const SolverOptions& opts = {}) {
  check_solver_region(r);
  return maximize_linear_over_balls(c, r, opts, find_interior_point(r, opts));
}

/// min |x_hat - x| over the ball intersection; zero when x_hat is feasible.
inline BallSolveResult minimize_distance_over_balls(const Point& target, const Region& r, const SolverOptions& opts,
                                                    const InteriorStart& start) {
  opts.validate();
  check_solver_region(r);
  r.check_dim(target);
  if (residual(r, target) == 0.0) {
    BallSolveResult res{target, 0.0, {}};
    res.outcome.status = SolverStatus::Converged;
    return res;
  }
  if (!start.ok()) return detail::failed_start(start, r.dim());
  if (residual(*start.region, target) == 0.0) {
    BallSolveResult res{target, 0.0, {}};
    res.outcome.status = SolverStatus::NeedsInflation;
    res.outcome.inflated = true;
    return res;
  }
  const double scale = start.region->scale();
  const detail::LocalBalls frame(*start.region, start.point);
  const Point local_target = frame.to_local(target);
  auto res = detail::solve_over_balls(
      start, detail::DistanceObjective{local_target.values()}, opts,
      [&](const Point& x) { return distance(x, target); }, scale);
  for (double& h : res.outcome.history) h *= scale;
  return res;
}

inline BallSolveResult minimize_distance_over_balls(const Point& target, const Region& r,
                                                    const SolverOptions& opts = {}) {
  check_solver_region(r);
  return minimize_distance_over_balls(target, r, opts, find_interior_point(r, opts));
}

}  // namespace nlosbound

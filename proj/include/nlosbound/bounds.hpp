#pragma once

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstddef>
#include <limits>
#include <optional>
#include <stdexcept>
#include <vector>

#include "nlosbound/barrier.hpp"
#include "nlosbound/geometry.hpp"
#include "nlosbound/linalg.hpp"
#include "nlosbound/sdp.hpp"
#include "nlosbound/solvers.hpp"

namespace nlosbound {

inline constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

/// alpha = 1 / (2 ln(2 (N+1) mu)), mu = min(N+1, n+1).
inline double relaxation_alpha(std::size_t num_balls, std::size_t dim) {
  const double n1 = static_cast<double>(num_balls) + 1.0;
  const double mu = std::min(n1, static_cast<double>(dim) + 1.0);
  return 1.0 / (2.0 * std::log(2.0 * n1 * mu));
}

struct Bound1Result {
  double upper = kNaN;      // sqrt(v_sdp + gap), m
  double lower = kNaN;      // sqrt(alpha v_sdp), m
  double alpha = kNaN;
  double sdp_value = kNaN;  // m^2
  bool inflated = false;
  SolverOutcome outcome;
};

/// Worst-case distance from `estimate` to the ball intersection, bounded above
/// through the semidefinite relaxation of
///   max |x - estimate|^2  s.t.  |x - a_i|^2 <= d_i^2.
/// The estimate may lie outside the region.
inline Bound1Result bound1(const Point& estimate, const Region& r, const SolverOptions& opts,
                           const InteriorStart& start) {
  r.check_dim(estimate);
  check_solver_region(r);
  Bound1Result res;
  res.alpha = relaxation_alpha(r.size(), r.dim());
  if (!start.ok()) {
    res.outcome.status = start.status;
    res.outcome.message = "no strictly feasible point";
    return res;
  }

  // Local frame centered at the interior point, lengths in units of the largest radius.
  const detail::LocalBalls frame(*start.region, start.point);
  const std::size_t n = r.dim();
  const std::size_t m = n + 1;
  const double s2 = frame.scale * frame.scale;

  auto lifted = [&](const Point& p, double constant) {
    SymMat b(m);
    for (std::size_t i = 0; i < n; ++i) {
      b(i, i) = 1.0;
      b(n, i) = -p[i];
    }
    b(n, n) = constant;
    return b;
  };
  const Point local_est = frame.to_local(estimate);
  const SymMat objective = lifted(local_est, squared_norm(local_est));
  std::vector<SymMat> constraints;
  constraints.reserve(frame.size());
  double min_slack = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < frame.size(); ++i) {
    const Point& c = frame.centers[i];
    constraints.push_back(lifted(c, squared_norm(c) - frame.radii[i] * frame.radii[i]));
    min_slack = std::min(min_slack, frame.radii[i] * frame.radii[i] - squared_norm(c));
  }

  // Lift the interior point (the local origin): Z = e_m e_m^T + sigma diag(1,..,1,0),
  // giving tr(B_i Z) = n sigma - slack_i.
  double sigma = 1e-2;
  while (static_cast<double>(n) * sigma >= min_slack && sigma > 1e-300) sigma *= 0.5;
  SymMat z0(m);
  for (std::size_t i = 0; i < n; ++i) z0(i, i) = sigma;
  z0(n, n) = 1.0;

  SdpResult sdp = solve_tiny_sdp(objective, constraints, opts, z0);
  res.outcome = std::move(sdp.outcome);
  res.outcome.value *= s2;
  res.outcome.gap *= s2;
  for (double& h : res.outcome.history) h *= s2;
  res.inflated = start.inflated;
  res.outcome.inflated = start.inflated;
  if (res.outcome.status == SolverStatus::Converged && start.inflated) res.outcome.status = SolverStatus::NeedsInflation;
  if (!std::isfinite(sdp.value)) return res;

  res.sdp_value = sdp.value * s2;
  res.upper = std::sqrt(std::max(0.0, res.sdp_value + res.outcome.gap));
  res.lower = std::sqrt(res.alpha * std::max(0.0, res.sdp_value));
  return res;
}

inline Bound1Result bound1(const Point& estimate, const Region& r, const SolverOptions& opts = {}) {
  check_solver_region(r);
  return bound1(estimate, r, opts, find_interior_point(r, opts));
}

struct Bound2Result {
  double diameter_bound = kNaN;  // 2R, m
  double radius = kNaN;          // R, m
  Point center;                  // sum lambda_i a_i
  std::vector<double> lambda;
  /// The simplex QP value went below -tol: no point can lie in every ball.
  bool empty_region = false;
  SolverOutcome outcome;
};

/// Enclosing ball of the intersection from the simplex-constrained problem
///   min_l |sum l_i a_i|^2 - sum l_i (|a_i|^2 - d_i^2).
/// Every simplex point l yields a ball centered at sum l_i a_i with squared
/// radius equal to the objective that contains the intersection.
inline Bound2Result bound2(const Region& r, const SolverOptions& opts = {}) {
  check_solver_region(r);
  const std::size_t n = r.dim();
  const std::size_t count = r.size();
  const double scale = r.scale();

  // The objective is unchanged on the simplex under a common translation of
  // the anchors; centering keeps G well scaled.
  Point mean(n);
  for (const Ball& b : r.balls()) mean += b.center;
  mean *= 1.0 / static_cast<double>(count);
  std::vector<Point> centers;
  centers.reserve(count);
  for (const Ball& b : r.balls()) centers.push_back((1.0 / scale) * (b.center - mean));

  SymMat g(count);
  std::vector<double> lin(count);
  for (std::size_t i = 0; i < count; ++i) {
    for (std::size_t j = 0; j <= i; ++j) g(i, j) = dot(centers[i], centers[j]);
    const double d = r[i].radius / scale;
    lin[i] = squared_norm(centers[i]) - d * d;
  }
  SimplexQpResult qp = solve_simplex_qp(g, lin, opts);

  Bound2Result res;
  res.outcome = std::move(qp.outcome);
  res.lambda = std::move(qp.lambda);
  if (res.lambda.empty()) return res;
  double bmax = 1.0;
  for (double v : lin) bmax = std::max(bmax, std::abs(v));
  res.empty_region = qp.value < -opts.tol * bmax;
  res.radius = std::sqrt(std::max(0.0, qp.value)) * scale;
  res.diameter_bound = 2.0 * res.radius;
  Point c(n);
  for (std::size_t i = 0; i < count; ++i) c += res.lambda[i] * centers[i];
  res.center = mean + scale * c;
  res.outcome.value = qp.value * scale * scale;
  res.outcome.gap *= scale * scale;
  return res;
}

struct Bound3LpResult {
  std::vector<double> lengths;
  double value = kNaN;
};

/// Box bound from the l-infinity hulls of the balls: per axis
/// |min_i(a_il + d_i) - max_i(a_il - d_i)|, combined in the 2-norm.
inline Bound3LpResult bound3_lp(const Region& r) {
  const Box box = relaxed_bounding_box(r);
  Bound3LpResult res;
  double s = 0.0;
  for (std::size_t l = 0; l < r.dim(); ++l) {
    const double len = std::abs(box.hi[l] - box.lo[l]);
    res.lengths.push_back(len);
    s += len * len;
  }
  res.value = std::sqrt(s);
  return res;
}

struct Bound3SocpResult {
  std::vector<double> lengths;
  double value = kNaN;
  bool inflated = false;
  /// Two per axis: maximize +e_l, then -e_l.
  std::vector<SolverOutcome> outcomes;

  bool ok() const {
    return !outcomes.empty() && std::all_of(outcomes.begin(), outcomes.end(), [](const auto& o) { return o.ok(); });
  }
};

/// Bounding box of the intersection itself via 2n linear maximizations.
/// Each edge is the certified upper end of the barrier's interval, capped by
/// the l-infinity hull box, which also contains the intersection.
inline Bound3SocpResult bound3_socp(const Region& r, const SolverOptions& opts, const InteriorStart& start) {
  check_solver_region(r);
  const std::size_t n = r.dim();
  const Bound3LpResult hull = bound3_lp(r);
  const Box box = relaxed_bounding_box(r);
  Bound3SocpResult res;
  res.inflated = start.inflated;
  double s = 0.0;
  for (std::size_t l = 0; l < n; ++l) {
    BallSolveResult hi = maximize_linear_over_balls(unit_vector(n, l, 1.0), r, opts, start);
    BallSolveResult lo = maximize_linear_over_balls(unit_vector(n, l, -1.0), r, opts, start);
    const double top = std::min(hi.value + hi.outcome.gap, box.hi[l]);
    const double bottom = std::max(-(lo.value + lo.outcome.gap), box.lo[l]);
    const double len = std::min(std::abs(top - bottom), hull.lengths[l]);
    res.outcomes.push_back(std::move(hi.outcome));
    res.outcomes.push_back(std::move(lo.outcome));
    res.lengths.push_back(len);
    s += len * len;
  }
  res.value = res.ok() ? std::sqrt(s) : kNaN;
  return res;
}

inline Bound3SocpResult bound3_socp(const Region& r, const SolverOptions& opts = {}) {
  check_solver_region(r);
  return bound3_socp(r, opts, find_interior_point(r, opts));
}

struct DistanceResult {
  double value = kNaN;
  Point nearest;
  SolverOutcome outcome;
};

/// min over the intersection of |estimate - x|, a lower bound on the error.
inline DistanceResult distance_to_region(const Point& estimate, const Region& r, const SolverOptions& opts,
                                         const InteriorStart& start) {
  BallSolveResult s = minimize_distance_over_balls(estimate, r, opts, start);
  return DistanceResult{s.value, std::move(s.x), std::move(s.outcome)};
}

inline DistanceResult distance_to_region(const Point& estimate, const Region& r, const SolverOptions& opts = {}) {
  check_solver_region(r);
  r.check_dim(estimate);
  if (residual(r, estimate) == 0.0) return distance_to_region(estimate, r, opts, InteriorStart{});
  return distance_to_region(estimate, r, opts, find_interior_point(r, opts));
}

/// Which bounds a report computes.
struct BoundSelection {
  bool bound1 = true;
  bool bound2 = true;
  bool bound3_socp = true;
  bool bound3_lp = true;
  bool ell1 = true;
};

struct BoundTimings {
  double bound1 = 0.0;
  double bound2 = 0.0;
  double bound3_socp = 0.0;
  double bound3_lp = 0.0;
  double ell1 = 0.0;
};

struct BoundReport {
  std::optional<Bound1Result> bound1;
  std::optional<Bound2Result> bound2;
  std::optional<Bound3SocpResult> bound3_socp;
  std::optional<Bound3LpResult> bound3_lp;
  std::optional<DistanceResult> ell1;
  InteriorStart start;
  BoundTimings seconds;

  bool region_empty() const {
    return start.status == SolverStatus::Infeasible || (bound2 && bound2->empty_region);
  }
};

namespace detail {
template <class F>
auto timed(double& seconds, F&& f) {
  const auto t0 = std::chrono::steady_clock::now();
  auto result = f();
  seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  return result;
}
}  // namespace detail

/// All selected bounds for one region; bound1 and ell1 only with an estimate.
inline BoundReport compute_bounds(const Region& r, const std::optional<Point>& estimate, const SolverOptions& opts = {},
                                  const BoundSelection& which = {}) {
  check_solver_region(r);
  if (estimate) r.check_dim(*estimate);
  BoundReport rep;
  double start_seconds = 0.0;
  rep.start = detail::timed(start_seconds, [&] { return find_interior_point(r, opts); });
  if (which.bound2) rep.bound2 = detail::timed(rep.seconds.bound2, [&] { return bound2(r, opts); });
  if (which.bound3_lp) rep.bound3_lp = detail::timed(rep.seconds.bound3_lp, [&] { return bound3_lp(r); });
  if (which.bound3_socp)
    rep.bound3_socp = detail::timed(rep.seconds.bound3_socp, [&] { return bound3_socp(r, opts, rep.start); });
  if (estimate && which.bound1)
    rep.bound1 = detail::timed(rep.seconds.bound1, [&] { return bound1(*estimate, r, opts, rep.start); });
  if (estimate && which.ell1)
    rep.ell1 = detail::timed(rep.seconds.ell1, [&] { return distance_to_region(*estimate, r, opts, rep.start); });
  // The shared interior point serves every barrier solve; charge it once to each.
  if (rep.bound1) rep.seconds.bound1 += start_seconds;
  if (rep.bound3_socp) rep.seconds.bound3_socp += start_seconds;
  return rep;
}

}  // namespace nlosbound

#pragma once

// Log-barrier path following with damped Newton centering. Internal machinery
// behind the ball-constrained solvers and the small SDP.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "nlosbound/geometry.hpp"
#include "nlosbound/linalg.hpp"
#include "nlosbound/solver_types.hpp"

namespace nlosbound::detail {

using Vec = std::vector<double>;

inline Vec axpy(const Vec& y, double s, const Vec& dy) {
  Vec out(y.size());
  for (std::size_t i = 0; i < y.size(); ++i) out[i] = y[i] + s * dy[i];
  return out;
}

struct PathResult {
  Vec y;
  double t = 0.0;
  int outer = 0;
  int inner = 0;
  SolverStatus status = SolverStatus::NumericalFailure;
  std::vector<double> history;
  std::string message;
};

/// Newton solve H dy = -g, nudging the diagonal if H is numerically singular.
inline bool newton_direction(const Matrix& h, const Vec& g, Vec& dy) {
  double diag_scale = 0.0;
  for (std::size_t i = 0; i < h.rows(); ++i) diag_scale = std::max(diag_scale, std::abs(h(i, i)));
  Matrix work = h;
  for (int attempt = 0; attempt < 6; ++attempt) {
    if (attempt > 0) {
      const double jitter = diag_scale * std::pow(10.0, -15 + 2 * attempt);
      for (std::size_t i = 0; i < h.rows(); ++i) work(i, i) = h(i, i) + jitter;
    }
    if (auto l = cholesky(work)) {
      Vec rhs(g.size());
      for (std::size_t i = 0; i < g.size(); ++i) rhs[i] = -g[i];
      dy = cholesky_solve(*l, std::move(rhs));
      return true;
    }
  }
  return false;
}

enum class CenterResult { Centered, NotCentered, Failed };

/// Minimizes merit(y, t) = t f0(y) + barrier(y) from a strictly feasible y.
///
/// Problem provides: size(), strictly_feasible(y), merit(y, t) and
/// derivatives(y, t, g, H) of the merit function.
template <class Problem>
CenterResult center(const Problem& p, Vec& y, double t, int max_newton, int& inner) {
  const std::size_t k = p.size();
  Vec g(k);
  Matrix h(k, k);
  Vec dy(k);
  double lam2 = std::numeric_limits<double>::infinity();
  for (int it = 0; it < max_newton; ++it) {
    p.derivatives(y, t, g, h);
    if (!newton_direction(h, g, dy)) return CenterResult::Failed;
    ++inner;
    lam2 = -dot(g, dy);
    if (!(lam2 >= 0.0)) return CenterResult::Failed;
    if (lam2 <= 1e-12) return CenterResult::Centered;

    // Inside the quadratic-convergence region a full step stays feasible
    // for self-concordant barriers; merit is too noisy to compare at large t.
    if (lam2 < 0.04) {
      Vec trial = axpy(y, 1.0, dy);
      if (p.strictly_feasible(trial)) {
        y = std::move(trial);
        continue;
      }
    }

    double s = 1.0;
    Vec trial = axpy(y, s, dy);
    int halvings = 0;
    while (!p.strictly_feasible(trial)) {
      s *= 0.5;
      if (++halvings > 80) return CenterResult::Failed;
      trial = axpy(y, s, dy);
    }
    const double phi0 = p.merit(y, t);
    while (p.merit(trial, t) > phi0 - 0.25 * s * lam2) {
      s *= 0.5;
      if (s < 1e-14) return lam2 < 1e-6 ? CenterResult::Centered : CenterResult::Failed;
      trial = axpy(y, s, dy);
    }
    y = std::move(trial);
  }
  return lam2 <= 1e-6 ? CenterResult::Centered : CenterResult::NotCentered;
}

/// Outer loop: t0, t0*growth, ... until done(y, t) returns true.
template <class Problem, class Done>
PathResult follow_central_path(const Problem& p, Vec y, double t0, const SolverOptions& opts, int max_outer,
                               Done&& done) {
  PathResult out;
  double t = t0;
  double growth = opts.barrier_growth;
  // Last centered point, restored when a long step in t cannot be centered.
  std::optional<std::pair<Vec, double>> anchor;
  int retries = 0;
  for (int outer = 0; outer < max_outer; ++outer) {
    const CenterResult c = center(p, y, t, opts.max_newton, out.inner);
    out.outer = outer + 1;
    if (c == CenterResult::Failed) {
      if (anchor && retries < 8) {
        ++retries;
        --outer;
        growth = std::sqrt(growth);
        y = anchor->first;
        t = anchor->second * growth;
        continue;
      }
      out.y = std::move(y);
      out.t = t;
      out.status = SolverStatus::NumericalFailure;
      out.message = "newton centering failed";
      return out;
    }
    out.history.push_back(p.objective(y));
    if (done(y, t)) {
      out.y = std::move(y);
      out.t = t;
      out.status = c == CenterResult::Centered ? SolverStatus::Converged : SolverStatus::IterationLimit;
      if (c != CenterResult::Centered) out.message = "final centering hit max_newton";
      return out;
    }
    if (c == CenterResult::Centered) anchor.emplace(y, t);
    t *= growth;
  }
  out.y = std::move(y);
  out.t = t / opts.barrier_growth;
  out.status = SolverStatus::IterationLimit;
  out.message = "barrier parameter schedule exhausted";
  return out;
}

/// Balls in local coordinates y = (x - shift) / scale.
struct LocalBalls {
  Point shift;
  double scale = 1.0;
  std::vector<Point> centers;
  std::vector<double> radii;

  LocalBalls(const Region& r, Point origin) : shift(std::move(origin)), scale(r.scale()) {
    centers.reserve(r.size());
    radii.reserve(r.size());
    for (const Ball& b : r.balls()) {
      centers.push_back((1.0 / scale) * (b.center - shift));
      radii.push_back(b.radius / scale);
    }
  }

  std::size_t dim() const noexcept { return shift.dim(); }
  std::size_t size() const noexcept { return centers.size(); }

  Point to_local(const Point& x) const { return (1.0 / scale) * (x - shift); }
  Point to_world(const Point& y) const { return shift + scale * y; }

  /// r_i^2 - |x - c_i|^2 with x the first dim() entries of y.
  double slack(std::size_t i, const Vec& y) const {
    const std::size_t n = dim();
    double d2 = 0.0;
    for (std::size_t l = 0; l < n; ++l) {
      const double d = y[l] - centers[i][l];
      d2 += d * d;
    }
    return (radii[i] - std::sqrt(d2)) * (radii[i] + std::sqrt(d2));
  }
};

/// f0(y) = c^T y.
struct LinearObjective {
  Vec coeffs;

  double value(const Vec& y) const { return dot(coeffs, y); }
  void add_derivatives(const Vec&, double t, Vec& g, Matrix&) const {
    for (std::size_t i = 0; i < coeffs.size(); ++i) g[i] += t * coeffs[i];
  }
};

/// f0(y) = |x - target|, smooth on any set excluding the target.
struct DistanceObjective {
  Vec target;

  double value(const Vec& y) const {
    double s = 0.0;
    for (std::size_t i = 0; i < target.size(); ++i) s += (y[i] - target[i]) * (y[i] - target[i]);
    return std::sqrt(s);
  }
  void add_derivatives(const Vec& y, double t, Vec& g, Matrix& h) const {
    const std::size_t n = target.size();
    const double r = value(y);
    if (r == 0.0) return;
    for (std::size_t i = 0; i < n; ++i) {
      const double ui = (y[i] - target[i]) / r;
      g[i] += t * ui;
      for (std::size_t j = 0; j < n; ++j) {
        const double uj = (y[j] - target[j]) / r;
        h(i, j) += t * ((i == j ? 1.0 : 0.0) - ui * uj) / r;
      }
    }
  }
};

/// minimize f0(y) s.t. slack_i(y) + [epigraph] s > 0, with the optional
/// epigraph variable s stored after the coordinates (phase I).
template <class Objective>
class BallBarrierProblem {
 public:
  BallBarrierProblem(const LocalBalls& balls, Objective obj, bool epigraph)
      : balls_(balls), obj_(std::move(obj)), epigraph_(epigraph) {}

  std::size_t size() const noexcept { return balls_.dim() + (epigraph_ ? 1 : 0); }
  double barrier_order() const noexcept { return static_cast<double>(balls_.size()); }
  double objective(const Vec& y) const { return obj_.value(y); }

  double slack(std::size_t i, const Vec& y) const {
    return balls_.slack(i, y) + (epigraph_ ? y[balls_.dim()] : 0.0);
  }

  bool strictly_feasible(const Vec& y) const {
    for (std::size_t i = 0; i < balls_.size(); ++i)
      if (!(slack(i, y) > 0.0)) return false;
    return true;
  }

  double merit(const Vec& y, double t) const {
    double phi = t * obj_.value(y);
    for (std::size_t i = 0; i < balls_.size(); ++i) {
      const double s = slack(i, y);
      if (!(s > 0.0)) return std::numeric_limits<double>::infinity();
      phi -= std::log(s);
    }
    return phi;
  }

  void derivatives(const Vec& y, double t, Vec& g, Matrix& h) const {
    const std::size_t n = balls_.dim();
    const std::size_t k = size();
    std::fill(g.begin(), g.end(), 0.0);
    for (std::size_t i = 0; i < k; ++i)
      for (std::size_t j = 0; j < k; ++j) h(i, j) = 0.0;
    obj_.add_derivatives(y, t, g, h);
    Vec ds(k);
    for (std::size_t i = 0; i < balls_.size(); ++i) {
      const double s = slack(i, y);
      for (std::size_t l = 0; l < n; ++l) ds[l] = -2.0 * (y[l] - balls_.centers[i][l]);
      if (epigraph_) ds[n] = 1.0;
      // -log s: grad -ds/s, Hessian ds ds^T / s^2 - Hess(s)/s with Hess(s) = -2 I on x.
      for (std::size_t a = 0; a < k; ++a) {
        g[a] -= ds[a] / s;
        for (std::size_t b = 0; b < k; ++b) h(a, b) += ds[a] * ds[b] / (s * s);
      }
      for (std::size_t l = 0; l < n; ++l) h(l, l) += 2.0 / s;
    }
  }

 private:
  const LocalBalls& balls_;
  Objective obj_;
  bool epigraph_;
};

}  // namespace nlosbound::detail

#pragma once

#include <cmath>
#include <cstddef>
#include <limits>
#include <optional>
#include <stdexcept>
#include <utility>
#include <vector>

#include "nlosbound/barrier.hpp"
#include "nlosbound/linalg.hpp"
#include "nlosbound/solver_types.hpp"

namespace nlosbound {

struct SdpResult {
  SymMat z;
  double value = 0.0;
  SolverOutcome outcome;
};

namespace detail {

/// maximize tr(B0 Z) s.t. tr(B_i Z) <= 0, Z psd, Z(m,m) = 1, as a
/// minimization over the packed lower triangle of Z minus the pinned corner.
class TinySdpProblem {
 public:
  TinySdpProblem(const SymMat& objective, const std::vector<SymMat>& constraints)
      : order_(objective.order()), free_(SymMat::packed_size(order_) - 1) {
    for (std::size_t i = 0; i < order_; ++i)
      for (std::size_t j = 0; j <= i; ++j) index_.push_back({i, j});
    objective_ = functional(objective);
    for (const SymMat& b : constraints) constraints_.push_back(functional(b));
  }

  std::size_t size() const noexcept { return free_; }
  double barrier_order() const noexcept { return static_cast<double>(order_ + constraints_.size()); }

  SymMat matrix(const Vec& y) const {
    SymMat z(order_);
    for (std::size_t p = 0; p < free_; ++p) z.packed()[p] = y[p];
    z.packed()[free_] = 1.0;
    return z;
  }

  Vec packed_free(const SymMat& z) const { return Vec(z.packed().begin(), z.packed().begin() + free_); }

  /// tr(B0 Z), the quantity being maximized.
  double trace_objective(const Vec& y) const { return eval(objective_, y); }
  double objective(const Vec& y) const { return -trace_objective(y); }
  double constraint(std::size_t i, const Vec& y) const { return eval(constraints_[i], y); }
  std::size_t num_constraints() const noexcept { return constraints_.size(); }

  bool strictly_feasible(const Vec& y) const {
    for (const auto& c : constraints_)
      if (!(eval(c, y) < 0.0)) return false;
    return cholesky(matrix(y)).has_value();
  }

  double merit(const Vec& y, double t) const {
    double phi = -t * eval(objective_, y);
    for (const auto& c : constraints_) {
      const double v = eval(c, y);
      if (!(v < 0.0)) return std::numeric_limits<double>::infinity();
      phi -= std::log(-v);
    }
    const auto l = cholesky(matrix(y));
    if (!l) return std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < order_; ++i) phi -= 2.0 * std::log((*l)(i, i));
    return phi;
  }

  void derivatives(const Vec& y, double t, Vec& g, Matrix& h) const {
    const auto l = cholesky(matrix(y));
    const SymMat w = cholesky_inverse(*l);
    for (std::size_t p = 0; p < free_; ++p) {
      g[p] = -t * objective_.coeffs[p];
      const auto [i, j] = index_[p];
      g[p] -= (i == j ? 1.0 : 2.0) * w(i, j);
      for (std::size_t q = 0; q < free_; ++q) h(p, q) = logdet_hessian(w, p, q);
    }
    for (const auto& c : constraints_) {
      const double v = eval(c, y);
      for (std::size_t p = 0; p < free_; ++p) {
        g[p] += c.coeffs[p] / (-v);
        for (std::size_t q = 0; q < free_; ++q) h(p, q) += c.coeffs[p] * c.coeffs[q] / (v * v);
      }
    }
  }

 private:
  struct Functional {
    Vec coeffs;  // d tr(B Z) / d z_p
    double constant = 0.0;
  };

  Functional functional(const SymMat& b) const {
    if (b.order() != order_) throw std::invalid_argument("solve_tiny_sdp: matrix orders differ");
    Functional f;
    f.coeffs.resize(free_);
    for (std::size_t p = 0; p < free_; ++p) {
      const auto [i, j] = index_[p];
      f.coeffs[p] = (i == j ? 1.0 : 2.0) * b(i, j);
    }
    f.constant = b(order_ - 1, order_ - 1);
    return f;
  }

  double eval(const Functional& f, const Vec& y) const { return dot(f.coeffs, y) + f.constant; }

  /// tr(W E_p W E_q) with E_p the symmetric unit matrix of packed entry p.
  double logdet_hessian(const SymMat& w, std::size_t p, std::size_t q) const {
    const auto [i, j] = index_[p];
    const auto [k, l] = index_[q];
    const std::pair<std::size_t, std::size_t> tp[2] = {{i, j}, {j, i}};
    const std::pair<std::size_t, std::size_t> tq[2] = {{k, l}, {l, k}};
    const int np = i == j ? 1 : 2;
    const int nq = k == l ? 1 : 2;
    double s = 0.0;
    for (int a = 0; a < np; ++a)
      for (int b = 0; b < nq; ++b) s += w(tq[b].second, tp[a].first) * w(tp[a].second, tq[b].first);
    return s;
  }

  std::size_t order_;
  std::size_t free_;
  std::vector<std::pair<std::size_t, std::size_t>> index_;
  Functional objective_;
  std::vector<Functional> constraints_;
};

}  // namespace detail

/// maximize tr(B0 Z) s.t. tr(B_i Z) <= 0, Z psd, Z(m,m) = 1.
///
/// Primal log-barrier: Newton on the free lower-triangular entries of Z with
/// t grown by barrier_growth until (m + #constraints)/t <= tol * max(1, |value|).
/// `start` must be strictly feasible; without it a small multiple of the
/// identity with unit corner is tried. The optimum lies in [value, value + gap].
inline SdpResult solve_tiny_sdp(const SymMat& objective, const std::vector<SymMat>& constraints,
                                const SolverOptions& opts = {}, std::optional<SymMat> start = std::nullopt) {
  opts.validate();
  const std::size_t m = objective.order();
  if (m < 2) throw std::invalid_argument("solve_tiny_sdp: order must be >= 2");
  if (m > kMaxSolverDim + 1) throw std::invalid_argument("solve_tiny_sdp: order above 4");
  if (constraints.size() > kMaxBalls) throw std::invalid_argument("solve_tiny_sdp: more than 64 constraints");

  const detail::TinySdpProblem problem(objective, constraints);
  SdpResult res;
  SolverOutcome& out = res.outcome;

  std::optional<detail::Vec> y0;
  if (start) {
    if (start->order() != m) throw std::invalid_argument("solve_tiny_sdp: start has wrong order");
    detail::Vec y = problem.packed_free(*start);
    if (problem.strictly_feasible(y)) y0 = std::move(y);
  } else {
    for (double sigma = 1e-2; sigma > 1e-12 && !y0; sigma *= 0.5) {
      SymMat z(m);
      for (std::size_t i = 0; i + 1 < m; ++i) z(i, i) = sigma;
      detail::Vec y = problem.packed_free(z);
      if (problem.strictly_feasible(y)) y0 = std::move(y);
    }
  }
  if (!y0) {
    out.status = SolverStatus::NeedsInflation;
    out.value = std::numeric_limits<double>::quiet_NaN();
    out.message = "no strictly feasible start";
    res.value = out.value;
    return res;
  }

  const double mu = problem.barrier_order();
  const double t0 = mu / std::max(1.0, std::abs(problem.trace_objective(*y0)));
  const auto done = [&](const detail::Vec& y, double t) {
    return mu / t <= opts.tol * std::max(1.0, std::abs(problem.trace_objective(y)));
  };
  detail::PathResult path = detail::follow_central_path(problem, std::move(*y0), t0, opts, opts.max_outer, done);

  res.z = problem.matrix(path.y);
  res.value = problem.trace_objective(path.y);
  out.value = res.value;
  out.gap = mu / path.t;
  out.outer_iterations = path.outer;
  out.inner_iterations = path.inner;
  out.message = path.message;
  for (double h : path.history) out.history.push_back(-h);

  double worst = 0.0;
  for (std::size_t i = 0; i < problem.num_constraints(); ++i) worst = std::max(worst, problem.constraint(i, path.y));
  out.residuals.primal = worst;
  out.residuals.psd = std::max(0.0, -min_eigenvalue(res.z));
  out.residuals.gap = out.gap / std::max(1.0, std::abs(res.value));
  out.status = path.status;
  const bool corner_exact = res.z(m - 1, m - 1) == 1.0;
  if (out.status == SolverStatus::Converged && (!out.residuals.within(opts.tol) || !corner_exact)) {
    out.status = SolverStatus::NumericalFailure;
    out.message = "post-condition check failed";
  }
  return res;
}

}  // namespace nlosbound

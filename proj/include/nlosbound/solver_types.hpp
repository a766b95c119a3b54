#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>
#include <vector>

namespace nlosbound {

/// Desk-scale limits shared by every solver.
inline constexpr std::size_t kMaxBalls = 64;
inline constexpr std::size_t kMaxSolverDim = 3;

struct SolverOptions {
  /// Relative duality-measure / first-order tolerance.
  double tol = 1e-8;
  int max_outer = 12;
  int max_newton = 100;
  double barrier_growth = 10.0;
  /// Iteration cap for the projected-gradient simplex QP.
  int max_first_order_iters = 200000;

  void validate() const {
    if (!(tol > 0.0)) throw std::invalid_argument("solver tol must be > 0");
    if (max_outer < 1 || max_newton < 1 || max_first_order_iters < 1)
      throw std::invalid_argument("solver iteration limits must be >= 1");
    if (!(barrier_growth > 1.0)) throw std::invalid_argument("barrier_growth must be > 1");
  }
};

enum class SolverStatus {
  Converged,
  IterationLimit,
  /// Solved on a region with every radius grown by delta; upper bounds stay valid.
  NeedsInflation,
  NumericalFailure,
  /// The ball intersection is empty.
  Infeasible,
};

inline const char* to_string(SolverStatus s) noexcept {
  switch (s) {
    case SolverStatus::Converged: return "converged";
    case SolverStatus::IterationLimit: return "iteration_limit";
    case SolverStatus::NeedsInflation: return "needs_inflation";
    case SolverStatus::NumericalFailure: return "numerical_failure";
    case SolverStatus::Infeasible: return "infeasible";
  }
  return "unknown";
}

/// Machine-checked post-conditions, all relative to the problem's own scale.
struct Residuals {
  double primal = 0.0;  // worst constraint violation
  double psd = 0.0;     // max(0, -min eigenvalue), SDP only
  double gap = 0.0;     // duality measure or first-order gap

  bool within(double tol) const noexcept { return primal <= tol && psd <= tol && gap <= tol; }
};

struct SolverOutcome {
  SolverStatus status = SolverStatus::NumericalFailure;
  double value = 0.0;
  /// Absolute bound on |optimum - value| in the objective's units.
  double gap = 0.0;
  bool inflated = false;
  int outer_iterations = 0;
  int inner_iterations = 0;
  Residuals residuals;
  /// Objective after each outer iteration.
  std::vector<double> history;
  std::string message;

  /// A usable answer: converged, possibly on the inflated region.
  bool ok() const noexcept { return status == SolverStatus::Converged || status == SolverStatus::NeedsInflation; }
};

}  // namespace nlosbound

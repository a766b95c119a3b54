#pragma once

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <exception>
#include <optional>
#include <stdexcept>
#include <string>
#include <thread>
#include <utility>
#include <vector>

#include "nlosbound/bounds.hpp"
#include "nlosbound/pocs.hpp"
#include "nlosbound/rng.hpp"
#include "nlosbound/scenario.hpp"

namespace nlosbound {

struct SimConfig {
  ScenarioConfig scenario;
  int trials = 1000;
  /// Random POCS initializations per trial for e_max.
  int pocs_inits = 200;
  std::uint64_t master_seed = 1;
  BoundSelection bounds;
  /// Also evaluate bound1 at the estimate attaining e_max.
  bool bound1_at_max = true;
  int pocs_max_iters = 500;
  SolverOptions solver;
  /// 0 picks std::thread::hardware_concurrency().
  int threads = 1;

  void validate() const {
    scenario.validate();
    if (trials < 1) throw std::invalid_argument("trials must be >= 1");
    if (pocs_inits < 1) throw std::invalid_argument("inits must be >= 1");
    if (pocs_max_iters < 1) throw std::invalid_argument("pocs_max_iters must be >= 1");
    if (threads < 0) throw std::invalid_argument("threads must be >= 0");
    solver.validate();
  }
};

struct TrialRecord {
  int trial = 0;
  int num_anchors = 0;
  int dim = 0;
  double e = kNaN;      // single-init POCS error, m
  double e_max = kNaN;  // max error over all inits, m
  double b1_upper = kNaN;
  double b1_lower = kNaN;
  double b1_upper_at_max = kNaN;  // bound1 at the estimate attaining e_max
  double b1_lower_at_max = kNaN;
  double b2 = kNaN;  // 2R
  double b3_socp = kNaN;
  double b3_lp = kNaN;
  double ell1 = kNaN;
  bool pocs_converged = true;
  bool inflated = false;
  bool region_empty = false;
  int solves = 0;
  int certificate_failures = 0;
  /// Nonnominal conditions, ';'-separated, or "ok".
  std::string status_flags = "ok";
  BoundTimings seconds;
  double seconds_bound1_at_max = 0.0;
};

/// (v - e) / e.
inline double normalized_error(double v, double e) { return (v - e) / e; }

/// A solve certifies when it finished and its residual checks pass.
inline bool certified(const SolverOutcome& o, double tol) { return o.ok() && o.residuals.within(tol); }

namespace detail {

inline Point pocs_init(std::uint64_t trial_seed, int k, const ScenarioConfig& sc) {
  SplitMix64 rng(derive_seed(derive_seed(trial_seed, Stream::kInits), static_cast<std::uint64_t>(k)));
  return uniform_point(rng, static_cast<std::size_t>(sc.dim), sc.cube_side);
}

inline void add_flag(std::string& flags, const char* f) {
  if (flags == "ok") flags.clear();
  if (!flags.empty()) flags += ';';
  flags += f;
}

}  // namespace detail

inline std::uint64_t trial_seed(std::uint64_t master_seed, int trial_index) {
  return derive_seed(master_seed, static_cast<std::uint64_t>(trial_index));
}

/// One seeded experiment: scenario, POCS from init 0 and inits 1..R, bounds.
/// Solver trouble is recorded in the record, never thrown.
inline TrialRecord run_trial(const SimConfig& cfg, int trial_index) {
  cfg.validate();
  const std::uint64_t seed = trial_seed(cfg.master_seed, trial_index);
  const Scenario sc = generate_scenario(cfg.scenario, seed);
  const Region region = sc.region();
  const Point& target = *sc.target;

  TrialRecord rec;
  rec.trial = trial_index;
  rec.num_anchors = cfg.scenario.num_anchors;
  rec.dim = cfg.scenario.dim;

  PocsOptions po;
  po.max_iters = cfg.pocs_max_iters;
  po.init = detail::pocs_init(seed, 0, cfg.scenario);
  const Estimate single = pocs_estimate(region, po);
  rec.e = distance(single.point, target);
  rec.pocs_converged = single.converged;

  Point worst = single.point;
  rec.e_max = rec.e;
  for (int k = 1; k <= cfg.pocs_inits; ++k) {
    po.init = detail::pocs_init(seed, k, cfg.scenario);
    const Estimate est = pocs_estimate(region, po);
    rec.pocs_converged = rec.pocs_converged && est.converged;
    const double err = distance(est.point, target);
    if (err > rec.e_max) {
      rec.e_max = err;
      worst = est.point;
    }
  }
  if (!rec.pocs_converged) detail::add_flag(rec.status_flags, "pocs_nc");

  const double tol = cfg.solver.tol;
  auto tally = [&](const SolverOutcome& o) {
    ++rec.solves;
    if (!certified(o, tol)) ++rec.certificate_failures;
  };

  try {
    const BoundReport rep = compute_bounds(region, single.point, cfg.solver, cfg.bounds);
    rec.seconds = rep.seconds;
    rec.region_empty = rep.region_empty();
    rec.inflated = rep.start.inflated;
    if (rep.bound1) {
      tally(rep.bound1->outcome);
      if (rep.bound1->outcome.ok()) {
        rec.b1_upper = rep.bound1->upper;
        rec.b1_lower = rep.bound1->lower;
      } else {
        detail::add_flag(rec.status_flags, "b1_fail");
      }
    }
    if (rep.bound2) {
      tally(rep.bound2->outcome);
      if (rep.bound2->outcome.ok()) rec.b2 = rep.bound2->diameter_bound;
      else detail::add_flag(rec.status_flags, "b2_fail");
    }
    if (rep.bound3_socp) {
      for (const SolverOutcome& o : rep.bound3_socp->outcomes) tally(o);
      if (rep.bound3_socp->ok()) rec.b3_socp = rep.bound3_socp->value;
      else detail::add_flag(rec.status_flags, "socp_fail");
    }
    if (rep.bound3_lp) rec.b3_lp = rep.bound3_lp->value;
    if (rep.ell1) {
      tally(rep.ell1->outcome);
      if (rep.ell1->outcome.ok()) rec.ell1 = rep.ell1->value;
      else detail::add_flag(rec.status_flags, "ell1_fail");
    }
    if (cfg.bounds.bound1 && cfg.bound1_at_max) {
      const Bound1Result at_max =
          detail::timed(rec.seconds_bound1_at_max, [&] { return bound1(worst, region, cfg.solver, rep.start); });
      tally(at_max.outcome);
      if (at_max.outcome.ok()) {
        rec.b1_upper_at_max = at_max.upper;
        rec.b1_lower_at_max = at_max.lower;
      } else {
        detail::add_flag(rec.status_flags, "b1max_fail");
      }
    }
  } catch (const std::exception&) {
    detail::add_flag(rec.status_flags, "error");
  }
  if (rec.inflated) detail::add_flag(rec.status_flags, "inflated");
  if (rec.region_empty) detail::add_flag(rec.status_flags, "empty");
  return rec;
}

/// Right-continuous empirical CDF: P(x_k) = (k+1)/T over sorted samples.
struct CdfSeries {
  std::vector<double> x;
  std::vector<double> p;

  /// Fraction of samples <= v.
  double operator()(double v) const {
    const auto it = std::upper_bound(x.begin(), x.end(), v);
    return static_cast<double>(it - x.begin()) / static_cast<double>(x.size());
  }

  /// Smallest sample x_k with P(x_k) >= q.
  double quantile(double q) const {
    if (!(q >= 0.0 && q <= 1.0)) throw std::invalid_argument("quantile level outside [0, 1]");
    const auto it = std::lower_bound(p.begin(), p.end(), q);
    return it == p.end() ? x.back() : x[static_cast<std::size_t>(it - p.begin())];
  }
};

inline CdfSeries empirical_cdf(std::vector<double> values) {
  if (values.empty()) throw std::invalid_argument("empirical_cdf: no values");
  for (double v : values)
    if (!std::isfinite(v)) throw std::invalid_argument("empirical_cdf: non-finite value");
  std::sort(values.begin(), values.end());
  CdfSeries s;
  s.p.resize(values.size());
  for (std::size_t k = 0; k < values.size(); ++k)
    s.p[k] = static_cast<double>(k + 1) / static_cast<double>(values.size());
  s.x = std::move(values);
  return s;
}

/// Which bound and which reference error a statistic compares.
enum class BoundKind { kBound1, kBound1AtMax, kBound2, kBound3Socp, kBound3Lp };

inline constexpr BoundKind kAllBoundKinds[] = {BoundKind::kBound1, BoundKind::kBound1AtMax, BoundKind::kBound2,
                                               BoundKind::kBound3Socp, BoundKind::kBound3Lp};

inline const char* to_string(BoundKind k) noexcept {
  switch (k) {
    case BoundKind::kBound1: return "bound1";
    case BoundKind::kBound1AtMax: return "bound1_emax";
    case BoundKind::kBound2: return "bound2";
    case BoundKind::kBound3Socp: return "bound3_socp";
    case BoundKind::kBound3Lp: return "bound3_lp";
  }
  return "?";
}

/// Bound value and the error it must dominate.
inline std::pair<double, double> bound_and_error(const TrialRecord& r, BoundKind k) {
  switch (k) {
    case BoundKind::kBound1: return {r.b1_upper, r.e};
    case BoundKind::kBound1AtMax: return {r.b1_upper_at_max, r.e_max};
    case BoundKind::kBound2: return {r.b2, r.e};
    case BoundKind::kBound3Socp: return {r.b3_socp, r.e};
    case BoundKind::kBound3Lp: return {r.b3_lp, r.e};
  }
  return {kNaN, kNaN};
}

/// Normalized errors of one bound over the trials where it was computed.
inline std::vector<double> normalized_errors(const std::vector<TrialRecord>& recs, BoundKind k) {
  std::vector<double> out;
  for (const TrialRecord& r : recs) {
    const auto [v, e] = bound_and_error(r, k);
    if (std::isfinite(v) && e > 0.0) out.push_back(normalized_error(v, e));
  }
  return out;
}

struct BoundSummary {
  BoundKind kind = BoundKind::kBound1;
  int computed = 0;
  /// Trials with e > v (1 + 1e-6).
  int violations = 0;
  double q10 = kNaN;
  double median = kNaN;
  double q90 = kNaN;
  double frac_le_1_5 = kNaN;
  double frac_le_2_3 = kNaN;
  double mean_seconds = kNaN;
};

struct BatchSummary {
  int trials = 0;
  std::vector<BoundSummary> bounds;
  int solves = 0;
  int certificate_failures = 0;
  int inflated = 0;
  int pocs_not_converged = 0;
  int flagged = 0;
  double mean_seconds_ell1 = kNaN;

  const BoundSummary* find(BoundKind k) const {
    for (const BoundSummary& b : bounds)
      if (b.kind == k) return &b;
    return nullptr;
  }
};

struct BatchResult {
  std::vector<TrialRecord> records;  // ordered by trial index
  BatchSummary summary;
};

inline double mean_seconds(const std::vector<TrialRecord>& recs, BoundKind k) {
  double s = 0.0;
  int n = 0;
  for (const TrialRecord& r : recs) {
    if (!std::isfinite(bound_and_error(r, k).first)) continue;
    switch (k) {
      case BoundKind::kBound1: s += r.seconds.bound1; break;
      case BoundKind::kBound1AtMax: s += r.seconds_bound1_at_max; break;
      case BoundKind::kBound2: s += r.seconds.bound2; break;
      case BoundKind::kBound3Socp: s += r.seconds.bound3_socp; break;
      case BoundKind::kBound3Lp: s += r.seconds.bound3_lp; break;
    }
    ++n;
  }
  return n ? s / n : kNaN;
}

inline BatchSummary summarize(const std::vector<TrialRecord>& recs) {
  BatchSummary sum;
  sum.trials = static_cast<int>(recs.size());
  for (const TrialRecord& r : recs) {
    sum.solves += r.solves;
    sum.certificate_failures += r.certificate_failures;
    sum.inflated += r.inflated ? 1 : 0;
    sum.pocs_not_converged += r.pocs_converged ? 0 : 1;
    sum.flagged += r.status_flags == "ok" ? 0 : 1;
  }
  for (BoundKind k : kAllBoundKinds) {
    BoundSummary b;
    b.kind = k;
    for (const TrialRecord& r : recs) {
      const auto [v, e] = bound_and_error(r, k);
      if (!std::isfinite(v)) continue;
      ++b.computed;
      if (e > v * (1.0 + 1e-6)) ++b.violations;
    }
    const std::vector<double> ne = normalized_errors(recs, k);
    if (!ne.empty()) {
      const CdfSeries cdf = empirical_cdf(ne);
      b.q10 = cdf.quantile(0.1);
      b.median = cdf.quantile(0.5);
      b.q90 = cdf.quantile(0.9);
      b.frac_le_1_5 = cdf(1.5);
      b.frac_le_2_3 = cdf(2.3);
    }
    b.mean_seconds = mean_seconds(recs, k);
    if (b.computed > 0) sum.bounds.push_back(b);
  }
  double s = 0.0;
  int n = 0;
  for (const TrialRecord& r : recs)
    if (std::isfinite(r.ell1)) {
      s += r.seconds.ell1;
      ++n;
    }
  if (n) sum.mean_seconds_ell1 = s / n;
  return sum;
}

/// T independent trials. Each trial depends only on (cfg, index), so the
/// records are identical for any thread count.
inline BatchResult run_batch(const SimConfig& cfg) {
  cfg.validate();
  BatchResult out;
  out.records.resize(static_cast<std::size_t>(cfg.trials));
  unsigned workers = cfg.threads > 0 ? static_cast<unsigned>(cfg.threads) : std::thread::hardware_concurrency();
  workers = std::clamp(workers, 1u, static_cast<unsigned>(cfg.trials));

  std::atomic<int> next{0};
  std::exception_ptr failure;
  std::atomic<bool> failed{false};
  auto work = [&] {
    try {
      for (int i = next++; i < cfg.trials && !failed; i = next++)
        out.records[static_cast<std::size_t>(i)] = run_trial(cfg, i);
    } catch (...) {
      if (!failed.exchange(true)) failure = std::current_exception();
    }
  };
  if (workers == 1) {
    work();
  } else {
    std::vector<std::thread> pool;
    for (unsigned w = 0; w < workers; ++w) pool.emplace_back(work);
    for (std::thread& t : pool) t.join();
  }
  if (failure) std::rethrow_exception(failure);
  out.summary = summarize(out.records);
  return out;
}

}  // namespace nlosbound

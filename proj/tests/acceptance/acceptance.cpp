// Acceptance suite: one PASS/FAIL line per criterion, nonzero exit on any failure.
//
//   acceptance [--seed S] [--inits R]
//
// --inits lowers the POCS initializations per network for the worst-case
// campaign (default 200; 50 is the documented quick setting).

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <cstring>
#include <functional>
#include <numbers>
#include <sstream>
#include <string>
#include <vector>

#include "nlosbound/nlosbound.hpp"

using namespace nlosbound;

namespace {

struct Criterion {
  int id;
  const char* name;
  bool pass = false;
  std::string detail;
  double seconds = 0.0;
};

char buf[512];

template <class... A>
std::string fmt(const char* f, A... a) {
  std::snprintf(buf, sizeof buf, f, a...);
  return buf;
}

/// Solve counters shared by every suite (criterion 8).
struct Certificates {
  long solves = 0;
  long failures = 0;
  double tol = 1e-8;

  void add(const SolverOutcome& o) {
    ++solves;
    if (!certified(o, tol)) ++failures;
  }
  void add(const BatchSummary& s) {
    solves += s.solves;
    failures += s.certificate_failures;
  }
};

std::string batch_csv(const BatchResult& b) {
  std::ostringstream os;
  write_trials_csv(os, b.records);
  write_trials_emax_csv(os, b.records);
  for (BoundKind k : kAllBoundKinds) {
    const auto ne = normalized_errors(b.records, k);
    if (!ne.empty()) write_cdf_csv(os, empirical_cdf(ne));
  }
  return os.str();
}

SimConfig campaign(int anchors, int inits, std::uint64_t seed) {
  SimConfig cfg;
  cfg.scenario.dim = 3;
  cfg.scenario.num_anchors = anchors;
  cfg.scenario.cube_side = 10.0;
  cfg.scenario.noise = ExponentialNoise{1.0};
  cfg.trials = 1000;
  cfg.pocs_inits = inits;
  cfg.master_seed = seed;
  return cfg;
}

double region_scale(const SimConfig& cfg, int trial) {
  return generate_scenario(cfg.scenario, trial_seed(cfg.master_seed, trial)).region().scale();
}

/// Uniform feasible point by rejection; POCS from the box center if B is too thin.
Point feasible_point(const Region& r, SplitMix64& rng) {
  const Box box = relaxed_bounding_box(r);
  Point x(r.dim());
  for (int t = 0; t < 100000; ++t) {
    for (std::size_t l = 0; l < r.dim(); ++l) x[l] = rng.uniform(box.lo[l], box.hi[l]);
    if (residual(r, x) == 0.0) return x;
  }
  PocsOptions po;
  po.init = box.center();
  return pocs_estimate(r, po).point;
}

/// Radius of the smallest disc containing the lens of two overlapping discs.
double lens_circumradius(const Ball& p, const Ball& q) {
  const double d = distance(p.center, q.center);
  const double s1 = (d * d + p.radius * p.radius - q.radius * q.radius) / (2.0 * d);
  const double s2 = d - s1;
  if (s1 < 0.0) return p.radius;
  if (s2 < 0.0) return q.radius;
  return std::sqrt(std::max(0.0, p.radius * p.radius - s1 * s1));
}

}  // namespace

int main(int argc, char** argv) {
  std::uint64_t seed = 1;
  int inits = 200;
  for (int i = 1; i < argc; ++i) {
    if (!std::strcmp(argv[i], "--seed") && i + 1 < argc) {
      seed = std::strtoull(argv[++i], nullptr, 10);
    } else if (!std::strcmp(argv[i], "--inits") && i + 1 < argc) {
      inits = std::atoi(argv[++i]);
    } else {
      std::fprintf(stderr, "usage: acceptance [--seed S] [--inits R]\n");
      return 2;
    }
  }
  if (inits < 1) {
    std::fprintf(stderr, "--inits must be >= 1\n");
    return 2;
  }

  Certificates cert;
  std::vector<Criterion> results;
  auto run = [&](int id, const char* name, const std::function<void(Criterion&)>& body) {
    Criterion c;
    c.id = id;
    c.name = name;
    const auto t0 = std::chrono::steady_clock::now();
    body(c);
    c.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    std::printf("%s [%d] %s: %s (%.1f s)\n", c.pass ? "PASS" : "FAIL", c.id, c.name, c.detail.c_str(), c.seconds);
    std::fflush(stdout);
    results.push_back(c);
  };

  // Criteria 1, 2 and 9 share this campaign.
  const SimConfig soundness_cfg = [&] {
    SimConfig c = campaign(10, 1, seed);
    c.bound1_at_max = false;
    return c;
  }();
  BatchResult soundness;

  run(1, "soundness, N=10 n=3 T=1000", [&](Criterion& c) {
    soundness = run_batch(soundness_cfg);
    cert.add(soundness.summary);
    int violations = 0;
    int missing = 0;
    for (const TrialRecord& r : soundness.records)
      for (double v : {r.b1_upper, r.b2, r.b3_socp, r.b3_lp}) {
        if (!std::isfinite(v)) ++missing;
        else if (r.e > v + 1e-6 * v) ++violations;
      }
    c.pass = violations == 0 && missing == 0;
    c.detail = fmt("%d violations, %d bounds missing over %zu trials", violations, missing, soundness.records.size());
  });
  const double soundness_seconds = results.back().seconds;

  run(2, "ordering v_socp <= v_lp and bound1 lower <= upper", [&](Criterion& c) {
    int bad_box = 0;
    int bad_b1 = 0;
    for (const TrialRecord& r : soundness.records) {
      if (!(r.b3_socp <= r.b3_lp + 1e-9 * region_scale(soundness_cfg, r.trial))) ++bad_box;
      if (!(r.b1_lower <= r.b1_upper)) ++bad_b1;
    }
    c.pass = bad_box == 0 && bad_b1 == 0;
    c.detail = fmt("socp>lp in %d, lower>upper in %d of %zu", bad_box, bad_b1, soundness.records.size());
  });

  run(3, "2D oracle sandwich", [&](Criterion& c) {
    SplitMix64 rng(derive_seed(seed, Stream::kOracle));
    int outside = 0;
    double worst = 0.0;
    ScenarioConfig sc;
    sc.dim = 2;
    for (int t = 0; t < 200; ++t) {
      sc.num_anchors = 2 + t % 5;
      const Region r = generate_scenario(sc, derive_seed(seed, 1000 + static_cast<std::uint64_t>(t))).region();
      const Point est = feasible_point(r, rng);
      const Bound1Result b = bound1(est, r);
      cert.add(b.outcome);
      const double exact = oracle_vmax1_2d(est, r);
      if (!(b.lower - 1e-5 <= exact && exact <= b.upper + 1e-5)) ++outside;
      worst = std::max({worst, exact - b.upper, b.lower - exact});
    }
    int loose = 0;
    double worst_single = 0.0;
    for (int t = 0; t < 200; ++t) {
      const Ball ball{Point{rng.uniform(0, 10), rng.uniform(0, 10)}, rng.uniform(0.1, 5.0)};
      const Region r{ball};
      const Point est{rng.uniform(-5, 15), rng.uniform(-5, 15)};
      const Bound1Result b = bound1(est, r);
      cert.add(b.outcome);
      const double gap = std::abs(b.upper - oracle_vmax1_2d(est, r));
      worst_single = std::max(worst_single, gap);
      if (gap > 1e-6) ++loose;
    }
    c.pass = outside == 0 && loose == 0;
    c.detail = fmt("%d/200 outside [lower-1e-5, upper+1e-5] (worst excess %.2e); N=1: %d/200 off by >1e-6 (worst %.2e)",
                   outside, worst, loose, worst_single);
  });

  run(4, "bound2 exactness on two-disc lenses", [&](Criterion& c) {
    SplitMix64 rng(derive_seed(seed, 4004));
    int radius_off = 0;
    int jung_off = 0;
    double worst_radius = 0.0;
    double worst_ratio = 0.0;
    double min_ratio = 1e300;
    OracleOptions oo;
    oo.mc_samples = 100000;
    for (int t = 0; t < 100; ++t) {
      const Point a{rng.uniform(0, 10), rng.uniform(0, 10)};
      const double d = rng.uniform(0.5, 6.0);
      const double ang = rng.uniform(0.0, 2.0 * std::numbers::pi);
      const Point b = a + Point{d * std::cos(ang), d * std::sin(ang)};
      const double r1 = rng.uniform(0.5, 4.0);
      const double r2 = rng.uniform(std::max(d - r1, 0.0) + 0.2, d + r1 + 1.0);
      const Ball p{a, r1};
      const Ball q{b, r2};
      const Region r{p, q};
      const Bound2Result b2 = bound2(r);
      cert.add(b2.outcome);
      const double err = std::abs(b2.radius - lens_circumradius(p, q));
      worst_radius = std::max(worst_radius, err);
      if (err > 1e-6) ++radius_off;
      oo.seed = derive_seed(seed, 5000 + static_cast<std::uint64_t>(t));
      const double mc = oracle_max_mc(r, Diameter{}, oo);
      const double two_r = b2.diameter_bound;
      if (!(mc <= two_r && two_r <= 2.0 / std::sqrt(3.0) * mc * 1.02)) ++jung_off;
      worst_ratio = std::max(worst_ratio, two_r / mc);
      min_ratio = std::min(min_ratio, two_r / mc);
    }
    c.pass = radius_off == 0 && jung_off == 0;
    c.detail = fmt("radius off by >1e-6 in %d/100 (worst %.2e); MC sandwich broken in %d/100 (2R/MC in [%.4f, %.4f])",
                   radius_off, worst_radius, jung_off, min_ratio, worst_ratio);
  });

  // Criteria 5, 6, 7 share one campaign per N.
  std::vector<BatchResult> per_n;
  const int sizes[] = {5, 10, 15, 20};
  double fig_seconds = 0.0;
  {
    const auto t0 = std::chrono::steady_clock::now();
    for (int n : sizes) {
      per_n.push_back(run_batch(campaign(n, inits, seed)));
      cert.add(per_n.back().summary);
    }
    fig_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    std::printf("     campaigns N=5,10,15,20 with T=1000, R=%d ran in %.1f s\n", inits, fig_seconds);
  }

  run(5, "bound1 within 2.3x of e, N=5", [&](Criterion& c) {
    const double f = per_n[0].summary.find(BoundKind::kBound1)->frac_le_2_3;
    c.pass = f >= 0.70 && f <= 0.90;
    c.detail = fmt("fraction %.3f, required [0.70, 0.90]", f);
  });

  run(6, "bound1 within 1.5x of e_max", [&](Criterion& c) {
    c.pass = true;
    std::string d;
    for (std::size_t i = 0; i < per_n.size(); ++i) {
      const double f = per_n[i].summary.find(BoundKind::kBound1AtMax)->frac_le_1_5;
      c.pass = c.pass && f >= 0.85;
      d += fmt("N=%d %.3f  ", sizes[i], f);
    }
    c.detail = d + fmt("(required >= 0.85, R=%d)", inits);
  });

  run(7, "median orderings bound1 < bound2, socp < lp", [&](Criterion& c) {
    c.pass = true;
    std::string d;
    for (std::size_t i = 0; i < per_n.size(); ++i) {
      const BatchSummary& s = per_n[i].summary;
      const double m1 = s.find(BoundKind::kBound1)->median;
      const double m2 = s.find(BoundKind::kBound2)->median;
      const double ms = s.find(BoundKind::kBound3Socp)->median;
      const double ml = s.find(BoundKind::kBound3Lp)->median;
      c.pass = c.pass && m1 < m2 && ms < ml;
      d += fmt("N=%d: %.3f<%.3f %.3f<%.3f  ", sizes[i], m1, m2, ms, ml);
    }
    c.detail = d;
  });

  run(8, "solver certificates", [&](Criterion& c) {
    c.pass = cert.failures == 0 && cert.solves > 0;
    c.detail = fmt("%ld failures over %ld solves (tol %.0e)", cert.failures, cert.solves, cert.tol);
  });

  run(9, "determinism", [&](Criterion& c) {
    SimConfig again = soundness_cfg;
    again.threads = 4;
    const bool same_soundness = batch_csv(run_batch(again)) == batch_csv(soundness);
    SimConfig fig = campaign(5, inits, seed);
    fig.trials = 200;
    const std::string first = batch_csv(run_batch(fig));
    fig.threads = 3;
    const bool same_fig = batch_csv(run_batch(fig)) == first;
    c.pass = same_soundness && same_fig;
    c.detail = fmt("soundness CSVs %s, N=5 campaign CSVs %s across reruns and thread counts",
                   same_soundness ? "identical" : "DIFFER", same_fig ? "identical" : "DIFFER");
  });

  int failed = 0;
  for (const Criterion& c : results) failed += c.pass ? 0 : 1;
  std::printf("soundness campaign runtime %.1f s (target < 300 s)\n", soundness_seconds);
  std::printf("%d/%zu criteria passed\n", static_cast<int>(results.size()) - failed, results.size());
  return failed == 0 ? 0 : 1;
}

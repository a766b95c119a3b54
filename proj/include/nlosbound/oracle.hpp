#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numbers>
#include <stdexcept>
#include <variant>
#include <vector>

#include "nlosbound/bounds.hpp"
#include "nlosbound/geometry.hpp"
#include "nlosbound/rng.hpp"

namespace nlosbound {

class DegenerateRegion : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct OracleOptions {
  int mc_samples = 100000;
  /// Boundary points per circle for discretized references.
  int arc_points = 720;
  std::uint64_t seed = 1;
};

struct Oracle2dResult {
  double value = 0.0;
  std::vector<Point> candidates;  // feasible points examined
  /// No boundary candidate survived; the value comes from the single point of B.
  bool degenerate = false;
};

/// Points where the boundaries of balls i and j cross (tangency counted once).
inline std::vector<Point> circle_intersections(const Ball& p, const Ball& q, double scale) {
  const double dx = q.center[0] - p.center[0];
  const double dy = q.center[1] - p.center[1];
  const double d = std::hypot(dx, dy);
  if (d == 0.0) return {};
  const double along = (p.radius * p.radius - q.radius * q.radius + d * d) / (2.0 * d);
  double h2 = p.radius * p.radius - along * along;
  if (h2 < -1e-12 * scale * scale) return {};
  h2 = std::max(h2, 0.0);
  const double h = std::sqrt(h2);
  const double ux = dx / d;
  const double uy = dy / d;
  const double mx = p.center[0] + along * ux;
  const double my = p.center[1] + along * uy;
  if (h == 0.0) return {Point{mx, my}};
  return {Point{mx - h * uy, my + h * ux}, Point{mx + h * uy, my - h * ux}};
}

/// Exact max_{x in B} |estimate - x| in the plane, by enumerating every point
/// where the maximum can occur: pairwise boundary crossings (arc endpoints)
/// and, per circle, the point diametrically away from the estimate.
inline Oracle2dResult oracle_vmax1_2d_detail(const Point& estimate, const Region& r) {
  if (r.dim() != 2) throw DimensionError("oracle_vmax1_2d needs a planar region");
  r.check_dim(estimate);
  const double scale = r.scale();
  const double member_tol = 1e-9 * scale;
  Oracle2dResult res;
  auto consider = [&](Point p) {
    if (residual(r, p) <= member_tol) res.candidates.push_back(std::move(p));
  };
  for (std::size_t i = 0; i < r.size(); ++i)
    for (std::size_t j = i + 1; j < r.size(); ++j)
      for (Point& p : circle_intersections(r[i], r[j], scale)) consider(std::move(p));
  for (const Ball& b : r.balls()) {
    const double d = distance(b.center, estimate);
    if (d > 0.0) {
      consider(b.center + (b.radius / d) * (b.center - estimate));
    } else {
      // Every point of this circle is at distance radius.
      consider(b.center + Point{b.radius, 0.0});
    }
  }
  if (!res.candidates.empty()) {
    for (const Point& p : res.candidates) res.value = std::max(res.value, distance(p, estimate));
    return res;
  }
  const Bound2Result enclosing = bound2(r);
  if (!enclosing.empty_region && enclosing.radius <= 1e-6 * scale) {
    res.degenerate = true;
    res.value = distance(enclosing.center, estimate);
    return res;
  }
  throw DegenerateRegion("oracle_vmax1_2d: no feasible boundary candidate");
}

inline double oracle_vmax1_2d(const Point& estimate, const Region& r) {
  return oracle_vmax1_2d_detail(estimate, r).value;
}

struct MaxDistanceFrom {
  Point from;
};
struct Diameter {};
using McMode = std::variant<MaxDistanceFrom, Diameter>;

namespace detail {

/// 64 spread unit directions in R^n.
inline std::vector<Point> spread_directions(std::size_t n) {
  constexpr int kCount = 64;
  std::vector<Point> dirs;
  if (n == 1) return {Point{1.0}};
  if (n == 2) {
    // Half circle: each direction's min already covers its opposite.
    for (int k = 0; k < kCount; ++k) {
      const double a = std::numbers::pi * k / kCount;
      dirs.push_back(Point{std::cos(a), std::sin(a)});
    }
    return dirs;
  }
  if (n == 3) {
    // Fibonacci lattice on the sphere.
    const double golden = std::numbers::pi * (3.0 - std::sqrt(5.0));
    for (int k = 0; k < kCount; ++k) {
      const double z = 1.0 - (2.0 * k + 1.0) / kCount;
      const double rad = std::sqrt(1.0 - z * z);
      dirs.push_back(Point{rad * std::cos(golden * k), rad * std::sin(golden * k), z});
    }
    return dirs;
  }
  SplitMix64 rng(0x5eed);
  for (int k = 0; k < kCount; ++k) {
    Point d(n);
    for (std::size_t i = 0; i < n; ++i) d[i] = rng.uniform(-1.0, 1.0);
    dirs.push_back((1.0 / norm(d)) * d);
  }
  return dirs;
}

}  // namespace detail

/// Monte-Carlo lower estimate of max |from - x| or of the diameter of B.
///
/// Samples uniformly in the l-infinity hull box until mc_samples points land
/// in B or 10 * mc_samples draws are spent. The diameter mode keeps the
/// extreme sample along +-64 directions and the running maximum of pairwise
/// distances among them, so the value never decreases as samples are added.
inline double oracle_max_mc(const Region& r, const McMode& mode, const OracleOptions& opts) {
  if (opts.mc_samples < 1) throw std::invalid_argument("mc_samples must be >= 1");
  const Box box = relaxed_bounding_box(r);
  if (box.empty()) throw DegenerateRegion("oracle_max_mc: empty bounding box");
  const std::size_t n = r.dim();
  const auto* from = std::get_if<MaxDistanceFrom>(&mode);
  if (from) r.check_dim(from->from);

  SplitMix64 rng(opts.seed);
  const std::vector<Point> dirs = detail::spread_directions(n);
  std::vector<Point> extremes;      // 2 per direction: max then min
  std::vector<double> proj;
  double best = 0.0;
  long long accepted = 0;
  long long attempts = 0;
  const long long max_attempts = 10LL * opts.mc_samples;

  Point x(n);
  while (accepted < opts.mc_samples && attempts < max_attempts) {
    ++attempts;
    for (std::size_t l = 0; l < n; ++l) x[l] = rng.uniform(box.lo[l], box.hi[l]);
    if (residual(r, x) != 0.0) continue;
    ++accepted;
    if (from) {
      best = std::max(best, distance(x, from->from));
      continue;
    }
    if (extremes.empty()) {
      extremes.assign(2 * dirs.size(), x);
      for (const Point& d : dirs) {
        const double v = dot(d, x);
        proj.push_back(v);
        proj.push_back(v);
      }
      continue;
    }
    for (const Point& e : extremes) best = std::max(best, distance(e, x));
    for (std::size_t k = 0; k < dirs.size(); ++k) {
      const double v = dot(dirs[k], x);
      if (v > proj[2 * k]) {
        proj[2 * k] = v;
        extremes[2 * k] = x;
      }
      if (v < proj[2 * k + 1]) {
        proj[2 * k + 1] = v;
        extremes[2 * k + 1] = x;
      }
    }
  }
  if (accepted == 0 || static_cast<double>(accepted) < 1e-4 * static_cast<double>(attempts))
    throw DegenerateRegion("oracle_max_mc: acceptance rate below 1e-4");
  return best;
}

}  // namespace nlosbound

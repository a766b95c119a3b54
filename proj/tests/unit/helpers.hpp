#pragma once

#include <cstdint>
#include <vector>

#include "nlosbound/geometry.hpp"
#include "nlosbound/rng.hpp"

namespace testutil {

using nlosbound::Ball;
using nlosbound::Point;
using nlosbound::Region;
using nlosbound::SplitMix64;

inline Point random_point(SplitMix64& rng, std::size_t dim, double lo, double hi) {
  Point p(dim);
  for (std::size_t i = 0; i < dim; ++i) p[i] = rng.uniform(lo, hi);
  return p;
}

/// Balls around a hidden point inside [0, side]^dim, radii = distance + slack.
/// The hidden point is always in the intersection.
inline Region random_feasible_region(SplitMix64& rng, std::size_t dim, std::size_t count, double side = 10.0,
                                     double max_slack = 2.0, Point* hidden = nullptr) {
  const Point x = random_point(rng, dim, 0.0, side);
  std::vector<Ball> balls;
  for (std::size_t i = 0; i < count; ++i) {
    const Point a = random_point(rng, dim, 0.0, side);
    balls.emplace_back(a, nlosbound::distance(a, x) + rng.uniform(0.05, max_slack));
  }
  if (hidden) *hidden = x;
  return Region(std::move(balls));
}

/// Uniform sample of the region by rejection from its bounding box.
inline std::vector<Point> sample_region(const Region& r, SplitMix64& rng, std::size_t count, std::size_t max_tries = 2000000) {
  const nlosbound::Box box = nlosbound::relaxed_bounding_box(r);
  std::vector<Point> out;
  Point x(r.dim());
  for (std::size_t t = 0; t < max_tries && out.size() < count; ++t) {
    for (std::size_t l = 0; l < r.dim(); ++l) x[l] = rng.uniform(box.lo[l], box.hi[l]);
    if (nlosbound::residual(r, x) == 0.0) out.push_back(x);
  }
  return out;
}

}  // namespace testutil

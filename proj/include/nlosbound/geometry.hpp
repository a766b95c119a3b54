#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <initializer_list>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace nlosbound {

class DimensionError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// A point in R^n, coordinates in meters.
class Point {
 public:
  Point() = default;
  explicit Point(std::size_t dim, double fill = 0.0) : coords_(dim, fill) {}
  Point(std::initializer_list<double> coords) : coords_(coords) {}
  explicit Point(std::vector<double> coords) : coords_(std::move(coords)) {}

  std::size_t dim() const noexcept { return coords_.size(); }
  double operator[](std::size_t i) const { return coords_[i]; }
  double& operator[](std::size_t i) { return coords_[i]; }

  std::span<const double> coords() const noexcept { return coords_; }
  const std::vector<double>& values() const noexcept { return coords_; }

  auto begin() const noexcept { return coords_.begin(); }
  auto end() const noexcept { return coords_.end(); }
  auto begin() noexcept { return coords_.begin(); }
  auto end() noexcept { return coords_.end(); }

  bool is_finite() const noexcept {
    return std::all_of(coords_.begin(), coords_.end(), [](double v) { return std::isfinite(v); });
  }

  Point& operator+=(const Point& o) {
    check_same(o);
    for (std::size_t i = 0; i < dim(); ++i) coords_[i] += o.coords_[i];
    return *this;
  }
  Point& operator-=(const Point& o) {
    check_same(o);
    for (std::size_t i = 0; i < dim(); ++i) coords_[i] -= o.coords_[i];
    return *this;
  }
  Point& operator*=(double s) noexcept {
    for (double& v : coords_) v *= s;
    return *this;
  }

  friend bool operator==(const Point&, const Point&) = default;

 private:
  void check_same(const Point& o) const {
    if (o.dim() != dim()) throw DimensionError("point dimension mismatch");
  }
  std::vector<double> coords_;
};

inline Point operator+(Point a, const Point& b) { return a += b; }
inline Point operator-(Point a, const Point& b) { return a -= b; }
inline Point operator*(double s, Point a) { return a *= s; }
inline Point operator*(Point a, double s) { return a *= s; }

inline double dot(const Point& a, const Point& b) {
  if (a.dim() != b.dim()) throw DimensionError("point dimension mismatch");
  double s = 0.0;
  for (std::size_t i = 0; i < a.dim(); ++i) s += a[i] * b[i];
  return s;
}

inline double squared_norm(const Point& a) noexcept {
  double s = 0.0;
  for (double v : a) s += v * v;
  return s;
}

inline double norm(const Point& a) noexcept { return std::sqrt(squared_norm(a)); }

inline double squared_distance(const Point& a, const Point& b) {
  if (a.dim() != b.dim()) throw DimensionError("point dimension mismatch");
  double s = 0.0;
  for (std::size_t i = 0; i < a.dim(); ++i) {
    const double d = a[i] - b[i];
    s += d * d;
  }
  return s;
}

inline double distance(const Point& a, const Point& b) { return std::sqrt(squared_distance(a, b)); }

inline Point unit_vector(std::size_t dim, std::size_t axis, double sign = 1.0) {
  Point e(dim);
  e[axis] = sign;
  return e;
}

/// Closed ball {x : |x - center| <= radius}. Anchor position and measured range.
struct Ball {
  Point center;
  double radius = 0.0;

  Ball() = default;
  Ball(Point c, double r) : center(std::move(c)), radius(r) {
    if (!(radius >= 0.0) || !std::isfinite(radius)) throw std::invalid_argument("ball radius must be finite and >= 0");
    if (!center.is_finite()) throw std::invalid_argument("ball center must be finite");
  }

  std::size_t dim() const noexcept { return center.dim(); }
  bool contains(const Point& x, double slack = 0.0) const { return distance(x, center) <= radius + slack; }

  friend bool operator==(const Ball&, const Ball&) = default;
};

/// Ordered list of balls; the feasible set is their intersection.
class Region {
 public:
  explicit Region(std::vector<Ball> balls) : balls_(std::move(balls)) {
    if (balls_.empty()) throw std::invalid_argument("region needs at least one ball");
    const std::size_t n = balls_.front().dim();
    if (n == 0) throw DimensionError("region dimension must be >= 1");
    for (const Ball& b : balls_) {
      if (b.dim() != n) throw DimensionError("all balls in a region must share a dimension");
    }
  }
  Region(std::initializer_list<Ball> balls) : Region(std::vector<Ball>(balls)) {}

  const std::vector<Ball>& balls() const noexcept { return balls_; }
  const Ball& operator[](std::size_t i) const { return balls_[i]; }
  std::size_t size() const noexcept { return balls_.size(); }
  std::size_t dim() const noexcept { return balls_.front().dim(); }

  double max_radius() const noexcept {
    double r = 0.0;
    for (const Ball& b : balls_) r = std::max(r, b.radius);
    return r;
  }

  /// Length unit for relative tolerances: the largest radius, or 1 for all-zero radii.
  double scale() const noexcept {
    const double r = max_radius();
    return r > 0.0 ? r : 1.0;
  }

  /// Same centers, every radius grown by `delta`.
  Region inflated(double delta) const {
    std::vector<Ball> out = balls_;
    for (Ball& b : out) b.radius += delta;
    return Region(std::move(out));
  }

  void check_dim(const Point& x) const {
    if (x.dim() != dim()) {
      throw DimensionError("point has dimension " + std::to_string(x.dim()) + ", region has " +
                           std::to_string(dim()));
    }
  }

 private:
  std::vector<Ball> balls_;
};

/// Euclidean projection onto a ball. The center maps to itself.
inline Point project_onto_ball(const Point& x, const Ball& b) {
  if (x.dim() != b.dim()) throw DimensionError("point and ball dimension mismatch");
  const double dist = distance(x, b.center);
  if (dist <= b.radius) return x;
  Point p = b.center;
  const double s = b.radius / dist;
  for (std::size_t i = 0; i < p.dim(); ++i) p[i] += s * (x[i] - b.center[i]);
  return p;
}

inline double distance_to_ball(const Point& x, const Ball& b) {
  return std::max(0.0, distance(x, b.center) - b.radius);
}

/// max_i dist(x, B_i); zero exactly when x lies in every ball.
inline double residual(const Region& r, const Point& x) {
  r.check_dim(x);
  double f = 0.0;
  for (const Ball& b : r.balls()) f = std::max(f, distance_to_ball(x, b));
  return f;
}

/// Index of the ball farthest from x (smallest index on ties), none if x is feasible.
inline std::optional<std::size_t> farthest_index(const Region& r, const Point& x) {
  r.check_dim(x);
  std::optional<std::size_t> best;
  double best_dist = 0.0;
  for (std::size_t i = 0; i < r.size(); ++i) {
    const double d = distance_to_ball(x, r[i]);
    if (d > best_dist) {
      best_dist = d;
      best = i;
    }
  }
  return best;
}

/// Axis-aligned box [lo, hi] per coordinate.
struct Box {
  Point lo;
  Point hi;

  Point center() const { return 0.5 * (lo + hi); }
  bool empty() const {
    for (std::size_t i = 0; i < lo.dim(); ++i)
      if (lo[i] > hi[i]) return true;
    return false;
  }
};

/// Smallest box containing the intersection of the balls' l-infinity hulls:
/// hi_l = min_i(a_il + d_i), lo_l = max_i(a_il - d_i). May be empty (lo > hi).
inline Box relaxed_bounding_box(const Region& r) {
  const std::size_t n = r.dim();
  Box box{Point(n, -HUGE_VAL), Point(n, HUGE_VAL)};
  for (const Ball& b : r.balls()) {
    for (std::size_t l = 0; l < n; ++l) {
      box.lo[l] = std::max(box.lo[l], b.center[l] - b.radius);
      box.hi[l] = std::min(box.hi[l], b.center[l] + b.radius);
    }
  }
  return box;
}

}  // namespace nlosbound

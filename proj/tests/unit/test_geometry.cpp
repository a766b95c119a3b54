#include <gtest/gtest.h>

#include <cmath>

#include "helpers.hpp"
#include "nlosbound/geometry.hpp"

using namespace nlosbound;

namespace {

const Ball kUnit{Point{0.0, 0.0}, 1.0};

void expect_point(const Point& p, std::initializer_list<double> want, double tol = 1e-15) {
  ASSERT_EQ(p.dim(), want.size());
  std::size_t i = 0;
  for (double w : want) EXPECT_NEAR(p[i++], w, tol);
}

}  // namespace

TEST(Projection, OutsidePointScalesOntoBoundary) { expect_point(project_onto_ball(Point{2.0, 0.0}, kUnit), {1.0, 0.0}); }

TEST(Projection, InteriorPointIsFixed) { expect_point(project_onto_ball(Point{0.3, 0.0}, kUnit), {0.3, 0.0}); }

TEST(Projection, CenterMapsToItself) { expect_point(project_onto_ball(Point{0.0, 0.0}, kUnit), {0.0, 0.0}); }

TEST(Projection, ZeroRadiusCollapsesToCenter) {
  const Ball b{Point{1.0, 2.0}, 0.0};
  expect_point(project_onto_ball(Point{4.0, 6.0}, b), {1.0, 2.0});
}

TEST(Projection, DimensionMismatchThrows) {
  EXPECT_THROW(project_onto_ball(Point{1.0, 2.0, 3.0}, kUnit), DimensionError);
}

TEST(Residual, Examples) {
  const Region one({kUnit});
  EXPECT_DOUBLE_EQ(residual(one, Point{2.0, 0.0}), 1.0);
  EXPECT_DOUBLE_EQ(residual(one, Point{0.5, 0.0}), 0.0);
  const Region two({kUnit, Ball{Point{3.0, 0.0}, 1.0}});
  EXPECT_DOUBLE_EQ(residual(two, Point{0.0, 0.0}), 2.0);
}

TEST(Residual, DimensionMismatchThrows) {
  EXPECT_THROW(residual(Region({kUnit}), Point{1.0}), DimensionError);
}

TEST(FarthestIndex, Examples) {
  const Region two({kUnit, Ball{Point{3.0, 0.0}, 1.0}});
  EXPECT_EQ(farthest_index(two, Point{0.0, 0.0}), std::optional<std::size_t>(1));
  const Region tie({Ball{Point{-1.0, 0.0}, 0.5}, Ball{Point{1.0, 0.0}, 0.5}});
  EXPECT_EQ(farthest_index(tie, Point{0.0, 0.0}), std::optional<std::size_t>(0));
  const Region lens({Ball{Point{0.0, 0.0}, 1.5}, Ball{Point{2.0, 0.0}, 1.5}});
  EXPECT_FALSE(farthest_index(lens, Point{1.0, 0.0}).has_value());
}

TEST(Types, InvalidInputsRejected) {
  EXPECT_THROW(Ball(Point{0.0, 0.0}, -1.0), std::invalid_argument);
  EXPECT_THROW(Ball(Point{NAN, 0.0}, 1.0), std::invalid_argument);
  EXPECT_THROW(Region(std::vector<Ball>{}), std::invalid_argument);
  EXPECT_THROW(Region({kUnit, Ball{Point{0.0, 0.0, 0.0}, 1.0}}), DimensionError);
}

TEST(Box, RelaxedBoundingBox) {
  const Region tangent({kUnit, Ball{Point{2.0, 0.0}, 1.0}});
  const Box b = relaxed_bounding_box(tangent);
  expect_point(b.lo, {1.0, -1.0});
  expect_point(b.hi, {1.0, 1.0});
  EXPECT_FALSE(b.empty());
  const Region apart({kUnit, Ball{Point{4.0, 0.0}, 1.0}});
  EXPECT_TRUE(relaxed_bounding_box(apart).empty());
}

TEST(GeometryProperties, ProjectionIdempotentAndInside) {
  SplitMix64 rng(11);
  for (int t = 0; t < 2000; ++t) {
    const std::size_t dim = 1 + t % 4;
    const Ball b{testutil::random_point(rng, dim, -5, 5), rng.uniform(0.0, 3.0)};
    const Point x = testutil::random_point(rng, dim, -10, 10);
    const Point p = project_onto_ball(x, b);
    const Point q = project_onto_ball(p, b);
    for (std::size_t i = 0; i < dim; ++i) EXPECT_NEAR(q[i], p[i], 1e-12 * (1.0 + std::abs(p[i])));
    EXPECT_LE(distance(p, b.center), b.radius * (1.0 + 1e-12) + 1e-300);
  }
}

TEST(GeometryProperties, ResidualZeroIffInsideEveryBall) {
  SplitMix64 rng(12);
  for (int t = 0; t < 500; ++t) {
    const Region r = testutil::random_feasible_region(rng, 2, 1 + t % 5, 10.0, 3.0);
    const Point x = testutil::random_point(rng, 2, -2, 12);
    bool inside = true;
    for (const Ball& b : r.balls()) inside = inside && distance(x, b.center) <= b.radius * (1.0 + 1e-12);
    EXPECT_EQ(residual(r, x) == 0.0, inside);
  }
}

TEST(GeometryProperties, ResidualConvexAlongSegments) {
  SplitMix64 rng(13);
  for (int t = 0; t < 1000; ++t) {
    const Region r = testutil::random_feasible_region(rng, 3, 1 + t % 6);
    const Point a = testutil::random_point(rng, 3, -5, 15);
    const Point b = testutil::random_point(rng, 3, -5, 15);
    const Point mid = 0.5 * (a + b);
    EXPECT_LE(residual(r, mid), std::max(residual(r, a), residual(r, b)) + 1e-12);
  }
}

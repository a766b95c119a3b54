#include <gtest/gtest.h>

#include "helpers.hpp"
#include "nlosbound/pocs.hpp"
#include "nlosbound/scenario.hpp"

using namespace nlosbound;

namespace {
const Region kLens({Ball{Point{0.0, 0.0}, 1.5}, Ball{Point{2.0, 0.0}, 1.5}});
const Region kTangent({Ball{Point{0.0, 0.0}, 1.0}, Ball{Point{2.0, 0.0}, 1.0}});
}  // namespace

TEST(Pocs, SingleBallOneProjection) {
  PocsOptions o;
  o.init = Point{2.0, 0.0};
  const Estimate e = pocs_estimate(Region({Ball{Point{0.0, 0.0}, 1.0}}), o);
  EXPECT_DOUBLE_EQ(e.point[0], 1.0);
  EXPECT_DOUBLE_EQ(e.point[1], 0.0);
  EXPECT_EQ(e.residual, 0.0);
  EXPECT_EQ(e.iterations_used, 1);
  EXPECT_TRUE(e.converged);
}

TEST(Pocs, LensFromFarInitConverges) {
  PocsOptions o;
  o.init = Point{5.0, 5.0};
  o.residual_tol = 1e-9;
  const Estimate e = pocs_estimate(kLens, o);
  EXPECT_TRUE(e.converged);
  EXPECT_LE(residual(kLens, e.point), 1e-9);
  EXPECT_EQ(e.residual, residual(kLens, e.point));
}

TEST(Pocs, FeasibleInitReturnedUntouched) {
  PocsOptions o;
  o.init = Point{1.0, 0.2};
  const Estimate e = pocs_estimate(kLens, o);
  EXPECT_EQ(e.point, o.init);
  EXPECT_EQ(e.iterations_used, 0);
}

TEST(Pocs, TangentBallsReportNonConvergenceWithoutLooping) {
  PocsOptions o;
  o.init = Point{1.0, 5.0};
  o.max_iters = 50;
  o.residual_tol = 1e-12;
  const Estimate e = pocs_estimate(kTangent, o);
  EXPECT_EQ(e.iterations_used, 50);
  EXPECT_FALSE(e.converged);
  EXPECT_GT(e.residual, 0.0);
}

TEST(Pocs, InvalidOptionsRejected) {
  PocsOptions o;
  o.init = Point{0.0, 0.0};
  o.max_iters = 0;
  EXPECT_THROW(pocs_estimate(kLens, o), std::invalid_argument);
  o.max_iters = 10;
  o.residual_tol = 0.0;
  EXPECT_THROW(pocs_estimate(kLens, o), std::invalid_argument);
  o.residual_tol.reset();
  o.init = Point{0.0};
  EXPECT_THROW(pocs_estimate(kLens, o), DimensionError);
}

TEST(Subgradient, FeasibleStartIsFixed) {
  const Point x0{1.0, 0.0};
  const Estimate e = subgradient_estimate(kLens, x0, diminishing_step(5.0), 100);
  EXPECT_EQ(e.point, x0);
}

TEST(Subgradient, PolyakOnSingleBallLandsOnBoundary) {
  const Region one({Ball{Point{0.0, 0.0}, 1.0}});
  const Estimate e = subgradient_estimate(one, Point{3.0, 4.0}, polyak_step(), 1);
  EXPECT_NEAR(e.point[0], 0.6, 1e-15);
  EXPECT_NEAR(e.point[1], 0.8, 1e-15);
  EXPECT_EQ(e.iterations_used, 1);
}

TEST(Subgradient, PolyakMatchesPocsIterates) {
  SplitMix64 rng(3);
  for (int t = 0; t < 50; ++t) {
    const Region r = testutil::random_feasible_region(rng, 3, 6);
    const Point x0 = testutil::random_point(rng, 3, -10, 20);
    PocsOptions o;
    o.init = x0;
    o.max_iters = 20;
    o.residual_tol = 1e-300;
    const Estimate p = pocs_estimate(r, o);
    const Estimate s = subgradient_estimate(r, x0, polyak_step(), 20);
    for (std::size_t i = 0; i < 3; ++i) EXPECT_NEAR(p.point[i], s.point[i], 1e-9);
  }
}

TEST(Subgradient, DiminishingStepReducesResidualOnTangentBalls) {
  const Point x0{5.0, 5.0};
  const Estimate e = subgradient_estimate(kTangent, x0, diminishing_step(1.0), 200);
  EXPECT_LT(e.residual, residual(kTangent, x0));
}

TEST(PocsProperties, FejerMonotoneTowardTarget) {
  ScenarioConfig cfg;
  for (std::uint64_t seed = 0; seed < 100; ++seed) {
    const Scenario s = generate_scenario(cfg, seed);
    const Region r = s.region();
    SplitMix64 rng(seed + 1000);
    PocsOptions o;
    o.init = testutil::random_point(rng, 3, 0, 10);
    Point prev = o.init;
    pocs_estimate(r, o, [&](int, const Point& x, std::size_t j) {
      EXPECT_LE(distance(x, *s.target), distance(prev, *s.target) + 1e-12);
      // Each iterate sits in the ball it was projected onto.
      EXPECT_LE(distance(x, r[j].center), r[j].radius * (1.0 + 1e-12));
      prev = x;
    });
  }
}

TEST(PocsProperties, ConvergesOnGeneratedScenarios) {
  ScenarioConfig cfg;
  int converged = 0;
  const int trials = 500;
  for (int seed = 0; seed < trials; ++seed) {
    const Scenario s = generate_scenario(cfg, static_cast<std::uint64_t>(seed));
    const Region r = s.region();
    SplitMix64 rng(static_cast<std::uint64_t>(seed) * 7 + 1);
    PocsOptions o;
    o.init = testutil::random_point(rng, 3, 0, 10);
    const Estimate e = pocs_estimate(r, o);
    if (e.converged) {
      ++converged;
      EXPECT_LE(residual(r, e.point), 1e-6 * r.scale());
    }
  }
  EXPECT_GE(converged, trials * 99 / 100);
}

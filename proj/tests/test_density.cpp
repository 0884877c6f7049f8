#include "core/density.hpp"
#include "core/model.hpp"
#include "oracles.hpp"

#include <gtest/gtest.h>

#include <random>

using namespace trajseg;

namespace {

std::vector<Vec2> random_points(std::mt19937_64& rng, std::size_t n, double spread)
{
  std::uniform_real_distribution<double> u(-spread, spread);
  std::vector<Vec2> pts;
  for (std::size_t i = 0; i < n; ++i) {
    pts.push_back({u(rng), u(rng)});
  }
  return pts;
}

std::vector<oracle::P> to_oracle(const std::vector<Vec2>& v)
{
  std::vector<oracle::P> out;
  for (auto p : v) {
    out.push_back({p.x, p.y});
  }
  return out;
}

} // namespace

TEST(Model, RectDistanceAndUnion)
{
  const Rect r{0, 0, 2, 1};
  EXPECT_DOUBLE_EQ(r.distance_to(Vec2{1, 0.5}), 0.0);
  EXPECT_DOUBLE_EQ(r.distance_to(Vec2{5, 5}), 5.0);
  EXPECT_DOUBLE_EQ(r.distance_to(Rect{3, 0, 4, 1}), 1.0);
  EXPECT_EQ(r.united(Rect{-1, 3, 0, 4}), (Rect{-1, 0, 2, 4}));
  EXPECT_TRUE(r.intersects(Rect{2, 1, 3, 3}));
  EXPECT_FALSE(r.intersects(Rect{2.01, 1, 3, 3}));
}

TEST(Model, TrajectoryRejectsBadInput)
{
  EXPECT_THROW(SampledTrajectory("a", {}), Error);
  try {
    SampledTrajectory("a", {{1, {0, 0}}, {0.5, {1, 1}}});
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::OutOfOrder);
  }
  try {
    SampledTrajectory("a", {{0, {0, std::nan("")}}});
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::NonFinite);
  }
  // equal timestamps are allowed
  EXPECT_NO_THROW(SampledTrajectory("a", {{0, {0, 0}}, {0, {1, 0}}}));
}

TEST(Model, ParamsNameTheBadField)
{
  SegmenterParams p;
  p.min_r = 0;
  try {
    p.validate();
    FAIL();
  } catch (const Error& e) {
    EXPECT_NE(std::string(e.what()).find("min_r"), std::string::npos);
  }
  p.min_r = 1;
  p.min_density = -1;
  try {
    p.validate();
    FAIL();
  } catch (const Error& e) {
    EXPECT_NE(std::string(e.what()).find("min_density"), std::string::npos);
  }
}

TEST(Model, SegmentationValidity)
{
  EXPECT_TRUE(validate_segmentation(5, Segmentation{{0, 2, 5}}));
  EXPECT_FALSE(validate_segmentation(5, Segmentation{{0, 2, 2, 5}}));
  EXPECT_FALSE(validate_segmentation(5, Segmentation{{1, 5}}));
  EXPECT_FALSE(validate_segmentation(5, Segmentation{{0, 4}}));
}

TEST(Model, ReachContainsExtent)
{
  SegmentSummary s;
  s.centroid = {0, 0};
  s.radius = 1;
  s.extent = {-3, -1, 1, 4};
  EXPECT_DOUBLE_EQ(s.reach(), std::hypot(3.0, 4.0));
}

TEST(RunningCircle, RadiusUsesCentroidBeforeUpdate)
{
  auto s = RunningCircleState::start({0, 0});
  s = running_circle_update(s, {2, 0});
  EXPECT_DOUBLE_EQ(s.radius, 2.0);
  EXPECT_DOUBLE_EQ(s.centroid.x, 1.0);
  s = running_circle_update(s, {1, 3});
  EXPECT_DOUBLE_EQ(s.radius, 3.0);
  EXPECT_EQ(s.n, 3u);
  EXPECT_DOUBLE_EQ(s.centroid.y, 1.0);
  EXPECT_NEAR(running_circle_density(s).density, 3.0 / (std::numbers::pi * 9.0), 1e-15);
}

TEST(RunningCircle, ZeroRadiusIsInfiniteDensity)
{
  const auto s = running_circle_update(RunningCircleState::start({1, 1}), {1, 1});
  EXPECT_TRUE(std::isinf(running_circle_density(s).density));
}

TEST(BoundingRect, TracksExtent)
{
  BoundingRectState s;
  for (Vec2 p : {Vec2{1, 1}, Vec2{-1, 3}, Vec2{2, 0}}) {
    s = bounding_rect_update(s, p);
  }
  EXPECT_EQ(s.rect(), (Rect{-1, 0, 2, 3}));
  EXPECT_DOUBLE_EQ(bounding_rect_density(s).density, 3.0 / 9.0);
}

TEST(MinEnclosingCircle, MatchesBruteForce)
{
  std::mt19937_64 rng(7);
  for (int trial = 0; trial < 200; ++trial) {
    const auto pts = random_points(rng, 2 + trial % 25, 10.0);
    const Circle c = min_enclosing_circle(pts);
    const auto ref = oracle::mec_brute(to_oracle(pts));
    ASSERT_NEAR(c.radius, ref.r, 1e-9 * std::max(1.0, ref.r)) << "trial " << trial;
    for (auto p : pts) {
      ASSERT_LE(dist(c.center, p), c.radius * (1 + 1e-9) + 1e-12);
    }
  }
}

TEST(MinEnclosingCircle, Degenerate)
{
  const std::vector<Vec2> one{{3, 4}};
  EXPECT_DOUBLE_EQ(min_enclosing_circle(one).radius, 0.0);
  const std::vector<Vec2> line{{0, 0}, {1, 0}, {2, 0}, {4, 0}};
  const Circle c = min_enclosing_circle(line);
  EXPECT_NEAR(c.radius, 2.0, 1e-12);
  EXPECT_NEAR(c.center.x, 2.0, 1e-12);
  EXPECT_THROW(min_enclosing_circle(std::vector<Vec2>{}), Error);
}

TEST(ConvexHull, AreaMatchesGiftWrapping)
{
  std::mt19937_64 rng(11);
  for (int trial = 0; trial < 200; ++trial) {
    const auto pts = random_points(rng, 3 + trial % 40, 5.0);
    const auto hull = convex_hull(pts);
    const double area = shoelace_area(hull);
    EXPECT_GT(area, 0.0); // counter-clockwise
    const double ref = oracle::shoelace(oracle::jarvis(to_oracle(pts)));
    ASSERT_NEAR(area, ref, 1e-9 * ref);
  }
}

TEST(ConvexHull, CollinearAndDuplicates)
{
  const std::vector<Vec2> pts{{0, 0}, {1, 0}, {2, 0}, {2, 2}, {0, 2}, {1, 0}, {0, 0}};
  const auto hull = convex_hull(pts);
  EXPECT_EQ(hull.size(), 4u);
  EXPECT_DOUBLE_EQ(shoelace_area(hull), 4.0);
  const std::vector<Vec2> flat{{0, 0}, {1, 1}, {2, 2}};
  EXPECT_TRUE(std::isinf(convex_hull_density(flat).density));
}

TEST(Shoelace, SignFollowsOrientation)
{
  const std::vector<Vec2> ccw{{0, 0}, {1, 0}, {1, 1}, {0, 1}};
  const std::vector<Vec2> cw{{0, 0}, {0, 1}, {1, 1}, {1, 0}};
  EXPECT_DOUBLE_EQ(shoelace_area(ccw), 1.0);
  EXPECT_DOUBLE_EQ(shoelace_area(cw), -1.0);
}

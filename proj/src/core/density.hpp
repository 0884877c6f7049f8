#pragma once

#include "core/model.hpp"

#include <span>
#include <vector>

namespace trajseg {

enum class DensityShape : std::uint8_t { RunningCircle, BoundingRect, MinEnclosingCircle, ConvexHull };

struct DensityEstimate
{
  std::size_t n = 0;
  double area = 0.0;
  double density = 0.0; // n / area, +inf when area == 0
  DensityShape shape = DensityShape::RunningCircle;
};

DensityEstimate make_estimate(std::size_t n, double area, DensityShape shape);

// Running mean with the radius tracked against the centroid current at each
// arrival. The radius does not necessarily contain earlier points after the
// centroid drifts.
struct RunningCircleState
{
  Vec2 centroid;
  double radius = 0.0;
  std::size_t n = 1;

  static RunningCircleState start(Vec2 p) { return {p, 0.0, 1}; }
};

// Counts the new point and widens the radius against the pre-update centroid.
// The centroid is left unchanged.
RunningCircleState running_circle_expand(RunningCircleState s, Vec2 p);
// Moves the centroid to the mean including p; expects s.n to already count p.
RunningCircleState running_circle_absorb(RunningCircleState s, Vec2 p);
// expand followed by absorb.
RunningCircleState running_circle_update(RunningCircleState s, Vec2 p);
DensityEstimate running_circle_density(const RunningCircleState& s);

struct BoundingRectState
{
  double min_x = 0.0;
  double max_x = 0.0;
  double min_y = 0.0;
  double max_y = 0.0;
  std::size_t n = 0;

  [[nodiscard]] Rect rect() const { return {min_x, min_y, max_x, max_y}; }
};

BoundingRectState bounding_rect_update(BoundingRectState s, Vec2 p);
DensityEstimate bounding_rect_density(const BoundingRectState& s);

struct Circle
{
  Vec2 center;
  double radius = 0.0;
};

// Smallest enclosing circle, randomized incremental (Welzl) with a fixed
// shuffle seed so results are reproducible.
Circle min_enclosing_circle(std::span<const Vec2> points);
DensityEstimate min_enclosing_circle_density(std::span<const Vec2> points);

// Counter-clockwise hull without collinear points (monotone chain).
std::vector<Vec2> convex_hull(std::span<const Vec2> points);
// Signed polygon area by the shoelace formula; positive for CCW rings.
double shoelace_area(std::span<const Vec2> ring);
DensityEstimate convex_hull_density(std::span<const Vec2> points);

} // namespace trajseg

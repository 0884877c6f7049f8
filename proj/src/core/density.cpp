#include "core/density.hpp"

#include <algorithm>
#include <limits>
#include <numbers>
#include <random>

namespace trajseg {

namespace {

void require_finite(Vec2 p)
{
  if (!is_finite(p)) {
    throw Error(ErrorCode::NonFinite, "point coordinates must be finite");
  }
}

double cross(Vec2 o, Vec2 a, Vec2 b)
{
  return (a.x - o.x) * (b.y - o.y) - (a.y - o.y) * (b.x - o.x);
}

Circle circle_from(Vec2 a, Vec2 b)
{
  const Vec2 c = 0.5 * (a + b);
  return {c, std::max(dist(c, a), dist(c, b))};
}

Circle circle_from(Vec2 a, Vec2 b, Vec2 c)
{
  const double bx = b.x - a.x;
  const double by = b.y - a.y;
  const double cx = c.x - a.x;
  const double cy = c.y - a.y;
  const double d = 2.0 * (bx * cy - by * cx);
  if (std::abs(d) < 1e-300) {
    // Collinear: the diameter is the farthest pair.
    Circle best = circle_from(a, b);
    for (const Circle& alt : {circle_from(a, c), circle_from(b, c)}) {
      if (alt.radius > best.radius) {
        best = alt;
      }
    }
    return best;
  }
  const double b2 = bx * bx + by * by;
  const double c2 = cx * cx + cy * cy;
  const Vec2 center{a.x + (cy * b2 - by * c2) / d, a.y + (bx * c2 - cx * b2) / d};
  return {center, std::max({dist(center, a), dist(center, b), dist(center, c)})};
}

bool inside(const Circle& c, Vec2 p)
{
  // Relative slack absorbs rounding in the circumcircle construction.
  return dist(c.center, p) <= c.radius * (1.0 + 1e-12) + 1e-12;
}

} // namespace

DensityEstimate make_estimate(std::size_t n, double area, DensityShape shape)
{
  DensityEstimate e{n, area, 0.0, shape};
  e.density = area > 0.0 ? static_cast<double>(n) / area : std::numeric_limits<double>::infinity();
  return e;
}

RunningCircleState running_circle_expand(RunningCircleState s, Vec2 p)
{
  require_finite(p);
  s.n += 1;
  s.radius = std::max(s.radius, dist(s.centroid, p));
  return s;
}

RunningCircleState running_circle_absorb(RunningCircleState s, Vec2 p)
{
  const double n = static_cast<double>(s.n);
  s.centroid = ((n - 1.0) * s.centroid + p) / n;
  return s;
}

RunningCircleState running_circle_update(RunningCircleState s, Vec2 p)
{
  return running_circle_absorb(running_circle_expand(s, p), p);
}

DensityEstimate running_circle_density(const RunningCircleState& s)
{
  return make_estimate(s.n, std::numbers::pi * s.radius * s.radius, DensityShape::RunningCircle);
}

BoundingRectState bounding_rect_update(BoundingRectState s, Vec2 p)
{
  require_finite(p);
  if (s.n == 0) {
    return {p.x, p.x, p.y, p.y, 1};
  }
  s.n += 1;
  s.max_x = std::max(s.max_x, p.x);
  s.max_y = std::max(s.max_y, p.y);
  s.min_x = std::min(s.min_x, p.x);
  s.min_y = std::min(s.min_y, p.y);
  return s;
}

DensityEstimate bounding_rect_density(const BoundingRectState& s)
{
  return make_estimate(s.n, (s.max_x - s.min_x) * (s.max_y - s.min_y), DensityShape::BoundingRect);
}

Circle min_enclosing_circle(std::span<const Vec2> points)
{
  if (points.empty()) {
    throw Error(ErrorCode::EmptyInput, "min_enclosing_circle needs at least one point");
  }
  std::vector<Vec2> pts(points.begin(), points.end());
  std::mt19937_64 rng(0x5eedULL);
  std::shuffle(pts.begin(), pts.end(), rng);

  Circle c{pts[0], 0.0};
  for (std::size_t i = 1; i < pts.size(); ++i) {
    if (inside(c, pts[i])) {
      continue;
    }
    c = {pts[i], 0.0};
    for (std::size_t j = 0; j < i; ++j) {
      if (inside(c, pts[j])) {
        continue;
      }
      c = circle_from(pts[i], pts[j]);
      for (std::size_t k = 0; k < j; ++k) {
        if (!inside(c, pts[k])) {
          c = circle_from(pts[i], pts[j], pts[k]);
        }
      }
    }
  }
  return c;
}

DensityEstimate min_enclosing_circle_density(std::span<const Vec2> points)
{
  const Circle c = min_enclosing_circle(points);
  return make_estimate(points.size(), std::numbers::pi * c.radius * c.radius,
                       DensityShape::MinEnclosingCircle);
}

std::vector<Vec2> convex_hull(std::span<const Vec2> points)
{
  std::vector<Vec2> pts(points.begin(), points.end());
  std::sort(pts.begin(), pts.end(), [](Vec2 a, Vec2 b) { return a.x < b.x || (a.x == b.x && a.y < b.y); });
  pts.erase(std::unique(pts.begin(), pts.end()), pts.end());
  if (pts.size() < 3) {
    return pts;
  }
  std::vector<Vec2> hull(2 * pts.size());
  std::size_t k = 0;
  for (const Vec2& p : pts) {
    while (k >= 2 && cross(hull[k - 2], hull[k - 1], p) <= 0.0) {
      --k;
    }
    hull[k++] = p;
  }
  for (std::size_t i = pts.size() - 1, lower = k + 1; i-- > 0;) {
    while (k >= lower && cross(hull[k - 2], hull[k - 1], pts[i]) <= 0.0) {
      --k;
    }
    hull[k++] = pts[i];
  }
  hull.resize(k - 1);
  return hull;
}

double shoelace_area(std::span<const Vec2> ring)
{
  if (ring.size() < 3) {
    return 0.0;
  }
  double twice = 0.0;
  for (std::size_t i = 0; i < ring.size(); ++i) {
    const Vec2 a = ring[i];
    const Vec2 b = ring[(i + 1) % ring.size()];
    twice += a.x * b.y - b.x * a.y;
  }
  return 0.5 * twice;
}

DensityEstimate convex_hull_density(std::span<const Vec2> points)
{
  if (points.empty()) {
    throw Error(ErrorCode::EmptyInput, "convex_hull_density needs at least one point");
  }
  const auto hull = convex_hull(points);
  return make_estimate(points.size(), std::abs(shoelace_area(hull)), DensityShape::ConvexHull);
}

} // namespace trajseg

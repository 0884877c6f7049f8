#pragma once

#include <cmath>
#include <cstddef>
#include <cstdint>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace trajseg {

enum class ErrorCode {
  InvalidArgument,
  EmptyInput,
  NonFinite,
  OutOfOrder,
  NotFound,
  DisjointTime,
  Parse,
  Io,
};

const char* to_string(ErrorCode code);

class Error : public std::runtime_error
{
public:
  Error(ErrorCode code, const std::string& what)
    : std::runtime_error(what)
    , code_(code)
  {
  }

  [[nodiscard]] ErrorCode code() const { return code_; }

private:
  ErrorCode code_;
};

struct Vec2
{
  double x = 0.0;
  double y = 0.0;

  friend Vec2 operator+(Vec2 a, Vec2 b) { return {a.x + b.x, a.y + b.y}; }
  friend Vec2 operator-(Vec2 a, Vec2 b) { return {a.x - b.x, a.y - b.y}; }
  friend Vec2 operator*(double s, Vec2 a) { return {s * a.x, s * a.y}; }
  friend Vec2 operator/(Vec2 a, double s) { return {a.x / s, a.y / s}; }
  friend bool operator==(Vec2 a, Vec2 b) = default;
};

inline double dist(Vec2 a, Vec2 b) { return std::hypot(a.x - b.x, a.y - b.y); }
inline double dist2(Vec2 a, Vec2 b)
{
  const double dx = a.x - b.x;
  const double dy = a.y - b.y;
  return dx * dx + dy * dy;
}
inline bool is_finite(Vec2 p) { return std::isfinite(p.x) && std::isfinite(p.y); }

// Closed axis-aligned rectangle.
struct Rect
{
  double min_x = 0.0;
  double min_y = 0.0;
  double max_x = 0.0;
  double max_y = 0.0;

  [[nodiscard]] bool valid() const { return min_x <= max_x && min_y <= max_y; }
  [[nodiscard]] bool contains(Vec2 p) const
  {
    return p.x >= min_x && p.x <= max_x && p.y >= min_y && p.y <= max_y;
  }
  [[nodiscard]] bool intersects(const Rect& o) const
  {
    return min_x <= o.max_x && o.min_x <= max_x && min_y <= o.max_y && o.min_y <= max_y;
  }
  [[nodiscard]] Rect inflated(double d) const { return {min_x - d, min_y - d, max_x + d, max_y + d}; }
  [[nodiscard]] Rect united(const Rect& o) const;
  // Euclidean distance from p to the rectangle; 0 inside.
  [[nodiscard]] double distance_to(Vec2 p) const;
  [[nodiscard]] double distance_to(const Rect& o) const;
  friend bool operator==(const Rect&, const Rect&) = default;
};

struct SamplePoint
{
  std::string traj_id;
  double t = 0.0;
  Vec2 pos;
};

// Positions and timestamps of a single entity; timestamps non-decreasing.
struct TimedPoint
{
  double t = 0.0;
  Vec2 pos;
  friend bool operator==(const TimedPoint&, const TimedPoint&) = default;
};

class SampledTrajectory
{
public:
  // Throws EmptyInput for no points, NonFinite for NaN/inf, OutOfOrder for
  // decreasing timestamps.
  SampledTrajectory(std::string traj_id, std::vector<TimedPoint> points);

  [[nodiscard]] const std::string& id() const { return id_; }
  [[nodiscard]] std::span<const TimedPoint> points() const { return points_; }
  [[nodiscard]] std::size_t size() const { return points_.size(); }
  [[nodiscard]] const TimedPoint& operator[](std::size_t i) const { return points_[i]; }

private:
  std::string id_;
  std::vector<TimedPoint> points_;
};

// Cutoffs c_0 = 0 < c_1 < ... < c_k = n; segment j covers [c_j, c_{j+1}).
struct Segmentation
{
  std::vector<std::size_t> cutoffs;
};

enum class SegmentKind : std::uint8_t { Locomotive, Local };
const char* to_string(SegmentKind kind);
SegmentKind segment_kind_from_string(const std::string& s);

struct SegmentSummary
{
  std::string traj_id;
  Vec2 centroid;
  double t_rep = 0.0;
  double radius = 0.0;
  std::size_t n_points = 0;
  std::size_t start_idx = 0;
  std::size_t end_idx = 0;
  double t_start = 0.0;
  double t_end = 0.0;
  SegmentKind kind = SegmentKind::Locomotive;
  // Axis-aligned bounds of the segment's points. Unlike the running radius
  // this always contains every point of the segment.
  Rect extent;

  // Radius of a circle around the centroid guaranteed to contain the segment.
  [[nodiscard]] double reach() const;

  friend bool operator==(const SegmentSummary&, const SegmentSummary&) = default;
};

enum class TRepMode : std::uint8_t { MeanTime, StartTime };
enum class Estimator : std::uint8_t { RunningCircle, BoundingRect };

struct SegmenterParams
{
  double min_r = 1.0;
  double min_density = 1.0;
  TRepMode t_rep_mode = TRepMode::MeanTime;
  Estimator estimator = Estimator::RunningCircle;

  // Throws InvalidArgument naming the offending parameter.
  void validate() const;
};

// Centroid trajectory of one entity's summaries: (t_rep, centroid) per summary.
SampledTrajectory summaries_as_trajectory(std::span<const SegmentSummary> summaries);

bool validate_segmentation(const SampledTrajectory& traj, const Segmentation& seg);
bool validate_segmentation(std::size_t n_points, const Segmentation& seg);

} // namespace trajseg

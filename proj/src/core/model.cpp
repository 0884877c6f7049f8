#include "core/model.hpp"

#include <algorithm>

namespace trajseg {

const char* to_string(ErrorCode code)
{
  switch (code) {
    case ErrorCode::InvalidArgument: return "invalid_argument";
    case ErrorCode::EmptyInput: return "empty_input";
    case ErrorCode::NonFinite: return "non_finite";
    case ErrorCode::OutOfOrder: return "out_of_order";
    case ErrorCode::NotFound: return "not_found";
    case ErrorCode::DisjointTime: return "disjoint_time";
    case ErrorCode::Parse: return "parse";
    case ErrorCode::Io: return "io";
  }
  return "unknown";
}

Rect Rect::united(const Rect& o) const
{
  return {std::min(min_x, o.min_x), std::min(min_y, o.min_y), std::max(max_x, o.max_x),
          std::max(max_y, o.max_y)};
}

double Rect::distance_to(Vec2 p) const
{
  const double dx = std::max({min_x - p.x, 0.0, p.x - max_x});
  const double dy = std::max({min_y - p.y, 0.0, p.y - max_y});
  return std::hypot(dx, dy);
}

double Rect::distance_to(const Rect& o) const
{
  const double dx = std::max({min_x - o.max_x, 0.0, o.min_x - max_x});
  const double dy = std::max({min_y - o.max_y, 0.0, o.min_y - max_y});
  return std::hypot(dx, dy);
}

SampledTrajectory::SampledTrajectory(std::string traj_id, std::vector<TimedPoint> points)
  : id_(std::move(traj_id))
  , points_(std::move(points))
{
  if (points_.empty()) {
    throw Error(ErrorCode::EmptyInput, "trajectory '" + id_ + "' has no points");
  }
  for (std::size_t i = 0; i < points_.size(); ++i) {
    if (!std::isfinite(points_[i].t) || !is_finite(points_[i].pos)) {
      throw Error(ErrorCode::NonFinite,
                  "trajectory '" + id_ + "' point " + std::to_string(i) + " is not finite");
    }
    if (i > 0 && points_[i].t < points_[i - 1].t) {
      throw Error(ErrorCode::OutOfOrder,
                  "trajectory '" + id_ + "' timestamps decrease at index " + std::to_string(i));
    }
  }
}

const char* to_string(SegmentKind kind)
{
  return kind == SegmentKind::Local ? "local" : "locomotive";
}

SegmentKind segment_kind_from_string(const std::string& s)
{
  if (s == "local") {
    return SegmentKind::Local;
  }
  if (s == "locomotive") {
    return SegmentKind::Locomotive;
  }
  throw Error(ErrorCode::Parse, "unknown segment kind '" + s + "'");
}

double SegmentSummary::reach() const
{
  const double fx = std::max(std::abs(centroid.x - extent.min_x), std::abs(extent.max_x - centroid.x));
  const double fy = std::max(std::abs(centroid.y - extent.min_y), std::abs(extent.max_y - centroid.y));
  return std::max(radius, std::hypot(fx, fy));
}

void SegmenterParams::validate() const
{
  if (!(min_r > 0.0) || !std::isfinite(min_r)) {
    throw Error(ErrorCode::InvalidArgument, "min_r must be a finite value > 0");
  }
  if (!(min_density > 0.0) || !std::isfinite(min_density)) {
    throw Error(ErrorCode::InvalidArgument, "min_density must be a finite value > 0");
  }
}

SampledTrajectory summaries_as_trajectory(std::span<const SegmentSummary> summaries)
{
  if (summaries.empty()) {
    throw Error(ErrorCode::EmptyInput, "cannot build a trajectory from zero summaries");
  }
  std::vector<TimedPoint> pts;
  pts.reserve(summaries.size());
  for (const auto& s : summaries) {
    if (s.traj_id != summaries.front().traj_id) {
      throw Error(ErrorCode::InvalidArgument, "summaries belong to more than one trajectory");
    }
    pts.push_back({s.t_rep, s.centroid});
  }
  return SampledTrajectory(summaries.front().traj_id, std::move(pts));
}

bool validate_segmentation(std::size_t n_points, const Segmentation& seg)
{
  const auto& c = seg.cutoffs;
  if (c.size() < 2 || c.front() != 0 || c.back() != n_points) {
    return false;
  }
  return std::adjacent_find(c.begin(), c.end(), std::greater_equal<>()) == c.end();
}

bool validate_segmentation(const SampledTrajectory& traj, const Segmentation& seg)
{
  return validate_segmentation(traj.size(), seg);
}

} // namespace trajseg

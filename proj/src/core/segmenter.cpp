#include "core/segmenter.hpp"

#include "core/text.hpp"

#include <algorithm>

namespace trajseg {

Segmenter::Segmenter(const SegmenterParams& params, std::string traj_id, double t, Vec2 p,
                     std::size_t first_idx)
  : params_(params)
  , traj_id_(std::move(traj_id))
{
  params_.validate();
  if (!std::isfinite(t) || !is_finite(p)) {
    throw Error(ErrorCode::NonFinite, "point of trajectory '" + traj_id_ + "' is not finite");
  }
  restart(first_idx, t, p);
}

void Segmenter::restart(std::size_t idx, double t, Vec2 p)
{
  state_.circle = RunningCircleState::start(p);
  state_.rect = bounding_rect_update({}, p);
  state_.start_idx = idx;
  state_.next_idx = idx + 1;
  state_.t_start = t;
  state_.t_last = t;
  state_.dt_sum = 0.0;
  state_.exceeded_while_dense = false;
}

std::optional<SegmentSummary> Segmenter::push(double t, Vec2 p)
{
  if (!std::isfinite(t) || !is_finite(p)) {
    throw Error(ErrorCode::NonFinite, "point of trajectory '" + traj_id_ + "' is not finite");
  }
  if (t < state_.t_last) {
    throw Error(ErrorCode::OutOfOrder, "trajectory '" + traj_id_ + "': timestamp " + text::format_double(t) +
                                         " precedes " + text::format_double(state_.t_last));
  }
  const std::size_t idx = state_.next_idx;
  const RunningCircleState grown = running_circle_expand(state_.circle, p);
  const BoundingRectState rect = bounding_rect_update(state_.rect, p);

  if (grown.radius > params_.min_r) {
    const double density = params_.estimator == Estimator::BoundingRect
                             ? bounding_rect_density(rect).density
                             : running_circle_density(grown).density;
    if (density < params_.min_density) {
      SegmentSummary closed = close();
      restart(idx, t, p);
      return closed;
    }
    state_.exceeded_while_dense = true;
  }

  state_.circle = running_circle_absorb(grown, p);
  state_.rect = rect;
  state_.next_idx = idx + 1;
  state_.t_last = t;
  state_.dt_sum += t - state_.t_start;
  return std::nullopt;
}

SegmentSummary Segmenter::close() const
{
  SegmentSummary s;
  s.traj_id = traj_id_;
  s.centroid = state_.circle.centroid;
  s.radius = state_.circle.radius;
  s.start_idx = state_.start_idx;
  s.end_idx = state_.next_idx;
  s.n_points = s.end_idx - s.start_idx;
  s.t_start = state_.t_start;
  s.t_end = state_.t_last;
  if (params_.t_rep_mode == TRepMode::StartTime) {
    s.t_rep = s.t_start;
  } else {
    s.t_rep = std::clamp(s.t_start + state_.dt_sum / static_cast<double>(s.n_points), s.t_start, s.t_end);
  }
  s.kind = state_.exceeded_while_dense ? SegmentKind::Local : SegmentKind::Locomotive;
  s.extent = state_.rect.rect();
  return s;
}

SegmentationResult segment_trajectory(const SampledTrajectory& traj, const SegmenterParams& params)
{
  SegmentationResult out;
  Segmenter seg(params, traj.id(), traj[0].t, traj[0].pos);
  for (std::size_t i = 1; i < traj.size(); ++i) {
    if (auto closed = seg.push(traj[i].t, traj[i].pos)) {
      out.summaries.push_back(std::move(*closed));
    }
  }
  out.summaries.push_back(seg.close());

  out.segmentation.cutoffs.reserve(out.summaries.size() + 1);
  for (const auto& s : out.summaries) {
    out.segmentation.cutoffs.push_back(s.start_idx);
  }
  out.segmentation.cutoffs.push_back(traj.size());
  return out;
}

std::vector<std::vector<SegmentSummary>> segment_hierarchy(const SampledTrajectory& traj,
                                                           std::span<const SegmenterParams> ladder)
{
  if (ladder.empty()) {
    throw Error(ErrorCode::EmptyInput, "segment_hierarchy needs at least one level");
  }
  for (std::size_t i = 1; i < ladder.size(); ++i) {
    if (!(ladder[i].min_r > ladder[i - 1].min_r)) {
      throw Error(ErrorCode::InvalidArgument, "hierarchy min_r values must strictly increase");
    }
  }
  std::vector<std::vector<SegmentSummary>> levels;
  levels.push_back(segment_trajectory(traj, ladder[0]).summaries);
  for (std::size_t i = 1; i < ladder.size(); ++i) {
    const SampledTrajectory centroids = summaries_as_trajectory(levels.back());
    levels.push_back(segment_trajectory(centroids, ladder[i]).summaries);
  }
  return levels;
}

double estimate_compression(double l, double r, double n1, double n2)
{
  if (!(r > 0.0) || !(l >= 0.0) || !(n1 + n2 > 0.0)) {
    throw Error(ErrorCode::InvalidArgument, "estimate_compression needs l >= 0, r > 0, n1 + n2 > 0");
  }
  return (l / r + 1.0) / (n1 + n2);
}

StreamEngine::StreamEngine(const SegmenterParams& params)
  : params_(params)
{
  params_.validate();
}

std::optional<SegmentSummary> StreamEngine::ingest(const std::string& traj_id, double t, Vec2 pos,
                                                   std::size_t index_if_new)
{
  auto it = index_.find(traj_id);
  if (it == index_.end()) {
    live_.emplace_back(params_, traj_id, t, pos, index_if_new);
    index_.emplace(traj_id, std::prev(live_.end()));
    return std::nullopt;
  }
  return it->second->push(t, pos);
}

SegmentSummary StreamEngine::flush(const std::string& traj_id)
{
  auto it = index_.find(traj_id);
  if (it == index_.end()) {
    throw Error(ErrorCode::NotFound, "no open trajectory '" + traj_id + "'");
  }
  SegmentSummary s = it->second->close();
  live_.erase(it->second);
  index_.erase(it);
  return s;
}

std::vector<SegmentSummary> StreamEngine::flush_all()
{
  std::vector<SegmentSummary> out;
  out.reserve(live_.size());
  for (const auto& seg : live_) {
    out.push_back(seg.close());
  }
  live_.clear();
  index_.clear();
  return out;
}

const Segmenter* StreamEngine::find(const std::string& traj_id) const
{
  auto it = index_.find(traj_id);
  return it == index_.end() ? nullptr : &*it->second;
}

} // namespace trajseg

#pragma once

#include "core/density.hpp"
#include "core/model.hpp"

#include <functional>
#include <list>
#include <optional>
#include <string>
#include <unordered_map>
#include <vector>

namespace trajseg {

// Running state of one open segment. Fixed size: nothing in here grows with
// the number of points consumed.
struct SegmenterState
{
  RunningCircleState circle;
  BoundingRectState rect;
  std::size_t start_idx = 0;
  std::size_t next_idx = 0; // index the next point will receive
  double t_start = 0.0;
  double t_last = 0.0;
  double dt_sum = 0.0; // sum of (t - t_start), for the mean-time representative
  bool exceeded_while_dense = false;
};

static_assert(std::is_trivially_copyable_v<SegmenterState>);

// Point-at-a-time segmentation of one trajectory.
class Segmenter
{
public:
  // The first point receives index first_idx.
  Segmenter(const SegmenterParams& params, std::string traj_id, double t, Vec2 p, std::size_t first_idx = 0);

  // Consumes the next point; returns the summary of the segment closed before
  // it, if the point started a new one.
  std::optional<SegmentSummary> push(double t, Vec2 p);
  // Summary of the currently open segment.
  [[nodiscard]] SegmentSummary close() const;

  [[nodiscard]] const SegmenterState& state() const { return state_; }
  [[nodiscard]] const std::string& traj_id() const { return traj_id_; }
  [[nodiscard]] double last_time() const { return state_.t_last; }

private:
  void restart(std::size_t idx, double t, Vec2 p);

  SegmenterParams params_;
  std::string traj_id_;
  SegmenterState state_;
};

struct SegmentationResult
{
  Segmentation segmentation;
  std::vector<SegmentSummary> summaries;
};

SegmentationResult segment_trajectory(const SampledTrajectory& traj, const SegmenterParams& params);

// Level 0 segments the input; each further level segments the previous
// level's centroid trajectory.
std::vector<std::vector<SegmentSummary>> segment_hierarchy(const SampledTrajectory& traj,
                                                           std::span<const SegmenterParams> ladder);

// Expected summary/raw size ratio for a locomotive run of length l with n1
// points followed by a local bout of n2 points, at radius r.
double estimate_compression(double l, double r, double n1, double n2);

// Multi-trajectory online segmentation. State per live trajectory is one
// Segmenter; ids are remembered in first-seen order for flush-all.
class StreamEngine
{
public:
  explicit StreamEngine(const SegmenterParams& params);
  // index_ holds iterators into live_, which survive a move but not a copy.
  StreamEngine(const StreamEngine&) = delete;
  StreamEngine& operator=(const StreamEngine&) = delete;
  StreamEngine(StreamEngine&&) = default;
  StreamEngine& operator=(StreamEngine&&) = default;

  // Returns the summary closed by this point, if any. Throws OutOfOrder when
  // p.t is before the last timestamp seen for p.traj_id.
  // index_if_new numbers the first point of a trajectory the engine has not
  // seen, for trajectories resumed after a flush.
  std::optional<SegmentSummary> ingest(const std::string& traj_id, double t, Vec2 pos,
                                       std::size_t index_if_new = 0);
  std::optional<SegmentSummary> ingest(const SamplePoint& p) { return ingest(p.traj_id, p.t, p.pos); }

  // Emits the open segment of traj_id and forgets it. Throws NotFound.
  SegmentSummary flush(const std::string& traj_id);
  // Flushes every live trajectory in first-seen order.
  std::vector<SegmentSummary> flush_all();

  [[nodiscard]] bool contains(const std::string& traj_id) const { return index_.contains(traj_id); }
  [[nodiscard]] std::size_t live_count() const { return live_.size(); }
  // Bytes of per-trajectory segmentation state, excluding the id strings.
  [[nodiscard]] std::size_t state_bytes() const { return live_.size() * sizeof(SegmenterState); }
  [[nodiscard]] const SegmenterParams& params() const { return params_; }
  [[nodiscard]] const Segmenter* find(const std::string& traj_id) const;

private:
  SegmenterParams params_;
  std::list<Segmenter> live_;
  std::unordered_map<std::string, std::list<Segmenter>::iterator> index_;
};

} // namespace trajseg

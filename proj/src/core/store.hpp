#pragma once

#include "core/model.hpp"
#include "core/segmenter.hpp"

#include <atomic>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <unordered_map>
#include <vector>

#include <nlohmann/json.hpp>

namespace trajseg {

// Copyable wrapper so stores stay value types.
class TouchCounter
{
public:
  TouchCounter() = default;
  TouchCounter(const TouchCounter& o)
    : value_(o.get())
  {
  }
  TouchCounter& operator=(const TouchCounter& o)
  {
    value_.store(o.get());
    return *this;
  }
  void add(std::uint64_t n) const { value_.fetch_add(n, std::memory_order_relaxed); }
  [[nodiscard]] std::uint64_t get() const { return value_.load(std::memory_order_relaxed); }
  void reset() const { value_.store(0); }

private:
  mutable std::atomic<std::uint64_t> value_{0};
};

struct RawSlice
{
  std::string traj_id;
  std::size_t first_index = 0; // index of points[0] within the trajectory
  std::vector<TimedPoint> points;
};

// Append-only per-trajectory point log. Each trajectory keeps the timestamp
// of every kBlockSize-th point as a sparse index for time slicing.
class RawStore
{
public:
  static constexpr std::size_t kBlockSize = 1024;

  // Throws OutOfOrder if t precedes the trajectory's last timestamp.
  void append(const std::string& traj_id, double t, Vec2 pos);

  // Points with t in [t0, t1], time ordered. Throws NotFound / InvalidArgument.
  [[nodiscard]] RawSlice slice(const std::string& traj_id, double t0, double t1) const;
  // As slice, plus the last point before t0 and the first after t1 when they
  // exist, so positions anywhere in [t0, t1] can be interpolated.
  [[nodiscard]] RawSlice slice_bracketed(const std::string& traj_id, double t0, double t1) const;
  // Whole trajectory; counted as touching every point.
  [[nodiscard]] SampledTrajectory trajectory(const std::string& traj_id) const;

  [[nodiscard]] bool contains(const std::string& traj_id) const { return trajs_.contains(traj_id); }
  [[nodiscard]] std::size_t size(const std::string& traj_id) const;
  [[nodiscard]] std::size_t total_points() const { return total_; }
  // Ids in first-appended order.
  [[nodiscard]] const std::vector<std::string>& ids() const { return order_; }
  [[nodiscard]] std::optional<double> last_time(const std::string& traj_id) const;

  [[nodiscard]] std::uint64_t points_touched() const { return touched_.get(); }
  void reset_touch_counter() const { touched_.reset(); }

  // Binary layout: "TSRAW001", per-trajectory runs of (t, x, y) float64
  // little-endian records, then a footer index, then the footer offset and
  // "TSRAWEND".
  void save(const std::filesystem::path& path) const;
  static RawStore load(const std::filesystem::path& path);
  [[nodiscard]] std::size_t serialized_bytes() const;

private:
  struct Track
  {
    std::vector<TimedPoint> points;
    std::vector<double> block_first_t;
  };

  const Track& track(const std::string& traj_id) const;
  std::pair<std::size_t, std::size_t> range(const Track& tr, double t0, double t1) const;

  std::unordered_map<std::string, Track> trajs_;
  std::vector<std::string> order_;
  std::size_t total_ = 0;
  TouchCounter touched_;
};

// Closed segment summaries with a uniform grid over summary circles.
class SegmentStore
{
public:
  explicit SegmentStore(double cell_size = 2.0);

  void add(SegmentSummary s);

  // Every summary whose reach circle meets rect and whose [t_start, t_end]
  // meets [t0, t1]. Since reach >= radius this includes every radius-circle
  // match. Sorted by (traj_id, start_idx).
  [[nodiscard]] std::vector<SegmentSummary> index_rect_candidates(const Rect& rect, double t0, double t1) const;

  [[nodiscard]] std::span<const SegmentSummary> for_trajectory(const std::string& traj_id) const;
  [[nodiscard]] bool contains(const std::string& traj_id) const { return by_traj_.contains(traj_id); }
  // Sorted ids.
  [[nodiscard]] std::vector<std::string> ids() const;
  [[nodiscard]] std::size_t size() const { return count_; }
  [[nodiscard]] double cell_size() const { return cell_; }
  [[nodiscard]] Rect trajectory_bounds(const std::string& traj_id) const;

  void save(const std::filesystem::path& path) const;
  static SegmentStore load(const std::filesystem::path& path);
  [[nodiscard]] std::size_t serialized_bytes() const;

private:
  struct Ref
  {
    std::uint32_t traj;
    std::uint32_t index;
  };
  using CellKey = std::uint64_t;
  CellKey key(std::int64_t cx, std::int64_t cy) const;
  std::int64_t cell_of(double v) const;

  double cell_;
  std::map<std::string, std::uint32_t> by_traj_;
  std::vector<std::vector<SegmentSummary>> slots_;
  std::unordered_map<CellKey, std::vector<Ref>> grid_;
  std::size_t count_ = 0;
};

// SegmentSummary <-> JSON object with a fixed field order:
// traj_id, centroid, t_rep, radius, n_points, start_idx, end_idx, t_start,
// t_end, kind, extent.
nlohmann::ordered_json summary_to_json(const SegmentSummary& s);
SegmentSummary summary_from_json(const nlohmann::json& j);
std::string summary_to_jsonl(const SegmentSummary& s); // one line, with '\n'

struct Projection
{
  enum class Kind { None, LocalEquirectangular };
  Kind kind = Kind::None;
  double lon0 = 0.0;
  double lat0 = 0.0;

  static constexpr double kEarthRadiusM = 6371008.8;
  // For LocalEquirectangular, (a, b) = (lon, lat) degrees mapped to metres
  // east/north of the origin: x = R*dlon*cos(lat0), y = R*dlat (radians).
  [[nodiscard]] Vec2 apply(double a, double b) const;
};

nlohmann::ordered_json projection_to_json(const Projection& p);
Projection projection_from_json(const nlohmann::json& j);

struct IngestOptions
{
  bool strict = false;
  Projection projection;
  bool flush_at_end = true;
};

struct IngestReport
{
  std::size_t rows = 0;
  std::size_t accepted = 0;
  std::size_t rejects = 0;
  std::size_t trajectories = 0;
  std::size_t summaries = 0;
  std::vector<std::string> errors; // first few diagnostics
};

nlohmann::ordered_json report_to_json(const IngestReport& r);

// Raw store, segment store and the stream engine feeding it.
class Database
{
public:
  explicit Database(const SegmenterParams& params, Projection projection = {});

  // Appends to the raw store and the engine; returns the closed summary, if
  // any, after adding it to the segment store.
  std::optional<SegmentSummary> ingest(const std::string& traj_id, double t, Vec2 pos);
  std::vector<SegmentSummary> flush_all();

  IngestReport ingest_csv(std::istream& in, const IngestOptions& options);
  IngestReport ingest_csv(const std::filesystem::path& path, const IngestOptions& options);

  [[nodiscard]] const RawStore& raw() const { return raw_; }
  [[nodiscard]] const SegmentStore& segments() const { return segments_; }
  [[nodiscard]] const SegmenterParams& params() const { return params_; }
  [[nodiscard]] const Projection& projection() const { return projection_; }
  [[nodiscard]] const StreamEngine& engine() const { return engine_; }

  // Flushes open segments, then writes meta.json, raw.bin and segments.bin.
  void save(const std::filesystem::path& dir);
  static Database open(const std::filesystem::path& dir);
  static bool exists(const std::filesystem::path& dir);

private:
  SegmenterParams params_;
  Projection projection_;
  RawStore raw_;
  SegmentStore segments_;
  StreamEngine engine_;
};

nlohmann::ordered_json params_to_json(const SegmenterParams& p);
SegmenterParams params_from_json(const nlohmann::json& j);

} // namespace trajseg

#pragma once

#include "core/model.hpp"
#include "core/store.hpp"

#include <limits>
#include <optional>
#include <span>
#include <string>
#include <variant>
#include <vector>

#include <nlohmann/json.hpp>

namespace trajseg {

enum class Metric { Hausdorff, Dtw };
enum class Provenance { IndexOnly, HybridRefined };

// Symmetric discrete Hausdorff distance between two point sets.
double hausdorff_distance(std::span<const Vec2> a, std::span<const Vec2> b);
// Unconstrained dynamic time warping with Euclidean ground distance, summed
// along the optimal path (not length-normalised).
double dtw_distance(std::span<const Vec2> a, std::span<const Vec2> b);
double traj_distance(std::span<const Vec2> a, std::span<const Vec2> b, Metric metric);

std::vector<Vec2> centroids_of(std::span<const SegmentSummary> summaries);

// Linear interpolation of a time-ordered sequence at t. Empty outside
// [front.t, back.t]. For repeated timestamps the last sample at t wins.
std::optional<Vec2> position_at(std::span<const TimedPoint> pts, double t);

struct RangeQuery
{
  Rect rect;
  double t0 = -std::numeric_limits<double>::infinity();
  double t1 = std::numeric_limits<double>::infinity();
};

struct KnnQuery
{
  std::optional<std::string> query_id;  // a stored trajectory, or
  std::vector<TimedPoint> query_points; // raw points segmented on the fly
  std::size_t k = 1;
  Metric metric = Metric::Hausdorff;
};

struct ClosestApproachQuery
{
  std::string id_a;
  std::string id_b;
};

// ids empty: every pair in the store. One id: that id against all others.
// Several: every pair within the set.
struct MeetQuery
{
  std::vector<std::string> ids;
  double dist_tol = 1.0;
  double time_tol = 1.0;
};

struct HybridMeetQuery
{
  std::string target_id;
  double exact_tol = 1.0;
  double time_tol = 1.0; // gap allowed when merging verified samples
};

using QuerySpec = std::variant<RangeQuery, KnnQuery, ClosestApproachQuery, MeetQuery, HybridMeetQuery>;

struct Neighbor
{
  std::string id;
  double distance = 0.0;
  friend bool operator==(const Neighbor&, const Neighbor&) = default;
};

struct RangeResult
{
  std::vector<std::string> ids; // sorted
};

struct KnnResult
{
  std::vector<Neighbor> neighbors;
  bool truncated = false; // k exceeded the population
};

struct ClosestApproachResult
{
  double t_a = 0.0;
  double t_b = 0.0;
  double distance = 0.0;
};

struct Meeting
{
  std::string id_a;
  std::string id_b;
  double t_begin = 0.0;
  double t_end = 0.0;
  double min_distance = 0.0;
  friend bool operator==(const Meeting&, const Meeting&) = default;
};

struct MeetResult
{
  std::vector<Meeting> meetings;
  std::uint64_t raw_points_touched = 0;
  std::size_t candidate_windows = 0;
};

struct QueryResult
{
  std::variant<RangeResult, KnnResult, ClosestApproachResult, MeetResult> payload;
  Provenance provenance = Provenance::IndexOnly;
  bool hybrid = false;
};

class DisjointTimeError : public Error
{
public:
  DisjointTimeError(std::string id_a, double a0, double a1, std::string id_b, double b0, double b1);
  std::string id_a;
  std::string id_b;
  double a_begin, a_end, b_begin, b_end;
};

RangeResult query_range(const Database& db, const Rect& rect, double t0, double t1);
KnnResult query_knn(const Database& db, const KnnQuery& q);
ClosestApproachResult query_closest_approach(const Database& db, const std::string& id_a, const std::string& id_b);
MeetResult query_meet(const Database& db, const MeetQuery& q);
MeetResult query_hybrid_meet(const Database& db, const HybridMeetQuery& q);

QueryResult run_query(const Database& db, const QuerySpec& spec);

QuerySpec query_spec_from_json(const nlohmann::json& j);
nlohmann::ordered_json query_spec_to_json(const QuerySpec& spec);
nlohmann::ordered_json query_result_to_json(const QueryResult& r);

} // namespace trajseg

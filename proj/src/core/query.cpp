#include "core/query.hpp"

#include "core/text.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <set>

namespace trajseg {

namespace {

using SampleKey = std::pair<int, std::size_t>; // (which trajectory, point index)

struct SampleDistance
{
  double t;
  double distance;
};

// Evaluates |a(t) - b(t)| at every sample time of either sequence that lies
// in [t_lo, t_hi]; the other sequence is interpolated.
void collect_sample_distances(std::span<const TimedPoint> a, std::size_t a_first, std::span<const TimedPoint> b,
                              std::size_t b_first, double t_lo, double t_hi,
                              std::map<SampleKey, SampleDistance>& out)
{
  auto sweep = [&](std::span<const TimedPoint> own, std::size_t first, std::span<const TimedPoint> other,
                   int which) {
    for (std::size_t k = 0; k < own.size(); ++k) {
      const double t = own[k].t;
      if (t < t_lo || t > t_hi) {
        continue;
      }
      if (auto q = position_at(other, t)) {
        out.emplace(SampleKey{which, first + k}, SampleDistance{t, dist(own[k].pos, *q)});
      }
    }
  };
  sweep(a, a_first, b, 0);
  sweep(b, b_first, a, 1);
}

std::vector<Meeting> merge_meetings(const std::string& id_a, const std::string& id_b,
                                    std::vector<SampleDistance> hits, double gap)
{
  std::sort(hits.begin(), hits.end(), [](const SampleDistance& x, const SampleDistance& y) { return x.t < y.t; });
  std::vector<Meeting> out;
  for (const auto& h : hits) {
    if (!out.empty() && h.t <= out.back().t_end + gap) {
      out.back().t_end = std::max(out.back().t_end, h.t);
      out.back().min_distance = std::min(out.back().min_distance, h.distance);
    } else {
      out.push_back({id_a, id_b, h.t, h.t, h.distance});
    }
  }
  return out;
}

struct Interval
{
  double begin;
  double end;
  double distance;
};

std::vector<Meeting> merge_intervals(const std::string& id_a, const std::string& id_b, std::vector<Interval> iv,
                                     double gap)
{
  std::sort(iv.begin(), iv.end(), [](const Interval& x, const Interval& y) {
    return x.begin < y.begin || (x.begin == y.begin && x.end < y.end);
  });
  std::vector<Meeting> out;
  for (const auto& i : iv) {
    if (!out.empty() && i.begin <= out.back().t_end + gap) {
      out.back().t_end = std::max(out.back().t_end, i.end);
      out.back().min_distance = std::min(out.back().min_distance, i.distance);
    } else {
      out.push_back({id_a, id_b, i.begin, i.end, i.distance});
    }
  }
  return out;
}

void require_positive(double v, const char* name)
{
  if (!(v > 0.0) || !std::isfinite(v)) {
    throw Error(ErrorCode::InvalidArgument, std::string(name) + " must be a finite value > 0");
  }
}

std::vector<std::pair<std::string, std::string>> meet_pairs(const Database& db, const std::vector<std::string>& ids)
{
  std::vector<std::pair<std::string, std::string>> pairs;
  const auto all = db.segments().ids();
  if (ids.size() == 1) {
    (void)db.segments().for_trajectory(ids[0]);
    for (const auto& other : all) {
      if (other != ids[0]) {
        pairs.emplace_back(ids[0], other);
      }
    }
    return pairs;
  }
  std::vector<std::string> set = ids.empty() ? all : ids;
  std::sort(set.begin(), set.end());
  set.erase(std::unique(set.begin(), set.end()), set.end());
  for (const auto& id : set) {
    (void)db.segments().for_trajectory(id);
  }
  for (std::size_t i = 0; i < set.size(); ++i) {
    for (std::size_t j = i + 1; j < set.size(); ++j) {
      pairs.emplace_back(set[i], set[j]);
    }
  }
  return pairs;
}

// Time span and box containing every position (sampled or interpolated) of
// the trajectory between the start of summary k and the start of k + 1.
struct Link
{
  double t0;
  double t1;
  Rect box;
};

std::vector<Link> links_of(std::span<const SegmentSummary> s)
{
  std::vector<Link> out;
  out.reserve(s.size());
  for (std::size_t k = 0; k < s.size(); ++k) {
    if (k + 1 < s.size()) {
      out.push_back({s[k].t_start, s[k + 1].t_start, s[k].extent.united(s[k + 1].extent)});
    } else {
      out.push_back({s[k].t_start, s[k].t_end, s[k].extent});
    }
  }
  return out;
}

std::string metric_name(Metric m) { return m == Metric::Dtw ? "dtw" : "hausdorff"; }

Metric metric_from(const std::string& s)
{
  if (s == "hausdorff") {
    return Metric::Hausdorff;
  }
  if (s == "dtw") {
    return Metric::Dtw;
  }
  throw Error(ErrorCode::Parse, "unknown metric '" + s + "'");
}

nlohmann::ordered_json meetings_json(const std::vector<Meeting>& ms)
{
  auto arr = nlohmann::ordered_json::array();
  for (const auto& m : ms) {
    nlohmann::ordered_json j;
    j["id_a"] = m.id_a;
    j["id_b"] = m.id_b;
    j["t_begin"] = m.t_begin;
    j["t_end"] = m.t_end;
    j["min_distance"] = m.min_distance;
    arr.push_back(std::move(j));
  }
  return arr;
}

double number_or(const nlohmann::json& j, const char* key, double fallback)
{
  if (!j.contains(key) || j.at(key).is_null()) {
    return fallback;
  }
  return j.at(key).get<double>();
}

} // namespace

DisjointTimeError::DisjointTimeError(std::string a, double a0, double a1, std::string b, double b0, double b1)
  : Error(ErrorCode::DisjointTime, "no temporal overlap: '" + a + "' spans [" + text::format_double(a0) + ", " +
                                     text::format_double(a1) + "], '" + b + "' spans [" +
                                     text::format_double(b0) + ", " + text::format_double(b1) + "]")
  , id_a(std::move(a))
  , id_b(std::move(b))
  , a_begin(a0)
  , a_end(a1)
  , b_begin(b0)
  , b_end(b1)
{
}

double hausdorff_distance(std::span<const Vec2> a, std::span<const Vec2> b)
{
  if (a.empty() || b.empty()) {
    throw Error(ErrorCode::EmptyInput, "hausdorff distance of an empty trajectory");
  }
  // Directed distance with early break: once some point of `to` is closer
  // than the running maximum, `p` cannot raise it.
  auto directed = [](std::span<const Vec2> from, std::span<const Vec2> to) {
    double cmax = 0.0;
    for (const Vec2& p : from) {
      double cmin = std::numeric_limits<double>::infinity();
      bool dominated = false;
      for (const Vec2& q : to) {
        const double d = dist2(p, q);
        if (d < cmax) {
          dominated = true;
          break;
        }
        cmin = std::min(cmin, d);
      }
      if (!dominated) {
        cmax = std::max(cmax, cmin);
      }
    }
    return cmax;
  };
  return std::sqrt(std::max(directed(a, b), directed(b, a)));
}

double dtw_distance(std::span<const Vec2> a, std::span<const Vec2> b)
{
  if (a.empty() || b.empty()) {
    throw Error(ErrorCode::EmptyInput, "dtw distance of an empty trajectory");
  }
  constexpr double inf = std::numeric_limits<double>::infinity();
  std::vector<double> prev(b.size() + 1, inf);
  std::vector<double> cur(b.size() + 1, inf);
  prev[0] = 0.0;
  for (std::size_t i = 1; i <= a.size(); ++i) {
    cur[0] = inf;
    for (std::size_t j = 1; j <= b.size(); ++j) {
      cur[j] = dist(a[i - 1], b[j - 1]) + std::min({prev[j], cur[j - 1], prev[j - 1]});
    }
    std::swap(prev, cur);
  }
  return prev[b.size()];
}

double traj_distance(std::span<const Vec2> a, std::span<const Vec2> b, Metric metric)
{
  return metric == Metric::Dtw ? dtw_distance(a, b) : hausdorff_distance(a, b);
}

std::vector<Vec2> centroids_of(std::span<const SegmentSummary> summaries)
{
  std::vector<Vec2> out;
  out.reserve(summaries.size());
  for (const auto& s : summaries) {
    out.push_back(s.centroid);
  }
  return out;
}

std::optional<Vec2> position_at(std::span<const TimedPoint> pts, double t)
{
  const auto it = std::upper_bound(pts.begin(), pts.end(), t, [](double v, const TimedPoint& p) { return v < p.t; });
  if (it == pts.begin()) {
    return std::nullopt;
  }
  const auto& lo = *(it - 1);
  if (lo.t == t) {
    return lo.pos;
  }
  if (it == pts.end()) {
    return std::nullopt;
  }
  const double s = (t - lo.t) / (it->t - lo.t);
  return lo.pos + s * (it->pos - lo.pos);
}

RangeResult query_range(const Database& db, const Rect& rect, double t0, double t1)
{
  RangeResult out;
  for (const auto& s : db.segments().index_rect_candidates(rect, t0, t1)) {
    if (out.ids.empty() || out.ids.back() != s.traj_id) {
      out.ids.push_back(s.traj_id);
    }
  }
  return out;
}

KnnResult query_knn(const Database& db, const KnnQuery& q)
{
  if (q.k < 1) {
    throw Error(ErrorCode::InvalidArgument, "k must be >= 1");
  }
  const auto ids = db.segments().ids();
  if (ids.empty()) {
    throw Error(ErrorCode::EmptyInput, "the segment store is empty");
  }
  std::vector<Vec2> query;
  if (q.query_id) {
    query = centroids_of(db.segments().for_trajectory(*q.query_id));
  } else {
    const SampledTrajectory traj("query", q.query_points);
    query = centroids_of(segment_trajectory(traj, db.params()).summaries);
  }

  KnnResult out;
  for (const auto& id : ids) {
    if (q.query_id && id == *q.query_id) {
      continue;
    }
    const auto other = centroids_of(db.segments().for_trajectory(id));
    out.neighbors.push_back({id, traj_distance(query, other, q.metric)});
  }
  std::stable_sort(out.neighbors.begin(), out.neighbors.end(), [](const Neighbor& a, const Neighbor& b) {
    return a.distance < b.distance || (a.distance == b.distance && a.id < b.id);
  });
  if (q.k >= out.neighbors.size()) {
    out.truncated = q.k > out.neighbors.size();
  } else {
    out.neighbors.resize(q.k);
  }
  return out;
}

ClosestApproachResult query_closest_approach(const Database& db, const std::string& id_a, const std::string& id_b)
{
  const auto sa = db.segments().for_trajectory(id_a);
  const auto sb = db.segments().for_trajectory(id_b);
  auto seq = [](std::span<const SegmentSummary> s) {
    std::vector<TimedPoint> out;
    for (const auto& x : s) {
      out.push_back({x.t_rep, x.centroid});
    }
    return out;
  };
  const auto a = seq(sa);
  const auto b = seq(sb);
  const double lo = std::max(a.front().t, b.front().t);
  const double hi = std::min(a.back().t, b.back().t);
  if (lo > hi) {
    throw DisjointTimeError(id_a, a.front().t, a.back().t, id_b, b.front().t, b.back().t);
  }

  std::vector<double> times;
  for (const auto* s : {&a, &b}) {
    for (const auto& p : *s) {
      if (p.t >= lo && p.t <= hi) {
        times.push_back(p.t);
      }
    }
  }
  std::sort(times.begin(), times.end());
  times.erase(std::unique(times.begin(), times.end()), times.end());

  auto offset = [&](double t) { return *position_at(a, t) - *position_at(b, t); };
  ClosestApproachResult best{times.front(), times.front(), std::hypot(offset(times.front()).x, offset(times.front()).y)};
  // Both sequences are linear between consecutive union times, so the
  // separation is minimised in closed form on each interval.
  for (std::size_t k = 0; k + 1 < times.size(); ++k) {
    const Vec2 d0 = offset(times[k]);
    const Vec2 d1 = offset(times[k + 1]);
    const Vec2 dd = d1 - d0;
    const double len2 = dd.x * dd.x + dd.y * dd.y;
    const double s = len2 > 0.0 ? std::clamp(-(d0.x * dd.x + d0.y * dd.y) / len2, 0.0, 1.0) : 0.0;
    const Vec2 d = d0 + s * dd;
    const double distance = std::hypot(d.x, d.y);
    if (distance < best.distance) {
      const double t = times[k] + s * (times[k + 1] - times[k]);
      best = {t, t, distance};
    }
  }
  return best;
}

MeetResult query_meet(const Database& db, const MeetQuery& q)
{
  require_positive(q.dist_tol, "dist_tol");
  if (!(q.time_tol >= 0.0)) {
    throw Error(ErrorCode::InvalidArgument, "time_tol must be >= 0");
  }
  MeetResult out;
  for (const auto& [id_a, id_b] : meet_pairs(db, q.ids)) {
    const auto sa = db.segments().for_trajectory(id_a);
    const auto sb = db.segments().for_trajectory(id_b);
    std::vector<Interval> hits;
    for (const auto& x : sa) {
      auto first = std::lower_bound(sb.begin(), sb.end(), x.t_rep - q.time_tol,
                                    [](const SegmentSummary& s, double v) { return s.t_rep < v; });
      for (auto it = first; it != sb.end() && it->t_rep <= x.t_rep + q.time_tol; ++it) {
        const double d = dist(x.centroid, it->centroid);
        if (d <= q.dist_tol + x.radius + it->radius) {
          hits.push_back({std::min(x.t_start, it->t_start), std::max(x.t_end, it->t_end), d});
        }
      }
    }
    auto merged = merge_intervals(id_a, id_b, std::move(hits), q.time_tol);
    out.meetings.insert(out.meetings.end(), merged.begin(), merged.end());
  }
  return out;
}

MeetResult query_hybrid_meet(const Database& db, const HybridMeetQuery& q)
{
  require_positive(q.exact_tol, "exact_tol");
  if (!(q.time_tol >= 0.0)) {
    throw Error(ErrorCode::InvalidArgument, "time_tol must be >= 0");
  }
  const auto target = db.segments().for_trajectory(q.target_id);
  const auto target_links = links_of(target);
  MeetResult out;

  for (const auto& other_id : db.segments().ids()) {
    if (other_id == q.target_id) {
      continue;
    }
    const auto other = db.segments().for_trajectory(other_id);
    const double common_lo = std::max(target.front().t_start, other.front().t_start);
    const double common_hi = std::min(target.back().t_end, other.back().t_end);
    if (common_lo > common_hi) {
      continue;
    }

    // Stage 1: summary-only candidate windows.
    std::vector<std::pair<double, double>> windows;
    for (const Link& la : target_links) {
      for (const Link& lb : links_of(other)) {
        const double w0 = std::max({la.t0, lb.t0, common_lo});
        const double w1 = std::min({la.t1, lb.t1, common_hi});
        if (w0 <= w1 && la.box.distance_to(lb.box) <= q.exact_tol) {
          windows.emplace_back(w0, w1);
        }
      }
    }
    if (windows.empty()) {
      continue;
    }
    std::sort(windows.begin(), windows.end());
    std::vector<std::pair<double, double>> merged{windows.front()};
    for (const auto& w : windows) {
      if (w.first <= merged.back().second) {
        merged.back().second = std::max(merged.back().second, w.second);
      } else {
        merged.push_back(w);
      }
    }
    out.candidate_windows += merged.size();

    // Stage 2: exact check on raw slices of the candidate windows.
    std::map<SampleKey, SampleDistance> samples;
    for (const auto& [w0, w1] : merged) {
      const RawSlice ra = db.raw().slice_bracketed(q.target_id, w0, w1);
      const RawSlice rb = db.raw().slice_bracketed(other_id, w0, w1);
      out.raw_points_touched += ra.points.size() + rb.points.size();
      collect_sample_distances(ra.points, ra.first_index, rb.points, rb.first_index, w0, w1, samples);
    }
    std::vector<SampleDistance> hits;
    for (const auto& [key, sd] : samples) {
      if (sd.distance <= q.exact_tol) {
        hits.push_back(sd);
      }
    }
    auto meetings = merge_meetings(q.target_id, other_id, std::move(hits), q.time_tol);
    out.meetings.insert(out.meetings.end(), meetings.begin(), meetings.end());
  }
  return out;
}

QueryResult run_query(const Database& db, const QuerySpec& spec)
{
  return std::visit(
    [&](const auto& q) -> QueryResult {
      using Q = std::decay_t<decltype(q)>;
      if constexpr (std::is_same_v<Q, RangeQuery>) {
        return {query_range(db, q.rect, q.t0, q.t1), Provenance::IndexOnly, false};
      } else if constexpr (std::is_same_v<Q, KnnQuery>) {
        return {query_knn(db, q), Provenance::IndexOnly, false};
      } else if constexpr (std::is_same_v<Q, ClosestApproachQuery>) {
        return {query_closest_approach(db, q.id_a, q.id_b), Provenance::IndexOnly, false};
      } else if constexpr (std::is_same_v<Q, MeetQuery>) {
        return {query_meet(db, q), Provenance::IndexOnly, false};
      } else {
        return {query_hybrid_meet(db, q), Provenance::HybridRefined, true};
      }
    },
    spec);
}

QuerySpec query_spec_from_json(const nlohmann::json& j)
{
  try {
    const std::string type = j.at("type").get<std::string>();
    if (type == "range") {
      RangeQuery q;
      const auto& r = j.at("rect");
      q.rect = {r.at(0).get<double>(), r.at(1).get<double>(), r.at(2).get<double>(), r.at(3).get<double>()};
      if (!q.rect.valid()) {
        throw Error(ErrorCode::InvalidArgument, "rect must be [min_x, min_y, max_x, max_y]");
      }
      q.t0 = number_or(j, "t0", q.t0);
      q.t1 = number_or(j, "t1", q.t1);
      if (q.t0 > q.t1) {
        throw Error(ErrorCode::InvalidArgument, "t0 must not exceed t1");
      }
      return q;
    }
    if (type == "knn") {
      KnnQuery q;
      if (j.contains("query_id")) {
        q.query_id = j.at("query_id").get<std::string>();
      } else {
        std::vector<TimedPoint> pts;
        for (const auto& p : j.at("query_points")) {
          pts.push_back({p.at(0).get<double>(), {p.at(1).get<double>(), p.at(2).get<double>()}});
        }
        q.query_points = std::move(pts);
      }
      const auto k = j.at("k").get<long long>();
      if (k < 1) {
        throw Error(ErrorCode::InvalidArgument, "k must be >= 1");
      }
      q.k = static_cast<std::size_t>(k);
      q.metric = metric_from(j.value("metric", std::string("hausdorff")));
      return q;
    }
    if (type == "closest_approach") {
      return ClosestApproachQuery{j.at("id_a").get<std::string>(), j.at("id_b").get<std::string>()};
    }
    if (type == "meet") {
      MeetQuery q;
      if (j.contains("ids")) {
        q.ids = j.at("ids").get<std::vector<std::string>>();
      }
      q.dist_tol = j.at("dist_tol").get<double>();
      q.time_tol = j.at("time_tol").get<double>();
      require_positive(q.dist_tol, "dist_tol");
      return q;
    }
    if (type == "hybrid_meet") {
      HybridMeetQuery q;
      q.target_id = j.at("target_id").get<std::string>();
      q.exact_tol = j.at("exact_tol").get<double>();
      q.time_tol = j.value("time_tol", q.time_tol);
      require_positive(q.exact_tol, "exact_tol");
      return q;
    }
    throw Error(ErrorCode::Parse, "unknown query type '" + type + "'");
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::Parse, std::string("query spec: ") + e.what());
  }
}

nlohmann::ordered_json query_spec_to_json(const QuerySpec& spec)
{
  nlohmann::ordered_json j;
  std::visit(
    [&](const auto& q) {
      using Q = std::decay_t<decltype(q)>;
      if constexpr (std::is_same_v<Q, RangeQuery>) {
        j["type"] = "range";
        j["rect"] = {q.rect.min_x, q.rect.min_y, q.rect.max_x, q.rect.max_y};
        if (std::isfinite(q.t0)) {
          j["t0"] = q.t0;
        }
        if (std::isfinite(q.t1)) {
          j["t1"] = q.t1;
        }
      } else if constexpr (std::is_same_v<Q, KnnQuery>) {
        j["type"] = "knn";
        if (q.query_id) {
          j["query_id"] = *q.query_id;
        } else {
          auto pts = nlohmann::ordered_json::array();
          for (const auto& p : q.query_points) {
            pts.push_back({p.t, p.pos.x, p.pos.y});
          }
          j["query_points"] = pts;
        }
        j["k"] = q.k;
        j["metric"] = metric_name(q.metric);
      } else if constexpr (std::is_same_v<Q, ClosestApproachQuery>) {
        j["type"] = "closest_approach";
        j["id_a"] = q.id_a;
        j["id_b"] = q.id_b;
      } else if constexpr (std::is_same_v<Q, MeetQuery>) {
        j["type"] = "meet";
        j["ids"] = q.ids;
        j["dist_tol"] = q.dist_tol;
        j["time_tol"] = q.time_tol;
      } else {
        j["type"] = "hybrid_meet";
        j["target_id"] = q.target_id;
        j["exact_tol"] = q.exact_tol;
        j["time_tol"] = q.time_tol;
      }
    },
    spec);
  return j;
}

nlohmann::ordered_json query_result_to_json(const QueryResult& r)
{
  nlohmann::ordered_json j;
  std::visit(
    [&](const auto& p) {
      using P = std::decay_t<decltype(p)>;
      if constexpr (std::is_same_v<P, RangeResult>) {
        j["type"] = "range";
        j["provenance"] = "index_only";
        j["ids"] = p.ids;
      } else if constexpr (std::is_same_v<P, KnnResult>) {
        j["type"] = "knn";
        j["provenance"] = "index_only";
        auto arr = nlohmann::ordered_json::array();
        for (const auto& n : p.neighbors) {
          nlohmann::ordered_json e;
          e["id"] = n.id;
          e["distance"] = n.distance;
          arr.push_back(std::move(e));
        }
        j["neighbors"] = arr;
        j["truncated"] = p.truncated;
      } else if constexpr (std::is_same_v<P, ClosestApproachResult>) {
        j["type"] = "closest_approach";
        j["provenance"] = "index_only";
        j["t_a"] = p.t_a;
        j["t_b"] = p.t_b;
        j["distance"] = p.distance;
      } else {
        j["type"] = r.hybrid ? "hybrid_meet" : "meet";
        j["provenance"] = r.provenance == Provenance::HybridRefined ? "hybrid_refined" : "index_only";
        j["meetings"] = meetings_json(p.meetings);
        if (r.hybrid) {
          j["raw_points_touched"] = p.raw_points_touched;
          j["candidate_windows"] = p.candidate_windows;
        }
      }
    },
    r.payload);
  return j;
}

} // namespace trajseg

#include "core/report.hpp"

#include "core/query.hpp"
#include "core/text.hpp"

#include <algorithm>
#include <cstdio>
#include <cmath>
#include <functional>
#include <sstream>

namespace trajseg {

PlotMode plot_mode_from_string(const std::string& s)
{
  if (s == "raw") {
    return PlotMode::Raw;
  }
  if (s == "segmented") {
    return PlotMode::Segmented;
  }
  if (s == "heatmap") {
    return PlotMode::Heatmap;
  }
  throw Error(ErrorCode::InvalidArgument, "plot mode must be raw, segmented or heatmap, got '" + s + "'");
}

namespace {

std::vector<SampledTrajectory> all_raw(const Database& db)
{
  std::vector<SampledTrajectory> out;
  out.reserve(db.raw().ids().size());
  for (const auto& id : db.raw().ids()) {
    out.push_back(db.raw().trajectory(id));
  }
  return out;
}

Rect segment_bounds(const Database& db)
{
  std::optional<Rect> r;
  for (const auto& id : db.segments().ids()) {
    const Rect b = db.segments().trajectory_bounds(id);
    r = r ? r->united(b) : b;
  }
  if (!r) {
    throw Error(ErrorCode::EmptyInput, "nothing to plot: the store has no segments");
  }
  return *r;
}

std::string colour_for(const std::string& id)
{
  const auto h = std::hash<std::string>{}(id) % 360;
  return "hsl(" + std::to_string(h) + ",70%,40%)";
}

std::string num(double v)
{
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.2f", v);
  return buf;
}

std::string escape_attr(const std::string& s)
{
  std::string out;
  for (char c : s) {
    switch (c) {
    case '&': out += "&amp;"; break;
    case '<': out += "&lt;"; break;
    case '>': out += "&gt;"; break;
    case '"': out += "&quot;"; break;
    default: out += c;
    }
  }
  return out;
}

struct Frame
{
  Rect b;
  double scale = 1.0;
  static constexpr double kSize = 800.0;
  static constexpr double kPad = 10.0;

  explicit Frame(const Rect& r)
    : b(r)
  {
    const double span = std::max({b.max_x - b.min_x, b.max_y - b.min_y, 1e-9});
    scale = (kSize - 2 * kPad) / span;
  }
  double x(double v) const { return kPad + (v - b.min_x) * scale; }
  double y(double v) const { return kSize - kPad - (v - b.min_y) * scale; }
};

void polyline(std::ostringstream& os, const Frame& f, const std::string& cls, const std::string& id,
              const std::vector<Vec2>& pts)
{
  os << "<polyline class=\"" << cls << "\" data-id=\"" << escape_attr(id) << "\" fill=\"none\" stroke=\""
     << colour_for(id) << "\" stroke-width=\"1\" points=\"";
  for (std::size_t i = 0; i < pts.size(); ++i) {
    os << (i ? " " : "") << num(f.x(pts[i].x)) << ',' << num(f.y(pts[i].y));
  }
  os << "\"/>\n";
}

} // namespace

HeatmapGrid database_heatmap(const Database& db, double cell, std::optional<Rect> bounds)
{
  const auto trajs = all_raw(db);
  if (trajs.empty()) {
    throw Error(ErrorCode::EmptyInput, "the store holds no raw points");
  }
  return heatmap_grid(trajs, cell, bounds ? *bounds : data_bounds(trajs));
}

std::string render_svg(const Database& db, PlotMode mode, double heatmap_cell)
{
  std::ostringstream os;
  os << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"800\" height=\"800\" viewBox=\"0 0 800 800\">\n";
  os << "<rect width=\"800\" height=\"800\" fill=\"white\"/>\n";

  if (mode == PlotMode::Raw) {
    const auto trajs = all_raw(db);
    if (trajs.empty()) {
      throw Error(ErrorCode::EmptyInput, "nothing to plot: the store has no raw points");
    }
    const Frame f(data_bounds(trajs));
    for (const auto& tr : trajs) {
      std::vector<Vec2> pts;
      pts.reserve(tr.size());
      for (const auto& p : tr.points()) {
        pts.push_back(p.pos);
      }
      polyline(os, f, "raw", tr.id(), pts);
    }
  } else if (mode == PlotMode::Segmented) {
    const Frame f(segment_bounds(db));
    for (const auto& id : db.segments().ids()) {
      const auto sums = db.segments().for_trajectory(id);
      polyline(os, f, "segmented", id, centroids_of(sums));
      for (const auto& s : sums) {
        if (s.kind == SegmentKind::Local) {
          os << "<circle class=\"local\" cx=\"" << num(f.x(s.centroid.x)) << "\" cy=\"" << num(f.y(s.centroid.y))
             << "\" r=\"" << num(std::max(2.0, s.radius * f.scale)) << "\" fill=\"red\" fill-opacity=\"0.5\"/>\n";
        }
      }
    }
  } else {
    const HeatmapGrid g = database_heatmap(db, heatmap_cell);
    const Frame f(g.bounds);
    const auto peak = *std::max_element(g.counts.begin(), g.counts.end());
    const double denom = std::log1p(static_cast<double>(peak));
    const double side = g.cell * f.scale;
    os << "<g class=\"heatmap\" data-cols=\"" << g.cols << "\" data-rows=\"" << g.rows << "\" data-cell=\""
       << text::format_double(g.cell) << "\">\n";
    for (std::size_t r = 0; r < g.rows; ++r) {
      for (std::size_t c = 0; c < g.cols; ++c) {
        const auto n = g.at(c, r);
        if (n == 0) {
          continue;
        }
        const double v = denom > 0 ? std::log1p(static_cast<double>(n)) / denom : 1.0;
        const double x0 = g.bounds.min_x + static_cast<double>(c) * g.cell;
        const double y1 = g.bounds.min_y + static_cast<double>(r + 1) * g.cell;
        os << "<rect class=\"cell\" data-count=\"" << n << "\" x=\"" << num(f.x(x0)) << "\" y=\"" << num(f.y(y1))
           << "\" width=\"" << num(side) << "\" height=\"" << num(side) << "\" fill=\"rgb(255,"
           << static_cast<int>(255 * (1 - v)) << ",0)\"/>\n";
      }
    }
    os << "</g>\n";
  }
  os << "</svg>\n";
  return os.str();
}

std::size_t count_polyline_vertices(const std::string& svg)
{
  std::size_t total = 0;
  std::size_t pos = 0;
  while ((pos = svg.find("<polyline", pos)) != std::string::npos) {
    const auto attr = svg.find(" points=\"", pos);
    if (attr == std::string::npos) {
      break;
    }
    const auto begin = attr + 9;
    const auto end = svg.find('"', begin);
    for (const auto& tok : text::split(std::string_view(svg).substr(begin, end - begin), ' ')) {
      if (!text::trim(tok).empty()) {
        ++total;
      }
    }
    pos = end;
  }
  return total;
}

nlohmann::ordered_json store_stats(const Database& db)
{
  const auto& params = db.params();
  std::size_t locomotive = 0;
  std::size_t local = 0;
  double loco_length = 0.0;
  for (const auto& id : db.segments().ids()) {
    const auto sums = db.segments().for_trajectory(id);
    std::optional<SampledTrajectory> tr;
    if (db.raw().contains(id)) {
      tr = db.raw().trajectory(id);
    }
    for (const auto& s : sums) {
      if (s.kind == SegmentKind::Local) {
        ++local;
        continue;
      }
      ++locomotive;
      // Chord rather than polyline length: segments cut out of a jittery
      // cloud would otherwise count their noise as travel.
      if (tr && s.end_idx <= tr->size() && s.end_idx > s.start_idx) {
        loco_length += dist((*tr)[s.start_idx].pos, (*tr)[s.end_idx - 1].pos);
      }
    }
  }
  const std::size_t raw_points = db.raw().total_points();
  const std::size_t summaries = db.segments().size();
  const std::size_t raw_bytes = db.raw().serialized_bytes();
  const std::size_t index_bytes = db.segments().serialized_bytes();

  nlohmann::ordered_json j;
  j["trajectories"] = db.raw().ids().size();
  j["raw_points"] = raw_points;
  j["summaries"] = summaries;
  j["locomotive_summaries"] = locomotive;
  j["local_summaries"] = local;
  j["open_segments"] = db.engine().live_count();
  j["measured_ratio"] = raw_points ? static_cast<double>(summaries) / static_cast<double>(raw_points) : 0.0;
  j["locomotive_length"] = loco_length;
  j["estimated_ratio"] =
    raw_points ? (loco_length / params.min_r + static_cast<double>(local)) / static_cast<double>(raw_points) : 0.0;
  j["raw_bytes"] = raw_bytes;
  j["index_bytes"] = index_bytes;
  j["index_fraction"] = raw_bytes ? static_cast<double>(index_bytes) / static_cast<double>(raw_bytes) : 0.0;
  j["params"] = params_to_json(params);
  return j;
}

} // namespace trajseg

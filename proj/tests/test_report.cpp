#include "core/report.hpp"

#include <gtest/gtest.h>

#include <regex>

using namespace trajseg;

namespace {

Database demo_db()
{
  Database db(demo_segmenter_params());
  for (const auto& t : generate(demo_gen_spec(8, 4))) {
    for (const auto& p : t.points()) {
      db.ingest(t.id(), p.t, p.pos);
    }
  }
  db.flush_all();
  return db;
}

std::size_t count_of(const std::string& svg, const std::string& needle)
{
  std::size_t n = 0;
  for (auto pos = svg.find(needle); pos != std::string::npos; pos = svg.find(needle, pos + 1)) {
    ++n;
  }
  return n;
}

} // namespace

TEST(Svg, RawAndSegmentedVertexCounts)
{
  const Database db = demo_db();
  const std::string raw = render_svg(db, PlotMode::Raw, 20);
  const std::string seg = render_svg(db, PlotMode::Segmented, 20);
  EXPECT_EQ(count_polyline_vertices(raw), db.raw().total_points());
  EXPECT_EQ(count_polyline_vertices(seg), db.segments().size());
  EXPECT_EQ(count_of(raw, "<polyline"), 8u);
  EXPECT_EQ(count_of(seg, "<polyline"), 8u);
  std::size_t local = 0;
  for (const auto& id : db.segments().ids()) {
    for (const auto& s : db.segments().for_trajectory(id)) {
      local += s.kind == SegmentKind::Local;
    }
  }
  EXPECT_EQ(count_of(seg, "<circle class=\"local\""), local);
  EXPECT_NE(seg.find("<svg"), std::string::npos);
}

TEST(Svg, HeatmapCellsHoldAllPoints)
{
  const Database db = demo_db();
  const std::string svg = render_svg(db, PlotMode::Heatmap, 20);
  const std::regex count_re("data-count=\"(\\d+)\"");
  std::uint64_t total = 0;
  for (auto it = std::sregex_iterator(svg.begin(), svg.end(), count_re); it != std::sregex_iterator(); ++it) {
    total += std::stoull((*it)[1]);
  }
  EXPECT_EQ(total, db.raw().total_points());
  EXPECT_EQ(database_heatmap(db, 20).total(), db.raw().total_points());
}

TEST(Svg, ModesAndEmptyStore)
{
  EXPECT_EQ(plot_mode_from_string("heatmap"), PlotMode::Heatmap);
  EXPECT_THROW(plot_mode_from_string("pie"), Error);
  const Database empty(demo_segmenter_params());
  EXPECT_THROW(render_svg(empty, PlotMode::Raw, 1), Error);
  EXPECT_EQ(count_polyline_vertices("<polyline points=\"0,0 1,1 2,2\"/><polyline points=\"\"/>"), 3u);
}

TEST(Stats, CountsAndSizes)
{
  const Database db = demo_db();
  const auto j = store_stats(db);
  EXPECT_EQ(j["trajectories"], 8);
  EXPECT_EQ(j["raw_points"], db.raw().total_points());
  EXPECT_EQ(j["summaries"], db.segments().size());
  EXPECT_EQ(j["locomotive_summaries"].get<std::size_t>() + j["local_summaries"].get<std::size_t>(),
            db.segments().size());
  EXPECT_EQ(j["open_segments"], 0);
  EXPECT_EQ(j["raw_bytes"], db.raw().serialized_bytes());
  EXPECT_EQ(j["index_bytes"], db.segments().serialized_bytes());
  const double measured = j["measured_ratio"];
  const double estimated = j["estimated_ratio"];
  EXPECT_GT(estimated / measured, 0.5);
  EXPECT_LT(estimated / measured, 2.0);
  EXPECT_EQ(j["params"]["min_r"], 10.0);
}

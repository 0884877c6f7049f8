#include "core/segmenter.hpp"
#include "core/synth.hpp"
#include "oracles.hpp"

#include <gtest/gtest.h>

#include <random>

using namespace trajseg;

namespace {

SampledTrajectory make(const std::vector<Vec2>& pts, const std::string& id = "t")
{
  std::vector<TimedPoint> tp;
  for (std::size_t i = 0; i < pts.size(); ++i) {
    tp.push_back({static_cast<double>(i), pts[i]});
  }
  return {id, tp};
}

std::vector<oracle::P> to_oracle(const SampledTrajectory& t)
{
  std::vector<oracle::P> out;
  for (const auto& p : t.points()) {
    out.push_back({p.pos.x, p.pos.y});
  }
  return out;
}

SegmenterParams params(double r, double d)
{
  SegmenterParams p;
  p.min_r = r;
  p.min_density = d;
  return p;
}

void expect_matches_trace(const SampledTrajectory& traj, const SegmenterParams& p)
{
  const auto pts = to_oracle(traj);
  const auto tr = oracle::segment_trace(pts, p.min_r, p.min_density);
  const auto radii = oracle::trace_radii(pts, tr);
  const auto res = segment_trajectory(traj, p);
  ASSERT_EQ(res.segmentation.cutoffs, tr.cutoffs);
  ASSERT_EQ(res.summaries.size(), tr.centroids.size());
  for (std::size_t k = 0; k < tr.centroids.size(); ++k) {
    EXPECT_EQ(res.summaries[k].centroid.x, tr.centroids[k].x);
    EXPECT_EQ(res.summaries[k].centroid.y, tr.centroids[k].y);
    EXPECT_EQ(res.summaries[k].radius, radii[k]);
    EXPECT_EQ(res.summaries[k].kind == SegmentKind::Local, static_cast<bool>(tr.local[k]));
  }
}

} // namespace

TEST(Segmenter, StraightLineCutsAtMinRadius)
{
  std::vector<Vec2> pts;
  for (int i = 0; i < 10; ++i) {
    pts.push_back({static_cast<double>(i), 0});
  }
  const auto res = segment_trajectory(make(pts), params(2.0, 10.0));
  // point 3 is exactly 2 from the centroid of {0,1,2}; point 4 is 2.5 away
  ASSERT_GE(res.segmentation.cutoffs.size(), 3u);
  EXPECT_EQ(res.segmentation.cutoffs[1], 4u);
  EXPECT_TRUE(validate_segmentation(10, res.segmentation));
  for (const auto& s : res.summaries) {
    EXPECT_EQ(s.kind, SegmentKind::Locomotive);
  }
  expect_matches_trace(make(pts), params(2.0, 10.0));
}

TEST(Segmenter, SinglePointAndDuplicates)
{
  const auto one = segment_trajectory(make({{3, 3}}), params(1, 1));
  ASSERT_EQ(one.summaries.size(), 1u);
  EXPECT_EQ(one.summaries[0].n_points, 1u);
  EXPECT_EQ(one.summaries[0].radius, 0.0);

  const auto same = segment_trajectory(make({{3, 3}, {3, 3}, {3, 3}}), params(1, 1));
  ASSERT_EQ(same.summaries.size(), 1u);
  EXPECT_EQ(same.summaries[0].n_points, 3u);
}

TEST(Segmenter, MatchesTraceOnRandomWalks)
{
  std::mt19937_64 rng(3);
  std::normal_distribution<double> step(0.0, 1.0);
  for (int trial = 0; trial < 50; ++trial) {
    std::vector<Vec2> pts{{0, 0}};
    for (int i = 0; i < 300; ++i) {
      pts.push_back(pts.back() + Vec2{step(rng), step(rng)});
    }
    expect_matches_trace(make(pts), params(1.0 + trial % 5, 0.05 * (1 + trial % 7)));
  }
}

TEST(Segmenter, DenseCloudIsLocal)
{
  std::mt19937_64 rng(5);
  std::normal_distribution<double> g(0.0, 3.0);
  std::vector<Vec2> pts;
  for (int i = 0; i < 500; ++i) {
    pts.push_back({g(rng), g(rng)});
  }
  const auto res = segment_trajectory(make(pts), params(2.0, 0.01 / 9));
  std::size_t local_points = 0;
  for (const auto& s : res.summaries) {
    if (s.kind == SegmentKind::Local) {
      local_points += s.n_points;
    }
  }
  EXPECT_GT(local_points, 400u);
}

TEST(Segmenter, TimeRepresentative)
{
  std::vector<TimedPoint> tp{{0, {0, 0}}, {1, {0.1, 0}}, {5, {0.2, 0}}};
  const SampledTrajectory traj("a", tp);
  auto p = params(10, 1);
  auto s = segment_trajectory(traj, p).summaries.at(0);
  EXPECT_DOUBLE_EQ(s.t_rep, 2.0);
  EXPECT_DOUBLE_EQ(s.t_start, 0.0);
  EXPECT_DOUBLE_EQ(s.t_end, 5.0);
  p.t_rep_mode = TRepMode::StartTime;
  s = segment_trajectory(traj, p).summaries.at(0);
  EXPECT_DOUBLE_EQ(s.t_rep, 0.0);
}

TEST(Segmenter, ExtentContainsAllPoints)
{
  std::mt19937_64 rng(9);
  std::normal_distribution<double> step(0.0, 2.0);
  std::vector<Vec2> pts{{0, 0}};
  for (int i = 0; i < 1000; ++i) {
    pts.push_back(pts.back() + Vec2{step(rng), step(rng)});
  }
  const auto traj = make(pts);
  for (const auto& s : segment_trajectory(traj, params(3, 0.1)).summaries) {
    for (std::size_t i = s.start_idx; i < s.end_idx; ++i) {
      ASSERT_TRUE(s.extent.contains(traj[i].pos));
      ASSERT_LE(dist(s.centroid, traj[i].pos), s.reach() + 1e-9);
    }
  }
}

TEST(Segmenter, BoundingRectEstimator)
{
  std::vector<Vec2> pts;
  for (int i = 0; i < 20; ++i) {
    pts.push_back({static_cast<double>(i), 0.0});
  }
  auto p = params(2.0, 0.5);
  p.estimator = Estimator::BoundingRect;
  // A degenerate rectangle has zero area: infinite density, never cut.
  EXPECT_EQ(segment_trajectory(make(pts), p).summaries.size(), 1u);
  pts.push_back({20, 5});
  EXPECT_EQ(segment_trajectory(make(pts), p).summaries.size(), 2u);
}

TEST(Segmenter, RejectsOutOfOrderAndNonFinite)
{
  Segmenter seg(params(1, 1), "a", 5.0, {0, 0});
  try {
    seg.push(4.0, {0, 0});
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::OutOfOrder);
  }
  try {
    seg.push(6.0, {std::numeric_limits<double>::infinity(), 0});
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::NonFinite);
  }
  EXPECT_NO_THROW(seg.push(5.0, {0, 0}));
}

TEST(StreamEngine, InterleavedEqualsBatch)
{
  const auto trajs = generate(demo_gen_spec(5, 17));
  const auto p = demo_segmenter_params();
  std::vector<std::vector<SegmentSummary>> batch;
  for (const auto& t : trajs) {
    batch.push_back(segment_trajectory(t, p).summaries);
  }
  std::mt19937_64 rng(1);
  for (int trial = 0; trial < 5; ++trial) {
    StreamEngine engine(p);
    std::vector<std::size_t> cursor(trajs.size(), 0);
    std::vector<std::vector<SegmentSummary>> got(trajs.size());
    std::size_t remaining = 0;
    for (const auto& t : trajs) {
      remaining += t.size();
    }
    while (remaining > 0) {
      std::size_t k = rng() % trajs.size();
      while (cursor[k] == trajs[k].size()) {
        k = (k + 1) % trajs.size();
      }
      const auto& pt = trajs[k][cursor[k]++];
      if (auto s = engine.ingest(trajs[k].id(), pt.t, pt.pos)) {
        got[k].push_back(*s);
      }
      --remaining;
    }
    for (const auto& s : engine.flush_all()) {
      for (std::size_t k = 0; k < trajs.size(); ++k) {
        if (trajs[k].id() == s.traj_id) {
          got[k].push_back(s);
        }
      }
    }
    EXPECT_EQ(got, batch);
    EXPECT_EQ(engine.live_count(), 0u);
  }
}

TEST(StreamEngine, FlushAndResumeKeepsIndices)
{
  StreamEngine engine(params(1, 1));
  engine.ingest("a", 0, {0, 0});
  engine.ingest("a", 1, {0.1, 0});
  const auto s = engine.flush("a");
  EXPECT_EQ(s.end_idx, 2u);
  EXPECT_FALSE(engine.contains("a"));
  engine.ingest("a", 2, {0.2, 0}, 2);
  EXPECT_EQ(engine.flush("a").start_idx, 2u);
  EXPECT_THROW(engine.flush("missing"), Error);
}

TEST(StreamEngine, StateIsFixedSize)
{
  StreamEngine engine(params(1, 0.5));
  engine.ingest("a", 0, {0, 0});
  const std::size_t before = engine.state_bytes();
  for (int i = 1; i < 10000; ++i) {
    engine.ingest("a", i, {std::sin(i * 0.01) * 3, std::cos(i * 0.013) * 3});
  }
  EXPECT_EQ(engine.state_bytes(), before);
  EXPECT_EQ(before, sizeof(SegmenterState));
}

TEST(Hierarchy, LevelsShrinkAndRequireIncreasingRadius)
{
  const auto traj = generate(demo_gen_spec(1, 3)).at(0);
  std::vector<SegmenterParams> ladder{params(10, 0.3), params(20, 0.3 / 4), params(40, 0.3 / 16)};
  const auto levels = segment_hierarchy(traj, ladder);
  ASSERT_EQ(levels.size(), 3u);
  EXPECT_LE(levels[1].size(), levels[0].size());
  EXPECT_LE(levels[2].size(), levels[1].size());
  std::swap(ladder[0], ladder[1]);
  EXPECT_THROW(segment_hierarchy(traj, ladder), Error);
}

TEST(Compression, Formula)
{
  EXPECT_DOUBLE_EQ(estimate_compression(100, 10, 50, 50), 11.0 / 100.0);
  EXPECT_THROW(estimate_compression(1, 0, 1, 1), Error);
}

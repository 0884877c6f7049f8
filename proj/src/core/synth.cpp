#include "core/synth.hpp"

#include "core/text.hpp"

#include <nlohmann/json.hpp>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numbers>
#include <random>

namespace trajseg {

namespace {

std::uint64_t splitmix64(std::uint64_t x)
{
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

// mt19937_64 output is fixed by the standard; the distributions below are
// written out so the stream of doubles is identical on every platform.
class Rng
{
public:
  explicit Rng(std::uint64_t seed)
    : engine_(seed)
  {
  }

  double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }
  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }
  std::size_t uniform_int(std::size_t lo, std::size_t hi)
  {
    return lo + static_cast<std::size_t>(uniform() * static_cast<double>(hi - lo + 1));
  }

  // Box-Muller; both variates of a pair are used.
  double normal()
  {
    if (has_spare_) {
      has_spare_ = false;
      return spare_;
    }
    double u1 = uniform();
    while (u1 <= 0.0) {
      u1 = uniform();
    }
    const double u2 = uniform();
    const double mag = std::sqrt(-2.0 * std::log(u1));
    spare_ = mag * std::sin(2.0 * std::numbers::pi * u2);
    has_spare_ = true;
    return mag * std::cos(2.0 * std::numbers::pi * u2);
  }

  Vec2 normal2(double sigma)
  {
    const double a = normal();
    const double b = normal();
    return {sigma * a, sigma * b};
  }

private:
  std::mt19937_64 engine_;
  bool has_spare_ = false;
  double spare_ = 0.0;
};

double wrap_angle(double a)
{
  return std::remainder(a, 2.0 * std::numbers::pi);
}

GeneratedTrajectory generate_one(const GenSpec& spec, std::size_t index)
{
  Rng rng(splitmix64(spec.seed ^ splitmix64(index + 1)));
  Vec2 walker{rng.uniform(-spec.origin_spread, spec.origin_spread),
              rng.uniform(-spec.origin_spread, spec.origin_spread)};
  double heading = rng.uniform(-std::numbers::pi, std::numbers::pi);

  std::vector<TimedPoint> pts;
  std::vector<BoutTruth> truth;
  for (const BoutSpec& bout : spec.bouts_for(index)) {
    BoutTruth bt{bout.kind, pts.size(), pts.size(), walker, 0.0};
    for (std::size_t k = 0; k < bout.duration; ++k) {
      const double t = static_cast<double>(pts.size());
      Vec2 p;
      if (bout.kind == SegmentKind::Locomotive) {
        heading = wrap_angle(heading + (1.0 - bout.heading_persistence) * std::numbers::pi * rng.normal());
        walker = walker + bout.step_len * Vec2{std::cos(heading), std::sin(heading)};
        bt.path_length += bout.step_len;
        p = walker;
      } else {
        p = bt.anchor + rng.normal2(bout.cloud_sigma);
      }
      if (bout.noise_sigma > 0.0) {
        p = p + rng.normal2(bout.noise_sigma);
      }
      pts.push_back({t, p});
    }
    bt.end = pts.size();
    truth.push_back(bt);
  }
  return {SampledTrajectory(trajectory_id(index), std::move(pts)), std::move(truth)};
}

BoutSpec bout_from_json(const nlohmann::json& j)
{
  BoutSpec b;
  b.kind = segment_kind_from_string(j.at("kind").get<std::string>());
  b.duration = j.at("duration").get<std::size_t>();
  b.step_len = j.value("step_len", b.step_len);
  b.cloud_sigma = j.value("cloud_sigma", b.cloud_sigma);
  b.heading_persistence = j.value("heading_persistence", b.heading_persistence);
  b.noise_sigma = j.value("noise_sigma", b.noise_sigma);
  return b;
}

} // namespace

void GenSpec::validate() const
{
  if (n_trajectories < 1) {
    throw Error(ErrorCode::InvalidArgument, "n_trajectories must be >= 1");
  }
  if (bouts.empty() || (bouts.size() != 1 && bouts.size() != n_trajectories)) {
    throw Error(ErrorCode::InvalidArgument, "bouts must hold one list or one list per trajectory");
  }
  if (!(origin_spread >= 0.0) || !std::isfinite(origin_spread)) {
    throw Error(ErrorCode::InvalidArgument, "origin_spread must be finite and >= 0");
  }
  for (const auto& list : bouts) {
    if (list.empty()) {
      throw Error(ErrorCode::InvalidArgument, "a trajectory needs at least one bout");
    }
    for (const auto& b : list) {
      if (b.duration < 1) {
        throw Error(ErrorCode::InvalidArgument, "bout duration must be >= 1");
      }
      if (b.kind == SegmentKind::Locomotive && !(b.step_len > 0.0)) {
        throw Error(ErrorCode::InvalidArgument, "locomotive step_len must be > 0");
      }
      if (b.kind == SegmentKind::Local && !(b.cloud_sigma > 0.0)) {
        throw Error(ErrorCode::InvalidArgument, "local cloud_sigma must be > 0");
      }
      if (!(b.heading_persistence >= 0.0 && b.heading_persistence <= 1.0)) {
        throw Error(ErrorCode::InvalidArgument, "heading_persistence must be in [0, 1]");
      }
      if (!(b.noise_sigma >= 0.0)) {
        throw Error(ErrorCode::InvalidArgument, "noise_sigma must be >= 0");
      }
    }
  }
}

const std::vector<BoutSpec>& GenSpec::bouts_for(std::size_t traj) const
{
  return bouts.size() == 1 ? bouts.front() : bouts.at(traj);
}

std::vector<GeneratedTrajectory> generate_detailed(const GenSpec& spec)
{
  spec.validate();
  std::vector<GeneratedTrajectory> out;
  out.reserve(spec.n_trajectories);
  for (std::size_t i = 0; i < spec.n_trajectories; ++i) {
    out.push_back(generate_one(spec, i));
  }
  return out;
}

std::vector<SampledTrajectory> generate(const GenSpec& spec)
{
  std::vector<SampledTrajectory> out;
  for (auto& g : generate_detailed(spec)) {
    out.push_back(std::move(g.trajectory));
  }
  return out;
}

SegmenterParams demo_segmenter_params()
{
  SegmenterParams p;
  p.min_r = 10.0;
  p.min_density = 0.3;
  return p;
}

GenSpec demo_gen_spec(std::size_t n_trajectories, std::uint64_t seed)
{
  GenSpec spec;
  spec.seed = seed;
  spec.n_trajectories = n_trajectories;
  // Area grows with the population so crowding matches the 20-trajectory set.
  spec.origin_spread = 150.0 * std::sqrt(static_cast<double>(n_trajectories) / 20.0);
  Rng rng(splitmix64(seed));
  for (std::size_t i = 0; i < n_trajectories; ++i) {
    std::vector<BoutSpec> list;
    const std::size_t n_bouts = rng.uniform_int(2, 5);
    for (std::size_t b = 0; b < n_bouts; ++b) {
      BoutSpec bout;
      if (b % 2 == 0) {
        bout.kind = SegmentKind::Locomotive;
        bout.duration = rng.uniform_int(150, 400);
        bout.step_len = 0.5;
        bout.heading_persistence = 0.97;
        bout.noise_sigma = 0.05;
      } else {
        bout.kind = SegmentKind::Local;
        bout.duration = rng.uniform_int(300, 700);
        bout.cloud_sigma = 3.0;
        bout.noise_sigma = 0.05;
      }
      list.push_back(bout);
    }
    spec.bouts.push_back(std::move(list));
  }
  return spec;
}

GenSpec gen_spec_from_json(const std::string& text)
{
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(text);
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::Parse, std::string("generator spec: ") + e.what());
  }
  try {
    const std::uint64_t seed = j.value("seed", std::uint64_t{42});
    const std::size_t n = j.value("n_trajectories", std::size_t{20});
    GenSpec spec = demo_gen_spec(n, seed);
    spec.origin_spread = j.value("origin_spread", spec.origin_spread);
    if (j.contains("bouts")) {
      const auto& b = j.at("bouts");
      spec.bouts.clear();
      if (!b.is_array() || b.empty()) {
        throw Error(ErrorCode::InvalidArgument, "bouts must be a non-empty array");
      }
      if (b.front().is_array()) {
        for (const auto& list : b) {
          std::vector<BoutSpec> bl;
          for (const auto& item : list) {
            bl.push_back(bout_from_json(item));
          }
          spec.bouts.push_back(std::move(bl));
        }
      } else {
        std::vector<BoutSpec> bl;
        for (const auto& item : b) {
          bl.push_back(bout_from_json(item));
        }
        spec.bouts.push_back(std::move(bl));
      }
    }
    spec.validate();
    return spec;
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::Parse, std::string("generator spec: ") + e.what());
  }
}

std::string trajectory_id(std::size_t index)
{
  char buf[32];
  std::snprintf(buf, sizeof(buf), "traj_%03zu", index);
  return buf;
}

std::string to_csv(std::span<const SampledTrajectory> trajs)
{
  struct Row
  {
    double t;
    std::size_t traj;
    std::size_t idx;
  };
  std::vector<Row> rows;
  for (std::size_t i = 0; i < trajs.size(); ++i) {
    for (std::size_t k = 0; k < trajs[i].size(); ++k) {
      rows.push_back({trajs[i][k].t, i, k});
    }
  }
  std::stable_sort(rows.begin(), rows.end(), [](const Row& a, const Row& b) {
    return a.t < b.t || (a.t == b.t && a.traj < b.traj);
  });
  std::string out = "traj_id,t,x,y\n";
  out.reserve(rows.size() * 48);
  for (const Row& r : rows) {
    const TimedPoint& p = trajs[r.traj][r.idx];
    out += trajs[r.traj].id();
    out += ',';
    out += text::format_double(p.t);
    out += ',';
    out += text::format_double(p.pos.x);
    out += ',';
    out += text::format_double(p.pos.y);
    out += '\n';
  }
  return out;
}

std::uint64_t HeatmapGrid::total() const
{
  std::uint64_t sum = 0;
  for (auto c : counts) {
    sum += c;
  }
  return sum;
}

double HeatmapGrid::top_cell_share(double fraction) const
{
  const std::uint64_t all = total();
  if (all == 0 || counts.empty()) {
    return 0.0;
  }
  std::vector<std::uint64_t> sorted = counts;
  std::sort(sorted.begin(), sorted.end(), std::greater<>());
  const auto k = std::max<std::size_t>(1, static_cast<std::size_t>(std::floor(fraction * sorted.size())));
  std::uint64_t top = 0;
  for (std::size_t i = 0; i < k; ++i) {
    top += sorted[i];
  }
  return static_cast<double>(top) / static_cast<double>(all);
}

Rect data_bounds(std::span<const SampledTrajectory> trajs)
{
  if (trajs.empty()) {
    throw Error(ErrorCode::EmptyInput, "no trajectories");
  }
  Rect r{trajs[0][0].pos.x, trajs[0][0].pos.y, trajs[0][0].pos.x, trajs[0][0].pos.y};
  for (const auto& tr : trajs) {
    for (const auto& p : tr.points()) {
      r = r.united({p.pos.x, p.pos.y, p.pos.x, p.pos.y});
    }
  }
  return r;
}

HeatmapGrid heatmap_grid(std::span<const SampledTrajectory> trajs, double cell, const Rect& bounds)
{
  if (!(cell > 0.0) || !std::isfinite(cell)) {
    throw Error(ErrorCode::InvalidArgument, "heatmap cell size must be > 0");
  }
  if (!bounds.valid() || !std::isfinite(bounds.max_x - bounds.min_x) ||
      !std::isfinite(bounds.max_y - bounds.min_y)) {
    throw Error(ErrorCode::EmptyInput, "heatmap bounds are empty");
  }
  HeatmapGrid g;
  g.bounds = bounds;
  g.cell = cell;
  g.cols = std::max<std::size_t>(1, static_cast<std::size_t>(std::ceil((bounds.max_x - bounds.min_x) / cell)));
  g.rows = std::max<std::size_t>(1, static_cast<std::size_t>(std::ceil((bounds.max_y - bounds.min_y) / cell)));
  g.counts.assign(g.cols * g.rows, 0);
  for (const auto& tr : trajs) {
    for (const auto& p : tr.points()) {
      if (!bounds.contains(p.pos)) {
        continue;
      }
      const auto c = std::min(g.cols - 1, static_cast<std::size_t>((p.pos.x - bounds.min_x) / cell));
      const auto r = std::min(g.rows - 1, static_cast<std::size_t>((p.pos.y - bounds.min_y) / cell));
      ++g.counts[r * g.cols + c];
    }
  }
  return g;
}

} // namespace trajseg

#pragma once

#include "core/model.hpp"

#include <cstdint>
#include <span>
#include <string>
#include <vector>

namespace trajseg {

struct BoutSpec
{
  SegmentKind kind = SegmentKind::Locomotive;
  std::size_t duration = 1;      // samples, 1 s apart
  double step_len = 1.0;         // locomotive
  double cloud_sigma = 1.0;      // local
  double heading_persistence = 0.9;
  double noise_sigma = 0.0;
};

struct GenSpec
{
  std::uint64_t seed = 42;
  std::size_t n_trajectories = 1;
  // Either one bout list per trajectory, or a single list shared by all.
  std::vector<std::vector<BoutSpec>> bouts;
  double origin_spread = 0.0;

  void validate() const;
  [[nodiscard]] const std::vector<BoutSpec>& bouts_for(std::size_t traj) const;
};

// Ground truth for one generated bout: indices [begin, end) into the trajectory.
struct BoutTruth
{
  SegmentKind kind = SegmentKind::Locomotive;
  std::size_t begin = 0;
  std::size_t end = 0;
  Vec2 anchor;              // cloud centre for local bouts, start point otherwise
  double path_length = 0.0; // noise-free walked length for locomotive bouts
};

struct GeneratedTrajectory
{
  SampledTrajectory trajectory;
  std::vector<BoutTruth> bouts;
};

std::vector<GeneratedTrajectory> generate_detailed(const GenSpec& spec);
std::vector<SampledTrajectory> generate(const GenSpec& spec);

// The parameters the demo datasets are tuned for.
SegmenterParams demo_segmenter_params();
// n trajectories with 2-5 alternating bouts each, starting with locomotion.
GenSpec demo_gen_spec(std::size_t n_trajectories = 20, std::uint64_t seed = 42);

// Reads a GenSpec from JSON. Missing "bouts" means demo bouts.
GenSpec gen_spec_from_json(const std::string& text);

std::string trajectory_id(std::size_t index);

// Points of all trajectories as `traj_id,t,x,y` CSV with a header, rows
// interleaved by timestamp.
std::string to_csv(std::span<const SampledTrajectory> trajs);

struct HeatmapGrid
{
  Rect bounds;
  double cell = 1.0;
  std::size_t cols = 0;
  std::size_t rows = 0;
  std::vector<std::uint64_t> counts; // row-major, row 0 at min_y

  [[nodiscard]] std::uint64_t at(std::size_t col, std::size_t row) const { return counts[row * cols + col]; }
  [[nodiscard]] std::uint64_t total() const;
  // Fraction of all counted points held by the densest `fraction` of cells.
  [[nodiscard]] double top_cell_share(double fraction) const;
};

Rect data_bounds(std::span<const SampledTrajectory> trajs);
// Pooled raw point counts; points outside bounds are not counted.
HeatmapGrid heatmap_grid(std::span<const SampledTrajectory> trajs, double cell, const Rect& bounds);

} // namespace trajseg

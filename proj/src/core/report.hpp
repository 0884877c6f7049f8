#pragma once

#include "core/store.hpp"
#include "core/synth.hpp"

#include <optional>
#include <string>

#include <nlohmann/json.hpp>

namespace trajseg {

enum class PlotMode { Raw, Segmented, Heatmap };
PlotMode plot_mode_from_string(const std::string& s);

// Pooled raw point counts over the whole database. Default bounds cover all
// raw points.
HeatmapGrid database_heatmap(const Database& db, double cell, std::optional<Rect> bounds = std::nullopt);

// Static SVG figure. Raw and segmented modes draw one <polyline> per
// trajectory (raw points or centroids as vertices); segmented mode marks
// local summaries with <circle class="local">. Heatmap mode draws one <rect>
// per non-empty cell carrying its count in data-count, inside a <g> whose
// data-cols and data-rows give the full grid size.
std::string render_svg(const Database& db, PlotMode mode, double heatmap_cell);

// Number of vertices over all <polyline> elements of an SVG document.
std::size_t count_polyline_vertices(const std::string& svg);

// Sizes, per-kind counts, measured summary/raw ratio and the ratio predicted
// from locomotive path length. Reads the raw store.
nlohmann::ordered_json store_stats(const Database& db);

} // namespace trajseg

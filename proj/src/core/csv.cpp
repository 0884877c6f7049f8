#include "core/csv.hpp"

#include "core/segmenter.hpp"
#include "core/text.hpp"

#include <algorithm>
#include <istream>
#include <limits>
#include <set>
#include <unordered_map>

namespace trajseg {

std::optional<CsvRow> parse_csv_row(const std::string& line, const Projection& projection)
{
  const auto fields = text::split(text::trim(line), ',');
  if (fields.size() != 4) {
    return std::nullopt;
  }
  CsvRow row;
  row.traj_id = std::string(text::trim(fields[0]));
  const auto t = text::parse_double(fields[1]);
  const auto a = text::parse_double(fields[2]);
  const auto b = text::parse_double(fields[3]);
  if (row.traj_id.empty() || !t || !a || !b) {
    return std::nullopt;
  }
  row.t = *t;
  row.pos = projection.apply(*a, *b);
  return row;
}

CsvReader::CsvReader(std::istream& in, bool strict, Projection projection)
  : in_(in)
  , strict_(strict)
  , projection_(projection)
{
}

void CsvReader::reject(std::size_t line_no, const std::string& why)
{
  const std::string msg = "line " + std::to_string(line_no) + ": " + why;
  if (strict_) {
    throw Error(ErrorCode::Parse, msg);
  }
  ++report_.rejects;
  if (report_.errors.size() < 10) {
    report_.errors.push_back(msg);
  }
}

std::optional<CsvRow> CsvReader::next()
{
  std::string line;
  while (std::getline(in_, line)) {
    ++line_no_;
    const std::string_view row = text::trim(line);
    if (row.empty()) {
      continue;
    }
    if (first_) {
      first_ = false;
      const auto fields = text::split(row, ',');
      if (fields.size() == 4 && !text::parse_double(fields[1])) {
        continue;
      }
    }
    ++report_.rows;
    const auto fields = text::split(row, ',');
    if (fields.size() != 4) {
      reject(line_no_, "expected 4 fields traj_id,t,x,y");
      continue;
    }
    auto parsed = parse_csv_row(line, projection_);
    if (!parsed) {
      reject(line_no_, "malformed row");
      continue;
    }
    parsed->line_no = line_no_;
    return parsed;
  }
  return std::nullopt;
}

std::vector<SegmentSummary> segment_csv_batch(std::istream& in, const SegmenterParams& params, bool strict,
                                              IngestReport* report)
{
  params.validate();
  struct Track
  {
    std::vector<TimedPoint> points;
    std::vector<std::size_t> rows; // global accepted-row number of each point
  };
  std::unordered_map<std::string, Track> tracks;
  std::vector<std::string> order;
  CsvReader reader(in, strict);
  std::size_t accepted = 0;
  while (auto row = reader.next()) {
    if (!std::isfinite(row->t) || !is_finite(row->pos)) {
      reader.reject(row->line_no, "point of trajectory '" + row->traj_id + "' is not finite");
      continue;
    }
    auto [it, fresh] = tracks.try_emplace(row->traj_id);
    if (!fresh && row->t < it->second.points.back().t) {
      reader.reject(row->line_no, "trajectory '" + row->traj_id + "': timestamp " + text::format_double(row->t) +
                                    " precedes " + text::format_double(it->second.points.back().t));
      continue;
    }
    if (fresh) {
      order.push_back(row->traj_id);
    }
    it->second.points.push_back({row->t, row->pos});
    it->second.rows.push_back(accepted++);
  }

  // (emission key, summary); tails sort after every row in first-seen order.
  std::vector<std::pair<std::size_t, SegmentSummary>> keyed;
  for (std::size_t k = 0; k < order.size(); ++k) {
    Track& tr = tracks.at(order[k]);
    const SampledTrajectory traj(order[k], std::move(tr.points));
    auto sums = segment_trajectory(traj, params).summaries;
    for (std::size_t i = 0; i + 1 < sums.size(); ++i) {
      keyed.emplace_back(tr.rows[sums[i + 1].start_idx], std::move(sums[i]));
    }
    keyed.emplace_back(accepted + k, std::move(sums.back()));
  }
  std::sort(keyed.begin(), keyed.end(), [](const auto& a, const auto& b) { return a.first < b.first; });

  std::vector<SegmentSummary> out;
  out.reserve(keyed.size());
  for (auto& [key, s] : keyed) {
    out.push_back(std::move(s));
  }
  if (report) {
    *report = reader.report();
    report->accepted = accepted;
    report->trajectories = order.size();
    report->summaries = out.size();
  }
  return out;
}

IngestReport segment_csv_stream(std::istream& in, const SegmenterParams& params, bool strict,
                                const std::function<void(const SegmentSummary&)>& emit)
{
  StreamEngine engine(params);
  CsvReader reader(in, strict);
  std::set<std::string> seen;
  while (auto row = reader.next()) {
    try {
      if (auto s = engine.ingest(row->traj_id, row->t, row->pos)) {
        ++reader.report().summaries;
        emit(*s);
      }
      ++reader.report().accepted;
      seen.insert(row->traj_id);
    } catch (const Error& e) {
      reader.reject(row->line_no, e.what());
    }
  }
  for (const auto& s : engine.flush_all()) {
    ++reader.report().summaries;
    emit(s);
  }
  reader.report().trajectories = seen.size();
  return reader.report();
}

} // namespace trajseg

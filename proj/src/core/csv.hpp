#pragma once

#include "core/model.hpp"
#include "core/store.hpp"

#include <functional>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

namespace trajseg {

struct CsvRow
{
  std::size_t line_no = 0;
  std::string traj_id;
  double t = 0.0;
  Vec2 pos;
};

// Reads `traj_id,t,x,y` rows. A first line whose t field is not numeric is a
// header. Blank lines are skipped. Malformed rows are counted as rejects, or
// throw Parse in strict mode.
class CsvReader
{
public:
  CsvReader(std::istream& in, bool strict, Projection projection = {});

  std::optional<CsvRow> next();
  // Records a row that parsed but was refused later (ordering, non-finite).
  void reject(std::size_t line_no, const std::string& why);

  [[nodiscard]] IngestReport& report() { return report_; }

private:
  std::istream& in_;
  bool strict_;
  Projection projection_;
  IngestReport report_;
  std::size_t line_no_ = 0;
  bool first_ = true;
};

// Parses one data row without header handling. Empty on malformed input.
std::optional<CsvRow> parse_csv_row(const std::string& line, const Projection& projection = {});

// Batch segmentation of every trajectory in a CSV stream. Summaries come out
// in the order an online engine would emit them: each closed summary at the
// row that closed it, then the open tails in first-seen order.
std::vector<SegmentSummary> segment_csv_batch(std::istream& in, const SegmenterParams& params, bool strict,
                                              IngestReport* report = nullptr);

// Online counterpart: feeds rows to a StreamEngine and calls emit for each
// summary as it closes, then flushes at end of input.
IngestReport segment_csv_stream(std::istream& in, const SegmenterParams& params, bool strict,
                                const std::function<void(const SegmentSummary&)>& emit);

} // namespace trajseg

#include "core/store.hpp"

#include "core/csv.hpp"
#include "core/text.hpp"

#include <algorithm>
#include <bit>
#include <cstring>
#include <fstream>
#include <limits>
#include <numbers>
#include <set>
#include <sstream>

namespace trajseg {

static_assert(std::endian::native == std::endian::little, "on-disk formats assume a little-endian host");

namespace {

constexpr char kRawMagic[8] = {'T', 'S', 'R', 'A', 'W', '0', '0', '1'};
constexpr char kRawEnd[8] = {'T', 'S', 'R', 'A', 'W', 'E', 'N', 'D'};
constexpr char kSegMagic[8] = {'T', 'S', 'S', 'E', 'G', '0', '0', '1'};
constexpr std::size_t kSegRecordBytes = 10 * 8 + 8 + 4 + 1;

template <typename T>
void put(std::string& buf, T v)
{
  char bytes[sizeof(T)];
  std::memcpy(bytes, &v, sizeof(T));
  buf.append(bytes, sizeof(T));
}

class Reader
{
public:
  explicit Reader(std::string data)
    : data_(std::move(data))
  {
  }

  template <typename T>
  T get()
  {
    need(sizeof(T));
    T v;
    std::memcpy(&v, data_.data() + pos_, sizeof(T));
    pos_ += sizeof(T);
    return v;
  }

  std::string bytes(std::size_t n)
  {
    need(n);
    std::string s = data_.substr(pos_, n);
    pos_ += n;
    return s;
  }

  void seek(std::size_t p)
  {
    if (p > data_.size()) {
      throw Error(ErrorCode::Parse, "corrupt store file: offset out of range");
    }
    pos_ = p;
  }
  [[nodiscard]] std::size_t size() const { return data_.size(); }

private:
  void need(std::size_t n) const
  {
    if (pos_ + n > data_.size()) {
      throw Error(ErrorCode::Parse, "corrupt store file: truncated");
    }
  }

  std::string data_;
  std::size_t pos_ = 0;
};

std::string read_file(const std::filesystem::path& path)
{
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    throw Error(ErrorCode::Io, "cannot open " + path.string());
  }
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_file(const std::filesystem::path& path, const std::string& data)
{
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) {
    throw Error(ErrorCode::Io, "cannot write " + path.string());
  }
  out.write(data.data(), static_cast<std::streamsize>(data.size()));
  if (!out) {
    throw Error(ErrorCode::Io, "write failed for " + path.string());
  }
}

} // namespace

// ---------------------------------------------------------------- RawStore

void RawStore::append(const std::string& traj_id, double t, Vec2 pos)
{
  if (!std::isfinite(t) || !is_finite(pos)) {
    throw Error(ErrorCode::NonFinite, "point of trajectory '" + traj_id + "' is not finite");
  }
  auto [it, inserted] = trajs_.try_emplace(traj_id);
  Track& tr = it->second;
  if (inserted) {
    order_.push_back(traj_id);
  } else if (t < tr.points.back().t) {
    throw Error(ErrorCode::OutOfOrder, "trajectory '" + traj_id + "': timestamp regression");
  }
  if (tr.points.size() % kBlockSize == 0) {
    tr.block_first_t.push_back(t);
  }
  tr.points.push_back({t, pos});
  ++total_;
}

const RawStore::Track& RawStore::track(const std::string& traj_id) const
{
  auto it = trajs_.find(traj_id);
  if (it == trajs_.end()) {
    throw Error(ErrorCode::NotFound, "unknown trajectory '" + traj_id + "'");
  }
  return it->second;
}

std::size_t RawStore::size(const std::string& traj_id) const
{
  auto it = trajs_.find(traj_id);
  return it == trajs_.end() ? 0 : it->second.points.size();
}

std::optional<double> RawStore::last_time(const std::string& traj_id) const
{
  auto it = trajs_.find(traj_id);
  if (it == trajs_.end()) {
    return std::nullopt;
  }
  return it->second.points.back().t;
}

std::pair<std::size_t, std::size_t> RawStore::range(const Track& tr, double t0, double t1) const
{
  auto lower_in_blocks = [&](double t, bool strict) {
    // Blocks whose first timestamp is below t may hold the boundary; the
    // earliest candidate is the block before the first one starting at >= t.
    const auto& b = tr.block_first_t;
    auto bit = strict ? std::upper_bound(b.begin(), b.end(), t) : std::lower_bound(b.begin(), b.end(), t);
    const std::size_t block = bit == b.begin() ? 0 : static_cast<std::size_t>(bit - b.begin()) - 1;
    const std::size_t lo = block * kBlockSize;
    const std::size_t hi = std::min(tr.points.size(), (static_cast<std::size_t>(bit - b.begin()) + 1) * kBlockSize);
    auto first = tr.points.begin() + static_cast<std::ptrdiff_t>(lo);
    auto last = tr.points.begin() + static_cast<std::ptrdiff_t>(hi);
    auto pit = strict ? std::upper_bound(first, last, t, [](double v, const TimedPoint& p) { return v < p.t; })
                      : std::lower_bound(first, last, t, [](const TimedPoint& p, double v) { return p.t < v; });
    return static_cast<std::size_t>(pit - tr.points.begin());
  };
  return {lower_in_blocks(t0, false), lower_in_blocks(t1, true)};
}

RawSlice RawStore::slice(const std::string& traj_id, double t0, double t1) const
{
  if (!(t0 <= t1)) {
    throw Error(ErrorCode::InvalidArgument, "raw slice needs t0 <= t1");
  }
  const Track& tr = track(traj_id);
  const auto [lo, hi] = range(tr, t0, t1);
  RawSlice out{traj_id, lo, {}};
  if (hi > lo) {
    out.points.assign(tr.points.begin() + static_cast<std::ptrdiff_t>(lo),
                      tr.points.begin() + static_cast<std::ptrdiff_t>(hi));
  }
  touched_.add(out.points.size());
  return out;
}

RawSlice RawStore::slice_bracketed(const std::string& traj_id, double t0, double t1) const
{
  if (!(t0 <= t1)) {
    throw Error(ErrorCode::InvalidArgument, "raw slice needs t0 <= t1");
  }
  const Track& tr = track(traj_id);
  auto [lo, hi] = range(tr, t0, t1);
  if (lo > 0) {
    --lo;
  }
  if (hi < tr.points.size()) {
    ++hi;
  }
  RawSlice out{traj_id, lo, {}};
  out.points.assign(tr.points.begin() + static_cast<std::ptrdiff_t>(lo),
                    tr.points.begin() + static_cast<std::ptrdiff_t>(hi));
  touched_.add(out.points.size());
  return out;
}

SampledTrajectory RawStore::trajectory(const std::string& traj_id) const
{
  const Track& tr = track(traj_id);
  touched_.add(tr.points.size());
  return SampledTrajectory(traj_id, tr.points);
}

std::size_t RawStore::serialized_bytes() const
{
  std::size_t footer = 4;
  for (const auto& id : order_) {
    const Track& tr = trajs_.at(id);
    footer += 4 + id.size() + 8 + 8 + 4 + 8 * tr.block_first_t.size();
  }
  return 8 + total_ * 24 + footer + 8 + 8;
}

void RawStore::save(const std::filesystem::path& path) const
{
  std::string buf(kRawMagic, 8);
  buf.reserve(serialized_bytes());
  std::vector<std::uint64_t> offsets;
  for (const auto& id : order_) {
    offsets.push_back(buf.size());
    for (const TimedPoint& p : trajs_.at(id).points) {
      put(buf, p.t);
      put(buf, p.pos.x);
      put(buf, p.pos.y);
    }
  }
  const std::uint64_t footer_offset = buf.size();
  put(buf, static_cast<std::uint32_t>(order_.size()));
  for (std::size_t i = 0; i < order_.size(); ++i) {
    const Track& tr = trajs_.at(order_[i]);
    put(buf, static_cast<std::uint32_t>(order_[i].size()));
    buf += order_[i];
    put(buf, offsets[i]);
    put(buf, static_cast<std::uint64_t>(tr.points.size()));
    put(buf, static_cast<std::uint32_t>(tr.block_first_t.size()));
    for (double t : tr.block_first_t) {
      put(buf, t);
    }
  }
  put(buf, footer_offset);
  buf.append(kRawEnd, 8);
  write_file(path, buf);
}

RawStore RawStore::load(const std::filesystem::path& path)
{
  Reader r(read_file(path));
  if (r.size() < 24 || r.bytes(8) != std::string(kRawMagic, 8)) {
    throw Error(ErrorCode::Parse, path.string() + " is not a raw store file");
  }
  r.seek(r.size() - 8);
  if (r.bytes(8) != std::string(kRawEnd, 8)) {
    throw Error(ErrorCode::Parse, path.string() + " has no raw store trailer");
  }
  r.seek(r.size() - 16);
  r.seek(r.get<std::uint64_t>());

  struct Entry
  {
    std::string id;
    std::uint64_t offset;
    std::uint64_t count;
  };
  std::vector<Entry> entries(r.get<std::uint32_t>());
  for (Entry& e : entries) {
    e.id = r.bytes(r.get<std::uint32_t>());
    e.offset = r.get<std::uint64_t>();
    e.count = r.get<std::uint64_t>();
    const auto blocks = r.get<std::uint32_t>();
    for (std::uint32_t b = 0; b < blocks; ++b) {
      r.get<double>(); // rebuilt on append
    }
  }
  RawStore store;
  for (const Entry& e : entries) {
    r.seek(e.offset);
    for (std::uint64_t k = 0; k < e.count; ++k) {
      const double t = r.get<double>();
      const double x = r.get<double>();
      const double y = r.get<double>();
      store.append(e.id, t, {x, y});
    }
  }
  return store;
}

// ------------------------------------------------------------ SegmentStore

SegmentStore::SegmentStore(double cell_size)
  : cell_(cell_size)
{
  if (!(cell_ > 0.0) || !std::isfinite(cell_)) {
    throw Error(ErrorCode::InvalidArgument, "segment index cell size must be > 0");
  }
}

std::int64_t SegmentStore::cell_of(double v) const
{
  const double c = std::floor(v / cell_);
  constexpr double lim = static_cast<double>(std::numeric_limits<std::int32_t>::max());
  return static_cast<std::int64_t>(std::clamp(c, -lim, lim));
}

SegmentStore::CellKey SegmentStore::key(std::int64_t cx, std::int64_t cy) const
{
  const auto ux = static_cast<std::uint32_t>(static_cast<std::int32_t>(cx));
  const auto uy = static_cast<std::uint32_t>(static_cast<std::int32_t>(cy));
  return (static_cast<CellKey>(ux) << 32) | uy;
}

void SegmentStore::add(SegmentSummary s)
{
  auto [it, inserted] = by_traj_.try_emplace(s.traj_id, static_cast<std::uint32_t>(slots_.size()));
  if (inserted) {
    slots_.emplace_back();
  }
  auto& list = slots_[it->second];
  const Ref ref{it->second, static_cast<std::uint32_t>(list.size())};
  const double reach = s.reach();
  const Rect box = Rect{s.centroid.x, s.centroid.y, s.centroid.x, s.centroid.y}.inflated(reach);
  for (auto cx = cell_of(box.min_x); cx <= cell_of(box.max_x); ++cx) {
    for (auto cy = cell_of(box.min_y); cy <= cell_of(box.max_y); ++cy) {
      grid_[key(cx, cy)].push_back(ref);
    }
  }
  list.push_back(std::move(s));
  ++count_;
}

std::vector<SegmentSummary> SegmentStore::index_rect_candidates(const Rect& rect, double t0, double t1) const
{
  std::vector<Ref> refs;
  if (rect.valid() && t0 <= t1) {
    const auto x0 = cell_of(rect.min_x);
    const auto x1 = cell_of(rect.max_x);
    const auto y0 = cell_of(rect.min_y);
    const auto y1 = cell_of(rect.max_y);
    const double span = static_cast<double>(x1 - x0 + 1) * static_cast<double>(y1 - y0 + 1);
    if (span > static_cast<double>(grid_.size())) {
      for (const auto& [k, cell_refs] : grid_) {
        const auto cx = static_cast<std::int32_t>(static_cast<std::uint32_t>(k >> 32));
        const auto cy = static_cast<std::int32_t>(static_cast<std::uint32_t>(k & 0xffffffffULL));
        if (cx >= x0 && cx <= x1 && cy >= y0 && cy <= y1) {
          refs.insert(refs.end(), cell_refs.begin(), cell_refs.end());
        }
      }
    } else {
      for (auto cx = x0; cx <= x1; ++cx) {
        for (auto cy = y0; cy <= y1; ++cy) {
          if (auto it = grid_.find(key(cx, cy)); it != grid_.end()) {
            refs.insert(refs.end(), it->second.begin(), it->second.end());
          }
        }
      }
    }
  }
  std::sort(refs.begin(), refs.end(),
            [](Ref a, Ref b) { return a.traj < b.traj || (a.traj == b.traj && a.index < b.index); });
  refs.erase(std::unique(refs.begin(), refs.end(),
                         [](Ref a, Ref b) { return a.traj == b.traj && a.index == b.index; }),
             refs.end());

  std::vector<SegmentSummary> out;
  for (Ref ref : refs) {
    const SegmentSummary& s = slots_[ref.traj][ref.index];
    if (s.t_end < t0 || s.t_start > t1) {
      continue;
    }
    if (rect.distance_to(s.centroid) <= s.reach()) {
      out.push_back(s);
    }
  }
  std::sort(out.begin(), out.end(), [](const SegmentSummary& a, const SegmentSummary& b) {
    return a.traj_id < b.traj_id || (a.traj_id == b.traj_id && a.start_idx < b.start_idx);
  });
  return out;
}

std::span<const SegmentSummary> SegmentStore::for_trajectory(const std::string& traj_id) const
{
  auto it = by_traj_.find(traj_id);
  if (it == by_traj_.end()) {
    throw Error(ErrorCode::NotFound, "unknown trajectory '" + traj_id + "'");
  }
  return slots_[it->second];
}

std::vector<std::string> SegmentStore::ids() const
{
  std::vector<std::string> out;
  out.reserve(by_traj_.size());
  for (const auto& [id, slot] : by_traj_) {
    out.push_back(id);
  }
  return out;
}

Rect SegmentStore::trajectory_bounds(const std::string& traj_id) const
{
  const auto list = for_trajectory(traj_id);
  Rect r = list.front().extent;
  for (const auto& s : list) {
    r = r.united(s.extent);
  }
  return r;
}

std::size_t SegmentStore::serialized_bytes() const
{
  std::size_t bytes = 8 + 8 + 4;
  for (const auto& [id, slot] : by_traj_) {
    bytes += 2 + id.size() + 8 + kSegRecordBytes * slots_[slot].size();
  }
  return bytes;
}

void SegmentStore::save(const std::filesystem::path& path) const
{
  std::string buf(kSegMagic, 8);
  buf.reserve(serialized_bytes());
  put(buf, cell_);
  put(buf, static_cast<std::uint32_t>(by_traj_.size()));
  for (const auto& [id, slot] : by_traj_) {
    put(buf, static_cast<std::uint16_t>(id.size()));
    buf += id;
    put(buf, static_cast<std::uint64_t>(slots_[slot].size()));
    for (const SegmentSummary& s : slots_[slot]) {
      for (double v : {s.centroid.x, s.centroid.y, s.t_rep, s.radius, s.t_start, s.t_end, s.extent.min_x,
                       s.extent.min_y, s.extent.max_x, s.extent.max_y}) {
        put(buf, v);
      }
      put(buf, static_cast<std::uint64_t>(s.start_idx));
      put(buf, static_cast<std::uint32_t>(s.n_points));
      put(buf, static_cast<std::uint8_t>(s.kind));
    }
  }
  write_file(path, buf);
}

SegmentStore SegmentStore::load(const std::filesystem::path& path)
{
  Reader r(read_file(path));
  if (r.size() < 20 || r.bytes(8) != std::string(kSegMagic, 8)) {
    throw Error(ErrorCode::Parse, path.string() + " is not a segment store file");
  }
  SegmentStore store(r.get<double>());
  const auto n_traj = r.get<std::uint32_t>();
  for (std::uint32_t i = 0; i < n_traj; ++i) {
    const std::string id = r.bytes(r.get<std::uint16_t>());
    const auto n = r.get<std::uint64_t>();
    for (std::uint64_t k = 0; k < n; ++k) {
      SegmentSummary s;
      s.traj_id = id;
      s.centroid.x = r.get<double>();
      s.centroid.y = r.get<double>();
      s.t_rep = r.get<double>();
      s.radius = r.get<double>();
      s.t_start = r.get<double>();
      s.t_end = r.get<double>();
      s.extent.min_x = r.get<double>();
      s.extent.min_y = r.get<double>();
      s.extent.max_x = r.get<double>();
      s.extent.max_y = r.get<double>();
      s.start_idx = r.get<std::uint64_t>();
      s.n_points = r.get<std::uint32_t>();
      s.end_idx = s.start_idx + s.n_points;
      const auto kind = r.get<std::uint8_t>();
      if (kind > 1) {
        throw Error(ErrorCode::Parse, "corrupt segment record kind");
      }
      s.kind = static_cast<SegmentKind>(kind);
      store.add(std::move(s));
    }
  }
  return store;
}

// ------------------------------------------------------------------- JSON

nlohmann::ordered_json summary_to_json(const SegmentSummary& s)
{
  nlohmann::ordered_json j;
  j["traj_id"] = s.traj_id;
  j["centroid"] = {s.centroid.x, s.centroid.y};
  j["t_rep"] = s.t_rep;
  j["radius"] = s.radius;
  j["n_points"] = s.n_points;
  j["start_idx"] = s.start_idx;
  j["end_idx"] = s.end_idx;
  j["t_start"] = s.t_start;
  j["t_end"] = s.t_end;
  j["kind"] = to_string(s.kind);
  j["extent"] = {s.extent.min_x, s.extent.min_y, s.extent.max_x, s.extent.max_y};
  return j;
}

SegmentSummary summary_from_json(const nlohmann::json& j)
{
  try {
    SegmentSummary s;
    s.traj_id = j.at("traj_id").get<std::string>();
    s.centroid = {j.at("centroid").at(0).get<double>(), j.at("centroid").at(1).get<double>()};
    s.t_rep = j.at("t_rep").get<double>();
    s.radius = j.at("radius").get<double>();
    s.n_points = j.at("n_points").get<std::size_t>();
    s.start_idx = j.at("start_idx").get<std::size_t>();
    s.end_idx = j.at("end_idx").get<std::size_t>();
    s.t_start = j.at("t_start").get<double>();
    s.t_end = j.at("t_end").get<double>();
    s.kind = segment_kind_from_string(j.at("kind").get<std::string>());
    if (j.contains("extent")) {
      const auto& e = j.at("extent");
      s.extent = {e.at(0).get<double>(), e.at(1).get<double>(), e.at(2).get<double>(), e.at(3).get<double>()};
    } else {
      s.extent = Rect{s.centroid.x, s.centroid.y, s.centroid.x, s.centroid.y}.inflated(s.radius);
    }
    return s;
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::Parse, std::string("segment summary: ") + e.what());
  }
}

std::string summary_to_jsonl(const SegmentSummary& s)
{
  return summary_to_json(s).dump() + '\n';
}

// ------------------------------------------------------------- Projection

Vec2 Projection::apply(double a, double b) const
{
  if (kind == Kind::None) {
    return {a, b};
  }
  constexpr double deg = std::numbers::pi / 180.0;
  return {kEarthRadiusM * (a - lon0) * deg * std::cos(lat0 * deg), kEarthRadiusM * (b - lat0) * deg};
}

// --------------------------------------------------------------- Database

nlohmann::ordered_json report_to_json(const IngestReport& r)
{
  nlohmann::ordered_json j;
  j["rows"] = r.rows;
  j["accepted"] = r.accepted;
  j["rejects"] = r.rejects;
  j["trajectories"] = r.trajectories;
  j["summaries"] = r.summaries;
  j["errors"] = r.errors;
  return j;
}

nlohmann::ordered_json params_to_json(const SegmenterParams& p)
{
  nlohmann::ordered_json j;
  j["min_r"] = p.min_r;
  j["min_density"] = p.min_density;
  j["t_rep_mode"] = p.t_rep_mode == TRepMode::StartTime ? "start_time" : "mean_time";
  j["estimator"] = p.estimator == Estimator::BoundingRect ? "bounding_rect" : "running_circle";
  return j;
}

SegmenterParams params_from_json(const nlohmann::json& j)
{
  try {
    SegmenterParams p;
    p.min_r = j.at("min_r").get<double>();
    p.min_density = j.at("min_density").get<double>();
    const std::string mode = j.value("t_rep_mode", std::string("mean_time"));
    if (mode == "start_time") {
      p.t_rep_mode = TRepMode::StartTime;
    } else if (mode != "mean_time") {
      throw Error(ErrorCode::Parse, "unknown t_rep_mode '" + mode + "'");
    }
    const std::string est = j.value("estimator", std::string("running_circle"));
    if (est == "bounding_rect") {
      p.estimator = Estimator::BoundingRect;
    } else if (est != "running_circle") {
      throw Error(ErrorCode::Parse, "unknown estimator '" + est + "'");
    }
    p.validate();
    return p;
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::Parse, std::string("segmenter params: ") + e.what());
  }
}

Database::Database(const SegmenterParams& params, Projection projection)
  : params_(params)
  , projection_(projection)
  , segments_(2.0 * params.min_r)
  , engine_(params)
{
}

std::optional<SegmentSummary> Database::ingest(const std::string& traj_id, double t, Vec2 pos)
{
  if (traj_id.empty()) {
    throw Error(ErrorCode::InvalidArgument, "empty trajectory id");
  }
  if (!std::isfinite(t) || !is_finite(pos)) {
    throw Error(ErrorCode::NonFinite, "point of trajectory '" + traj_id + "' is not finite");
  }
  if (auto last = raw_.last_time(traj_id); last && t < *last) {
    throw Error(ErrorCode::OutOfOrder, "trajectory '" + traj_id + "': timestamp " + text::format_double(t) +
                                         " precedes " + text::format_double(*last));
  }
  auto closed = engine_.ingest(traj_id, t, pos, raw_.size(traj_id));
  raw_.append(traj_id, t, pos);
  if (closed) {
    segments_.add(*closed);
  }
  return closed;
}

std::vector<SegmentSummary> Database::flush_all()
{
  auto out = engine_.flush_all();
  for (const auto& s : out) {
    segments_.add(s);
  }
  return out;
}

IngestReport Database::ingest_csv(std::istream& in, const IngestOptions& options)
{
  CsvReader reader(in, options.strict, options.projection);
  std::set<std::string> seen;
  while (auto row = reader.next()) {
    try {
      if (ingest(row->traj_id, row->t, row->pos)) {
        ++reader.report().summaries;
      }
      ++reader.report().accepted;
      seen.insert(row->traj_id);
    } catch (const Error& e) {
      reader.reject(row->line_no, e.what());
    }
  }
  if (options.flush_at_end) {
    reader.report().summaries += flush_all().size();
  }
  reader.report().trajectories = seen.size();
  return reader.report();
}

IngestReport Database::ingest_csv(const std::filesystem::path& path, const IngestOptions& options)
{
  std::ifstream in(path);
  if (!in) {
    throw Error(ErrorCode::Io, "cannot open " + path.string());
  }
  return ingest_csv(in, options);
}

nlohmann::ordered_json projection_to_json(const Projection& p)
{
  nlohmann::ordered_json j;
  j["kind"] = p.kind == Projection::Kind::None ? "none" : "local_equirectangular";
  j["lon0"] = p.lon0;
  j["lat0"] = p.lat0;
  return j;
}

Projection projection_from_json(const nlohmann::json& j)
{
  Projection p;
  const std::string kind = j.value("kind", std::string("none"));
  if (kind == "local_equirectangular") {
    p.kind = Projection::Kind::LocalEquirectangular;
    p.lon0 = j.value("lon0", 0.0);
    p.lat0 = j.value("lat0", 0.0);
  } else if (kind != "none") {
    throw Error(ErrorCode::Parse, "unknown projection kind '" + kind + "'");
  }
  return p;
}

bool Database::exists(const std::filesystem::path& dir)
{
  return std::filesystem::exists(dir / "meta.json");
}

void Database::save(const std::filesystem::path& dir)
{
  flush_all();
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) {
    throw Error(ErrorCode::Io, "cannot create " + dir.string() + ": " + ec.message());
  }
  nlohmann::ordered_json meta;
  meta["format"] = "trajseg-store";
  meta["version"] = 1;
  meta["params"] = params_to_json(params_);
  meta["projection"] = projection_to_json(projection_);
  meta["raw_points"] = raw_.total_points();
  meta["summaries"] = segments_.size();
  raw_.save(dir / "raw.bin");
  segments_.save(dir / "segments.bin");
  write_file(dir / "meta.json", meta.dump(2) + "\n");
}

Database Database::open(const std::filesystem::path& dir)
{
  nlohmann::json meta;
  try {
    meta = nlohmann::json::parse(read_file(dir / "meta.json"));
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::Parse, "meta.json: " + std::string(e.what()));
  }
  if (meta.value("format", std::string()) != "trajseg-store") {
    throw Error(ErrorCode::Parse, dir.string() + " is not a trajseg store");
  }
  const Projection proj = meta.contains("projection") ? projection_from_json(meta["projection"]) : Projection{};
  Database db(params_from_json(meta.at("params")), proj);
  db.raw_ = RawStore::load(dir / "raw.bin");
  db.segments_ = SegmentStore::load(dir / "segments.bin");
  return db;
}

} // namespace trajseg

#include "trajseg/trajseg.h"

#include "core/csv.hpp"
#include "core/query.hpp"
#include "core/report.hpp"
#include "core/segmenter.hpp"
#include "core/service.hpp"
#include "core/store.hpp"
#include "core/synth.hpp"
#include "core/text.hpp"

#include <cstdio>
#include <cstdlib>
#include <cstring>
#include <new>
#include <sstream>
#include <string>

using namespace trajseg;

struct trajseg_engine
{
  StreamEngine engine;
};

struct trajseg_store
{
  Database db;
};

namespace {

thread_local std::string g_last_error;

trajseg_status status_of(ErrorCode c)
{
  switch (c) {
  case ErrorCode::InvalidArgument: return TRAJSEG_E_INVALID_ARGUMENT;
  case ErrorCode::EmptyInput: return TRAJSEG_E_EMPTY_INPUT;
  case ErrorCode::NonFinite: return TRAJSEG_E_NON_FINITE;
  case ErrorCode::OutOfOrder: return TRAJSEG_E_OUT_OF_ORDER;
  case ErrorCode::NotFound: return TRAJSEG_E_NOT_FOUND;
  case ErrorCode::DisjointTime: return TRAJSEG_E_DISJOINT_TIME;
  case ErrorCode::Parse: return TRAJSEG_E_PARSE;
  case ErrorCode::Io: return TRAJSEG_E_IO;
  }
  return TRAJSEG_E_INTERNAL;
}

template <class F>
trajseg_status guard(F&& f)
{
  try {
    f();
    g_last_error.clear();
    return TRAJSEG_OK;
  } catch (const Error& e) {
    g_last_error = e.what();
    return status_of(e.code());
  } catch (const nlohmann::json::exception& e) {
    g_last_error = std::string("malformed JSON: ") + e.what();
    return TRAJSEG_E_PARSE;
  } catch (const std::bad_alloc&) {
    g_last_error = "out of memory";
    return TRAJSEG_E_INTERNAL;
  } catch (const std::exception& e) {
    g_last_error = e.what();
    return TRAJSEG_E_INTERNAL;
  }
}

char* dup(const std::string& s)
{
  auto* p = static_cast<char*>(std::malloc(s.size() + 1));
  if (!p) {
    throw std::bad_alloc();
  }
  std::memcpy(p, s.data(), s.size() + 1);
  return p;
}

void put(char** out, const std::string& s)
{
  if (out) {
    *out = dup(s);
  }
}

void require(const void* p, const char* what)
{
  if (!p) {
    throw Error(ErrorCode::InvalidArgument, std::string(what) + " is NULL");
  }
}

SegmenterParams to_params(const trajseg_params* p)
{
  require(p, "params");
  SegmenterParams out;
  out.min_r = p->min_r;
  out.min_density = p->min_density;
  out.t_rep_mode = p->t_rep == TRAJSEG_T_REP_START ? TRepMode::StartTime : TRepMode::MeanTime;
  out.estimator = p->estimator == TRAJSEG_EST_BOUNDING_RECT ? Estimator::BoundingRect : Estimator::RunningCircle;
  out.validate();
  return out;
}

std::string json_lines(const std::vector<SegmentSummary>& v)
{
  std::string out;
  for (const auto& s : v) {
    out += summary_to_jsonl(s);
  }
  return out;
}

} // namespace

extern "C" {

const char* trajseg_last_error(void) { return g_last_error.c_str(); }

void trajseg_string_free(char* s) { std::free(s); }

const char* trajseg_version(void) { return "1.0.0"; }

void trajseg_params_default(trajseg_params* out)
{
  if (!out) {
    return;
  }
  const SegmenterParams d = demo_segmenter_params();
  out->min_r = d.min_r;
  out->min_density = d.min_density;
  out->t_rep = TRAJSEG_T_REP_MEAN;
  out->estimator = TRAJSEG_EST_RUNNING_CIRCLE;
}

trajseg_status trajseg_params_validate(const trajseg_params* p)
{
  return guard([&] { to_params(p); });
}

trajseg_status trajseg_generate_csv(const char* spec_json, size_t n_trajectories, uint64_t seed, char** out_csv)
{
  return guard([&] {
    require(out_csv, "out_csv");
    const GenSpec spec = spec_json ? gen_spec_from_json(spec_json) : demo_gen_spec(n_trajectories, seed);
    const auto trajs = generate(spec);
    put(out_csv, to_csv(trajs));
  });
}

trajseg_status trajseg_segment_csv(const char* csv, const trajseg_params* p, int strict, char** out_jsonl,
                                   char** out_report_json)
{
  return guard([&] {
    require(csv, "csv");
    require(out_jsonl, "out_jsonl");
    const SegmenterParams params = to_params(p);
    std::istringstream in(csv);
    IngestReport report;
    const auto sums = segment_csv_batch(in, params, strict != 0, &report);
    const std::string lines = json_lines(sums);
    const std::string rep = report_to_json(report).dump();
    *out_jsonl = dup(lines);
    if (out_report_json) {
      *out_report_json = dup(rep);
    }
  });
}

int trajseg_csv_is_header(const char* line)
{
  if (!line) {
    return 0;
  }
  const auto fields = text::split(text::trim(line), ',');
  return fields.size() == 4 && !text::parse_double(fields[1]) ? 1 : 0;
}

trajseg_status trajseg_engine_create(const trajseg_params* p, trajseg_engine** out)
{
  return guard([&] {
    require(out, "out");
    *out = new trajseg_engine{StreamEngine(to_params(p))};
  });
}

void trajseg_engine_destroy(trajseg_engine* e) { delete e; }

trajseg_status trajseg_engine_ingest(trajseg_engine* e, const char* traj_id, double t, double x, double y,
                                     char** out_jsonl)
{
  return guard([&] {
    require(e, "engine");
    require(traj_id, "traj_id");
    if (!*traj_id) {
      throw Error(ErrorCode::InvalidArgument, "empty trajectory id");
    }
    const auto s = e->engine.ingest(traj_id, t, {x, y});
    put(out_jsonl, s ? summary_to_jsonl(*s) : std::string());
  });
}

trajseg_status trajseg_engine_ingest_line(trajseg_engine* e, const char* line, char** out_jsonl)
{
  return guard([&] {
    require(e, "engine");
    require(line, "line");
    const auto row = parse_csv_row(line);
    if (!row) {
      throw Error(ErrorCode::Parse, std::string("malformed row: ") + line);
    }
    const auto s = e->engine.ingest(row->traj_id, row->t, row->pos);
    put(out_jsonl, s ? summary_to_jsonl(*s) : std::string());
  });
}

trajseg_status trajseg_engine_flush(trajseg_engine* e, const char* traj_id, char** out_jsonl)
{
  return guard([&] {
    require(e, "engine");
    require(traj_id, "traj_id");
    put(out_jsonl, summary_to_jsonl(e->engine.flush(traj_id)));
  });
}

trajseg_status trajseg_engine_flush_all(trajseg_engine* e, char** out_jsonl)
{
  return guard([&] {
    require(e, "engine");
    put(out_jsonl, json_lines(e->engine.flush_all()));
  });
}

size_t trajseg_engine_live_count(const trajseg_engine* e) { return e ? e->engine.live_count() : 0; }

size_t trajseg_engine_state_bytes(const trajseg_engine* e) { return e ? e->engine.state_bytes() : 0; }

trajseg_status trajseg_store_create(const trajseg_params* p, const char* projection_json, trajseg_store** out)
{
  return guard([&] {
    require(out, "out");
    const Projection proj = projection_json ? projection_from_json(nlohmann::json::parse(projection_json))
                                            : Projection{};
    *out = new trajseg_store{Database(to_params(p), proj)};
  });
}

trajseg_status trajseg_store_open(const char* dir, trajseg_store** out)
{
  return guard([&] {
    require(dir, "dir");
    require(out, "out");
    if (!Database::exists(dir)) {
      throw Error(ErrorCode::NotFound, std::string("no store at ") + dir);
    }
    *out = new trajseg_store{Database::open(dir)};
  });
}

int trajseg_store_exists(const char* dir) { return dir && Database::exists(dir) ? 1 : 0; }

void trajseg_store_destroy(trajseg_store* s) { delete s; }

trajseg_status trajseg_store_save(trajseg_store* s, const char* dir)
{
  return guard([&] {
    require(s, "store");
    require(dir, "dir");
    s->db.save(dir);
  });
}

trajseg_status trajseg_store_ingest_csv(trajseg_store* s, const char* csv, int strict, char** out_report_json)
{
  return guard([&] {
    require(s, "store");
    require(csv, "csv");
    IngestOptions opts;
    opts.strict = strict != 0;
    opts.projection = s->db.projection();
    std::istringstream in(csv);
    put(out_report_json, report_to_json(s->db.ingest_csv(in, opts)).dump());
  });
}

trajseg_status trajseg_store_ingest_file(trajseg_store* s, const char* path, int strict, char** out_report_json)
{
  return guard([&] {
    require(s, "store");
    require(path, "path");
    IngestOptions opts;
    opts.strict = strict != 0;
    opts.projection = s->db.projection();
    put(out_report_json, report_to_json(s->db.ingest_csv(std::filesystem::path(path), opts)).dump());
  });
}

trajseg_status trajseg_store_query(const trajseg_store* s, const char* query_json, char** out_result_json)
{
  return guard([&] {
    require(s, "store");
    require(query_json, "query_json");
    require(out_result_json, "out_result_json");
    const QuerySpec spec = query_spec_from_json(nlohmann::json::parse(query_json));
    *out_result_json = dup(query_result_to_json(run_query(s->db, spec)).dump());
  });
}

trajseg_status trajseg_store_stats(const trajseg_store* s, char** out_json)
{
  return guard([&] {
    require(s, "store");
    require(out_json, "out_json");
    *out_json = dup(store_stats(s->db).dump(2));
  });
}

trajseg_status trajseg_store_plot_svg(const trajseg_store* s, trajseg_plot mode, double heatmap_cell, char** out_svg)
{
  return guard([&] {
    require(s, "store");
    require(out_svg, "out_svg");
    PlotMode m = PlotMode::Raw;
    switch (mode) {
    case TRAJSEG_PLOT_RAW: m = PlotMode::Raw; break;
    case TRAJSEG_PLOT_SEGMENTED: m = PlotMode::Segmented; break;
    case TRAJSEG_PLOT_HEATMAP: m = PlotMode::Heatmap; break;
    default: throw Error(ErrorCode::InvalidArgument, "unknown plot mode");
    }
    *out_svg = dup(render_svg(s->db, m, heatmap_cell));
  });
}

uint64_t trajseg_store_raw_points_touched(const trajseg_store* s) { return s ? s->db.raw().points_touched() : 0; }

void trajseg_store_reset_raw_counter(const trajseg_store* s)
{
  if (s) {
    s->db.raw().reset_touch_counter();
  }
}

trajseg_status trajseg_serve(const char* config_json)
{
  return guard([&] {
    ServiceConfig cfg = config_json ? ServiceConfig::from_json(config_json) : ServiceConfig{};
    if (!config_json) {
      cfg.params = demo_segmenter_params();
    }
    cfg.apply_env();
    cfg.validate();
    Service svc(cfg);
    const int port = svc.bind();
    std::fprintf(stderr, "listening on %s:%d\n", cfg.host.c_str(), port);
    svc.run();
  });
}

} // extern "C"

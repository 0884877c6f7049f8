// trajseg command line front end. Everything goes through the C API.

#include "trajseg/trajseg.h"

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <memory>
#include <sstream>
#include <stdexcept>
#include <string>

namespace {

struct Failure : std::runtime_error
{
  using std::runtime_error::runtime_error;
};

struct CString
{
  char* p = nullptr;
  ~CString() { trajseg_string_free(p); }
  std::string str() const { return p ? std::string(p) : std::string(); }
};

void check(trajseg_status st)
{
  if (st != TRAJSEG_OK) {
    throw Failure(trajseg_last_error());
  }
}

std::string read_all(const std::string& path)
{
  if (path == "-") {
    std::ostringstream ss;
    ss << std::cin.rdbuf();
    return ss.str();
  }
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    throw Failure("cannot read " + path);
  }
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_all(const std::string& path, const std::string& data)
{
  if (path.empty() || path == "-") {
    std::cout << data;
    std::cout.flush();
    return;
  }
  std::ofstream out(path, std::ios::binary);
  if (!out || !(out << data)) {
    throw Failure("cannot write " + path);
  }
}

struct ParamOpts
{
  double min_r = 10.0;
  double min_density = 0.3;
  std::string t_rep = "mean";
  std::string estimator = "circle";

  void add(CLI::App* app)
  {
    trajseg_params d;
    trajseg_params_default(&d);
    min_r = d.min_r;
    min_density = d.min_density;
    app->add_option("--min-r", min_r, "segment radius threshold")->capture_default_str();
    app->add_option("--min-density", min_density, "points per unit area threshold")->capture_default_str();
    app->add_option("--t-rep", t_rep, "representative time: mean or start")->capture_default_str();
    app->add_option("--estimator", estimator, "density estimator: circle or rect")->capture_default_str();
  }

  trajseg_params get() const
  {
    if (!(min_r > 0.0)) {
      throw Failure("--min-r must be > 0, got " + std::to_string(min_r));
    }
    if (!(min_density > 0.0)) {
      throw Failure("--min-density must be > 0, got " + std::to_string(min_density));
    }
    trajseg_params p;
    trajseg_params_default(&p);
    p.min_r = min_r;
    p.min_density = min_density;
    if (t_rep == "mean") {
      p.t_rep = TRAJSEG_T_REP_MEAN;
    } else if (t_rep == "start") {
      p.t_rep = TRAJSEG_T_REP_START;
    } else {
      throw Failure("--t-rep must be mean or start, got '" + t_rep + "'");
    }
    if (estimator == "circle") {
      p.estimator = TRAJSEG_EST_RUNNING_CIRCLE;
    } else if (estimator == "rect") {
      p.estimator = TRAJSEG_EST_BOUNDING_RECT;
    } else {
      throw Failure("--estimator must be circle or rect, got '" + estimator + "'");
    }
    check(trajseg_params_validate(&p));
    return p;
  }
};

using StorePtr = std::unique_ptr<trajseg_store, decltype(&trajseg_store_destroy)>;

StorePtr open_store(const std::string& dir)
{
  trajseg_store* s = nullptr;
  check(trajseg_store_open(dir.c_str(), &s));
  return {s, &trajseg_store_destroy};
}

StorePtr memory_store(const trajseg_params& p, const std::string& csv_path)
{
  trajseg_store* s = nullptr;
  check(trajseg_store_create(&p, nullptr, &s));
  StorePtr store(s, &trajseg_store_destroy);
  CString report;
  check(trajseg_store_ingest_csv(s, read_all(csv_path).c_str(), 0, &report.p));
  return store;
}

int run_stream(const std::string& in_path, const std::string& out_path, const trajseg_params& p, bool strict)
{
  std::ifstream file;
  std::istream* in = &std::cin;
  if (in_path != "-") {
    file.open(in_path);
    if (!file) {
      throw Failure("cannot read " + in_path);
    }
    in = &file;
  }
  std::ofstream ofile;
  std::ostream* out = &std::cout;
  if (!out_path.empty() && out_path != "-") {
    ofile.open(out_path, std::ios::binary);
    if (!ofile) {
      throw Failure("cannot write " + out_path);
    }
    out = &ofile;
  }

  trajseg_engine* raw = nullptr;
  check(trajseg_engine_create(&p, &raw));
  std::unique_ptr<trajseg_engine, decltype(&trajseg_engine_destroy)> engine(raw, &trajseg_engine_destroy);

  std::string line;
  std::size_t line_no = 0;
  bool first = true;
  while (std::getline(*in, line)) {
    ++line_no;
    if (line.find_first_not_of(" \t\r") == std::string::npos) {
      continue;
    }
    if (first) {
      first = false;
      if (trajseg_csv_is_header(line.c_str())) {
        continue;
      }
    }
    CString summary;
    const trajseg_status st = trajseg_engine_ingest_line(engine.get(), line.c_str(), &summary.p);
    if (st != TRAJSEG_OK) {
      const std::string msg = "line " + std::to_string(line_no) + ": " + trajseg_last_error();
      if (strict) {
        out->flush();
        throw Failure(msg);
      }
      std::cerr << "skipped " << msg << '\n';
      continue;
    }
    if (summary.p && *summary.p) {
      *out << summary.p;
      out->flush();
    }
  }
  CString tail;
  check(trajseg_engine_flush_all(engine.get(), &tail.p));
  *out << tail.str();
  out->flush();
  return 0;
}

} // namespace

int main(int argc, char** argv)
{
  CLI::App app{"Density-based trajectory segmentation and querying"};
  app.require_subcommand(1);

  // gen
  auto* gen = app.add_subcommand("gen", "generate synthetic trajectories as CSV");
  std::string gen_spec;
  std::string gen_out;
  std::size_t gen_n = 20;
  std::uint64_t gen_seed = 42;
  gen->add_option("--spec", gen_spec, "generator spec JSON file");
  gen->add_option("-n,--trajectories", gen_n, "trajectory count without --spec")->capture_default_str();
  gen->add_option("--seed", gen_seed, "seed without --spec")->capture_default_str();
  gen->add_option("--out", gen_out, "output CSV (default stdout)");

  // segment
  auto* seg = app.add_subcommand("segment", "batch-segment a CSV into JSON Lines summaries");
  std::string seg_in;
  std::string seg_out;
  bool seg_strict = false;
  ParamOpts seg_params;
  seg->add_option("--in", seg_in, "input CSV, - for stdin")->required();
  seg->add_option("--out", seg_out, "output JSONL (default stdout)");
  seg->add_flag("--strict", seg_strict, "fail on the first bad row");
  seg_params.add(seg);

  // stream
  auto* stream = app.add_subcommand("stream", "segment rows as they arrive, emitting summaries as they close");
  std::string stream_in = "-";
  std::string stream_out;
  bool stream_strict = false;
  ParamOpts stream_params;
  stream->add_option("--in", stream_in, "input CSV, - for stdin")->capture_default_str();
  stream->add_option("--out", stream_out, "output JSONL (default stdout)");
  stream->add_flag("--strict", stream_strict, "fail on the first bad row");
  stream_params.add(stream);

  // ingest
  auto* ingest = app.add_subcommand("ingest", "append a CSV to a store directory");
  std::string ing_in;
  std::string ing_store;
  bool ing_strict = false;
  std::string ing_origin;
  ParamOpts ing_params;
  ingest->add_option("--in", ing_in, "input CSV, - for stdin")->required();
  ingest->add_option("--store", ing_store, "store directory (created if missing)")->required();
  ingest->add_flag("--strict", ing_strict, "fail on the first bad row");
  ingest->add_option("--lonlat-origin", ing_origin,
                     "treat x,y as lon,lat degrees projected around LON,LAT (new stores only)");
  ing_params.add(ingest);

  // query
  auto* query = app.add_subcommand("query", "run a query spec against a store");
  std::string q_store;
  std::string q_spec;
  query->add_option("--store", q_store, "store directory")->required();
  query->add_option("--spec", q_spec, "query JSON file, - for stdin")->required();

  // plot
  auto* plot = app.add_subcommand("plot", "render an SVG figure");
  std::string p_mode;
  std::string p_store;
  std::string p_in;
  std::string p_out;
  double p_cell = 0.0;
  ParamOpts p_params;
  plot->add_option("--mode", p_mode, "raw, segmented or heatmap")->required();
  auto* p_store_opt = plot->add_option("--store", p_store, "store directory");
  auto* p_in_opt = plot->add_option("--in", p_in, "CSV to segment in memory instead of a store");
  p_store_opt->excludes(p_in_opt);
  plot->add_option("--cell", p_cell, "heatmap cell size (default min-r / 2)");
  plot->add_option("--out", p_out, "output SVG (default stdout)");
  p_params.add(plot);

  // stats
  auto* stats = app.add_subcommand("stats", "compression and per-kind counts of a store");
  std::string s_store;
  stats->add_option("--store", s_store, "store directory")->required();

  // serve
  auto* serve = app.add_subcommand("serve", "run the HTTP service");
  std::string sv_config;
  std::string sv_listen;
  std::string sv_data;
  serve->add_option("--config", sv_config, "service config JSON file");
  serve->add_option("--listen", sv_listen, "host:port");
  serve->add_option("--data-dir", sv_data, "store directory");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    std::string msg = e.what();
    std::replace(msg.begin(), msg.end(), '\n', ' ');
    std::cerr << "error: " << msg << '\n';
    return 1;
  }

  try {
    if (*gen) {
      CString csv;
      if (gen_spec.empty()) {
        check(trajseg_generate_csv(nullptr, gen_n, gen_seed, &csv.p));
      } else {
        check(trajseg_generate_csv(read_all(gen_spec).c_str(), 0, 0, &csv.p));
      }
      write_all(gen_out, csv.str());
    } else if (*seg) {
      const trajseg_params p = seg_params.get();
      CString lines;
      CString report;
      check(trajseg_segment_csv(read_all(seg_in).c_str(), &p, seg_strict ? 1 : 0, &lines.p, &report.p));
      write_all(seg_out, lines.str());
      std::cerr << report.str() << '\n';
    } else if (*stream) {
      return run_stream(stream_in, stream_out, stream_params.get(), stream_strict);
    } else if (*ingest) {
      const trajseg_params p = ing_params.get();
      trajseg_store* s = nullptr;
      if (trajseg_store_exists(ing_store.c_str())) {
        if (!ing_origin.empty()) {
          throw Failure("--lonlat-origin only applies when creating a store");
        }
        check(trajseg_store_open(ing_store.c_str(), &s));
      } else {
        std::string proj;
        if (!ing_origin.empty()) {
          const auto comma = ing_origin.find(',');
          if (comma == std::string::npos) {
            throw Failure("--lonlat-origin must be LON,LAT");
          }
          double lon0 = 0.0;
          double lat0 = 0.0;
          try {
            lon0 = std::stod(ing_origin.substr(0, comma));
            lat0 = std::stod(ing_origin.substr(comma + 1));
          } catch (const std::exception&) {
            throw Failure("--lonlat-origin must be LON,LAT");
          }
          proj = nlohmann::json{{"kind", "local_equirectangular"}, {"lon0", lon0}, {"lat0", lat0}}.dump();
        }
        check(trajseg_store_create(&p, proj.empty() ? nullptr : proj.c_str(), &s));
      }
      StorePtr store(s, &trajseg_store_destroy);
      CString report;
      if (ing_in == "-") {
        check(trajseg_store_ingest_csv(s, read_all("-").c_str(), ing_strict ? 1 : 0, &report.p));
      } else {
        check(trajseg_store_ingest_file(s, ing_in.c_str(), ing_strict ? 1 : 0, &report.p));
      }
      check(trajseg_store_save(s, ing_store.c_str()));
      std::cout << report.str() << '\n';
    } else if (*query) {
      const StorePtr store = open_store(q_store);
      CString result;
      check(trajseg_store_query(store.get(), read_all(q_spec).c_str(), &result.p));
      std::cout << result.str() << '\n';
    } else if (*plot) {
      trajseg_plot mode = TRAJSEG_PLOT_RAW;
      if (p_mode == "raw") {
        mode = TRAJSEG_PLOT_RAW;
      } else if (p_mode == "segmented") {
        mode = TRAJSEG_PLOT_SEGMENTED;
      } else if (p_mode == "heatmap") {
        mode = TRAJSEG_PLOT_HEATMAP;
      } else {
        throw Failure("--mode must be raw, segmented or heatmap, got '" + p_mode + "'");
      }
      if (p_store.empty() && p_in.empty()) {
        throw Failure("plot needs --store or --in");
      }
      const trajseg_params params = p_params.get();
      const StorePtr store = p_store.empty() ? memory_store(params, p_in) : open_store(p_store);
      const double cell = p_cell > 0.0 ? p_cell : 0.5 * params.min_r;
      CString svg;
      check(trajseg_store_plot_svg(store.get(), mode, cell, &svg.p));
      write_all(p_out, svg.str());
    } else if (*stats) {
      const StorePtr store = open_store(s_store);
      CString j;
      check(trajseg_store_stats(store.get(), &j.p));
      std::cout << j.str() << '\n';
    } else if (*serve) {
      nlohmann::json config = sv_config.empty() ? nlohmann::json::object() : nlohmann::json::parse(read_all(sv_config));
      if (!config.is_object()) {
        throw Failure("service config must be a JSON object");
      }
      // Flags override the file; the environment overrides both.
      if (!sv_listen.empty()) {
        config["listen"] = sv_listen;
      }
      if (!sv_data.empty()) {
        config["data_dir"] = sv_data;
      }
      check(trajseg_serve(config.dump().c_str()));
    }
  } catch (const nlohmann::json::exception& e) {
    std::cerr << "error: malformed JSON: " << e.what() << '\n';
    return 1;
  } catch (const Failure& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}

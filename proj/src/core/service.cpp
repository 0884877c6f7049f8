#include "core/service.hpp"

#include "core/query.hpp"
#include "core/report.hpp"
#include "core/synth.hpp"
#include "core/text.hpp"

// CSV uploads often arrive as form-urlencoded; httplib caps those at 8 KiB.
#define CPPHTTPLIB_FORM_URL_ENCODED_PAYLOAD_MAX_LENGTH (std::size_t{1} << 30)
#include <httplib.h>

#include <cstdlib>
#include <fstream>
#include <limits>
#include <mutex>
#include <shared_mutex>
#include <sstream>

namespace trajseg {

using ojson = nlohmann::ordered_json;

void ServiceConfig::set_listen(const std::string& host_port)
{
  const auto colon = host_port.rfind(':');
  if (colon == std::string::npos) {
    throw Error(ErrorCode::InvalidArgument, "listen must be host:port, got '" + host_port + "'");
  }
  const auto port_num = text::parse_double(host_port.substr(colon + 1));
  if (!port_num || *port_num < 0 || *port_num > 65535 || *port_num != static_cast<int>(*port_num)) {
    throw Error(ErrorCode::InvalidArgument, "listen port must be 0-65535, got '" + host_port + "'");
  }
  host = host_port.substr(0, colon);
  port = static_cast<int>(*port_num);
}

ServiceConfig ServiceConfig::from_json(const std::string& text)
{
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(text);
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::Parse, std::string("service config: ") + e.what());
  }
  ServiceConfig c;
  c.params = demo_segmenter_params();
  try {
    if (j.contains("listen")) {
      c.set_listen(j["listen"].get<std::string>());
    }
    if (j.contains("data_dir")) {
      c.data_dir = j["data_dir"].get<std::string>();
    }
    if (j.contains("params")) {
      c.params = params_from_json(j["params"]);
    }
    if (j.contains("cors_allow")) {
      c.cors_allow = j["cors_allow"].get<std::vector<std::string>>();
    }
    if (j.contains("raw_cap")) {
      c.raw_cap = j["raw_cap"].get<std::size_t>();
    }
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::Parse, std::string("service config: ") + e.what());
  }
  c.validate();
  return c;
}

ServiceConfig ServiceConfig::from_file(const std::filesystem::path& path)
{
  std::ifstream in(path);
  if (!in) {
    throw Error(ErrorCode::Io, "cannot read " + path.string());
  }
  std::ostringstream ss;
  ss << in.rdbuf();
  return from_json(ss.str());
}

void ServiceConfig::apply_env()
{
  if (const char* v = std::getenv("TRAJ_LISTEN"); v && *v) {
    set_listen(v);
  }
  if (const char* v = std::getenv("TRAJ_DATA_DIR"); v && *v) {
    data_dir = v;
  }
}

void ServiceConfig::validate() const
{
  params.validate();
  if (raw_cap == 0) {
    throw Error(ErrorCode::InvalidArgument, "raw_cap must be > 0");
  }
  if (port < 0 || port > 65535) {
    throw Error(ErrorCode::InvalidArgument, "port must be 0-65535");
  }
}

namespace {

int status_for(ErrorCode c)
{
  switch (c) {
  case ErrorCode::NotFound: return 404;
  case ErrorCode::Io: return 500;
  case ErrorCode::DisjointTime: return 422;
  default: return 400;
  }
}

void send_json(httplib::Response& res, int status, const ojson& body)
{
  res.status = status;
  res.set_content(body.dump(), "application/json");
}

void send_error(httplib::Response& res, int status, const std::string& msg, ojson extra = ojson::object())
{
  ojson body;
  body["error"] = msg;
  for (auto& [k, v] : extra.items()) {
    body[k] = v;
  }
  send_json(res, status, body);
}

double query_double(const httplib::Request& req, const char* key, double fallback)
{
  if (!req.has_param(key)) {
    return fallback;
  }
  const auto v = text::parse_double(req.get_param_value(key));
  if (!v) {
    throw Error(ErrorCode::InvalidArgument, std::string("query parameter ") + key + " is not a number");
  }
  return *v;
}

std::optional<bool> query_bool(const httplib::Request& req, const char* key)
{
  if (!req.has_param(key)) {
    return std::nullopt;
  }
  const auto v = req.get_param_value(key);
  if (v == "1" || v == "true") {
    return true;
  }
  if (v == "0" || v == "false") {
    return false;
  }
  throw Error(ErrorCode::InvalidArgument, std::string("query parameter ") + key + " must be true or false");
}

ojson rect_json(const Rect& r) { return ojson::array({r.min_x, r.min_y, r.max_x, r.max_y}); }

} // namespace

struct Service::Impl
{
  ServiceConfig config;
  Database db;
  mutable std::shared_mutex mutex;
  httplib::Server server;
  bool bound = false;

  Impl(ServiceConfig c, Database d)
    : config(std::move(c))
    , db(std::move(d))
  {
    routes();
  }

  template <class F>
  httplib::Server::Handler guarded(F f)
  {
    return [f](const httplib::Request& req, httplib::Response& res) {
      try {
        f(req, res);
      } catch (const DisjointTimeError& e) {
        ojson spans;
        spans[e.id_a] = ojson::array({e.a_begin, e.a_end});
        spans[e.id_b] = ojson::array({e.b_begin, e.b_end});
        send_error(res, 422, e.what(), ojson{{"spans", spans}});
      } catch (const Error& e) {
        send_error(res, status_for(e.code()), e.what());
      } catch (const nlohmann::json::exception& e) {
        send_error(res, 400, std::string("malformed JSON: ") + e.what());
      }
    };
  }

  void routes()
  {
    server.set_post_routing_handler([this](const httplib::Request& req, httplib::Response& res) {
      if (!req.has_header("Origin")) {
        return;
      }
      const auto origin = req.get_header_value("Origin");
      for (const auto& allowed : config.cors_allow) {
        if (allowed == "*" || allowed == origin) {
          res.set_header("Access-Control-Allow-Origin", allowed == "*" ? "*" : origin);
          res.set_header("Vary", "Origin");
          return;
        }
      }
    });
    server.Options(R"(/.*)", [](const httplib::Request&, httplib::Response& res) {
      res.set_header("Access-Control-Allow-Methods", "GET, POST, OPTIONS");
      res.set_header("Access-Control-Allow-Headers", "Content-Type");
      res.status = 204;
    });

    server.Get("/meta", guarded([this](const httplib::Request&, httplib::Response& res) {
      std::shared_lock lock(mutex);
      ojson j;
      j["params"] = params_to_json(db.params());
      j["projection"] = projection_to_json(db.projection());
      j["trajectories"] = db.segments().ids().size();
      j["summaries"] = db.segments().size();
      j["raw_points"] = db.raw().total_points();
      j["raw_cap"] = config.raw_cap;
      send_json(res, 200, j);
    }));

    server.Get("/trajectories", guarded([this](const httplib::Request&, httplib::Response& res) {
      std::shared_lock lock(mutex);
      ojson list = ojson::array();
      for (const auto& id : db.segments().ids()) {
        const auto sums = db.segments().for_trajectory(id);
        ojson t;
        t["id"] = id;
        t["bbox"] = rect_json(db.segments().trajectory_bounds(id));
        t["t_start"] = sums.front().t_start;
        t["t_end"] = sums.back().t_end;
        t["summaries"] = sums.size();
        list.push_back(t);
      }
      send_json(res, 200, ojson{{"trajectories", list}});
    }));

    server.Get(R"(/trajectories/([^/]+)/segments)", guarded([this](const httplib::Request& req,
                                                                    httplib::Response& res) {
      std::shared_lock lock(mutex);
      const std::string id = req.matches[1];
      const auto sums = db.segments().for_trajectory(id);
      ojson features = ojson::array();
      ojson line;
      line["type"] = "Feature";
      ojson coords = ojson::array();
      for (const auto& s : sums) {
        coords.push_back(ojson::array({s.centroid.x, s.centroid.y}));
      }
      line["geometry"] = ojson{{"type", "LineString"}, {"coordinates", coords}};
      line["properties"] = ojson{{"traj_id", id}};
      features.push_back(line);
      for (const auto& s : sums) {
        ojson f;
        f["type"] = "Feature";
        f["geometry"] = ojson{{"type", "Point"}, {"coordinates", ojson::array({s.centroid.x, s.centroid.y})}};
        ojson props;
        props["radius"] = s.radius;
        props["kind"] = to_string(s.kind);
        props["n_points"] = s.n_points;
        props["t_rep"] = s.t_rep;
        props["t_start"] = s.t_start;
        props["t_end"] = s.t_end;
        f["properties"] = props;
        features.push_back(f);
      }
      send_json(res, 200, ojson{{"type", "FeatureCollection"}, {"features", features}});
    }));

    server.Get(R"(/trajectories/([^/]+)/raw)", guarded([this](const httplib::Request& req, httplib::Response& res) {
      std::shared_lock lock(mutex);
      const std::string id = req.matches[1];
      const double t0 = query_double(req, "t0", -std::numeric_limits<double>::infinity());
      const double t1 = query_double(req, "t1", std::numeric_limits<double>::infinity());
      const RawSlice s = db.raw().slice(id, t0, t1);
      if (s.points.size() > config.raw_cap) {
        send_error(res, 413,
                   "slice has " + std::to_string(s.points.size()) + " points, above the cap of " +
                     std::to_string(config.raw_cap),
                   ojson{{"points", s.points.size()}, {"raw_cap", config.raw_cap}});
        return;
      }
      ojson coords = ojson::array();
      ojson times = ojson::array();
      for (const auto& p : s.points) {
        coords.push_back(ojson::array({p.pos.x, p.pos.y}));
        times.push_back(p.t);
      }
      ojson j;
      j["type"] = "Feature";
      j["geometry"] = ojson{{"type", "MultiPoint"}, {"coordinates", coords}};
      j["properties"] = ojson{{"traj_id", id}, {"first_index", s.first_index}, {"t", times}};
      send_json(res, 200, j);
    }));

    server.Get("/heatmap", guarded([this](const httplib::Request& req, httplib::Response& res) {
      std::shared_lock lock(mutex);
      const double cell = query_double(req, "cell", 0.5 * db.params().min_r);
      std::optional<Rect> bbox;
      if (req.has_param("bbox")) {
        const auto parts = text::split(req.get_param_value("bbox"), ',');
        std::vector<double> v;
        for (auto p : parts) {
          const auto d = text::parse_double(p);
          if (!d) {
            throw Error(ErrorCode::InvalidArgument, "bbox must be minx,miny,maxx,maxy");
          }
          v.push_back(*d);
        }
        if (v.size() != 4 || !(v[0] < v[2]) || !(v[1] < v[3])) {
          throw Error(ErrorCode::InvalidArgument, "bbox must be minx,miny,maxx,maxy with min < max");
        }
        bbox = Rect{v[0], v[1], v[2], v[3]};
      }
      const HeatmapGrid g = database_heatmap(db, cell, bbox);
      ojson rows = ojson::array();
      for (std::size_t r = 0; r < g.rows; ++r) {
        ojson row = ojson::array();
        for (std::size_t c = 0; c < g.cols; ++c) {
          row.push_back(g.at(c, r));
        }
        rows.push_back(row);
      }
      ojson j;
      j["bounds"] = rect_json(g.bounds);
      j["cell"] = g.cell;
      j["cols"] = g.cols;
      j["rows"] = g.rows;
      j["counts"] = rows;
      send_json(res, 200, j);
    }));

    server.Post("/query", guarded([this](const httplib::Request& req, httplib::Response& res) {
      const QuerySpec spec = query_spec_from_json(nlohmann::json::parse(req.body));
      std::shared_lock lock(mutex);
      send_json(res, 200, query_result_to_json(run_query(db, spec)));
    }));

    server.Post("/ingest", guarded([this](const httplib::Request& req, httplib::Response& res) {
      IngestOptions opts;
      opts.strict = query_bool(req, "strict").value_or(false);
      opts.projection = db.projection();
      std::istringstream in(req.body);
      std::unique_lock lock(mutex);
      const IngestReport report = db.ingest_csv(in, opts);
      if (!config.data_dir.empty()) {
        db.save(config.data_dir);
      }
      send_json(res, 200, report_to_json(report));
    }));
  }
};

namespace {

Database open_or_create(const ServiceConfig& c)
{
  if (!c.data_dir.empty() && Database::exists(c.data_dir)) {
    return Database::open(c.data_dir);
  }
  return Database(c.params);
}

} // namespace

Service::Service(ServiceConfig config)
{
  config.validate();
  Database db = open_or_create(config);
  impl_ = std::make_unique<Impl>(std::move(config), std::move(db));
}

Service::Service(ServiceConfig config, Database db)
{
  config.validate();
  impl_ = std::make_unique<Impl>(std::move(config), std::move(db));
}

Service::~Service() { stop(); }

int Service::bind()
{
  auto& c = impl_->config;
  if (c.port == 0) {
    const int port = impl_->server.bind_to_any_port(c.host);
    if (port < 0) {
      throw Error(ErrorCode::Io, "cannot bind " + c.host);
    }
    c.port = port;
  } else if (!impl_->server.bind_to_port(c.host, c.port)) {
    throw Error(ErrorCode::Io, "cannot bind " + c.host + ":" + std::to_string(c.port));
  }
  impl_->bound = true;
  return c.port;
}

void Service::run()
{
  if (!impl_->bound) {
    bind();
  }
  impl_->server.listen_after_bind();
}

void Service::stop()
{
  if (impl_) {
    impl_->server.stop();
  }
}

void Service::wait_until_ready() const { impl_->server.wait_until_ready(); }

std::uint64_t Service::raw_points_touched() const { return impl_->db.raw().points_touched(); }

void Service::reset_raw_counter() const { impl_->db.raw().reset_touch_counter(); }

} // namespace trajseg

#include "core/query.hpp"
#include "core/report.hpp"
#include "core/service.hpp"
#include "core/synth.hpp"

#include <httplib.h>

#include <gtest/gtest.h>

#include <filesystem>
#include <thread>

using namespace trajseg;
using json = nlohmann::json;

namespace {

Database demo_db()
{
  Database db(demo_segmenter_params());
  for (const auto& t : generate(demo_gen_spec(6, 2))) {
    for (const auto& p : t.points()) {
      db.ingest(t.id(), p.t, p.pos);
    }
  }
  db.flush_all();
  return db;
}

class Running
{
public:
  Running(ServiceConfig c, std::optional<Database> db = std::nullopt)
  {
    c.port = 0;
    service_ = db ? std::make_unique<Service>(std::move(c), std::move(*db)) : std::make_unique<Service>(std::move(c));
    port_ = service_->bind();
    thread_ = std::thread([this] { service_->run(); });
    service_->wait_until_ready();
    client_ = std::make_unique<httplib::Client>("127.0.0.1", port_);
  }
  ~Running()
  {
    service_->stop();
    thread_.join();
  }
  httplib::Client& client() { return *client_; }
  Service& service() { return *service_; }

private:
  std::unique_ptr<Service> service_;
  int port_ = 0;
  std::thread thread_;
  std::unique_ptr<httplib::Client> client_;
};

json get_json(httplib::Client& c, const std::string& path, int expect = 200)
{
  auto r = c.Get(path);
  EXPECT_TRUE(r) << path;
  if (!r) {
    return {};
  }
  EXPECT_EQ(r->status, expect) << path << " " << r->body;
  return json::parse(r->body);
}

json post_json(httplib::Client& c, const std::string& path, const std::string& body, int expect = 200)
{
  auto r = c.Post(path, body, "application/json");
  EXPECT_TRUE(r) << path;
  if (!r) {
    return {};
  }
  EXPECT_EQ(r->status, expect) << path << " " << r->body;
  return json::parse(r->body);
}

} // namespace

TEST(Service, IndexEndpointsNeverTouchRawPoints)
{
  Running s(ServiceConfig{}, demo_db());
  s.service().reset_raw_counter();
  const auto list = get_json(s.client(), "/trajectories");
  ASSERT_EQ(list["trajectories"].size(), 6u);
  EXPECT_EQ(list["trajectories"][0]["id"], "traj_000");
  const auto seg = get_json(s.client(), "/trajectories/traj_001/segments");
  EXPECT_EQ(seg["type"], "FeatureCollection");
  EXPECT_EQ(seg["features"][0]["geometry"]["type"], "LineString");
  EXPECT_EQ(seg["features"][1]["geometry"]["type"], "Point");
  EXPECT_TRUE(seg["features"][1]["properties"].contains("radius"));
  EXPECT_EQ(seg["features"].size(), seg["features"][0]["geometry"]["coordinates"].size() + 1);
  (void)get_json(s.client(), "/meta");
  (void)post_json(s.client(), "/query", R"({"type":"range","rect":[-50,-50,50,50]})");
  (void)post_json(s.client(), "/query", R"({"type":"knn","query_id":"traj_000","k":2})");
  (void)post_json(s.client(), "/query", R"({"type":"meet","dist_tol":2,"time_tol":1})");
  (void)post_json(s.client(), "/query", R"({"type":"closest_approach","id_a":"traj_000","id_b":"traj_001"})");
  EXPECT_EQ(s.service().raw_points_touched(), 0u);
  (void)get_json(s.client(), "/trajectories/traj_001/raw?t0=0&t1=10");
  EXPECT_EQ(s.service().raw_points_touched(), 11u);
}

TEST(Service, QueryMatchesLibrary)
{
  const Database db = demo_db();
  Running s(ServiceConfig{}, demo_db());
  for (const char* spec : {R"({"type":"range","rect":[-50,-50,50,50],"t0":0,"t1":500})",
                           R"({"type":"knn","query_id":"traj_002","k":3,"metric":"dtw"})",
                           R"({"type":"hybrid_meet","target_id":"traj_000","exact_tol":5,"time_tol":1})"}) {
    const auto got = post_json(s.client(), "/query", spec);
    const auto expect = query_result_to_json(run_query(db, query_spec_from_json(json::parse(spec))));
    EXPECT_EQ(got, json::parse(expect.dump())) << spec;
  }
}

TEST(Service, RawSliceAndHeatmap)
{
  const Database db = demo_db();
  Running s(ServiceConfig{}, demo_db());
  const auto raw = get_json(s.client(), "/trajectories/traj_003/raw?t0=5&t1=9.5");
  EXPECT_EQ(raw["geometry"]["type"], "MultiPoint");
  ASSERT_EQ(raw["geometry"]["coordinates"].size(), 5u);
  EXPECT_EQ(raw["properties"]["first_index"], 5);
  EXPECT_EQ(raw["properties"]["t"][0], 5.0);
  EXPECT_EQ(raw["geometry"]["coordinates"][0][0], db.raw().trajectory("traj_003")[5].pos.x);

  const auto hm = get_json(s.client(), "/heatmap?cell=25");
  const auto grid = database_heatmap(db, 25);
  EXPECT_EQ(hm["cols"], grid.cols);
  std::uint64_t total = 0;
  for (const auto& row : hm["counts"]) {
    for (const auto& v : row) {
      total += v.get<std::uint64_t>();
    }
  }
  EXPECT_EQ(total, db.raw().total_points());
  const auto part = get_json(s.client(), "/heatmap?cell=10&bbox=0,0,50,20");
  EXPECT_EQ(part["cols"], 5);
  EXPECT_EQ(part["rows"], 2);
}

TEST(Service, ErrorStatuses)
{
  ServiceConfig c;
  c.raw_cap = 10;
  Running s(c, demo_db());
  EXPECT_EQ(get_json(s.client(), "/trajectories/nobody/segments", 404).count("error"), 1u);
  (void)get_json(s.client(), "/trajectories/nobody/raw", 404);
  const auto big = get_json(s.client(), "/trajectories/traj_000/raw", 413);
  EXPECT_EQ(big["raw_cap"], 10);
  (void)get_json(s.client(), "/trajectories/traj_000/raw?t0=abc", 400);
  (void)get_json(s.client(), "/heatmap?bbox=1,2,3", 400);
  (void)post_json(s.client(), "/query", "{not json", 400);
  (void)post_json(s.client(), "/query", R"({"type":"teleport"})", 400);
  (void)post_json(s.client(), "/query", R"({"type":"closest_approach","id_a":"traj_000","id_b":"x"})", 404);
  auto r = s.client().Get("/no/such/route");
  ASSERT_TRUE(r);
  EXPECT_EQ(r->status, 404);
}

TEST(Service, DisjointTimeIs422WithSpans)
{
  Database db(demo_segmenter_params());
  db.ingest("a", 0, {0, 0});
  db.ingest("b", 10, {0, 0});
  db.flush_all();
  Running s(ServiceConfig{}, std::move(db));
  const auto j = post_json(s.client(), "/query", R"({"type":"closest_approach","id_a":"a","id_b":"b"})", 422);
  EXPECT_EQ(j["spans"]["a"], json::array({0.0, 0.0}));
  EXPECT_EQ(j["spans"]["b"], json::array({10.0, 10.0}));
}

TEST(Service, CorsHeaders)
{
  ServiceConfig c;
  c.cors_allow = {"http://localhost:5173"};
  Running s(c, demo_db());
  auto ok = s.client().Get("/meta", {{"Origin", "http://localhost:5173"}});
  ASSERT_TRUE(ok);
  EXPECT_EQ(ok->get_header_value("Access-Control-Allow-Origin"), "http://localhost:5173");
  auto other = s.client().Get("/meta", {{"Origin", "http://evil.example"}});
  ASSERT_TRUE(other);
  EXPECT_FALSE(other->has_header("Access-Control-Allow-Origin"));
  auto pre = s.client().Options("/query", {{"Origin", "http://localhost:5173"}});
  ASSERT_TRUE(pre);
  EXPECT_EQ(pre->status, 204);
  EXPECT_TRUE(pre->has_header("Access-Control-Allow-Methods"));
}

TEST(Service, IngestPersistsToDataDir)
{
  const auto dir = std::filesystem::temp_directory_path() / ("trajseg_service_" + std::to_string(::getpid()));
  std::filesystem::remove_all(dir);
  ServiceConfig c;
  c.data_dir = dir;
  c.params = demo_segmenter_params();
  const std::string csv = to_csv(generate(demo_gen_spec(20, 42)));
  {
    Running s(c);
    EXPECT_EQ(get_json(s.client(), "/trajectories")["trajectories"].size(), 0u);
    auto r = s.client().Post("/ingest", csv, "text/csv");
    ASSERT_TRUE(r);
    ASSERT_EQ(r->status, 200) << r->body;
    const auto report = json::parse(r->body);
    EXPECT_EQ(report["rejects"], 0);
    EXPECT_EQ(get_json(s.client(), "/trajectories")["trajectories"].size(), 20u);
    auto bad = s.client().Post("/ingest?strict=true", "traj_id,t,x,y\na,0,0\n", "text/csv");
    ASSERT_TRUE(bad);
    EXPECT_EQ(bad->status, 400);
  }
  {
    Running s(c);
    EXPECT_EQ(get_json(s.client(), "/trajectories")["trajectories"].size(), 20u);
  }
  std::filesystem::remove_all(dir);
}

TEST(ServiceConfig, FileEnvAndValidation)
{
  const auto c = ServiceConfig::from_json(R"({"listen":"0.0.0.0:9000","raw_cap":5,"cors_allow":["*"],
                                              "params":{"min_r":3,"min_density":0.5}})");
  EXPECT_EQ(c.host, "0.0.0.0");
  EXPECT_EQ(c.port, 9000);
  EXPECT_EQ(c.raw_cap, 5u);
  EXPECT_EQ(c.params.min_r, 3.0);
  ServiceConfig e = c;
  ::setenv("TRAJ_LISTEN", "127.0.0.1:9100", 1);
  e.apply_env();
  ::unsetenv("TRAJ_LISTEN");
  EXPECT_EQ(e.port, 9100);
  EXPECT_THROW(ServiceConfig::from_json("{"), Error);
  ServiceConfig bad;
  EXPECT_THROW(bad.set_listen("nohostport"), Error);
  bad.raw_cap = 0;
  EXPECT_THROW(bad.validate(), Error);
}

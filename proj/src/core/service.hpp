#pragma once

#include "core/store.hpp"

#include <filesystem>
#include <memory>
#include <string>
#include <vector>

namespace trajseg {

struct ServiceConfig
{
  std::string host = "127.0.0.1";
  int port = 8080; // 0 picks a free port
  std::filesystem::path data_dir; // empty: in-memory only
  SegmenterParams params;
  std::vector<std::string> cors_allow; // origins, or "*"
  std::size_t raw_cap = 100000;        // max points per /raw response

  // Keys: listen ("host:port"), data_dir, params, cors_allow, raw_cap.
  static ServiceConfig from_json(const std::string& text);
  static ServiceConfig from_file(const std::filesystem::path& path);
  // TRAJ_LISTEN and TRAJ_DATA_DIR override the file.
  void apply_env();
  void set_listen(const std::string& host_port);
  void validate() const;
};

// JSON-over-HTTP facade over a Database. Readers share a lock; /ingest takes
// it exclusively.
class Service
{
public:
  explicit Service(ServiceConfig config);
  // Uses db instead of opening config.data_dir.
  Service(ServiceConfig config, Database db);
  ~Service();
  Service(const Service&) = delete;
  Service& operator=(const Service&) = delete;

  // Binds the socket; returns the bound port. Throws Io on failure.
  int bind();
  // Serves until stop(). Call bind() first.
  void run();
  void stop();
  void wait_until_ready() const;

  [[nodiscard]] std::uint64_t raw_points_touched() const;
  void reset_raw_counter() const;

private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

} // namespace trajseg

// Copyright 2026 The Finger-Stylus Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

// Live-drawing network service.
//
//   /draw                          WebSocket; binary frame messages in (see
//                                  wire.hpp), JSON text events out
//   GET  /healthz                  "ok"
//   GET  /config, PUT /config      PipelineConfig JSON; applies to new
//                                  connections only
//   GET  /sessions/<id>/export?format=json|svg|png
//   GET  /metrics                  RunMetrics per connection
//
// Each connection owns one pipeline and one session stream, processed
// serially on a worker pool. A frame arriving while another is being
// processed waits in a single slot; a newer arrival replaces it and the
// replaced frame counts as dropped.

#include <cstdint>
#include <deque>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <string_view>
#include <thread>
#include <vector>

#include <json.hpp>

#include "fingerstylus/config.hpp"
#include "fingerstylus/pipeline.hpp"
#include "fingerstylus/stroke.hpp"

namespace fingerstylus::service {

/// Bounded ring of finished strokes, oldest evicted first. Thread-safe.
class SessionStore {
 public:
  explicit SessionStore(std::size_t capacity = 64) : capacity_(capacity) {}

  void put(stroke::Stroke s);
  std::optional<stroke::Stroke> find(const std::string& id) const;
  std::size_t size() const;
  std::size_t capacity() const { return capacity_; }

 private:
  std::size_t capacity_;
  mutable std::mutex mu_;
  std::deque<stroke::Stroke> ring_;
};

/// Per-connection metrics, retained for finished connections up to a bound.
class ConnectionRegistry {
 public:
  explicit ConnectionRegistry(std::size_t finished_capacity = 64)
      : finished_capacity_(finished_capacity) {}

  std::uint64_t open();
  void record(std::uint64_t id, const pipeline::FrameResult& r);
  void set_dropped(std::uint64_t id, std::int64_t dropped);
  void close(std::uint64_t id);
  nlohmann::ordered_json to_json() const;

 private:
  struct Record {
    bool active = true;
    std::int64_t dropped = 0;
    pipeline::MetricsAccumulator metrics;
  };
  std::size_t finished_capacity_;
  mutable std::mutex mu_;
  std::uint64_t next_id_ = 0;
  std::map<std::uint64_t, Record> records_;
  std::deque<std::uint64_t> finished_;
};

struct HttpResponse {
  int status = 200;
  std::string content_type = "text/plain";
  std::string body;
};

struct ServiceOptions {
  std::string address = "127.0.0.1";
  /// 0 picks an ephemeral port.
  std::uint16_t port = 0;
  std::size_t retain = 64;
  int io_threads = 2;
  int worker_threads = 2;
  PipelineConfig config;
};

/// State shared by all connections.
struct ServiceState {
  explicit ServiceState(const ServiceOptions& opt)
      : store(opt.retain), config(opt.config) {}

  PipelineConfig current_config() const {
    std::lock_guard lock(config_mu);
    return config;
  }
  void replace_config(PipelineConfig c) {
    std::lock_guard lock(config_mu);
    config = std::move(c);
  }

  SessionStore store;
  ConnectionRegistry registry;
  mutable std::mutex config_mu;
  PipelineConfig config;
};

/// Routes a request-response call. Socket-free, so it is testable directly.
HttpResponse handle_http(ServiceState& state, std::string_view method,
                         std::string_view target, std::string_view body);

/// The stored stroke exported in `format`; 404 for an unknown id, 415 for
/// an unsupported format.
HttpResponse export_endpoint(const SessionStore& store, const std::string& session_id,
                             std::string_view format);

class PaintService {
 public:
  explicit PaintService(ServiceOptions opt);
  ~PaintService();
  PaintService(const PaintService&) = delete;
  PaintService& operator=(const PaintService&) = delete;

  /// Binds and starts serving; returns the bound port.
  std::uint16_t start();
  void stop();

  ServiceState& state() { return *state_; }

 private:
  struct Impl;
  ServiceOptions opt_;
  std::shared_ptr<ServiceState> state_;
  std::unique_ptr<Impl> impl_;
};

}  // namespace fingerstylus::service

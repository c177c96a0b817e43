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

#include "fingerstylus/service.hpp"

#include <algorithm>
#include <atomic>

#include <boost/asio/bind_executor.hpp>
#include <boost/asio/dispatch.hpp>
#include <boost/asio/ip/tcp.hpp>
#include <boost/asio/post.hpp>
#include <boost/asio/strand.hpp>
#include <boost/asio/thread_pool.hpp>
#include <boost/beast/core.hpp>
#include <boost/beast/http.hpp>
#include <boost/beast/websocket.hpp>

#include "fingerstylus/wire.hpp"

namespace fingerstylus::service {

namespace beast = boost::beast;
namespace http = beast::http;
namespace websocket = beast::websocket;
namespace net = boost::asio;
using tcp = net::ip::tcp;

// ---------------------------------------------------------------------------
// Shared state

void SessionStore::put(stroke::Stroke s) {
  std::lock_guard lock(mu_);
  ring_.push_back(std::move(s));
  while (ring_.size() > capacity_) ring_.pop_front();
}

std::optional<stroke::Stroke> SessionStore::find(const std::string& id) const {
  std::lock_guard lock(mu_);
  for (auto it = ring_.rbegin(); it != ring_.rend(); ++it) {
    if (it->session_id == id) return *it;
  }
  return std::nullopt;
}

std::size_t SessionStore::size() const {
  std::lock_guard lock(mu_);
  return ring_.size();
}

std::uint64_t ConnectionRegistry::open() {
  std::lock_guard lock(mu_);
  const std::uint64_t id = ++next_id_;
  records_[id] = Record{};
  return id;
}

void ConnectionRegistry::record(std::uint64_t id, const pipeline::FrameResult& r) {
  std::lock_guard lock(mu_);
  if (auto it = records_.find(id); it != records_.end()) it->second.metrics.add(r);
}

void ConnectionRegistry::set_dropped(std::uint64_t id, std::int64_t dropped) {
  std::lock_guard lock(mu_);
  if (auto it = records_.find(id); it != records_.end()) it->second.dropped = dropped;
}

void ConnectionRegistry::close(std::uint64_t id) {
  std::lock_guard lock(mu_);
  auto it = records_.find(id);
  if (it == records_.end() || !it->second.active) return;
  it->second.active = false;
  finished_.push_back(id);
  while (finished_.size() > finished_capacity_) {
    records_.erase(finished_.front());
    finished_.pop_front();
  }
}

nlohmann::ordered_json ConnectionRegistry::to_json() const {
  std::lock_guard lock(mu_);
  auto list = nlohmann::ordered_json::array();
  for (const auto& [id, rec] : records_) {
    nlohmann::ordered_json j;
    j["id"] = id;
    j["active"] = rec.active;
    j["dropped"] = rec.dropped;
    j["run_metrics"] = pipeline::metrics_to_json(rec.metrics.metrics());
    list.push_back(std::move(j));
  }
  nlohmann::ordered_json out;
  out["connections"] = std::move(list);
  return out;
}

// ---------------------------------------------------------------------------
// Request/response routes

namespace {

HttpResponse text(int status, std::string body) {
  return {status, "text/plain", std::move(body)};
}

std::string query_param(std::string_view query, std::string_view key) {
  while (!query.empty()) {
    const auto amp = query.find('&');
    const std::string_view pair = query.substr(0, amp);
    const auto eq = pair.find('=');
    if (pair.substr(0, eq) == key) {
      return eq == std::string_view::npos ? "" : std::string(pair.substr(eq + 1));
    }
    if (amp == std::string_view::npos) break;
    query.remove_prefix(amp + 1);
  }
  return {};
}

}  // namespace

HttpResponse export_endpoint(const SessionStore& store, const std::string& session_id,
                             std::string_view format) {
  stroke::ExportFormat f;
  try {
    f = stroke::parse_export_format(format);
  } catch (const stroke::UnsupportedFormat& e) {
    return text(415, e.what());
  }
  const auto s = store.find(session_id);
  if (!s) return text(404, "no retained session " + session_id);
  return {200, std::string(stroke::content_type(f)), stroke::export_stroke(*s, f)};
}

HttpResponse handle_http(ServiceState& state, std::string_view method,
                         std::string_view target, std::string_view body) {
  const auto q = target.find('?');
  const std::string_view path = target.substr(0, q);
  const std::string_view query =
      q == std::string_view::npos ? std::string_view{} : target.substr(q + 1);

  if (path == "/healthz") {
    if (method != "GET") return text(405, "method not allowed");
    return text(200, "ok");
  }
  if (path == "/config") {
    if (method == "GET") {
      return {200, "application/json", config_to_json(state.current_config()).dump()};
    }
    if (method == "PUT") {
      try {
        auto j = nlohmann::json::parse(body);
        PipelineConfig c = config_from_json(j);
        state.replace_config(c);
        return {200, "application/json", config_to_json(c).dump()};
      } catch (const std::exception& e) {
        return text(400, std::string("invalid config: ") + e.what());
      }
    }
    return text(405, "method not allowed");
  }
  if (path == "/metrics") {
    if (method != "GET") return text(405, "method not allowed");
    return {200, "application/json", state.registry.to_json().dump()};
  }
  constexpr std::string_view kSessions = "/sessions/";
  constexpr std::string_view kExport = "/export";
  if (path.starts_with(kSessions) && path.ends_with(kExport) &&
      path.size() > kSessions.size() + kExport.size()) {
    if (method != "GET") return text(405, "method not allowed");
    const std::string id(path.substr(kSessions.size(),
                                     path.size() - kSessions.size() - kExport.size()));
    std::string format = query_param(query, "format");
    if (format.empty()) format = "json";
    return export_endpoint(state.store, id, format);
  }
  return text(404, "not found");
}

// ---------------------------------------------------------------------------
// /draw connection

namespace {

class DrawConnection : public std::enable_shared_from_this<DrawConnection> {
 public:
  DrawConnection(tcp::socket&& socket, std::shared_ptr<ServiceState> state,
                 net::thread_pool& pool)
      : ws_(std::move(socket)),
        state_(std::move(state)),
        lane_(net::make_strand(pool)),
        conn_id_(state_->registry.open()),
        pipeline_(state_->current_config(), "c" + std::to_string(conn_id_) + "-s") {}

  void run(http::request<http::string_body> req) {
    beast::get_lowest_layer(ws_).expires_never();
    beast::get_lowest_layer(ws_).socket().set_option(tcp::no_delay(true));
    ws_.set_option(websocket::stream_base::timeout::suggested(beast::role_type::server));
    ws_.read_message_max(64ull << 20);
    ws_.async_accept(req, beast::bind_front_handler(&DrawConnection::on_accept,
                                                    shared_from_this()));
  }

 private:
  void on_accept(beast::error_code ec) {
    if (ec) {
      disconnect();
      return;
    }
    do_read();
  }

  void do_read() {
    ws_.async_read(buffer_, beast::bind_front_handler(&DrawConnection::on_read,
                                                      shared_from_this()));
  }

  void on_read(beast::error_code ec, std::size_t) {
    if (ec) {
      disconnect();
      return;
    }
    if (!ws_.got_binary()) {
      buffer_.consume(buffer_.size());
      fail_and_close("text messages are not accepted; send binary frame messages");
      return;
    }
    const auto data = buffer_.data();
    const std::span<const std::uint8_t> bytes(static_cast<const std::uint8_t*>(data.data()),
                                              data.size());
    wire::ClientMessage msg = wire::decode_client_message(bytes);
    buffer_.consume(buffer_.size());

    if (auto* err = std::get_if<wire::WireError>(&msg)) {
      if (err->kind == wire::WireErrorKind::Malformed) {
        fail_and_close(err->message);
        return;
      }
      send(wire::error_event(err->message));
    } else if (auto* frame = std::get_if<wire::FrameMessage>(&msg)) {
      submit_frame(std::move(frame->frame));
    } else {
      submit_flush();
    }
    do_read();
  }

  // Runs on the websocket strand.
  void send(nlohmann::ordered_json event) {
    if (closed_) return;
    event["seq"] = ++seq_;
    outbox_.push_back(event.dump());
    if (outbox_.size() == 1) do_write();
  }

  void do_write() {
    ws_.text(true);
    ws_.async_write(net::buffer(outbox_.front()),
                    beast::bind_front_handler(&DrawConnection::on_write,
                                              shared_from_this()));
  }

  void on_write(beast::error_code ec, std::size_t) {
    if (ec) {
      closed_ = true;
      outbox_.clear();
      disconnect();
      return;
    }
    outbox_.pop_front();
    if (!outbox_.empty()) {
      do_write();
    } else if (close_after_drain_) {
      do_close();
    }
  }

  void fail_and_close(const std::string& message) {
    send(wire::error_event(message));
    close_after_drain_ = true;
    if (outbox_.empty()) do_close();
    disconnect();
  }

  void do_close() {
    if (closed_) return;
    closed_ = true;
    ws_.async_close(websocket::close_code::policy_error,
                    [self = shared_from_this()](beast::error_code) {});
  }

  // Posts events produced on the lane back to the websocket strand.
  void post_events(std::vector<nlohmann::ordered_json> events) {
    net::post(ws_.get_executor(), [self = shared_from_this(), ev = std::move(events)]() mutable {
      for (auto& e : ev) self->send(std::move(e));
    });
  }

  // --- processing lane -----------------------------------------------------

  void submit_frame(imaging::FrameRgb frame) {
    std::lock_guard lock(mu_);
    if (pending_frame_) {
      ++dropped_;
      state_->registry.set_dropped(conn_id_, dropped_);
    }
    pending_frame_ = std::move(frame);
    kick_locked();
  }

  void submit_flush() {
    std::lock_guard lock(mu_);
    flush_pending_ = true;
    kick_locked();
  }

  // Client went away: the active session is ended and retained, unsent.
  void disconnect() {
    std::lock_guard lock(mu_);
    if (disconnected_) return;
    disconnected_ = true;
    kick_locked();
  }

  void kick_locked() {
    if (busy_) return;
    busy_ = true;
    net::post(lane_, [self = shared_from_this()] { self->drain(); });
  }

  void drain() {
    for (;;) {
      std::optional<imaging::FrameRgb> frame;
      bool flush = false;
      bool gone = false;
      std::int64_t dropped = 0;
      {
        std::lock_guard lock(mu_);
        if (pending_frame_) {
          frame = std::move(pending_frame_);
          pending_frame_.reset();
        } else if (flush_pending_) {
          flush = true;
          flush_pending_ = false;
        } else if (disconnected_ && !finished_) {
          gone = true;
          finished_ = true;
        } else {
          busy_ = false;
          return;
        }
        dropped = dropped_;
      }
      if (frame) {
        process(*frame, dropped);
      } else if (flush) {
        std::vector<nlohmann::ordered_json> out;
        for (const auto& e : pipeline_.finish()) {
          retain(e);
          out.push_back(wire::session_event(e));
        }
        post_events(std::move(out));
      } else if (gone) {
        for (const auto& e : pipeline_.finish()) retain(e);
        state_->registry.close(conn_id_);
      }
    }
  }

  void process(const imaging::FrameRgb& frame, std::int64_t dropped) {
    std::vector<nlohmann::ordered_json> out;
    try {
      pipeline::FrameResult r = pipeline_.process(frame);
      state_->registry.record(conn_id_, r);
      out.push_back(wire::detection_event(r, pipeline_.session().id, dropped));
      for (const auto& e : r.events) {
        retain(e);
        out.push_back(wire::session_event(e));
      }
    } catch (const std::exception& e) {
      out.push_back(wire::error_event(e.what()));
    }
    post_events(std::move(out));
  }

  void retain(const stroke::SessionEvent& e) {
    if (const auto* end = std::get_if<stroke::SessionEnded>(&e)) state_->store.put(end->stroke);
  }

  websocket::stream<beast::tcp_stream> ws_;
  beast::flat_buffer buffer_;
  std::shared_ptr<ServiceState> state_;

  // Websocket strand only.
  std::deque<std::string> outbox_;
  std::uint64_t seq_ = 0;
  bool closed_ = false;
  bool close_after_drain_ = false;

  net::strand<net::thread_pool::executor_type> lane_;
  std::uint64_t conn_id_;
  // Lane only.
  pipeline::Pipeline pipeline_;

  std::mutex mu_;
  std::optional<imaging::FrameRgb> pending_frame_;
  bool flush_pending_ = false;
  bool disconnected_ = false;
  bool finished_ = false;
  bool busy_ = false;
  std::int64_t dropped_ = 0;
};

// ---------------------------------------------------------------------------
// Plain HTTP session, upgraded on /draw

class HttpSession : public std::enable_shared_from_this<HttpSession> {
 public:
  HttpSession(tcp::socket&& socket, std::shared_ptr<ServiceState> state,
              net::thread_pool& pool)
      : stream_(std::move(socket)), state_(std::move(state)), pool_(pool) {}

  void run() {
    net::dispatch(stream_.get_executor(),
                  beast::bind_front_handler(&HttpSession::do_read, shared_from_this()));
  }

 private:
  void do_read() {
    req_ = {};
    stream_.expires_after(std::chrono::seconds(30));
    http::async_read(stream_, buffer_, req_,
                     beast::bind_front_handler(&HttpSession::on_read, shared_from_this()));
  }

  void on_read(beast::error_code ec, std::size_t) {
    if (ec) {
      beast::error_code ignored;
      stream_.socket().shutdown(tcp::socket::shutdown_send, ignored);
      return;
    }
    if (websocket::is_upgrade(req_)) {
      if (req_.target() == "/draw") {
        std::make_shared<DrawConnection>(stream_.release_socket(), state_, pool_)
            ->run(std::move(req_));
        return;
      }
      reply(text(404, "no websocket endpoint at this path"));
      return;
    }
    const std::string method(req_.method_string());
    const std::string target(req_.target());
    reply(handle_http(*state_, method, target, req_.body()));
  }

  void reply(HttpResponse r) {
    auto res = std::make_shared<http::response<http::string_body>>(
        static_cast<http::status>(r.status), req_.version());
    res->set(http::field::server, "fingerstylus");
    res->set(http::field::content_type, r.content_type);
    res->keep_alive(req_.keep_alive());
    res->body() = std::move(r.body);
    res->prepare_payload();
    http::async_write(stream_, *res,
                      [self = shared_from_this(), res](beast::error_code ec, std::size_t) {
                        if (ec) return;
                        if (!res->keep_alive()) {
                          beast::error_code ignored;
                          self->stream_.socket().shutdown(tcp::socket::shutdown_send,
                                                          ignored);
                          return;
                        }
                        self->do_read();
                      });
  }

  beast::tcp_stream stream_;
  beast::flat_buffer buffer_;
  http::request<http::string_body> req_;
  std::shared_ptr<ServiceState> state_;
  net::thread_pool& pool_;
};

}  // namespace

// ---------------------------------------------------------------------------
// Server

struct PaintService::Impl {
  Impl(int io_threads, int worker_threads)
      : ioc(std::max(io_threads, 1)),
        pool(static_cast<std::size_t>(std::max(worker_threads, 1))),
        acceptor(net::make_strand(ioc)) {}

  void accept(const std::shared_ptr<ServiceState>& state) {
    acceptor.async_accept(net::make_strand(ioc),
                          [this, state](beast::error_code ec, tcp::socket socket) {
                            if (ec) {
                              if (ec == net::error::operation_aborted) return;
                            } else {
                              std::make_shared<HttpSession>(std::move(socket), state, pool)
                                  ->run();
                            }
                            accept(state);
                          });
  }

  net::io_context ioc;
  net::thread_pool pool;
  tcp::acceptor acceptor;
  std::vector<std::thread> threads;
  bool running = false;
};

PaintService::PaintService(ServiceOptions opt)
    : opt_(std::move(opt)), state_(std::make_shared<ServiceState>(opt_)) {
  opt_.config.validate();
}

PaintService::~PaintService() { stop(); }

std::uint16_t PaintService::start() {
  if (impl_ && impl_->running) return impl_->acceptor.local_endpoint().port();
  impl_ = std::make_unique<Impl>(opt_.io_threads, opt_.worker_threads);
  const tcp::endpoint ep(net::ip::make_address(opt_.address), opt_.port);
  impl_->acceptor.open(ep.protocol());
  impl_->acceptor.set_option(net::socket_base::reuse_address(true));
  impl_->acceptor.bind(ep);
  impl_->acceptor.listen(net::socket_base::max_listen_connections);
  impl_->accept(state_);
  for (int i = 0; i < std::max(opt_.io_threads, 1); ++i) {
    impl_->threads.emplace_back([this] { impl_->ioc.run(); });
  }
  impl_->running = true;
  return impl_->acceptor.local_endpoint().port();
}

void PaintService::stop() {
  if (!impl_ || !impl_->running) return;
  impl_->running = false;
  net::post(impl_->acceptor.get_executor(), [this] {
    beast::error_code ignored;
    impl_->acceptor.close(ignored);
  });
  impl_->ioc.stop();
  for (auto& t : impl_->threads) t.join();
  impl_->threads.clear();
  impl_->pool.join();
}

}  // namespace fingerstylus::service

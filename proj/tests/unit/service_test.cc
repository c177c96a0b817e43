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

#include <gtest/gtest.h>

#include <chrono>
#include <thread>

#include "fingerstylus/service.hpp"
#include "fingerstylus/synthbench.hpp"
#include "fingerstylus/wire.hpp"
#include "loopback_client.hpp"

namespace fingerstylus::service {
namespace {

using testing::DrawClient;
using testing::http_get;
using testing::http_request;
namespace http = boost::beast::http;

stroke::Stroke sample_stroke(const std::string& id) {
  stroke::Stroke s;
  s.session_id = id;
  s.frame_w = 320;
  s.frame_h = 240;
  s.screen_w = 64;
  s.screen_h = 36;
  s.thickness = 3;
  s.points = {{1, 2, 3, 4, 0}, {30, 20, 100, 120, 83}};
  return s;
}

TEST(SessionStoreTest, EvictsOldest) {
  SessionStore store(2);
  store.put(sample_stroke("a"));
  store.put(sample_stroke("b"));
  store.put(sample_stroke("c"));
  EXPECT_EQ(store.size(), 2u);
  EXPECT_FALSE(store.find("a").has_value());
  EXPECT_TRUE(store.find("c").has_value());
}

TEST(ExportEndpointTest, Formats) {
  SessionStore store;
  const stroke::Stroke s = sample_stroke("s1");
  store.put(s);
  const HttpResponse json = export_endpoint(store, "s1", "json");
  EXPECT_EQ(json.status, 200);
  EXPECT_EQ(json.content_type, "application/json");
  EXPECT_EQ(json.body, stroke::export_stroke(s, stroke::ExportFormat::Json));
  EXPECT_EQ(export_endpoint(store, "s1", "svg").content_type, "image/svg+xml");
  EXPECT_EQ(export_endpoint(store, "s1", "png").content_type, "image/png");
  EXPECT_EQ(export_endpoint(store, "nope", "json").status, 404);
  EXPECT_EQ(export_endpoint(store, "s1", "bmp").status, 415);
}

TEST(HandleHttpTest, Routes) {
  ServiceOptions opt;
  ServiceState st(opt);
  st.store.put(sample_stroke("c1-s1"));
  EXPECT_EQ(handle_http(st, "GET", "/healthz", "").body, "ok");
  EXPECT_EQ(handle_http(st, "POST", "/healthz", "").status, 405);
  EXPECT_EQ(handle_http(st, "GET", "/elsewhere", "").status, 404);
  EXPECT_EQ(handle_http(st, "GET", "/sessions/c1-s1/export?format=svg", "").content_type,
            "image/svg+xml");
  EXPECT_EQ(handle_http(st, "GET", "/sessions/c1-s1/export", "").content_type,
            "application/json");
  EXPECT_EQ(handle_http(st, "GET", "/sessions//export", "").status, 404);
  const auto m = nlohmann::json::parse(handle_http(st, "GET", "/metrics", "").body);
  EXPECT_TRUE(m["connections"].is_array());
}

TEST(HandleHttpTest, ConfigReadAndReplace) {
  ServiceOptions opt;
  ServiceState st(opt);
  const auto got = nlohmann::json::parse(handle_http(st, "GET", "/config", "").body);
  EXPECT_EQ(got["margin"], 4);
  EXPECT_EQ(handle_http(st, "PUT", "/config", R"({"margin": 7})").status, 200);
  EXPECT_EQ(st.current_config().margin, 7);
  EXPECT_EQ(handle_http(st, "PUT", "/config", R"({"bogus": 1})").status, 400);
  EXPECT_EQ(handle_http(st, "PUT", "/config", "{").status, 400);
  EXPECT_EQ(st.current_config().margin, 7);
}

class LoopbackTest : public ::testing::Test {
 protected:
  void SetUp() override {
    ServiceOptions opt;
    opt.worker_threads = 2;
    svc_ = std::make_unique<PaintService>(opt);
    port_ = svc_->start();
  }
  void TearDown() override { svc_->stop(); }

  std::unique_ptr<PaintService> svc_;
  std::uint16_t port_ = 0;
};

TEST_F(LoopbackTest, Healthz) {
  const auto r = http_get(port_, "/healthz");
  EXPECT_EQ(r.status, 200);
  EXPECT_EQ(r.body, "ok");
  EXPECT_EQ(http_get(port_, "/nowhere").status, 404);
}

TEST_F(LoopbackTest, UpgradeElsewhereIsNotFound) {
  EXPECT_EQ(http_request(port_, http::verb::get, "/other", "", true).status, 404);
}

TEST_F(LoopbackTest, EmptyFrameGivesNullDetection) {
  DrawClient c(port_);
  c.send(wire::encode_raw_frame(imaging::FrameRgb(32, 24, imaging::Rgb{255, 255, 255})));
  const auto e = c.read_event();
  EXPECT_EQ(e["seq"], 1);
  EXPECT_EQ(e["type"], "detection");
  EXPECT_TRUE(e["tip"].is_null());
}

TEST_F(LoopbackTest, OversizedFrameKeepsConnection) {
  DrawClient c(port_);
  c.send(wire::encode_header({wire::MsgType::Raw, 10000, 10, 0}));
  const auto err = c.read_event();
  EXPECT_EQ(err["type"], "error");
  EXPECT_EQ(err["seq"], 1);
  c.send(wire::encode_raw_frame(imaging::FrameRgb(8, 8)));
  const auto det = c.read_event();
  EXPECT_EQ(det["type"], "detection");
  EXPECT_EQ(det["seq"], 2);
}

TEST_F(LoopbackTest, MalformedHeaderClosesConnection) {
  DrawClient c(port_);
  c.send(std::string(5, '\x01'));
  EXPECT_EQ(c.read_event()["type"], "error");
  EXPECT_TRUE(c.read_event().is_null());
}

TEST_F(LoopbackTest, TextMessageClosesConnection) {
  DrawClient c(port_);
  c.send_text("hello");
  EXPECT_EQ(c.read_event()["type"], "error");
  EXPECT_TRUE(c.read_event().is_null());
}

TEST_F(LoopbackTest, InvalidFrameReportsError) {
  DrawClient c(port_);
  c.send(wire::encode_raw_frame(imaging::FrameRgb(1, 4)));
  const auto e = c.read_event();
  EXPECT_EQ(e["type"], "error");
  c.send(wire::encode_raw_frame(imaging::FrameRgb(4, 4)));
  EXPECT_EQ(c.read_event()["type"], "detection");
}

std::vector<imaging::FrameRgb> sweep(int n) {
  synthbench::SweepSpec s;
  s.n_frames = n;
  s.width = 320;
  s.height = 240;
  std::vector<imaging::FrameRgb> out;
  for (auto& f : synthbench::sweep_sequence(s)) out.push_back(std::move(f.frame));
  return out;
}

TEST_F(LoopbackTest, FlushEndsSessionAndExportMatches) {
  const auto frames = sweep(6);
  DrawClient c(port_);
  std::vector<nlohmann::ordered_json> log;
  for (const auto& f : frames) {
    c.send(wire::encode_raw_frame(f));
    c.read_until("detection", log);
  }
  c.send(wire::encode_flush(1000));
  const auto end = c.read_until("session_end", log);
  ASSERT_FALSE(end.is_null());
  const std::string id = end["session_id"];
  EXPECT_EQ(id.rfind("c", 0), 0u);
  const auto r = http_get(port_, "/sessions/" + id + "/export?format=json");
  EXPECT_EQ(r.status, 200);
  EXPECT_EQ(r.content_type, "application/json");
  EXPECT_EQ(r.body, end["stroke"].dump());
  EXPECT_EQ(http_get(port_, "/sessions/" + id + "/export?format=bmp").status, 415);
  EXPECT_EQ(http_get(port_, "/sessions/unknown/export?format=json").status, 404);

  std::int64_t prev = 0;
  for (const auto& e : log) {
    EXPECT_EQ(e["seq"].get<std::int64_t>(), prev + 1);
    prev = e["seq"];
  }
}

TEST_F(LoopbackTest, DisconnectRetainsActiveSession) {
  const auto frames = sweep(4);
  std::string id;
  {
    DrawClient c(port_);
    std::vector<nlohmann::ordered_json> log;
    for (const auto& f : frames) {
      c.send(wire::encode_raw_frame(f));
      const auto d = c.read_until("detection", log);
      id = d["session_id"];
    }
  }
  ASSERT_FALSE(id.empty());
  int status = 0;
  for (int i = 0; i < 100 && status != 200; ++i) {
    status = http_get(port_, "/sessions/" + id + "/export?format=svg").status;
    if (status != 200) std::this_thread::sleep_for(std::chrono::milliseconds(20));
  }
  EXPECT_EQ(status, 200);
  const auto m = nlohmann::json::parse(http_get(port_, "/metrics").body);
  ASSERT_FALSE(m["connections"].empty());
  EXPECT_EQ(m["connections"][0]["run_metrics"]["frames_total"], 4);
}

TEST_F(LoopbackTest, BurstDropsButSequenceStaysOrdered) {
  const auto frames = sweep(12);
  DrawClient c(port_);
  for (const auto& f : frames) c.send(wire::encode_raw_frame(f));
  c.send(wire::encode_flush(5000));
  std::vector<nlohmann::ordered_json> log;
  ASSERT_FALSE(c.read_until("session_end", log).is_null());
  std::int64_t prev = 0;
  std::int64_t detections = 0;
  std::int64_t last_frame = -1;
  std::int64_t dropped = 0;
  for (const auto& e : log) {
    EXPECT_EQ(e["seq"].get<std::int64_t>(), prev + 1);
    prev = e["seq"];
    if (e["type"] == "detection") {
      ++detections;
      EXPECT_GT(e["frame_index"].get<std::int64_t>(), last_frame);
      last_frame = e["frame_index"];
      dropped = e["dropped"];
    }
  }
  EXPECT_GE(detections, 1);
  EXPECT_LE(detections, 12);
  EXPECT_LE(dropped, 12 - detections);
}

TEST_F(LoopbackTest, ConfigAppliesToNewConnections) {
  const auto put = http_request(port_, http::verb::put, "/config",
                                R"({"screen": {"width": 100, "height": 50, "mirror_x": false}})");
  EXPECT_EQ(put.status, 200);
  DrawClient c(port_);
  std::vector<nlohmann::ordered_json> log;
  c.send(wire::encode_raw_frame(sweep(1)[0]));
  const auto d = c.read_until("detection", log);
  ASSERT_FALSE(d["tip"].is_null());
  EXPECT_LT(d["tip"]["sx"].get<int>(), 100);
  EXPECT_LT(d["tip"]["sy"].get<int>(), 50);
}

}  // namespace
}  // namespace fingerstylus::service

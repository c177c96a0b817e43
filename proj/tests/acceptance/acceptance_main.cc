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

// Acceptance gate. Runs every release criterion at its stated tolerance and
// prints one PASS/FAIL line per criterion; exits non-zero if any fails.

#include <algorithm>
#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <functional>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <sys/wait.h>

#include "fingerstylus/fingertip.hpp"
#include "fingerstylus/image_io.hpp"
#include "fingerstylus/pipeline.hpp"
#include "fingerstylus/service.hpp"
#include "fingerstylus/synthbench.hpp"
#include "fingerstylus/wire.hpp"
#include "loopback_client.hpp"

#ifndef FINGERSTYLUS_CLI
#error "FINGERSTYLUS_CLI must name the command-line binary"
#endif

namespace fs = std::filesystem;
using namespace fingerstylus;
using Clock = std::chrono::steady_clock;

namespace {

struct Verdict {
  bool pass = false;
  std::string detail;
};

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

std::string fmt(double v, int digits = 4) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*f", digits, v);
  return buf;
}

Verdict accuracy(synthbench::Regime regime, double min_rate, double max_seconds) {
  synthbench::BenchOptions o;
  o.regime = regime;
  o.n_frames = 200;
  o.tolerance_px = 5.0;
  o.seed = 1;
  const auto t0 = Clock::now();
  const auto r = synthbench::run_benchmark(o);
  const double secs = seconds_since(t0);
  return {r.hit_rate >= min_rate && secs <= max_seconds,
          "hit_rate " + synthbench::fixed4(r.hit_rate) + " (need >= " + fmt(min_rate, 2) +
              "), runtime " + fmt(secs, 2) + " s (limit " + fmt(max_seconds, 0) + " s)"};
}

Verdict latency_budget() {
  synthbench::BenchOptions o;
  o.regime = synthbench::Regime::Complex;
  o.n_frames = 200;
  o.seed = 1;
  const auto r = synthbench::run_benchmark(o);
  const bool mean_ok = r.latency.mean_ms <= 83.0;

  // First mark from the batch metrics on a 320x240 stream.
  synthbench::SweepSpec s;
  s.n_frames = 24;
  s.width = 320;
  s.height = 240;
  std::vector<imaging::FrameRgb> frames;
  for (auto& f : synthbench::sweep_sequence(s)) frames.push_back(std::move(f.frame));
  pipeline::VectorSource src(frames);
  const auto run = pipeline::run_sequence(src, {});
  const bool batch_ok =
      run.metrics.first_mark_latency_ms && *run.metrics.first_mark_latency_ms <= 116.0;

  // The same first mark measured end to end over the live connection: wall
  // clock from sending the first frame to receiving the first point event.
  double wall_ms = -1.0;
  {
    service::ServiceOptions opt;
    service::PaintService svc(opt);
    const auto port = svc.start();
    testing::DrawClient c(port);
    const auto t0 = Clock::now();
    c.send(wire::encode_raw_frame(frames[0]));
    std::vector<nlohmann::ordered_json> log;
    if (!c.read_until("point", log).is_null()) wall_ms = seconds_since(t0) * 1000.0;
    c.close();
    svc.stop();
  }
  const bool wall_ok = wall_ms >= 0.0 && wall_ms <= 116.0;
  return {mean_ok && batch_ok && wall_ok,
          "mean " + fmt(r.latency.mean_ms, 3) + " ms at 640x480 (limit 83), first mark " +
              (run.metrics.first_mark_latency_ms ? fmt(*run.metrics.first_mark_latency_ms, 3)
                                                 : std::string("none")) +
              " ms batch / " + fmt(wall_ms, 3) + " ms loopback at 320x240 (limit 116)"};
}

Verdict oracle_equivalence() {
  synthbench::Rng rng(20261014);
  int compared = 0;
  int mismatches = 0;
  for (int i = 0; i < 1000; ++i) {
    const int w = rng.uniform_int(8, 64);
    const int h = rng.uniform_int(8, 64);
    const double density = rng.uniform(0.05, 0.60);
    const auto e = static_cast<Edge>(rng.uniform_int(0, 3));
    const imaging::SkinMask m = synthbench::random_mask(rng, w, h, density);
    if (!m.any()) continue;
    ++compared;
    const auto ramp = fingertip::ramp_label(m, e);
    const auto clusters = fingertip::detect_tips(ramp);
    const Point got =
        fingertip::cluster_centroid(clusters[fingertip::select_finger(clusters)]);
    if (got != synthbench::oracle_tip(m, e)) ++mismatches;
  }
  return {mismatches == 0 && compared > 0,
          std::to_string(compared - mismatches) + "/" + std::to_string(compared) +
              " masks agree exactly"};
}

Verdict direction_invariance() {
  // Square frames give all four orientations the same canonical canvas, so
  // each HandSpec is valid for every entry edge unchanged.
  constexpr int kSide = 480;
  int failures = 0;
  int specs = 0;
  std::string first_failure;
  for (std::uint64_t i = 0; i < 50; ++i) {
    synthbench::BenchCase bc = synthbench::sample_case(synthbench::Regime::Plain, 99, i,
                                                       kSide, kSide);
    bc.scene.width = kSide;
    bc.scene.height = kSide;
    std::optional<Point> canon;
    ++specs;
    for (Edge e : {Edge::Bottom, Edge::Top, Edge::Left, Edge::Right}) {
      bc.hand.entry = e;
      const auto g = synthbench::gen_frame(bc.hand, bc.scene);
      const auto out = pipeline::process_frame(g.frame, {}, {}, 0);
      if (!out.result.detection) {
        ++failures;
        if (first_failure.empty()) first_failure = "spec " + std::to_string(i) + " no tip";
        break;
      }
      const Point tip = out.result.detection->tip;
      if (e == Edge::Bottom) {
        canon = tip;
        continue;
      }
      if (tip != synthbench::rotate_from_canonical(*canon, e, kSide, kSide)) {
        ++failures;
        if (first_failure.empty()) {
          first_failure = "spec " + std::to_string(i) + " " + std::string(to_string(e));
        }
        break;
      }
    }
  }
  return {failures == 0, std::to_string(specs - failures) + "/" + std::to_string(specs) +
                             " specs rotate exactly across 4 edges" +
                             (first_failure.empty() ? "" : "; first failure " + first_failure)};
}

Verdict ramp_conformance() {
  synthbench::Rng rng(4242);
  int cases = 0;
  int failures = 0;
  while (cases < 10000) {
    const int w = rng.uniform_int(1, 64);
    const int h = rng.uniform_int(1, 64);
    const auto e = static_cast<Edge>(rng.uniform_int(0, 3));
    const imaging::SkinMask m = synthbench::random_mask(rng, w, h, rng.uniform(0.01, 0.9));
    if (!m.any()) continue;
    ++cases;
    const auto r = fingertip::ramp_label(m, e);
    int far = -1;
    for (int y = 0; y < h; ++y) {
      for (int x = 0; x < w; ++x) {
        if (m.get(x, y)) far = std::max(far, fingertip::edge_distance(e, x, y, w, h));
      }
    }
    // Per-distance value must be unique and non-decreasing in distance.
    std::vector<int> by_distance(static_cast<std::size_t>(far) + 1, -1);
    bool ok = true;
    int max_value = 0;
    for (int y = 0; y < h && ok; ++y) {
      for (int x = 0; x < w && ok; ++x) {
        const int v = r.value(x, y);
        if (!m.get(x, y)) {
          ok = v == 0;
          continue;
        }
        const int d = fingertip::edge_distance(e, x, y, w, h);
        auto& slot = by_distance[static_cast<std::size_t>(d)];
        if (slot >= 0 && slot != v) ok = false;
        slot = v;
        max_value = std::max(max_value, v);
        // Finger_edge: value 255 exactly at the farthest distance.
        if ((v == 255) != (d == far)) ok = false;
      }
    }
    int prev = -1;
    for (int v : by_distance) {
      if (v < 0) continue;
      if (v < prev) ok = false;
      prev = v;
    }
    if (max_value != 255) ok = false;
    failures += !ok;
  }
  return {failures == 0, std::to_string(failures) + " failures over " + std::to_string(cases) +
                             " masks"};
}

Verdict brightness_sweep() {
  std::ostringstream detail;
  bool ok = true;
  for (double scale : {0.8, 0.9, 1.0, 1.1, 1.2}) {
    synthbench::BenchOptions o;
    o.n_frames = 200;
    o.seed = 1;
    o.brightness_scale = scale;
    o.chroma_jitter_sigma = 0.0;
    const auto r = synthbench::run_benchmark(o);
    ok &= r.hits == r.n_frames;
    detail << fmt(scale, 1) << ":" << synthbench::fixed4(r.hit_rate) << " ";
  }
  synthbench::BenchOptions dark;
  dark.n_frames = 200;
  dark.seed = 1;
  dark.brightness_scale = 0.1;
  dark.chroma_jitter_sigma = 0.0;
  const auto r = synthbench::run_benchmark(dark);
  ok &= r.detections == 0;
  detail << "| 0.1: " << r.detections << " detections";
  return {ok, detail.str()};
}

int run_cli(const std::string& args, const fs::path& log) {
  const std::string cmd =
      std::string("\"") + FINGERSTYLUS_CLI + "\" " + args + " > \"" + log.string() + "\" 2>&1";
  const int rc = std::system(cmd.c_str());
  return WIFEXITED(rc) ? WEXITSTATUS(rc) : -1;
}

Verdict replay_determinism(const fs::path& work) {
  fs::remove_all(work);
  fs::create_directories(work);
  const fs::path seq = work / "recorded";
  const fs::path log = work / "cli.log";
  if (run_cli("generate --out \"" + seq.string() + "\" --frames 100 --seed 11 --complex", log) != 0) {
    return {false, "generate failed"};
  }
  std::vector<std::string> bytes[2];
  for (int k = 0; k < 2; ++k) {
    const fs::path out = work / ("run" + std::to_string(k));
    fs::create_directories(out);
    const std::string p = "process --input \"" + seq.string() + "\" --out \"" +
                          (out / "stroke.json").string() + "\" --svg \"" +
                          (out / "stroke.svg").string() + "\" --png \"" +
                          (out / "stroke.png").string() + "\"";
    if (run_cli(p, log) != 0) return {false, "process failed"};
    const std::string b = "bench --regime complex --frames 50 --seed 3 --report \"" +
                          (out / "bench.json").string() + "\"";
    if (run_cli(b, log) != 0) return {false, "bench failed"};
    for (const char* name : {"stroke.json", "stroke.svg", "stroke.png", "bench.json"}) {
      bytes[k].push_back(image_io::read_file(out / name));
    }
  }
  const auto points = nlohmann::json::parse(bytes[0][0])["points"].size();
  const bool same = bytes[0] == bytes[1];
  return {same && points > 0, std::string(same ? "identical" : "DIFFERENT") +
                                  " stroke.json/.svg/.png and bench report over two runs (" +
                                  std::to_string(points) + " points)"};
}

std::string event_key(nlohmann::ordered_json e) {
  e.erase("seq");
  return e.dump();
}

Verdict wire_batch_equivalence() {
  synthbench::SweepSpec s;
  s.n_frames = 30;
  s.width = 320;
  s.height = 240;
  std::vector<imaging::FrameRgb> frames;
  for (auto& f : synthbench::sweep_sequence(s)) frames.push_back(std::move(f.frame));

  service::ServiceOptions opt;
  service::PaintService svc(opt);
  const auto port = svc.start();
  std::vector<nlohmann::ordered_json> log;
  {
    testing::DrawClient c(port);
    for (const auto& f : frames) {
      c.send(wire::encode_raw_frame(f));
      c.read_until("detection", log);
    }
    c.send(wire::encode_flush(static_cast<std::uint64_t>(frames.back().timestamp_ms())));
    c.read_until("session_end", log);
    c.close();
  }
  svc.stop();

  std::vector<std::string> got;
  std::int64_t seq = 0;
  bool seq_ok = true;
  std::int64_t dropped = 0;
  for (const auto& e : log) {
    seq_ok &= e["seq"].get<std::int64_t>() == ++seq;
    if (e["type"] == "detection") {
      dropped = e["dropped"];
      continue;
    }
    got.push_back(event_key(e));
  }

  pipeline::VectorSource src(frames);
  const auto run = pipeline::run_sequence(src, {}, "c1-s");
  std::vector<std::string> want;
  int points = 0;
  for (const auto& e : run.all_events()) {
    want.push_back(event_key(wire::session_event(e)));
    points += std::holds_alternative<stroke::PointAdded>(e);
  }
  const bool ok = got == want && seq_ok && dropped == 0;
  return {ok, std::to_string(got.size()) + " session events received, " +
                  std::to_string(want.size()) + " from batch (" + std::to_string(points) +
                  " points); " + (got == want ? "identical" : "DIFFERENT") +
                  (seq_ok ? ", gap-free seq" : ", seq gap")};
}

}  // namespace

int main(int argc, char** argv) {
  const fs::path work = argc > 1 ? fs::path(argv[1])
                                 : fs::temp_directory_path() / "fingerstylus_acceptance";
  struct Criterion {
    const char* name;
    std::function<Verdict()> run;
  };
  const std::vector<Criterion> criteria = {
      {"plain-background accuracy",
       [] { return accuracy(synthbench::Regime::Plain, 0.99, 60.0); }},
      {"complex-background accuracy",
       [] { return accuracy(synthbench::Regime::Complex, 0.96, 120.0); }},
      {"latency budget", latency_budget},
      {"oracle equivalence", oracle_equivalence},
      {"direction invariance", direction_invariance},
      {"ramp conformance", ramp_conformance},
      {"brightness sweep", brightness_sweep},
      {"replay determinism", [&] { return replay_determinism(work); }},
      {"wire/batch equivalence", wire_batch_equivalence},
  };
  int failed = 0;
  for (const auto& c : criteria) {
    Verdict v;
    try {
      v = c.run();
    } catch (const std::exception& e) {
      v = {false, std::string("exception: ") + e.what()};
    }
    failed += !v.pass;
    std::cout << (v.pass ? "PASS " : "FAIL ") << c.name << ": " << v.detail << std::endl;
  }
  std::cout << (criteria.size() - failed) << "/" << criteria.size() << " criteria passed"
            << std::endl;
  return failed == 0 ? 0 : 1;
}

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

#include "fingerstylus/pipeline.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <numeric>

#include "fingerstylus/image_io.hpp"

namespace fingerstylus::pipeline {

using imaging::FrameRgb;
using stroke::Session;

std::string_view stage_name(Stage s) {
  static constexpr std::array<std::string_view, kStageCount> kNames = {
      "convert", "mask", "clean", "blob", "crop", "ramp", "tips", "select", "advance"};
  return kNames[static_cast<std::size_t>(s)];
}

double StageTimings::total_us() const {
  double t = 0.0;
  for (const auto& v : us) t += v.value_or(0.0);
  return t;
}

namespace {

using Clock = std::chrono::steady_clock;

class StageTimer {
 public:
  explicit StageTimer(StageTimings& t) : timings_(t) {}

  template <typename F>
  auto run(Stage s, F&& f) {
    const auto start = Clock::now();
    if constexpr (std::is_void_v<decltype(f())>) {
      f();
      record(s, start);
    } else {
      auto out = f();
      record(s, start);
      return out;
    }
  }

 private:
  void record(Stage s, Clock::time_point start) {
    timings_[s] =
        std::chrono::duration<double, std::micro>(Clock::now() - start).count();
  }
  StageTimings& timings_;
};

}  // namespace

ProcessOutput process_frame(const FrameRgb& frame, Session session,
                            const PipelineConfig& cfg, std::int64_t frame_index) {
  if (frame.width() < 2 || frame.height() < 2 ||
      frame.pixels().size() != static_cast<std::size_t>(frame.width()) * frame.height()) {
    throw InvalidFrame("frame must be at least 2x2 with a complete raster");
  }
  FrameResult r;
  r.frame_index = frame_index;
  r.timestamp_ms = frame.timestamp_ms();
  StageTimer timer(r.timings);

  const auto ycc = timer.run(Stage::Convert, [&] { return imaging::to_ycbcr(frame); });
  const auto raw = timer.run(Stage::Mask,
                             [&] { return imaging::threshold_skin(ycc, cfg.thresholds); });
  const auto mask = timer.run(Stage::Clean, [&] { return imaging::clean_mask(raw); });
  const auto blob = timer.run(Stage::Blob, [&] {
    return imaging::largest_component(mask,
                                      cfg.min_area_for(frame.width(), frame.height()));
  });

  std::optional<fingertip::TipDetection> det;
  if (blob) {
    const auto crop = timer.run(Stage::Crop, [&] {
      return imaging::crop_to_blob(frame, mask, *blob, cfg.margin);
    });
    r.crop_factor = crop.reduction_factor(frame.width(), frame.height());

    const auto ramp = timer.run(Stage::Ramp, [&] {
      const Edge e = fingertip::entry_edge(crop.mask, blob->touches);
      return fingertip::ramp_label(crop.mask, e);
    });
    auto clusters = timer.run(Stage::Tips, [&] { return fingertip::detect_tips(ramp); });

    det = timer.run(Stage::Select, [&]() -> std::optional<fingertip::TipDetection> {
      // Clusters in crop coordinates are kept for the template probe.
      std::vector<fingertip::TipCluster> in_frame = clusters;
      for (auto& c : in_frame) {
        for (Point& p : c) {
          p.x += crop.offset.x;
          p.y += crop.offset.y;
        }
      }
      const std::size_t pick = fingertip::select_finger(in_frame);
      if (cfg.template_check_enabled) {
        r.template_ok = fingertip::template_check(crop.mask, clusters[pick], ramp.entry,
                                                  cfg.tip_halfwidth);
        if (!*r.template_ok) return std::nullopt;
      }
      fingertip::TipDetection d;
      d.cluster = std::move(in_frame[pick]);
      d.tip = fingertip::cluster_centroid(d.cluster);
      d.entry = ramp.entry;
      d.band = fingertip::tip_band(d.tip, cfg.tip_halfwidth, frame.width(),
                                   frame.height());
      return d;
    });
  }

  const stroke::ScreenMap map = cfg.screen_map(frame.width(), frame.height());
  auto adv = timer.run(Stage::Advance, [&] {
    return stroke::advance(std::move(session), det, frame.timestamp_ms(), map,
                           cfg.tracker());
  });
  if (det) r.screen_tip = stroke::map_to_screen(det->tip, map);
  r.detection = std::move(det);
  r.events = std::move(adv.events);
  return {std::move(r), std::move(adv.session)};
}

std::optional<FrameRgb> VectorSource::next() {
  if (pos_ >= frames_.size()) return std::nullopt;
  return frames_[pos_++];
}

std::int64_t synthesized_timestamp_ms(std::size_t index, double fps) {
  return static_cast<std::int64_t>(std::llround(static_cast<double>(index) * 1000.0 / fps));
}

DirectorySource::DirectorySource(const std::filesystem::path& dir, double fps)
    : fps_(fps) {
  if (!(fps > 0.0)) throw std::invalid_argument("fps must be positive");
  for (const auto& entry : std::filesystem::directory_iterator(dir)) {
    if (!entry.is_regular_file()) continue;
    std::string ext = entry.path().extension().string();
    std::transform(ext.begin(), ext.end(), ext.begin(),
                   [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
    if (ext == ".png" || ext == ".ppm") files_.push_back(entry.path());
  }
  std::sort(files_.begin(), files_.end(), [](const auto& a, const auto& b) {
    return a.filename().string() < b.filename().string();
  });
}

std::optional<FrameRgb> DirectorySource::next() {
  if (pos_ >= files_.size()) return std::nullopt;
  const std::size_t i = pos_++;
  try {
    FrameRgb f = image_io::read_image_file(files_[i]);
    f.set_timestamp_ms(synthesized_timestamp_ms(i, fps_));
    return f;
  } catch (const std::exception& e) {
    throw InvalidFrameAt(static_cast<std::int64_t>(i),
                         files_[i].filename().string() + ": " + e.what());
  }
}

void MetricsAccumulator::add(const FrameResult& r) {
  const double ms = r.timings.total_us() / 1000.0;
  if (!t0_) t0_ = r.timestamp_ms;
  ++frames_;
  if (r.detection) ++detections_;
  latency_ms_.push_back(ms);
  if (first_mark_ms_) return;
  for (const auto& e : r.events) {
    if (std::holds_alternative<stroke::PointAdded>(e)) {
      first_mark_ms_ = static_cast<double>(r.timestamp_ms - *t0_) + ms;
      break;
    }
  }
}

RunMetrics MetricsAccumulator::metrics() const {
  RunMetrics m;
  m.frames_total = frames_;
  m.frames_with_detection = detections_;
  m.first_mark_latency_ms = first_mark_ms_;
  if (latency_ms_.empty()) return m;
  const double total = std::accumulate(latency_ms_.begin(), latency_ms_.end(), 0.0);
  m.mean_latency_ms = total / static_cast<double>(latency_ms_.size());
  std::vector<double> sorted = latency_ms_;
  std::sort(sorted.begin(), sorted.end());
  // Nearest-rank percentile.
  const auto rank = static_cast<std::size_t>(
      std::ceil(0.95 * static_cast<double>(sorted.size())));
  m.p95_latency_ms = sorted[std::max<std::size_t>(rank, 1) - 1];
  m.achieved_fps = total > 0.0 ? 1000.0 * static_cast<double>(sorted.size()) / total : 0.0;
  return m;
}

RunMetrics compute_metrics(std::span<const FrameResult> results) {
  MetricsAccumulator acc;
  for (const FrameResult& r : results) acc.add(r);
  return acc.metrics();
}

nlohmann::ordered_json metrics_to_json(const RunMetrics& m) {
  nlohmann::ordered_json j;
  j["frames_total"] = m.frames_total;
  j["frames_with_detection"] = m.frames_with_detection;
  j["first_mark_latency_ms"] = m.first_mark_latency_ms
                                   ? nlohmann::ordered_json(*m.first_mark_latency_ms)
                                   : nlohmann::ordered_json(nullptr);
  j["mean_latency_ms"] = m.mean_latency_ms;
  j["p95_latency_ms"] = m.p95_latency_ms;
  j["achieved_fps"] = m.achieved_fps;
  return j;
}

Pipeline::Pipeline(PipelineConfig cfg, std::string session_id_prefix)
    : cfg_(std::move(cfg)) {
  cfg_.validate();
  session_.id_prefix = std::move(session_id_prefix);
}

FrameResult Pipeline::process(const FrameRgb& frame) {
  auto out = process_frame(frame, std::move(session_), cfg_, next_index_);
  ++next_index_;
  last_timestamp_ms_ = frame.timestamp_ms();
  session_ = std::move(out.session);
  return std::move(out.result);
}

std::vector<stroke::SessionEvent> Pipeline::finish() {
  auto out = stroke::flush(std::move(session_), last_timestamp_ms_);
  session_ = std::move(out.session);
  return std::move(out.events);
}

std::vector<stroke::SessionEvent> RunOutput::all_events() const {
  std::vector<stroke::SessionEvent> all;
  for (const FrameResult& r : results) all.insert(all.end(), r.events.begin(), r.events.end());
  all.insert(all.end(), flush_events.begin(), flush_events.end());
  return all;
}

RunOutput run_sequence(FrameSource& frames, const PipelineConfig& cfg,
                       const std::string& session_id_prefix) {
  Pipeline p(cfg, session_id_prefix);
  RunOutput out;
  auto collect = [&out](const std::vector<stroke::SessionEvent>& events) {
    for (const auto& e : events) {
      if (const auto* end = std::get_if<stroke::SessionEnded>(&e)) {
        out.sessions.push_back(end->stroke);
      }
    }
  };
  for (;;) {
    const std::int64_t index = p.frames_processed();
    std::optional<FrameRgb> frame;
    try {
      frame = frames.next();
    } catch (const InvalidFrameAt&) {
      throw;
    } catch (const std::exception& e) {
      throw InvalidFrameAt(index, e.what());
    }
    if (!frame) break;
    try {
      out.results.push_back(p.process(*frame));
    } catch (const InvalidFrame& e) {
      throw InvalidFrameAt(index, e.what());
    }
    collect(out.results.back().events);
  }
  out.flush_events = p.finish();
  collect(out.flush_events);
  out.metrics = compute_metrics(out.results);
  return out;
}

nlohmann::ordered_json frame_result_to_json(const FrameResult& r) {
  nlohmann::ordered_json j;
  j["frame_index"] = r.frame_index;
  j["timestamp_ms"] = r.timestamp_ms;
  if (r.detection) {
    j["tip"] = {{"fx", r.detection->tip.x},
                {"fy", r.detection->tip.y},
                {"sx", r.screen_tip->x},
                {"sy", r.screen_tip->y}};
    j["entry"] = std::string(to_string(r.detection->entry));
  } else {
    j["tip"] = nullptr;
  }
  j["crop_factor"] = r.crop_factor ? nlohmann::ordered_json(*r.crop_factor)
                                   : nlohmann::ordered_json(nullptr);
  nlohmann::ordered_json t;
  for (std::size_t i = 0; i < kStageCount; ++i) {
    const auto& v = r.timings.us[i];
    t[std::string(stage_name(static_cast<Stage>(i)))] =
        v ? nlohmann::ordered_json(*v) : nlohmann::ordered_json(nullptr);
  }
  j["timings_us"] = std::move(t);
  return j;
}

FrameRgb overlay(const FrameRgb& frame, const FrameResult& r) {
  FrameRgb out = frame;
  if (r.detection) {
    for (const Point& p : r.detection->band) out.at(p.x, p.y) = {255, 0, 0};
  }
  return out;
}

}  // namespace fingerstylus::pipeline

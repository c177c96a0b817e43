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

// Per-frame orchestration: skin mask -> cleanup -> blob -> crop -> ramp ->
// tips -> finger selection -> session tracking, with per-stage timings.

#include <array>
#include <cstdint>
#include <filesystem>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "fingerstylus/config.hpp"
#include "fingerstylus/fingertip.hpp"
#include "fingerstylus/imaging.hpp"
#include "fingerstylus/stroke.hpp"

namespace fingerstylus::pipeline {

enum class Stage : std::size_t {
  Convert,
  Mask,
  Clean,
  Blob,
  Crop,
  Ramp,
  Tips,
  Select,
  Advance,
};
inline constexpr std::size_t kStageCount = 9;

std::string_view stage_name(Stage s);

/// Wall-clock duration of each stage in microseconds; empty when the stage
/// did not run because an earlier one found nothing.
struct StageTimings {
  std::array<std::optional<double>, kStageCount> us{};

  std::optional<double>& operator[](Stage s) { return us[static_cast<std::size_t>(s)]; }
  const std::optional<double>& operator[](Stage s) const {
    return us[static_cast<std::size_t>(s)];
  }
  double total_us() const;
};

struct FrameResult {
  std::int64_t frame_index = 0;
  std::int64_t timestamp_ms = 0;
  std::optional<fingertip::TipDetection> detection;
  /// Screen position of the detected tip.
  std::optional<Point> screen_tip;
  std::vector<stroke::SessionEvent> events;
  StageTimings timings;
  /// Source pixels over cropped pixels, when a blob was found.
  std::optional<double> crop_factor;
  /// Set when template checking ran.
  std::optional<bool> template_ok;
};

class InvalidFrameAt : public InvalidFrame {
 public:
  InvalidFrameAt(std::int64_t index, const std::string& what)
      : InvalidFrame("frame " + std::to_string(index) + ": " + what), index_(index) {}
  std::int64_t index() const { return index_; }

 private:
  std::int64_t index_;
};

struct ProcessOutput {
  FrameResult result;
  stroke::Session session;
};

/// Runs every stage on one frame. Throws InvalidFrame for frames smaller
/// than 2x2 (the screen mapping needs two samples per axis) or with a
/// malformed raster. `cfg` must already be validated.
ProcessOutput process_frame(const imaging::FrameRgb& frame, stroke::Session session,
                            const PipelineConfig& cfg, std::int64_t frame_index = 0);

/// Ordered pull of frames. Returns nullopt at end of input.
class FrameSource {
 public:
  virtual ~FrameSource() = default;
  virtual std::optional<imaging::FrameRgb> next() = 0;
};

class VectorSource : public FrameSource {
 public:
  explicit VectorSource(std::vector<imaging::FrameRgb> frames)
      : frames_(std::move(frames)) {}
  std::optional<imaging::FrameRgb> next() override;

 private:
  std::vector<imaging::FrameRgb> frames_;
  std::size_t pos_ = 0;
};

/// PNG and P6 PPM files of a directory in lexicographic filename order.
/// Timestamps are synthesised as round(i * 1000 / fps).
class DirectorySource : public FrameSource {
 public:
  DirectorySource(const std::filesystem::path& dir, double fps = 12.0);
  std::optional<imaging::FrameRgb> next() override;
  std::size_t size() const { return files_.size(); }

 private:
  std::vector<std::filesystem::path> files_;
  double fps_;
  std::size_t pos_ = 0;
};

std::int64_t synthesized_timestamp_ms(std::size_t index, double fps);

struct RunMetrics {
  std::int64_t frames_total = 0;
  std::int64_t frames_with_detection = 0;
  /// Stream start to the first PointAdded: timestamp delta plus the
  /// processing latency of the frame that produced it.
  std::optional<double> first_mark_latency_ms;
  double mean_latency_ms = 0.0;
  double p95_latency_ms = 0.0;
  /// Frames per second of pipeline processing time.
  double achieved_fps = 0.0;
};

/// Incremental RunMetrics; keeps one latency sample per frame.
class MetricsAccumulator {
 public:
  void add(const FrameResult& r);
  RunMetrics metrics() const;

 private:
  std::int64_t frames_ = 0;
  std::int64_t detections_ = 0;
  std::optional<std::int64_t> t0_;
  std::optional<double> first_mark_ms_;
  std::vector<double> latency_ms_;
};

RunMetrics compute_metrics(std::span<const FrameResult> results);
nlohmann::ordered_json metrics_to_json(const RunMetrics& m);

/// One session stream driven frame by frame.
class Pipeline {
 public:
  explicit Pipeline(PipelineConfig cfg, std::string session_id_prefix = "");

  FrameResult process(const imaging::FrameRgb& frame);
  /// End-of-input: closes an Active session.
  std::vector<stroke::SessionEvent> finish();

  const stroke::Session& session() const { return session_; }
  const PipelineConfig& config() const { return cfg_; }
  std::int64_t frames_processed() const { return next_index_; }

 private:
  PipelineConfig cfg_;
  stroke::Session session_;
  std::int64_t next_index_ = 0;
  std::int64_t last_timestamp_ms_ = 0;
};

struct RunOutput {
  std::vector<FrameResult> results;
  /// Events emitted by the end-of-input flush.
  std::vector<stroke::SessionEvent> flush_events;
  std::vector<stroke::Stroke> sessions;
  RunMetrics metrics;

  /// Every session event in emission order, flush included.
  std::vector<stroke::SessionEvent> all_events() const;
};

/// Throws InvalidFrameAt for a bad frame.
RunOutput run_sequence(FrameSource& frames, const PipelineConfig& cfg,
                       const std::string& session_id_prefix = "");

nlohmann::ordered_json frame_result_to_json(const FrameResult& r);

/// Copy of `frame` with the tip band painted red.
imaging::FrameRgb overlay(const imaging::FrameRgb& frame, const FrameResult& r);

}  // namespace fingerstylus::pipeline

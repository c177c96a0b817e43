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

// Synthetic hand frames with exact ground truth, an independent brute-force
// tip oracle, and the accuracy/latency benchmark harness.

#include <cstdint>
#include <optional>
#include <random>
#include <stdexcept>
#include <string>
#include <variant>
#include <vector>

#include <json.hpp>

#include "fingerstylus/config.hpp"
#include "fingerstylus/imaging.hpp"
#include "fingerstylus/types.hpp"

namespace fingerstylus::synthbench {

using imaging::FrameRgb;
using imaging::Rgb;
using imaging::SkinMask;

class SpecError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Seeded generator with portable distributions: the same seed yields the
/// same stream under every standard library.
class Rng {
 public:
  explicit Rng(std::uint64_t seed, std::uint64_t stream = 0);

  std::uint64_t next_u64() { return engine_(); }
  /// Uniform integer in [lo, hi].
  int uniform_int(int lo, int hi);
  /// Uniform real in [lo, hi).
  double uniform(double lo, double hi);
  double normal(double mean, double sigma);

 private:
  std::mt19937_64 engine_;
  std::optional<double> spare_normal_;
};

struct FingerSpec {
  int width = 15;
  int length = 80;
  /// Finger centre relative to the palm centre, across the entry axis.
  int lateral_offset = 0;
};

/// A palm touching the entry border with one extended finger. Geometry is
/// given in the canonical bottom-entry orientation and rotated into place.
struct HandSpec {
  Edge entry = Edge::Bottom;
  int palm_w = 100;
  int palm_h = 80;
  /// Palm centre along the entry border; nullopt centres the hand.
  std::optional<int> palm_center;
  FingerSpec finger;
  Rgb skin_color = default_skin_color();
  double chroma_jitter_sigma = 0.0;
  double brightness_scale = 1.0;

  static Rgb default_skin_color();
};

struct PlainBackground {
  Rgb color{255, 255, 255};
};

struct ComplexBackground {
  std::uint64_t seed = 1;
  int n_distractors = 12;
  int size_min = 20;
  int size_max = 120;
  bool include_skin_colored = true;
  Rgb base{40, 90, 160};
  /// Per-channel uniform noise amplitude on non-hand pixels.
  int noise = 4;
};

struct SceneSpec {
  std::variant<PlainBackground, ComplexBackground> background;
  int width = 640;
  int height = 480;
  std::uint64_t seed = 1;
};

struct GroundTruth {
  Point tip;
  Edge entry = Edge::Bottom;

  friend bool operator==(const GroundTruth&, const GroundTruth&) = default;
};

struct GeneratedFrame {
  FrameRgb frame;
  GroundTruth truth;
  /// Exact hand pixels.
  SkinMask silhouette;
};

/// Deterministic for fixed specs. Throws SpecError when the hand does not
/// fit the frame or violates its shape constraints.
GeneratedFrame gen_frame(const HandSpec& h, const SceneSpec& s);

/// Rotates canonical bottom-entry coordinates (canonical raster cw x ch)
/// into the frame for entry edge `e`.
Point rotate_from_canonical(Point p, Edge e, int cw, int ch);

/// Brute-force re-derivation of the fingertip: farthest skin pixels from
/// the entry edge, clustered naively, leftmost cluster centroid. Shares no
/// code with the detector. Throws EmptyMask.
Point oracle_tip(const SkinMask& m, Edge e);

/// Full-range BT.601 inverse, rounded and clamped.
Rgb ycbcr_to_rgb(double y, double cb, double cr);

/// Seeded uniform random mask.
SkinMask random_mask(Rng& rng, int width, int height, double density);

enum class Regime { Plain, Complex };
std::string_view to_string(Regime r);
Regime regime_from_string(std::string_view s);

struct BenchCase {
  HandSpec hand;
  SceneSpec scene;
};

/// The randomised hand and scene pair for frame `index` of a benchmark run.
BenchCase sample_case(Regime regime, std::uint64_t seed, std::uint64_t index,
                      int width = 640, int height = 480);

struct LatencyStats {
  double mean_ms = 0.0;
  double p95_ms = 0.0;
  double max_ms = 0.0;
};

struct BenchReport {
  Regime regime = Regime::Plain;
  std::uint64_t seed = 0;
  int width = 640;
  int height = 480;
  std::int64_t n_frames = 0;
  std::int64_t hits = 0;
  std::int64_t detections = 0;
  double hit_rate = 0.0;
  double tolerance_px = 5.0;
  double mean_crop_factor = 0.0;
  /// Wall-clock; excluded from the deterministic report serialisation.
  LatencyStats latency;
  std::vector<std::int64_t> missed_frames;
};

struct BenchOptions {
  Regime regime = Regime::Plain;
  std::int64_t n_frames = 200;
  double tolerance_px = 5.0;
  std::uint64_t seed = 1;
  int width = 640;
  int height = 480;
  /// Worker threads; results merge in frame order.
  int jobs = 1;
  /// Overrides every sampled brightness when set.
  std::optional<double> brightness_scale;
  /// Overrides every sampled jitter sigma when set.
  std::optional<double> chroma_jitter_sigma;
};

/// The benchmark forces mirror_x off so screen and frame x agree.
BenchReport run_benchmark(const BenchOptions& opt, PipelineConfig cfg = {});

/// Fixed key order. Counts are decimal strings and rates carry exactly 4
/// fractional digits.
/// Holds no timing data, so identical seeds give identical bytes.
nlohmann::ordered_json report_to_json(const BenchReport& r);
nlohmann::ordered_json latency_to_json(const BenchReport& r);

std::string fixed4(double v);

/// A hand sweeping across the frame, absent during [gap_begin, gap_end).
struct SweepSpec {
  int n_frames = 30;
  int width = 640;
  int height = 480;
  Edge entry = Edge::Bottom;
  std::uint64_t seed = 7;
  int gap_begin = 0;
  int gap_end = 0;
  double fps = 12.0;
  bool complex_background = false;
};

struct SweepFrame {
  FrameRgb frame;
  std::optional<GroundTruth> truth;
};

std::vector<SweepFrame> sweep_sequence(const SweepSpec& s);

}  // namespace fingerstylus::synthbench

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

// Session tracking, frame-to-screen mapping, stroke rasterisation and export.

#include <cstdint>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include <json.hpp>

#include "fingerstylus/fingertip.hpp"
#include "fingerstylus/types.hpp"

namespace fingerstylus::stroke {

class OutOfFrame : public std::out_of_range {
 public:
  using std::out_of_range::out_of_range;
};

class UnsupportedFormat : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

struct ScreenMap {
  int frame_w = 640;
  int frame_h = 480;
  int screen_w = 1920;
  int screen_h = 1080;
  bool mirror_x = true;

  /// Throws std::invalid_argument unless every dimension is >= 2.
  void validate() const;

  friend bool operator==(const ScreenMap&, const ScreenMap&) = default;
};

Point map_to_screen(Point frame_point, const ScreenMap& m);

struct StrokePoint {
  int sx = 0;
  int sy = 0;
  int fx = 0;
  int fy = 0;
  std::int64_t t_ms = 0;

  friend bool operator==(const StrokePoint&, const StrokePoint&) = default;
};

/// The finished, immutable trajectory of one session.
struct Stroke {
  std::string session_id;
  int frame_w = 0;
  int frame_h = 0;
  int screen_w = 0;
  int screen_h = 0;
  int thickness = 1;
  std::int64_t started_at = 0;
  std::int64_t ended_at = 0;
  std::vector<StrokePoint> points;

  friend bool operator==(const Stroke&, const Stroke&) = default;
};

enum class SessionState { Idle, Active };

struct SessionStarted {
  std::string session_id;
  std::int64_t t_ms = 0;
  friend bool operator==(const SessionStarted&, const SessionStarted&) = default;
};

struct PointAdded {
  std::string session_id;
  StrokePoint point;
  friend bool operator==(const PointAdded&, const PointAdded&) = default;
};

struct SessionEnded {
  Stroke stroke;
  friend bool operator==(const SessionEnded&, const SessionEnded&) = default;
};

using SessionEvent = std::variant<SessionStarted, PointAdded, SessionEnded>;

/// One user's session stream. While Idle, `points` is empty; each
/// Idle->Active transition opens a fresh session with the next id.
struct Session {
  std::string id_prefix;
  std::uint64_t sessions_started = 0;
  std::string id;
  SessionState state = SessionState::Idle;
  std::vector<StrokePoint> points;
  int missing_count = 0;
  std::int64_t started_at = 0;
  std::int64_t ended_at = 0;
  ScreenMap map;
  int thickness = 1;

  friend bool operator==(const Session&, const Session&) = default;
};

struct TrackerConfig {
  int end_after_missing = 5;
  int thickness = 11;
};

struct AdvanceResult {
  Session session;
  std::vector<SessionEvent> events;
};

AdvanceResult advance(Session sess,
                      const std::optional<fingertip::TipDetection>& det,
                      std::int64_t t_ms, const ScreenMap& m,
                      const TrackerConfig& cfg);

/// Ends an Active session at `t_ms`; an Idle session is returned unchanged.
AdvanceResult flush(Session sess, std::int64_t t_ms);

/// Integer line walk from a to b, inclusive, each step moving one pixel on
/// the major axis.
std::vector<Point> line_pixels(Point a, Point b);

struct StrokeRaster {
  int width = 0;
  int height = 0;
  std::vector<std::uint8_t> painted;
  std::uint32_t color = 0xFF0000;
  int thickness = 1;

  bool at(int x, int y) const {
    return painted[static_cast<std::size_t>(y) * width + x] != 0;
  }
  std::int64_t count() const;
};

/// Throws std::invalid_argument unless thickness is odd and >= 1.
StrokeRaster render_stroke(std::span<const Point> points, int thickness,
                           int width, int height);

enum class ExportFormat { Json, Svg, Png };

ExportFormat parse_export_format(std::string_view s);
std::string_view content_type(ExportFormat f);

nlohmann::ordered_json stroke_to_json(const Stroke& s);
std::string export_stroke(const Stroke& s, ExportFormat f);

}  // namespace fingerstylus::stroke

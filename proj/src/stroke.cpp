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

#include "fingerstylus/stroke.hpp"

#include <algorithm>
#include <cstdlib>
#include <sstream>

#include "fingerstylus/image_io.hpp"

namespace fingerstylus::stroke {

void ScreenMap::validate() const {
  if (frame_w < 2 || frame_h < 2 || screen_w < 2 || screen_h < 2) {
    throw std::invalid_argument("screen map dimensions must be >= 2");
  }
}

Point map_to_screen(Point p, const ScreenMap& m) {
  if (p.x < 0 || p.y < 0 || p.x >= m.frame_w || p.y >= m.frame_h) {
    throw OutOfFrame("point (" + std::to_string(p.x) + "," + std::to_string(p.y) +
                     ") outside " + std::to_string(m.frame_w) + "x" +
                     std::to_string(m.frame_h) + " frame");
  }
  int sx = static_cast<int>(
      round_div(static_cast<std::int64_t>(p.x) * (m.screen_w - 1), m.frame_w - 1));
  const int sy = static_cast<int>(
      round_div(static_cast<std::int64_t>(p.y) * (m.screen_h - 1), m.frame_h - 1));
  if (m.mirror_x) sx = (m.screen_w - 1) - sx;
  return {sx, sy};
}

namespace {

Stroke finish(const Session& s) {
  return {s.id,       s.map.frame_w, s.map.frame_h, s.map.screen_w, s.map.screen_h,
          s.thickness, s.started_at, s.ended_at,    s.points};
}

void reset_to_idle(Session& s) {
  s.state = SessionState::Idle;
  s.points.clear();
  s.missing_count = 0;
}

}  // namespace

AdvanceResult advance(Session sess, const std::optional<fingertip::TipDetection>& det,
                      std::int64_t t_ms, const ScreenMap& m,
                      const TrackerConfig& cfg) {
  AdvanceResult out;
  if (det) {
    if (sess.state == SessionState::Idle) {
      ++sess.sessions_started;
      sess.id = sess.id_prefix + std::to_string(sess.sessions_started);
      sess.state = SessionState::Active;
      sess.started_at = t_ms;
      sess.ended_at = t_ms;
      sess.map = m;
      sess.thickness = cfg.thickness;
      sess.points.clear();
      out.events.emplace_back(SessionStarted{sess.id, t_ms});
    }
    const Point s = map_to_screen(det->tip, sess.map);
    StrokePoint pt{s.x, s.y, det->tip.x, det->tip.y, t_ms};
    sess.points.push_back(pt);
    sess.missing_count = 0;
    sess.ended_at = t_ms;
    out.events.emplace_back(PointAdded{sess.id, pt});
  } else if (sess.state == SessionState::Active) {
    ++sess.missing_count;
    if (sess.missing_count >= cfg.end_after_missing) {
      sess.ended_at = t_ms;
      out.events.emplace_back(SessionEnded{finish(sess)});
      reset_to_idle(sess);
    }
  }
  out.session = std::move(sess);
  return out;
}

AdvanceResult flush(Session sess, std::int64_t t_ms) {
  AdvanceResult out;
  if (sess.state == SessionState::Active) {
    sess.ended_at = std::max(sess.ended_at, t_ms);
    out.events.emplace_back(SessionEnded{finish(sess)});
    reset_to_idle(sess);
  }
  out.session = std::move(sess);
  return out;
}

std::vector<Point> line_pixels(Point a, Point b) {
  std::vector<Point> out;
  const int dx = std::abs(b.x - a.x);
  const int dy = -std::abs(b.y - a.y);
  const int sx = a.x < b.x ? 1 : -1;
  const int sy = a.y < b.y ? 1 : -1;
  int err = dx + dy;
  out.reserve(static_cast<std::size_t>(std::max(dx, -dy)) + 1);
  Point p = a;
  for (;;) {
    out.push_back(p);
    if (p == b) break;
    const int e2 = 2 * err;
    if (e2 >= dy) {
      err += dy;
      p.x += sx;
    }
    if (e2 <= dx) {
      err += dx;
      p.y += sy;
    }
  }
  return out;
}

std::int64_t StrokeRaster::count() const {
  return std::count(painted.begin(), painted.end(), std::uint8_t{1});
}

StrokeRaster render_stroke(std::span<const Point> points, int thickness, int width,
                           int height) {
  if (thickness < 1 || thickness % 2 == 0) {
    throw std::invalid_argument("stroke thickness must be odd and >= 1");
  }
  StrokeRaster r;
  r.width = width;
  r.height = height;
  r.thickness = thickness;
  r.painted.assign(static_cast<std::size_t>(width) * height, 0);

  const int radius = (thickness - 1) / 2;
  std::vector<Point> disk;
  for (int dy = -radius; dy <= radius; ++dy) {
    for (int dx = -radius; dx <= radius; ++dx) {
      if (dx * dx + dy * dy <= radius * radius) disk.push_back({dx, dy});
    }
  }
  auto stamp = [&](Point c) {
    for (const Point& d : disk) {
      const int x = c.x + d.x;
      const int y = c.y + d.y;
      if (x >= 0 && y >= 0 && x < width && y < height) {
        r.painted[static_cast<std::size_t>(y) * width + x] = 1;
      }
    }
  };

  if (points.size() == 1) stamp(points[0]);
  for (std::size_t i = 1; i < points.size(); ++i) {
    for (const Point& p : line_pixels(points[i - 1], points[i])) stamp(p);
  }
  return r;
}

ExportFormat parse_export_format(std::string_view s) {
  if (s == "json") return ExportFormat::Json;
  if (s == "svg") return ExportFormat::Svg;
  if (s == "png") return ExportFormat::Png;
  throw UnsupportedFormat("unsupported export format: " + std::string(s));
}

std::string_view content_type(ExportFormat f) {
  switch (f) {
    case ExportFormat::Json:
      return "application/json";
    case ExportFormat::Svg:
      return "image/svg+xml";
    case ExportFormat::Png:
      return "image/png";
  }
  return "application/octet-stream";
}

nlohmann::ordered_json stroke_to_json(const Stroke& s) {
  nlohmann::ordered_json j;
  j["session_id"] = s.session_id;
  j["frame_size"] = {{"width", s.frame_w}, {"height", s.frame_h}};
  j["screen_size"] = {{"width", s.screen_w}, {"height", s.screen_h}};
  j["thickness"] = s.thickness;
  auto pts = nlohmann::ordered_json::array();
  for (const StrokePoint& p : s.points) {
    nlohmann::ordered_json e;
    e["sx"] = p.sx;
    e["sy"] = p.sy;
    e["fx"] = p.fx;
    e["fy"] = p.fy;
    e["t_ms"] = p.t_ms;
    pts.push_back(std::move(e));
  }
  j["points"] = std::move(pts);
  return j;
}

namespace {

std::string to_svg(const Stroke& s) {
  std::ostringstream o;
  o << "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n"
    << "<svg xmlns=\"http://www.w3.org/2000/svg\" version=\"1.1\" width=\"" << s.screen_w
    << "\" height=\"" << s.screen_h << "\" viewBox=\"0 0 " << s.screen_w << ' '
    << s.screen_h << "\">\n"
    << "<polyline points=\"";
  for (std::size_t i = 0; i < s.points.size(); ++i) {
    if (i) o << ' ';
    o << s.points[i].sx << ',' << s.points[i].sy;
  }
  o << "\" fill=\"none\" stroke=\"#FF0000\" stroke-width=\"" << s.thickness
    << "\" stroke-linecap=\"round\" stroke-linejoin=\"round\"/>\n"
    << "</svg>\n";
  return o.str();
}

std::string to_png(const Stroke& s) {
  std::vector<Point> pts;
  pts.reserve(s.points.size());
  for (const StrokePoint& p : s.points) pts.push_back({p.sx, p.sy});
  const StrokeRaster r = render_stroke(pts, s.thickness, s.screen_w, s.screen_h);
  imaging::FrameRgb canvas(s.screen_w, s.screen_h, imaging::Rgb{255, 255, 255});
  for (int y = 0; y < r.height; ++y) {
    for (int x = 0; x < r.width; ++x) {
      if (r.at(x, y)) canvas.at(x, y) = {255, 0, 0};
    }
  }
  return image_io::encode_png(canvas);
}

}  // namespace

std::string export_stroke(const Stroke& s, ExportFormat f) {
  switch (f) {
    case ExportFormat::Json:
      return stroke_to_json(s).dump();
    case ExportFormat::Svg:
      return to_svg(s);
    case ExportFormat::Png:
      return to_png(s);
  }
  throw UnsupportedFormat("unsupported export format");
}

}  // namespace fingerstylus::stroke

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

#include "fingerstylus/imaging.hpp"

#include <algorithm>
#include <string>

namespace fingerstylus::imaging {

void check_dimensions(std::int64_t width, std::int64_t height) {
  if (width < 1 || height < 1 || width > kMaxFrameDim || height > kMaxFrameDim) {
    throw InvalidFrame("frame dimensions " + std::to_string(width) + "x" +
                       std::to_string(height) + " outside [1," +
                       std::to_string(kMaxFrameDim) + "]");
  }
}

FrameRgb::FrameRgb(int width, int height, Rgb fill, std::int64_t timestamp_ms)
    : width_(width), height_(height), timestamp_ms_(timestamp_ms) {
  check_dimensions(width, height);
  data_.assign(static_cast<std::size_t>(width) * height, fill);
}

FrameRgb::FrameRgb(int width, int height, std::vector<Rgb> data,
                   std::int64_t timestamp_ms)
    : width_(width), height_(height), data_(std::move(data)),
      timestamp_ms_(timestamp_ms) {
  check_dimensions(width, height);
  if (data_.size() != static_cast<std::size_t>(width) * height) {
    throw InvalidFrame("frame data holds " + std::to_string(data_.size()) +
                       " pixels, expected " +
                       std::to_string(static_cast<std::int64_t>(width) * height));
  }
}

SkinMask::SkinMask(int width, int height)
    : width_(width), height_(height),
      bits_(static_cast<std::size_t>(width) * height, 0) {
  check_dimensions(width, height);
}

std::int64_t SkinMask::count() const {
  return std::count(bits_.begin(), bits_.end(), std::uint8_t{1});
}

bool SkinMask::any() const {
  return std::find(bits_.begin(), bits_.end(), std::uint8_t{1}) != bits_.end();
}

void SkinThresholds::validate() const {
  for (int v : {cb_min, cb_max, cr_min, cr_max, y_min}) {
    if (v < 0 || v > 255) {
      throw std::invalid_argument("skin threshold outside [0,255]");
    }
  }
  if (cb_min > cb_max || cr_min > cr_max) {
    throw std::invalid_argument("skin threshold range inverted");
  }
}

double CropResult::reduction_factor(int source_width, int source_height) const {
  return static_cast<double>(source_width) * source_height /
         static_cast<double>(rect.area());
}

YcbcrPixel rgb_to_ycbcr(Rgb p) {
  const std::int64_t r = p.r, g = p.g, b = p.b;
  // Coefficients scaled to integers so the result is exact; every scaled
  // value is non-negative, so rounding is a plain biased division.
  const std::int64_t y = 299 * r + 587 * g + 114 * b;  // x1000
  const std::int64_t cb = 128'000'000 - 168'736 * r - 331'264 * g + 500'000 * b;
  const std::int64_t cr = 128'000'000 + 500'000 * r - 418'688 * g - 81'312 * b;
  auto clamp8 = [](std::int64_t v) {
    return static_cast<std::uint8_t>(std::clamp<std::int64_t>(v, 0, 255));
  };
  return {clamp8(round_div(y, 1000)), clamp8(round_div(cb, 1'000'000)),
          clamp8(round_div(cr, 1'000'000))};
}

YcbcrImage to_ycbcr(const FrameRgb& frame) {
  YcbcrImage out{frame.width(), frame.height(), {}};
  out.data.reserve(frame.pixels().size());
  for (const Rgb& p : frame.pixels()) out.data.push_back(rgb_to_ycbcr(p));
  return out;
}

SkinMask threshold_skin(const YcbcrImage& img, const SkinThresholds& t) {
  SkinMask m(img.width, img.height);
  for (int y = 0; y < img.height; ++y) {
    for (int x = 0; x < img.width; ++x) {
      if (t.accepts(img.data[static_cast<std::size_t>(y) * img.width + x])) {
        m.set(x, y);
      }
    }
  }
  return m;
}

SkinMask skin_mask(const FrameRgb& frame, const SkinThresholds& t) {
  return threshold_skin(to_ycbcr(frame), t);
}

SkinMask clean_mask(const SkinMask& m) {
  const int w = m.width();
  const int h = m.height();
  SkinMask out(w, h);
  // Vertical 3-sums per column, then a horizontal 3-window over them.
  std::vector<int> col(static_cast<std::size_t>(w));
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      int s = m.get(x, y);
      if (y > 0) s += m.get(x, y - 1);
      if (y + 1 < h) s += m.get(x, y + 1);
      col[x] = s;
    }
    for (int x = 0; x < w; ++x) {
      int s = col[x];
      if (x > 0) s += col[x - 1];
      if (x + 1 < w) s += col[x + 1];
      if (s >= 5) out.set(x, y);
    }
  }
  return out;
}

namespace {

// Flood-fills the component containing `seed`, restricted to `bounds`, and
// calls visit(x, y) once per pixel. `seen` is indexed like the mask.
template <typename Visit>
void flood(const SkinMask& m, Point seed, const Rect& bounds,
           std::vector<std::uint8_t>& seen, std::vector<Point>& stack,
           Visit&& visit) {
  const int w = m.width();
  stack.clear();
  stack.push_back(seed);
  seen[static_cast<std::size_t>(seed.y) * w + seed.x] = 1;
  while (!stack.empty()) {
    const Point p = stack.back();
    stack.pop_back();
    visit(p.x, p.y);
    for (int dy = -1; dy <= 1; ++dy) {
      for (int dx = -1; dx <= 1; ++dx) {
        const int nx = p.x + dx;
        const int ny = p.y + dy;
        if (!bounds.contains({nx, ny}) || !m.get(nx, ny)) continue;
        auto& s = seen[static_cast<std::size_t>(ny) * w + nx];
        if (s) continue;
        s = 1;
        stack.push_back({nx, ny});
      }
    }
  }
}

}  // namespace

std::vector<BlobInfo> components(const SkinMask& m) {
  const int w = m.width();
  const int h = m.height();
  const Rect full{0, 0, w - 1, h - 1};
  std::vector<std::uint8_t> seen(static_cast<std::size_t>(w) * h, 0);
  std::vector<Point> stack;
  std::vector<BlobInfo> out;
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      if (!m.get(x, y) || seen[static_cast<std::size_t>(y) * w + x]) continue;
      BlobInfo b;
      b.seed = {x, y};
      b.bbox = {x, y, x, y};
      flood(m, {x, y}, full, seen, stack, [&](int px, int py) {
        ++b.area;
        b.bbox.x0 = std::min(b.bbox.x0, px);
        b.bbox.x1 = std::max(b.bbox.x1, px);
        b.bbox.y0 = std::min(b.bbox.y0, py);
        b.bbox.y1 = std::max(b.bbox.y1, py);
      });
      if (b.bbox.x0 == 0) b.touches.insert(Edge::Left);
      if (b.bbox.x1 == w - 1) b.touches.insert(Edge::Right);
      if (b.bbox.y0 == 0) b.touches.insert(Edge::Top);
      if (b.bbox.y1 == h - 1) b.touches.insert(Edge::Bottom);
      out.push_back(b);
    }
  }
  return out;
}

std::optional<BlobInfo> largest_component(const SkinMask& m,
                                          std::int64_t min_area) {
  std::optional<BlobInfo> best;
  for (const BlobInfo& b : components(m)) {
    if (!best || b.area > best->area ||
        (b.area == best->area &&
         std::pair(b.bbox.y0, b.bbox.x0) < std::pair(best->bbox.y0, best->bbox.x0))) {
      best = b;
    }
  }
  if (best && best->area >= min_area) return best;
  return std::nullopt;
}

CropResult crop_to_blob(const FrameRgb& frame, const SkinMask& m,
                        const BlobInfo& b, int margin) {
  margin = std::max(margin, 0);
  const Rect rect{std::max(b.bbox.x0 - margin, 0), std::max(b.bbox.y0 - margin, 0),
                  std::min(b.bbox.x1 + margin, frame.width() - 1),
                  std::min(b.bbox.y1 + margin, frame.height() - 1)};
  const int cw = rect.width();
  const int ch = rect.height();

  std::vector<Rgb> pixels;
  pixels.reserve(static_cast<std::size_t>(cw) * ch);
  for (int y = rect.y0; y <= rect.y1; ++y) {
    for (int x = rect.x0; x <= rect.x1; ++x) pixels.push_back(frame.at(x, y));
  }

  SkinMask cropped(cw, ch);
  std::vector<std::uint8_t> seen(static_cast<std::size_t>(m.width()) * m.height(), 0);
  std::vector<Point> stack;
  flood(m, b.seed, rect, seen, stack,
        [&](int x, int y) { cropped.set(x - rect.x0, y - rect.y0); });

  return {FrameRgb(cw, ch, std::move(pixels), frame.timestamp_ms()),
          std::move(cropped), {rect.x0, rect.y0}, rect};
}

std::int64_t default_min_area(int width, int height) {
  const std::int64_t px = static_cast<std::int64_t>(width) * height;
  return std::max<std::int64_t>(1, round_div(px * 5, 1000));
}

}  // namespace fingerstylus::imaging

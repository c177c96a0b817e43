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

// Pixel-level primitives: colour conversion, skin filtering, mask cleanup,
// blob extraction and crop. Everything here is a pure function of its inputs.

#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "fingerstylus/types.hpp"

namespace fingerstylus::imaging {

inline constexpr int kMaxFrameDim = 4096;

struct Rgb {
  std::uint8_t r = 0;
  std::uint8_t g = 0;
  std::uint8_t b = 0;

  friend constexpr bool operator==(const Rgb&, const Rgb&) = default;
};

/// Row-major 8-bit RGB raster. Construction validates the layout.
class FrameRgb {
 public:
  FrameRgb() = default;
  FrameRgb(int width, int height, Rgb fill = {}, std::int64_t timestamp_ms = 0);
  FrameRgb(int width, int height, std::vector<Rgb> data,
           std::int64_t timestamp_ms = 0);

  int width() const { return width_; }
  int height() const { return height_; }
  std::int64_t timestamp_ms() const { return timestamp_ms_; }
  void set_timestamp_ms(std::int64_t t) { timestamp_ms_ = t; }
  bool empty() const { return data_.empty(); }

  const Rgb& at(int x, int y) const { return data_[index(x, y)]; }
  Rgb& at(int x, int y) { return data_[index(x, y)]; }
  std::span<const Rgb> pixels() const { return data_; }
  std::span<Rgb> pixels() { return data_; }

  friend bool operator==(const FrameRgb&, const FrameRgb&) = default;

 private:
  std::size_t index(int x, int y) const {
    return static_cast<std::size_t>(y) * width_ + x;
  }

  int width_ = 0;
  int height_ = 0;
  std::vector<Rgb> data_;
  std::int64_t timestamp_ms_ = 0;
};

/// Throws InvalidFrame unless 1 <= w,h <= kMaxFrameDim.
void check_dimensions(std::int64_t width, std::int64_t height);

struct YcbcrPixel {
  std::uint8_t y = 0;
  std::uint8_t cb = 0;
  std::uint8_t cr = 0;

  friend constexpr bool operator==(const YcbcrPixel&, const YcbcrPixel&) = default;
};

struct YcbcrImage {
  int width = 0;
  int height = 0;
  std::vector<YcbcrPixel> data;
};

class SkinMask {
 public:
  SkinMask() = default;
  SkinMask(int width, int height);

  int width() const { return width_; }
  int height() const { return height_; }

  bool get(int x, int y) const {
    return bits_[static_cast<std::size_t>(y) * width_ + x] != 0;
  }
  void set(int x, int y, bool v = true) {
    bits_[static_cast<std::size_t>(y) * width_ + x] = v ? 1 : 0;
  }
  bool in_bounds(int x, int y) const {
    return x >= 0 && y >= 0 && x < width_ && y < height_;
  }

  std::int64_t count() const;
  bool any() const;
  std::span<const std::uint8_t> bits() const { return bits_; }

  friend bool operator==(const SkinMask&, const SkinMask&) = default;

 private:
  int width_ = 0;
  int height_ = 0;
  std::vector<std::uint8_t> bits_;
};

struct SkinThresholds {
  int cb_min = 77;
  int cb_max = 127;
  int cr_min = 133;
  int cr_max = 173;
  int y_min = 40;

  /// Throws std::invalid_argument if a bound is out of [0,255] or inverted.
  void validate() const;
  bool accepts(const YcbcrPixel& p) const {
    return p.cb >= cb_min && p.cb <= cb_max && p.cr >= cr_min &&
           p.cr <= cr_max && p.y >= y_min;
  }

  friend bool operator==(const SkinThresholds&, const SkinThresholds&) = default;
};

struct BlobInfo {
  Rect bbox;
  std::int64_t area = 0;
  EdgeSet touches;
  /// First pixel of the component in raster order; identifies it for crop.
  Point seed;
};

struct CropResult {
  FrameRgb frame;
  /// Contains only the selected component's pixels.
  SkinMask mask;
  Point offset;
  Rect rect;

  /// Source pixels divided by cropped pixels.
  double reduction_factor(int source_width, int source_height) const;
};

/// Full-range BT.601, computed in exact integer arithmetic.
YcbcrPixel rgb_to_ycbcr(Rgb p);

YcbcrImage to_ycbcr(const FrameRgb& frame);
SkinMask threshold_skin(const YcbcrImage& img, const SkinThresholds& t);
SkinMask skin_mask(const FrameRgb& frame, const SkinThresholds& t);

/// One pass of 3x3 majority smoothing (>= 5 of 9 set, outside is unset).
SkinMask clean_mask(const SkinMask& m);

/// Largest 8-connected component with area >= min_area. Ties on area go to
/// the smaller (y0, x0) of the bounding box.
std::optional<BlobInfo> largest_component(const SkinMask& m,
                                          std::int64_t min_area);

/// All 8-connected components, in raster order of their seed pixel.
std::vector<BlobInfo> components(const SkinMask& m);

CropResult crop_to_blob(const FrameRgb& frame, const SkinMask& m,
                        const BlobInfo& b, int margin);

/// 0.5% of the frame's pixels, at least 1.
std::int64_t default_min_area(int width, int height);

}  // namespace fingerstylus::imaging

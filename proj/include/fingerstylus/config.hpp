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

#include <cstdint>
#include <filesystem>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>

#include <json.hpp>

#include "fingerstylus/imaging.hpp"
#include "fingerstylus/stroke.hpp"

namespace fingerstylus {

class ConfigError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

inline constexpr int kConfigVersion = 1;

struct ScreenSettings {
  int width = 1920;
  int height = 1080;
  bool mirror_x = true;

  friend bool operator==(const ScreenSettings&, const ScreenSettings&) = default;
};

/// Every tunable of the engine. The JSON form mirrors this struct:
///
///   {"version": 1,
///    "thresholds": {"cb_min": 77, "cb_max": 127, "cr_min": 133,
///                   "cr_max": 173, "y_min": 40},
///    "min_area": null, "margin": 4, "tip_halfwidth": 5,
///    "template_check_enabled": false, "end_after_missing": 5,
///    "screen": {"width": 1920, "height": 1080, "mirror_x": true}}
///
/// A null min_area means 0.5% of the frame's pixels.
struct PipelineConfig {
  int version = kConfigVersion;
  imaging::SkinThresholds thresholds;
  std::optional<std::int64_t> min_area;
  int margin = 4;
  int tip_halfwidth = 5;
  bool template_check_enabled = false;
  int end_after_missing = 5;
  ScreenSettings screen;

  void validate() const;

  std::int64_t min_area_for(int frame_width, int frame_height) const;
  stroke::ScreenMap screen_map(int frame_width, int frame_height) const;
  stroke::TrackerConfig tracker() const {
    return {end_after_missing, 2 * tip_halfwidth + 1};
  }

  friend bool operator==(const PipelineConfig&, const PipelineConfig&) = default;
};

nlohmann::ordered_json config_to_json(const PipelineConfig& c);

/// Strict parse: unknown keys, wrong types and out-of-range values throw
/// ConfigError. Missing keys keep their defaults.
PipelineConfig config_from_json(const nlohmann::json& j);
PipelineConfig load_config(const std::filesystem::path& path);

/// Applies "dotted.key=value", e.g. "thresholds.cb_min=80" or
/// "screen.mirror_x=false". The value is parsed as JSON, falling back to a
/// string.
PipelineConfig apply_override(const PipelineConfig& c, std::string_view assignment);

}  // namespace fingerstylus

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

#include "fingerstylus/config.hpp"

#include <fstream>
#include <set>

namespace fingerstylus {

namespace {

using nlohmann::json;

void reject_unknown(const json& obj, const std::set<std::string>& known,
                    const std::string& where) {
  if (!obj.is_object()) throw ConfigError(where + " must be an object");
  for (const auto& [key, value] : obj.items()) {
    if (!known.count(key)) throw ConfigError("unknown config key: " + where + key);
  }
}

template <typename T>
void read(const json& obj, const char* key, T& out, const std::string& where) {
  auto it = obj.find(key);
  if (it == obj.end()) return;
  try {
    if constexpr (std::is_same_v<T, bool>) {
      if (!it->is_boolean()) throw ConfigError("");
    } else if constexpr (std::is_integral_v<T>) {
      if (!it->is_number_integer()) throw ConfigError("");
    }
    out = it->get<T>();
  } catch (const std::exception&) {
    throw ConfigError("config key " + where + key + " has the wrong type");
  }
}

}  // namespace

void PipelineConfig::validate() const {
  if (version != kConfigVersion) {
    throw ConfigError("unsupported config version " + std::to_string(version));
  }
  try {
    thresholds.validate();
  } catch (const std::invalid_argument& e) {
    throw ConfigError(e.what());
  }
  if (min_area && *min_area < 1) throw ConfigError("min_area must be >= 1 or null");
  if (margin < 0) throw ConfigError("margin must be >= 0");
  if (tip_halfwidth < 0) throw ConfigError("tip_halfwidth must be >= 0");
  if (end_after_missing < 1) throw ConfigError("end_after_missing must be >= 1");
  if (screen.width < 2 || screen.height < 2) {
    throw ConfigError("screen dimensions must be >= 2");
  }
}

std::int64_t PipelineConfig::min_area_for(int frame_width, int frame_height) const {
  return min_area ? *min_area : imaging::default_min_area(frame_width, frame_height);
}

stroke::ScreenMap PipelineConfig::screen_map(int frame_width, int frame_height) const {
  return {frame_width, frame_height, screen.width, screen.height, screen.mirror_x};
}

nlohmann::ordered_json config_to_json(const PipelineConfig& c) {
  nlohmann::ordered_json j;
  j["version"] = c.version;
  j["thresholds"] = {{"cb_min", c.thresholds.cb_min}, {"cb_max", c.thresholds.cb_max},
                     {"cr_min", c.thresholds.cr_min}, {"cr_max", c.thresholds.cr_max},
                     {"y_min", c.thresholds.y_min}};
  j["min_area"] = c.min_area ? nlohmann::ordered_json(*c.min_area)
                             : nlohmann::ordered_json(nullptr);
  j["margin"] = c.margin;
  j["tip_halfwidth"] = c.tip_halfwidth;
  j["template_check_enabled"] = c.template_check_enabled;
  j["end_after_missing"] = c.end_after_missing;
  j["screen"] = {{"width", c.screen.width},
                 {"height", c.screen.height},
                 {"mirror_x", c.screen.mirror_x}};
  return j;
}

PipelineConfig config_from_json(const json& j) {
  PipelineConfig c;
  reject_unknown(j,
                 {"version", "thresholds", "min_area", "margin", "tip_halfwidth",
                  "template_check_enabled", "end_after_missing", "screen"},
                 "");
  read(j, "version", c.version, "");
  if (auto it = j.find("thresholds"); it != j.end()) {
    reject_unknown(*it, {"cb_min", "cb_max", "cr_min", "cr_max", "y_min"}, "thresholds.");
    read(*it, "cb_min", c.thresholds.cb_min, "thresholds.");
    read(*it, "cb_max", c.thresholds.cb_max, "thresholds.");
    read(*it, "cr_min", c.thresholds.cr_min, "thresholds.");
    read(*it, "cr_max", c.thresholds.cr_max, "thresholds.");
    read(*it, "y_min", c.thresholds.y_min, "thresholds.");
  }
  if (auto it = j.find("min_area"); it != j.end()) {
    if (it->is_null()) {
      c.min_area.reset();
    } else if (it->is_number_integer()) {
      c.min_area = it->get<std::int64_t>();
    } else {
      throw ConfigError("config key min_area must be an integer or null");
    }
  }
  read(j, "margin", c.margin, "");
  read(j, "tip_halfwidth", c.tip_halfwidth, "");
  read(j, "template_check_enabled", c.template_check_enabled, "");
  read(j, "end_after_missing", c.end_after_missing, "");
  if (auto it = j.find("screen"); it != j.end()) {
    reject_unknown(*it, {"width", "height", "mirror_x"}, "screen.");
    read(*it, "width", c.screen.width, "screen.");
    read(*it, "height", c.screen.height, "screen.");
    read(*it, "mirror_x", c.screen.mirror_x, "screen.");
  }
  c.validate();
  return c;
}

PipelineConfig load_config(const std::filesystem::path& path) {
  std::ifstream f(path);
  if (!f) throw ConfigError("cannot open config file " + path.string());
  json j;
  try {
    j = json::parse(f);
  } catch (const json::parse_error& e) {
    throw ConfigError(std::string("config is not valid JSON: ") + e.what());
  }
  return config_from_json(j);
}

PipelineConfig apply_override(const PipelineConfig& c, std::string_view assignment) {
  const auto eq = assignment.find('=');
  if (eq == std::string_view::npos || eq == 0) {
    throw ConfigError("override must look like key=value: " + std::string(assignment));
  }
  const std::string key(assignment.substr(0, eq));
  const std::string raw(assignment.substr(eq + 1));
  json value = json::parse(raw, nullptr, false);
  if (value.is_discarded()) value = raw;

  json j = json::parse(config_to_json(c).dump());
  json* node = &j;
  std::size_t start = 0;
  for (;;) {
    const auto dot = key.find('.', start);
    const std::string part = key.substr(start, dot - start);
    if (dot == std::string::npos) {
      if (!node->is_object() || !node->contains(part)) {
        throw ConfigError("unknown config key: " + key);
      }
      (*node)[part] = value;
      break;
    }
    if (!node->contains(part) || !(*node)[part].is_object()) {
      throw ConfigError("unknown config key: " + key);
    }
    node = &(*node)[part];
    start = dot + 1;
  }
  return config_from_json(j);
}

}  // namespace fingerstylus

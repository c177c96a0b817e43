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

#include "fingerstylus/types.hpp"

namespace fingerstylus {

std::string_view to_string(Edge e) {
  switch (e) {
    case Edge::Top:
      return "top";
    case Edge::Bottom:
      return "bottom";
    case Edge::Left:
      return "left";
    case Edge::Right:
      return "right";
  }
  return "bottom";
}

Edge edge_from_string(std::string_view s) {
  if (s == "top") return Edge::Top;
  if (s == "bottom") return Edge::Bottom;
  if (s == "left") return Edge::Left;
  if (s == "right") return Edge::Right;
  throw std::invalid_argument("unknown edge: " + std::string(s));
}

}  // namespace fingerstylus

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

#include <compare>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <string_view>

namespace fingerstylus {

struct Point {
  int x = 0;
  int y = 0;

  friend constexpr bool operator==(const Point&, const Point&) = default;
  friend constexpr auto operator<=>(const Point&, const Point&) = default;
};

/// Inclusive pixel rectangle.
struct Rect {
  int x0 = 0;
  int y0 = 0;
  int x1 = 0;
  int y1 = 0;

  constexpr int width() const { return x1 - x0 + 1; }
  constexpr int height() const { return y1 - y0 + 1; }
  constexpr std::int64_t area() const {
    return static_cast<std::int64_t>(width()) * height();
  }
  constexpr bool contains(Point p) const {
    return p.x >= x0 && p.x <= x1 && p.y >= y0 && p.y <= y1;
  }

  friend constexpr bool operator==(const Rect&, const Rect&) = default;
};

/// A frame border. Used both for blob contact and for the wrist-side entry.
enum class Edge : std::uint8_t { Top, Bottom, Left, Right };

std::string_view to_string(Edge e);
Edge edge_from_string(std::string_view s);

/// Subset of {Top, Bottom, Left, Right}.
class EdgeSet {
 public:
  constexpr EdgeSet() = default;

  constexpr void insert(Edge e) { bits_ |= bit(e); }
  constexpr bool contains(Edge e) const { return (bits_ & bit(e)) != 0; }
  constexpr bool empty() const { return bits_ == 0; }

  friend constexpr bool operator==(const EdgeSet&, const EdgeSet&) = default;

 private:
  static constexpr std::uint8_t bit(Edge e) {
    return static_cast<std::uint8_t>(1u << static_cast<unsigned>(e));
  }
  std::uint8_t bits_ = 0;
};

// Rounding is half-away-from-zero everywhere in the engine.

/// round(num / den) for num >= 0, den > 0, ties away from zero.
constexpr std::int64_t round_div(std::int64_t num, std::int64_t den) {
  return (2 * num + den) / (2 * den);
}

/// round(num / den) for any sign of num, den > 0, ties away from zero.
constexpr std::int64_t round_div_signed(std::int64_t num, std::int64_t den) {
  return num >= 0 ? round_div(num, den) : -round_div(-num, den);
}

class InvalidFrame : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

class EmptyMask : public std::invalid_argument {
 public:
  EmptyMask() : std::invalid_argument("mask has no set pixels") {}
};

}  // namespace fingerstylus

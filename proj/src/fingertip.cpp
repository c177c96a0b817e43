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

#include "fingerstylus/fingertip.hpp"

#include <algorithm>
#include <array>

namespace fingerstylus::fingertip {

namespace {

constexpr std::array<Edge, 4> kTieOrder = {Edge::Bottom, Edge::Left, Edge::Right,
                                           Edge::Top};

struct Sums {
  std::int64_t x = 0;
  std::int64_t y = 0;
  std::int64_t n = 0;
};

Sums sums(std::span<const Point> c) {
  Sums s;
  for (const Point& p : c) {
    s.x += p.x;
    s.y += p.y;
  }
  s.n = static_cast<std::int64_t>(c.size());
  return s;
}

// Length of the contiguous set run through (x, y) along the axis
// perpendicular to the entry direction. 0 if (x, y) itself is unset.
int run_width(const SkinMask& m, int x, int y, bool horizontal) {
  if (!m.get(x, y)) return 0;
  int w = 1;
  if (horizontal) {
    for (int i = x - 1; i >= 0 && m.get(i, y); --i) ++w;
    for (int i = x + 1; i < m.width() && m.get(i, y); ++i) ++w;
  } else {
    for (int j = y - 1; j >= 0 && m.get(x, j); --j) ++w;
    for (int j = y + 1; j < m.height() && m.get(x, j); ++j) ++w;
  }
  return w;
}

}  // namespace

int edge_distance(Edge e, int x, int y, int width, int height) {
  switch (e) {
    case Edge::Bottom:
      return height - 1 - y;
    case Edge::Top:
      return y;
    case Edge::Left:
      return x;
    case Edge::Right:
      return width - 1 - x;
  }
  return 0;
}

Edge entry_edge(const SkinMask& m, EdgeSet touches) {
  const int w = m.width();
  const int h = m.height();
  int x0 = w, x1 = -1, y0 = h, y1 = -1;
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      if (!m.get(x, y)) continue;
      x0 = std::min(x0, x);
      x1 = std::max(x1, x);
      y0 = std::min(y0, y);
      y1 = std::max(y1, y);
    }
  }
  if (x1 < 0) throw EmptyMask();

  // With no frame contact, compare the sides of the skin bounding box.
  if (touches.empty()) {
    for (Edge e : kTieOrder) touches.insert(e);
  } else {
    x0 = 0;
    x1 = w - 1;
    y0 = 0;
    y1 = h - 1;
  }

  auto contact = [&](Edge e) {
    int n = 0;
    switch (e) {
      case Edge::Bottom:
        for (int x = 0; x < w; ++x) n += m.get(x, y1);
        break;
      case Edge::Top:
        for (int x = 0; x < w; ++x) n += m.get(x, y0);
        break;
      case Edge::Left:
        for (int y = 0; y < h; ++y) n += m.get(x0, y);
        break;
      case Edge::Right:
        for (int y = 0; y < h; ++y) n += m.get(x1, y);
        break;
    }
    return n;
  };

  Edge best = Edge::Bottom;
  int best_count = -1;
  for (Edge e : kTieOrder) {
    if (!touches.contains(e)) continue;
    const int n = contact(e);
    if (n > best_count) {
      best = e;
      best_count = n;
    }
  }
  return best;
}

RampImage ramp_label(const SkinMask& m, Edge e) {
  const int w = m.width();
  const int h = m.height();
  RampImage r{w, h, std::vector<std::uint8_t>(static_cast<std::size_t>(w) * h, 0),
              e, -1};
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      if (m.get(x, y)) r.extent = std::max(r.extent, edge_distance(e, x, y, w, h));
    }
  }
  if (r.extent < 0) throw EmptyMask();

  const std::int64_t extent = r.extent;
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      if (!m.get(x, y)) continue;
      // Quantised to 0..255: once extent exceeds 510 px the row before the
      // farthest one can also round to 255.
      const std::int64_t v =
          extent == 0 ? 255 : round_div(255 * edge_distance(e, x, y, w, h), extent);
      r.values[static_cast<std::size_t>(y) * w + x] = static_cast<std::uint8_t>(v);
    }
  }
  return r;
}

std::vector<TipCluster> detect_tips(const RampImage& r) {
  const int w = r.width;
  const int h = r.height;
  std::vector<std::uint8_t> seen(r.values.size(), 0);
  std::vector<TipCluster> out;
  std::vector<Point> stack;
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      const std::size_t i = static_cast<std::size_t>(y) * w + x;
      if (r.values[i] != 255 || seen[i]) continue;
      TipCluster c;
      seen[i] = 1;
      stack.assign(1, {x, y});
      while (!stack.empty()) {
        const Point p = stack.back();
        stack.pop_back();
        c.push_back(p);
        for (int dy = -1; dy <= 1; ++dy) {
          for (int dx = -1; dx <= 1; ++dx) {
            const int nx = p.x + dx;
            const int ny = p.y + dy;
            if (nx < 0 || ny < 0 || nx >= w || ny >= h) continue;
            const std::size_t j = static_cast<std::size_t>(ny) * w + nx;
            if (r.values[j] != 255 || seen[j]) continue;
            seen[j] = 1;
            stack.push_back({nx, ny});
          }
        }
      }
      std::sort(c.begin(), c.end(), [](Point a, Point b) {
        return std::pair(a.y, a.x) < std::pair(b.y, b.x);
      });
      out.push_back(std::move(c));
    }
  }
  return out;
}

Point cluster_centroid(std::span<const Point> cluster) {
  const Sums s = sums(cluster);
  return {static_cast<int>(round_div_signed(s.x, s.n)),
          static_cast<int>(round_div_signed(s.y, s.n))};
}

std::size_t select_finger(std::span<const TipCluster> clusters) {
  std::size_t best = 0;
  Sums b = sums(clusters[0]);
  for (std::size_t i = 1; i < clusters.size(); ++i) {
    const Sums s = sums(clusters[i]);
    // Exact rational comparison of centroids.
    const std::int64_t lx = s.x * b.n;
    const std::int64_t rx = b.x * s.n;
    if (lx < rx || (lx == rx && s.y * b.n < b.y * s.n)) {
      best = i;
      b = s;
    }
  }
  return best;
}

std::vector<Point> tip_band(Point tip, int halfwidth, int frame_width,
                            int frame_height) {
  std::vector<Point> band;
  const int r = std::max(halfwidth, 0);
  const int r2 = r * r;
  for (int y = std::max(tip.y - r, 0); y <= std::min(tip.y + r, frame_height - 1); ++y) {
    for (int x = std::max(tip.x - r, 0); x <= std::min(tip.x + r, frame_width - 1); ++x) {
      const int dx = x - tip.x;
      const int dy = y - tip.y;
      if (dx * dx + dy * dy <= r2) band.push_back({x, y});
    }
  }
  return band;
}

bool template_check(const SkinMask& m, std::span<const Point> cluster, Edge e,
                    int halfwidth) {
  const Point tip = cluster_centroid(cluster);
  const int step = std::max(halfwidth, 1);
  const bool horizontal = e == Edge::Bottom || e == Edge::Top;

  auto probe = [&](int depth) -> int {
    int x = tip.x;
    int y = tip.y;
    switch (e) {
      case Edge::Bottom:
        y += depth;
        break;
      case Edge::Top:
        y -= depth;
        break;
      case Edge::Left:
        x -= depth;
        break;
      case Edge::Right:
        x += depth;
        break;
    }
    if (!m.in_bounds(x, y)) return -1;
    return run_width(m, x, y, horizontal);
  };

  const int near = probe(2 * step);
  const int far = probe(4 * step);
  if (near < 0 || far < 0) return true;
  auto plausible = [](int w) { return w >= 3 && w < 60; };
  return plausible(near) && plausible(far) && far <= 3 * near;
}

TipDetection locate_tip(const SkinMask& m, Edge e, Point offset, int halfwidth,
                        int frame_width, int frame_height) {
  std::vector<TipCluster> clusters = detect_tips(ramp_label(m, e));
  for (TipCluster& c : clusters) {
    for (Point& p : c) {
      p.x += offset.x;
      p.y += offset.y;
    }
  }
  TipDetection d;
  d.cluster = std::move(clusters[select_finger(clusters)]);
  d.tip = cluster_centroid(d.cluster);
  d.entry = e;
  if (frame_width <= 0) frame_width = offset.x + m.width();
  if (frame_height <= 0) frame_height = offset.y + m.height();
  d.band = tip_band(d.tip, halfwidth, frame_width, frame_height);
  return d;
}

}  // namespace fingerstylus::fingertip

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

// Direction-invariant fingertip detection on a cropped skin mask.
//
// The mask is relabelled with a ramp that rises from 0 at the wrist-side
// entry edge to 255 at the skin pixels farthest from it. Pixels valued
// exactly 255 are fingertip pixels; when several separate tip clusters
// exist, the leftmost one (in frame coordinates) is the finger.

#include <cstdint>
#include <span>
#include <vector>

#include "fingerstylus/imaging.hpp"
#include "fingerstylus/types.hpp"

namespace fingerstylus::fingertip {

using imaging::SkinMask;

struct RampImage {
  int width = 0;
  int height = 0;
  std::vector<std::uint8_t> values;
  Edge entry = Edge::Bottom;
  /// Largest scanline distance of a skin pixel from the entry edge.
  int extent = 0;

  std::uint8_t value(int x, int y) const {
    return values[static_cast<std::size_t>(y) * width + x];
  }
};

using TipCluster = std::vector<Point>;

struct TipDetection {
  Point tip;
  TipCluster cluster;
  Edge entry = Edge::Bottom;
  std::vector<Point> band;

  friend bool operator==(const TipDetection&, const TipDetection&) = default;
};

/// Wrist side of the blob. Candidates are the frame borders in `touches`;
/// with no contact, the skin bounding-box sides are compared instead. Ties
/// resolve Bottom > Left > Right > Top. Throws EmptyMask.
Edge entry_edge(const SkinMask& m, EdgeSet touches);

/// Scanline distance of (x, y) from edge `e` of a width x height raster.
int edge_distance(Edge e, int x, int y, int width, int height);

/// Throws EmptyMask.
RampImage ramp_label(const SkinMask& m, Edge e);

/// 8-connected clusters of pixels valued 255, each sorted in raster order,
/// clusters ordered by their first pixel.
std::vector<TipCluster> detect_tips(const RampImage& r);

/// Rounded centroid, ties away from zero.
Point cluster_centroid(std::span<const Point> cluster);

/// Index of the cluster whose exact centroid has the smallest x, then y.
/// Clusters must be non-empty and expressed in frame coordinates.
std::size_t select_finger(std::span<const TipCluster> clusters);

/// Pixels within Euclidean distance `halfwidth` of `tip`, clipped to the
/// frame, in raster order.
std::vector<Point> tip_band(Point tip, int halfwidth, int frame_width,
                            int frame_height);

/// Geometric stand-in for finger template matching: skin run widths at
/// depths 2h and 4h behind the tip must lie in [3, 60) and must not more
/// than triple. Returns true when the mask is too short to probe.
bool template_check(const SkinMask& m, std::span<const Point> cluster, Edge e,
                    int halfwidth);

/// Ramp, tips and finger selection on a mask whose pixel (0,0) sits at
/// `offset` in the frame. Returned coordinates are frame coordinates.
TipDetection locate_tip(const SkinMask& m, Edge e, Point offset = {},
                        int halfwidth = 0, int frame_width = 0,
                        int frame_height = 0);

}  // namespace fingerstylus::fingertip

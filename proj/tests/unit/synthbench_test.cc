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

#include <gtest/gtest.h>

#include <set>

#include "fingerstylus/fingertip.hpp"
#include "fingerstylus/imaging.hpp"
#include "fingerstylus/synthbench.hpp"
#include "test_util.hpp"

namespace fingerstylus::synthbench {
namespace {

using testing::fill;

TEST(RngTest, SameSeedSameStream) {
  Rng a(42, 3);
  Rng b(42, 3);
  Rng c(42, 4);
  bool differs = false;
  for (int i = 0; i < 100; ++i) {
    const auto va = a.next_u64();
    EXPECT_EQ(va, b.next_u64());
    differs |= va != c.next_u64();
  }
  EXPECT_TRUE(differs);
}

TEST(RngTest, UniformIntCoversClosedRange) {
  Rng r(9);
  std::set<int> seen;
  for (int i = 0; i < 2000; ++i) {
    const int v = r.uniform_int(-3, 3);
    ASSERT_GE(v, -3);
    ASSERT_LE(v, 3);
    seen.insert(v);
  }
  EXPECT_EQ(seen.size(), 7u);
}

TEST(RngTest, NormalMoments) {
  Rng r(5);
  double s = 0.0;
  double s2 = 0.0;
  const int n = 20000;
  for (int i = 0; i < n; ++i) {
    const double v = r.normal(10.0, 2.0);
    s += v;
    s2 += v * v;
  }
  const double mean = s / n;
  EXPECT_NEAR(mean, 10.0, 0.1);
  EXPECT_NEAR(std::sqrt(s2 / n - mean * mean), 2.0, 0.1);
}

TEST(YcbcrToRgbTest, InvertsForwardMatrix) {
  const Rgb c = ycbcr_to_rgb(130, 102, 153);
  const imaging::YcbcrPixel p = imaging::rgb_to_ycbcr(c);
  EXPECT_NEAR(p.y, 130, 1);
  EXPECT_NEAR(p.cb, 102, 1);
  EXPECT_NEAR(p.cr, 153, 1);
}

TEST(GenFrameTest, PlainSkinMaskEqualsSilhouette) {
  HandSpec h;
  SceneSpec s;
  const GeneratedFrame g = gen_frame(h, s);
  EXPECT_EQ(imaging::skin_mask(g.frame, {}), g.silhouette);
  EXPECT_EQ(g.truth.entry, Edge::Bottom);
  EXPECT_TRUE(g.silhouette.get(g.truth.tip.x, g.truth.tip.y));
}

TEST(GenFrameTest, Deterministic) {
  HandSpec h;
  h.chroma_jitter_sigma = 2.0;
  SceneSpec s;
  s.background = ComplexBackground{};
  s.seed = 17;
  const GeneratedFrame a = gen_frame(h, s);
  const GeneratedFrame b = gen_frame(h, s);
  EXPECT_EQ(a.frame, b.frame);
  EXPECT_EQ(a.truth, b.truth);
  EXPECT_EQ(a.silhouette, b.silhouette);
}

TEST(GenFrameTest, DimmedHandStillSkin) {
  HandSpec h;
  h.brightness_scale = 0.9;
  h.chroma_jitter_sigma = 3.0;
  SceneSpec s;
  const GeneratedFrame g = gen_frame(h, s);
  const imaging::SkinMask m = imaging::skin_mask(g.frame, {});
  std::int64_t covered = 0;
  for (int y = 0; y < m.height(); ++y) {
    for (int x = 0; x < m.width(); ++x) covered += g.silhouette.get(x, y) && m.get(x, y);
  }
  EXPECT_GE(static_cast<double>(covered), 0.99 * static_cast<double>(g.silhouette.count()));
}

TEST(GenFrameTest, FaintHandFallsBelowLumaFloor) {
  HandSpec h;
  h.brightness_scale = 0.1;
  SceneSpec s;
  const GeneratedFrame g = gen_frame(h, s);
  EXPECT_FALSE(imaging::skin_mask(g.frame, {}).any());
}

TEST(GenFrameTest, RejectsImpossibleSpecs) {
  SceneSpec s;
  HandSpec h;
  h.finger.length = 500;
  EXPECT_THROW(gen_frame(h, s), SpecError);
  h = {};
  h.finger.lateral_offset = 200;
  EXPECT_THROW(gen_frame(h, s), SpecError);
  h = {};
  h.finger.length = 20;
  EXPECT_THROW(gen_frame(h, s), SpecError);
  h = {};
  h.brightness_scale = 0.0;
  EXPECT_THROW(gen_frame(h, s), SpecError);
}

TEST(RotationTest, RotationFamilyOfGroundTruths) {
  HandSpec h;
  h.palm_center = 200;
  h.finger.lateral_offset = 20;
  // Square, so every orientation shares one canonical canvas.
  SceneSpec s;
  s.width = 480;
  s.height = 480;
  const Point canon = gen_frame(h, s).truth.tip;
  for (Edge e : {Edge::Top, Edge::Left, Edge::Right}) {
    h.entry = e;
    const GeneratedFrame g = gen_frame(h, s);
    EXPECT_EQ(g.frame.width(), s.width);
    EXPECT_EQ(g.frame.height(), s.height);
    EXPECT_EQ(g.truth.tip, rotate_from_canonical(canon, e, 480, 480));
    EXPECT_EQ(fingertip::entry_edge(g.silhouette, [&] {
                EdgeSet es;
                es.insert(e);
                return es;
              }()),
              e);
  }
}

TEST(RotationTest, MapsCanonicalBorderToEntryBorder) {
  const int cw = 8;
  const int ch = 5;
  for (int x = 0; x < cw; ++x) {
    EXPECT_EQ(rotate_from_canonical({x, ch - 1}, Edge::Top, cw, ch).y, 0);
    EXPECT_EQ(rotate_from_canonical({x, ch - 1}, Edge::Left, cw, ch).x, 0);
    EXPECT_EQ(rotate_from_canonical({x, ch - 1}, Edge::Right, cw, ch).x, ch - 1);
  }
}

TEST(OracleTest, VerticalBar) {
  imaging::SkinMask m(1, 11);
  fill(m, {0, 0, 0, 10});
  EXPECT_EQ(oracle_tip(m, Edge::Bottom), (Point{0, 0}));
}

TEST(OracleTest, LeftmostOfEqualFingers) {
  imaging::SkinMask m(60, 60);
  fill(m, {0, 50, 59, 59});
  fill(m, {4, 10, 6, 49});  // centred on x=5
  fill(m, {39, 10, 41, 49});
  EXPECT_EQ(oracle_tip(m, Edge::Bottom), (Point{5, 10}));
}

TEST(OracleTest, EmptyMaskThrows) {
  EXPECT_THROW(oracle_tip(imaging::SkinMask(4, 4), Edge::Top), EmptyMask);
}

TEST(OracleTest, AgreesWithDetectorOnSmallRandomMasks) {
  Rng rng(77);
  for (int i = 0; i < 200; ++i) {
    const int w = rng.uniform_int(8, 32);
    const int h = rng.uniform_int(8, 32);
    const imaging::SkinMask m = random_mask(rng, w, h, rng.uniform(0.05, 0.6));
    if (!m.any()) continue;
    const auto e = static_cast<Edge>(rng.uniform_int(0, 3));
    ASSERT_EQ(fingertip::locate_tip(m, e).tip, oracle_tip(m, e)) << "case " << i;
  }
}

TEST(SampleCaseTest, SameSeedSameCase) {
  const BenchCase a = sample_case(Regime::Complex, 3, 10);
  const BenchCase b = sample_case(Regime::Complex, 3, 10);
  EXPECT_EQ(gen_frame(a.hand, a.scene).frame, gen_frame(b.hand, b.scene).frame);
}

TEST(SampleCaseTest, PlainCasesHaveSkinHandOnly) {
  for (std::uint64_t i = 0; i < 20; ++i) {
    const BenchCase c = sample_case(Regime::Plain, 1, i);
    const GeneratedFrame g = gen_frame(c.hand, c.scene);
    const imaging::SkinMask m = imaging::skin_mask(g.frame, {});
    for (int y = 0; y < m.height(); ++y) {
      for (int x = 0; x < m.width(); ++x) {
        if (m.get(x, y)) ASSERT_TRUE(g.silhouette.get(x, y)) << "case " << i;
      }
    }
  }
}

TEST(BenchmarkTest, SingleFrame) {
  BenchOptions o;
  o.n_frames = 1;
  for (Regime r : {Regime::Plain, Regime::Complex}) {
    o.regime = r;
    const BenchReport rep = run_benchmark(o);
    EXPECT_EQ(rep.n_frames, 1);
    EXPECT_TRUE(rep.hit_rate == 0.0 || rep.hit_rate == 1.0);
  }
}

TEST(BenchmarkTest, ReportBytesIndependentOfThreads) {
  BenchOptions o;
  o.regime = Regime::Complex;
  o.n_frames = 24;
  o.width = 320;
  o.height = 240;
  o.jobs = 1;
  const std::string a = report_to_json(run_benchmark(o)).dump();
  o.jobs = 3;
  const std::string b = report_to_json(run_benchmark(o)).dump();
  EXPECT_EQ(a, b);
}

TEST(BenchmarkTest, ReportShape) {
  BenchOptions o;
  o.n_frames = 5;
  const auto j = report_to_json(run_benchmark(o));
  std::vector<std::string> keys;
  for (const auto& [k, v] : j.items()) keys.push_back(k);
  EXPECT_EQ(keys, (std::vector<std::string>{"regime", "seed", "frame_size", "n_frames",
                                            "detections", "hits", "hit_rate", "tolerance_px",
                                            "mean_crop_factor", "missed_frames"}));
  EXPECT_EQ(j["n_frames"], "5");
  EXPECT_EQ(j["tolerance_px"], "5.0000");
}

TEST(Fixed4Test, Formatting) {
  EXPECT_EQ(fixed4(1.0), "1.0000");
  EXPECT_EQ(fixed4(0.96), "0.9600");
  EXPECT_EQ(fixed4(2.0 / 3.0), "0.6667");
}

TEST(SweepTest, GapFramesHaveNoTruth) {
  SweepSpec s;
  s.n_frames = 12;
  s.gap_begin = 4;
  s.gap_end = 8;
  s.width = 320;
  s.height = 240;
  const auto seq = sweep_sequence(s);
  ASSERT_EQ(seq.size(), 12u);
  for (int i = 0; i < 12; ++i) {
    EXPECT_EQ(seq[i].truth.has_value(), i < 4 || i >= 8) << i;
    EXPECT_EQ(seq[i].frame.timestamp_ms(), std::llround(i * 1000.0 / 12.0));
  }
  EXPECT_LT(seq[0].truth->tip.x, seq[11].truth->tip.x);
}

}  // namespace
}  // namespace fingerstylus::synthbench

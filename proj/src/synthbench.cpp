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

#include "fingerstylus/synthbench.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <numbers>
#include <thread>

#include "fingerstylus/pipeline.hpp"

namespace fingerstylus::synthbench {

Rng::Rng(std::uint64_t seed, std::uint64_t stream) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(stream),
                    static_cast<std::uint32_t>(stream >> 32)};
  engine_.seed(seq);
}

int Rng::uniform_int(int lo, int hi) {
  if (hi <= lo) return lo;
  const std::uint64_t span = static_cast<std::uint64_t>(hi - lo) + 1;
  // Rejection sampling keeps the draw unbiased.
  const std::uint64_t limit = UINT64_MAX - UINT64_MAX % span;
  std::uint64_t v;
  do {
    v = engine_();
  } while (v >= limit);
  return lo + static_cast<int>(v % span);
}

double Rng::uniform(double lo, double hi) {
  const double u = static_cast<double>(engine_() >> 11) * 0x1.0p-53;
  return lo + (hi - lo) * u;
}

double Rng::normal(double mean, double sigma) {
  if (spare_normal_) {
    const double z = *spare_normal_;
    spare_normal_.reset();
    return mean + sigma * z;
  }
  double u1 = uniform(0.0, 1.0);
  while (u1 <= 0.0) u1 = uniform(0.0, 1.0);
  const double u2 = uniform(0.0, 1.0);
  const double r = std::sqrt(-2.0 * std::log(u1));
  const double a = 2.0 * std::numbers::pi * u2;
  spare_normal_ = r * std::sin(a);
  return mean + sigma * r * std::cos(a);
}

Rgb HandSpec::default_skin_color() { return {165, 121, 84}; }

Rgb ycbcr_to_rgb(double y, double cb, double cr) {
  auto to8 = [](double v) {
    return static_cast<std::uint8_t>(std::clamp(std::floor(v + 0.5), 0.0, 255.0));
  };
  return {to8(y + 1.402 * (cr - 128.0)),
          to8(y - 0.344136 * (cb - 128.0) - 0.714136 * (cr - 128.0)),
          to8(y + 1.772 * (cb - 128.0))};
}

Point rotate_from_canonical(Point p, Edge e, int cw, int ch) {
  switch (e) {
    case Edge::Bottom:
      return p;
    case Edge::Top:
      return {cw - 1 - p.x, ch - 1 - p.y};
    case Edge::Left:
      return {ch - 1 - p.y, p.x};
    case Edge::Right:
      return {p.y, cw - 1 - p.x};
  }
  return p;
}

namespace {

struct Canvas {
  int w = 0;
  int h = 0;
  std::vector<Rgb> px;
  std::vector<std::uint8_t> hand;

  Canvas(int width, int height, Rgb fill)
      : w(width), h(height), px(static_cast<std::size_t>(width) * height, fill),
        hand(px.size(), 0) {}

  Rgb& at(int x, int y) { return px[static_cast<std::size_t>(y) * w + x]; }
};

bool near_skin_box(Rgb c) {
  const imaging::YcbcrPixel p = imaging::rgb_to_ycbcr(c);
  const imaging::SkinThresholds t;
  constexpr int kMargin = 12;
  return p.cb >= t.cb_min - kMargin && p.cb <= t.cb_max + kMargin &&
         p.cr >= t.cr_min - kMargin && p.cr <= t.cr_max + kMargin;
}

Rgb random_non_skin(Rng& rng) {
  for (;;) {
    const Rgb c{static_cast<std::uint8_t>(rng.uniform_int(0, 255)),
                static_cast<std::uint8_t>(rng.uniform_int(0, 255)),
                static_cast<std::uint8_t>(rng.uniform_int(0, 255))};
    if (!near_skin_box(c)) return c;
  }
}

Rgb random_skin(Rng& rng) {
  const double y = rng.uniform_int(100, 150);
  const double cb = rng.uniform_int(92, 112);
  const double cr = rng.uniform_int(143, 163);
  return ycbcr_to_rgb(y, cb, cr);
}

void fill_shape(Canvas& c, Rng& rng, int size_min, int size_max, Rgb color) {
  const int sw = rng.uniform_int(size_min, size_max);
  const int sh = rng.uniform_int(size_min, size_max);
  const int x0 = rng.uniform_int(-sw / 2, c.w - 1 - sw / 2);
  const int y0 = rng.uniform_int(-sh / 2, c.h - 1 - sh / 2);
  const bool ellipse = rng.uniform_int(0, 1) == 1;
  const double rx = sw / 2.0;
  const double ry = sh / 2.0;
  for (int y = std::max(y0, 0); y < std::min(y0 + sh, c.h); ++y) {
    for (int x = std::max(x0, 0); x < std::min(x0 + sw, c.w); ++x) {
      if (ellipse) {
        const double dx = (x - x0 + 0.5 - rx) / rx;
        const double dy = (y - y0 + 0.5 - ry) / ry;
        if (dx * dx + dy * dy > 1.0) continue;
      }
      c.at(x, y) = color;
    }
  }
}

void paint_background(Canvas& c, const SceneSpec& s) {
  if (const auto* plain = std::get_if<PlainBackground>(&s.background)) {
    std::fill(c.px.begin(), c.px.end(), plain->color);
    return;
  }
  const auto& cx = std::get<ComplexBackground>(s.background);
  Rng rng(cx.seed, 0xB6);
  std::fill(c.px.begin(), c.px.end(), cx.base);
  const int n_skin = cx.include_skin_colored ? std::max(1, cx.n_distractors / 3) : 0;
  // Skin-coloured clutter stays strictly below the blob area cut-off of the
  // output frame (which has the same pixel count as the canvas).
  const int skin_max = std::max(
      4, static_cast<int>(0.9 * std::sqrt(static_cast<double>(
                                    imaging::default_min_area(c.w, c.h) - 1))));
  for (int i = 0; i < cx.n_distractors; ++i) {
    if (i < cx.n_distractors - n_skin) {
      fill_shape(c, rng, cx.size_min, cx.size_max, random_non_skin(rng));
    } else {
      fill_shape(c, rng, 4, skin_max, random_skin(rng));
    }
  }
  if (cx.noise > 0) {
    Rng noise(s.seed, 0x0E);
    for (Rgb& p : c.px) {
      auto jig = [&](std::uint8_t v) {
        return static_cast<std::uint8_t>(
            std::clamp(v + noise.uniform_int(-cx.noise, cx.noise), 0, 255));
      };
      p = {jig(p.r), jig(p.g), jig(p.b)};
    }
  }
}

struct CanonicalHand {
  Point tip;
};

CanonicalHand paint_hand(Canvas& c, const HandSpec& h, std::uint64_t seed) {
  const FingerSpec& f = h.finger;
  if (h.palm_w < 1 || h.palm_h < 1 || f.width < 1 || f.length < 1) {
    throw SpecError("hand dimensions must be positive");
  }
  if (f.length < 2 * f.width) throw SpecError("finger length must be >= 2 x width");
  if (!(h.brightness_scale > 0.0) || h.chroma_jitter_sigma < 0.0) {
    throw SpecError("brightness must be positive and jitter non-negative");
  }
  const int pc = h.palm_center.value_or(c.w / 2);
  const int px0 = pc - h.palm_w / 2;
  const int px1 = px0 + h.palm_w - 1;
  const int py0 = c.h - h.palm_h;
  const int fx0 = pc + f.lateral_offset - (f.width - 1) / 2;
  const int fx1 = fx0 + f.width - 1;
  const int fy0 = py0 - f.length;
  if (px0 < 0 || px1 >= c.w || py0 < 0 || fy0 < 0) {
    throw SpecError("hand exceeds frame");
  }
  if (fx0 < px0 || fx1 > px1) throw SpecError("finger is not attached to the palm");

  // Rounded cap: disk of radius r around the cap centre, with the r^2 + r
  // bound so its top row keeps three pixels.
  const double cxr = (fx0 + fx1) / 2.0;
  const double r = (f.width - 1) / 2.0;
  const double cyr = fy0 + r;

  const imaging::YcbcrPixel base = imaging::rgb_to_ycbcr(h.skin_color);
  Rng rng(seed, 0x4A);
  auto skin_pixel = [&]() {
    double cb = base.cb;
    double cr = base.cr;
    if (h.chroma_jitter_sigma > 0.0) {
      cb = std::clamp(rng.normal(cb, h.chroma_jitter_sigma), 0.0, 255.0);
      cr = std::clamp(rng.normal(cr, h.chroma_jitter_sigma), 0.0, 255.0);
    }
    const double y = base.y;
    const double rr = y + 1.402 * (cr - 128.0);
    const double gg = y - 0.344136 * (cb - 128.0) - 0.714136 * (cr - 128.0);
    const double bb = y + 1.772 * (cb - 128.0);
    auto to8 = [&](double v) {
      v = std::clamp(v, 0.0, 255.0) * h.brightness_scale;
      return static_cast<std::uint8_t>(std::clamp(std::floor(v + 0.5), 0.0, 255.0));
    };
    return Rgb{to8(rr), to8(gg), to8(bb)};
  };

  for (int y = 0; y < c.h; ++y) {
    for (int x = 0; x < c.w; ++x) {
      bool in = false;
      if (y >= py0 && x >= px0 && x <= px1) in = true;
      if (y >= fy0 && y < py0 && x >= fx0 && x <= fx1) {
        in = true;
        if (y < cyr) {
          const double dx = x - cxr;
          const double dy = y - cyr;
          in = dx * dx + dy * dy <= r * r + r;
        }
      }
      if (!in) continue;
      c.at(x, y) = skin_pixel();
      c.hand[static_cast<std::size_t>(y) * c.w + x] = 1;
    }
  }
  return {{static_cast<int>(std::floor(cxr + 0.5)), fy0}};
}

struct Rotated {
  FrameRgb frame;
  SkinMask mask;
};

Rotated rotate_canvas(const Canvas& c, Edge e) {
  const bool transpose = e == Edge::Left || e == Edge::Right;
  const int ow = transpose ? c.h : c.w;
  const int oh = transpose ? c.w : c.h;
  FrameRgb f(ow, oh);
  SkinMask m(ow, oh);
  for (int y = 0; y < c.h; ++y) {
    for (int x = 0; x < c.w; ++x) {
      const Point q = rotate_from_canonical({x, y}, e, c.w, c.h);
      const std::size_t i = static_cast<std::size_t>(y) * c.w + x;
      f.at(q.x, q.y) = c.px[i];
      if (c.hand[i]) m.set(q.x, q.y);
    }
  }
  return {std::move(f), std::move(m)};
}

std::pair<int, int> canonical_dims(const SceneSpec& s, Edge e) {
  imaging::check_dimensions(s.width, s.height);
  if (e == Edge::Left || e == Edge::Right) return {s.height, s.width};
  return {s.width, s.height};
}

}  // namespace

GeneratedFrame gen_frame(const HandSpec& h, const SceneSpec& s) {
  const auto [cw, ch] = canonical_dims(s, h.entry);
  Canvas c(cw, ch, {});
  paint_background(c, s);
  const CanonicalHand hand = paint_hand(c, h, s.seed);
  Rotated r = rotate_canvas(c, h.entry);
  return {std::move(r.frame), {rotate_from_canonical(hand.tip, h.entry, cw, ch), h.entry},
          std::move(r.mask)};
}

Point oracle_tip(const SkinMask& m, Edge e) {
  struct Px {
    int x;
    int y;
    int d;
  };
  const int w = m.width();
  const int h = m.height();
  std::vector<Px> skin;
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      if (!m.get(x, y)) continue;
      int d = 0;
      if (e == Edge::Bottom) d = (h - 1) - y;
      if (e == Edge::Top) d = y;
      if (e == Edge::Left) d = x;
      if (e == Edge::Right) d = (w - 1) - x;
      skin.push_back({x, y, d});
    }
  }
  if (skin.empty()) throw EmptyMask();
  int far = 0;
  for (const Px& p : skin) far = std::max(far, p.d);
  std::vector<Px> top;
  for (const Px& p : skin) {
    if (p.d == far) top.push_back(p);
  }

  // Label propagation until stable: each pixel takes the smallest label
  // among its 8-neighbours.
  std::vector<std::size_t> label(top.size());
  for (std::size_t i = 0; i < top.size(); ++i) label[i] = i;
  for (bool changed = true; changed;) {
    changed = false;
    for (std::size_t i = 0; i < top.size(); ++i) {
      for (std::size_t j = 0; j < top.size(); ++j) {
        if (std::abs(top[i].x - top[j].x) > 1 || std::abs(top[i].y - top[j].y) > 1) {
          continue;
        }
        const std::size_t lo = std::min(label[i], label[j]);
        if (label[i] != lo || label[j] != lo) {
          label[i] = label[j] = lo;
          changed = true;
        }
      }
    }
  }

  double best_x = 0.0;
  double best_y = 0.0;
  bool have = false;
  for (std::size_t l = 0; l < top.size(); ++l) {
    double sx = 0.0;
    double sy = 0.0;
    double n = 0.0;
    for (std::size_t i = 0; i < top.size(); ++i) {
      if (label[i] != l) continue;
      sx += top[i].x;
      sy += top[i].y;
      n += 1.0;
    }
    if (n == 0.0) continue;
    const double cx = sx / n;
    const double cy = sy / n;
    if (!have || cx < best_x || (cx == best_x && cy < best_y)) {
      best_x = cx;
      best_y = cy;
      have = true;
    }
  }
  return {static_cast<int>(std::floor(best_x + 0.5)),
          static_cast<int>(std::floor(best_y + 0.5))};
}

SkinMask random_mask(Rng& rng, int width, int height, double density) {
  SkinMask m(width, height);
  for (int y = 0; y < height; ++y) {
    for (int x = 0; x < width; ++x) {
      if (rng.uniform(0.0, 1.0) < density) m.set(x, y);
    }
  }
  return m;
}

std::string_view to_string(Regime r) { return r == Regime::Plain ? "plain" : "complex"; }

Regime regime_from_string(std::string_view s) {
  if (s == "plain") return Regime::Plain;
  if (s == "complex") return Regime::Complex;
  throw std::invalid_argument("unknown regime: " + std::string(s));
}

BenchCase sample_case(Regime regime, std::uint64_t seed, std::uint64_t index, int width,
                      int height) {
  Rng rng(seed, index + 1);
  BenchCase c;
  HandSpec& h = c.hand;
  h.entry = static_cast<Edge>(rng.uniform_int(0, 3));
  const bool transpose = h.entry == Edge::Left || h.entry == Edge::Right;
  const int cw = transpose ? height : width;
  const double k = std::min(width, height) / 480.0;
  auto scaled = [&](int lo, int hi) {
    return rng.uniform_int(static_cast<int>(lo * k), static_cast<int>(hi * k));
  };

  h.palm_w = scaled(80, 130);
  h.palm_h = scaled(60, 110);
  h.finger.width = scaled(11, 25) | 1;
  h.finger.length = std::max(2 * h.finger.width, scaled(50, 150));
  const int slack = std::max(0, h.palm_w / 2 - h.finger.width / 2 - 2);
  h.finger.lateral_offset = rng.uniform_int(-slack, slack);
  h.palm_center = rng.uniform_int(h.palm_w / 2 + 5, cw - h.palm_w / 2 - 5);
  h.skin_color = random_skin(rng);
  h.chroma_jitter_sigma = rng.uniform(0.0, 3.0);
  h.brightness_scale = rng.uniform(0.85, 1.15);

  c.scene.width = width;
  c.scene.height = height;
  c.scene.seed = rng.next_u64();
  if (regime == Regime::Plain) {
    c.scene.background = PlainBackground{random_non_skin(rng)};
  } else {
    ComplexBackground b;
    b.seed = rng.next_u64();
    b.n_distractors = rng.uniform_int(8, 16);
    b.size_min = scaled(20, 20);
    b.size_max = scaled(120, 120);
    b.base = random_non_skin(rng);
    c.scene.background = b;
  }
  return c;
}

std::string fixed4(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.4f", v);
  return buf;
}

BenchReport run_benchmark(const BenchOptions& opt, PipelineConfig cfg) {
  if (opt.n_frames < 1) throw std::invalid_argument("n_frames must be >= 1");
  cfg.screen.mirror_x = false;
  cfg.validate();

  struct Outcome {
    bool detected = false;
    bool hit = false;
    std::optional<double> crop_factor;
    double latency_ms = 0.0;
  };
  std::vector<Outcome> outcomes(static_cast<std::size_t>(opt.n_frames));
  std::atomic<std::int64_t> next{0};
  auto worker = [&] {
    for (std::int64_t i = next++; i < opt.n_frames; i = next++) {
      BenchCase bc = sample_case(opt.regime, opt.seed, static_cast<std::uint64_t>(i),
                                 opt.width, opt.height);
      if (opt.brightness_scale) bc.hand.brightness_scale = *opt.brightness_scale;
      if (opt.chroma_jitter_sigma) bc.hand.chroma_jitter_sigma = *opt.chroma_jitter_sigma;
      const GeneratedFrame g = gen_frame(bc.hand, bc.scene);
      const auto out = pipeline::process_frame(g.frame, stroke::Session{}, cfg, i);
      Outcome& o = outcomes[static_cast<std::size_t>(i)];
      o.crop_factor = out.result.crop_factor;
      o.latency_ms = out.result.timings.total_us() / 1000.0;
      if (out.result.detection) {
        o.detected = true;
        const double dx = out.result.detection->tip.x - g.truth.tip.x;
        const double dy = out.result.detection->tip.y - g.truth.tip.y;
        o.hit = std::sqrt(dx * dx + dy * dy) <= opt.tolerance_px;
      }
    }
  };
  const int jobs = std::max(1, opt.jobs);
  std::vector<std::thread> pool;
  for (int t = 1; t < jobs; ++t) pool.emplace_back(worker);
  worker();
  for (auto& t : pool) t.join();

  BenchReport r;
  r.regime = opt.regime;
  r.seed = opt.seed;
  r.width = opt.width;
  r.height = opt.height;
  r.n_frames = opt.n_frames;
  r.tolerance_px = opt.tolerance_px;
  double crop_sum = 0.0;
  std::int64_t crops = 0;
  std::vector<double> lat;
  for (std::size_t i = 0; i < outcomes.size(); ++i) {
    const Outcome& o = outcomes[i];
    r.hits += o.hit;
    r.detections += o.detected;
    if (!o.hit) r.missed_frames.push_back(static_cast<std::int64_t>(i));
    if (o.crop_factor) {
      crop_sum += *o.crop_factor;
      ++crops;
    }
    lat.push_back(o.latency_ms);
  }
  r.hit_rate = static_cast<double>(r.hits) / static_cast<double>(r.n_frames);
  r.mean_crop_factor = crops ? crop_sum / static_cast<double>(crops) : 0.0;
  std::sort(lat.begin(), lat.end());
  double total = 0.0;
  for (double v : lat) total += v;
  r.latency.mean_ms = total / static_cast<double>(lat.size());
  r.latency.p95_ms =
      lat[std::max<std::size_t>(
              1, static_cast<std::size_t>(std::ceil(0.95 * static_cast<double>(lat.size())))) -
          1];
  r.latency.max_ms = lat.back();
  return r;
}

nlohmann::ordered_json report_to_json(const BenchReport& r) {
  nlohmann::ordered_json j;
  j["regime"] = std::string(to_string(r.regime));
  j["seed"] = r.seed;
  j["frame_size"] = {{"width", r.width}, {"height", r.height}};
  j["n_frames"] = std::to_string(r.n_frames);
  j["detections"] = std::to_string(r.detections);
  j["hits"] = std::to_string(r.hits);
  j["hit_rate"] = fixed4(r.hit_rate);
  j["tolerance_px"] = fixed4(r.tolerance_px);
  j["mean_crop_factor"] = fixed4(r.mean_crop_factor);
  j["missed_frames"] = r.missed_frames;
  return j;
}

nlohmann::ordered_json latency_to_json(const BenchReport& r) {
  nlohmann::ordered_json j;
  j["mean_ms"] = r.latency.mean_ms;
  j["p95_ms"] = r.latency.p95_ms;
  j["max_ms"] = r.latency.max_ms;
  return j;
}

std::vector<SweepFrame> sweep_sequence(const SweepSpec& s) {
  std::vector<SweepFrame> out;
  HandSpec h;
  h.entry = s.entry;
  const bool transpose = s.entry == Edge::Left || s.entry == Edge::Right;
  const int cw = transpose ? s.height : s.width;
  const int ch = transpose ? s.width : s.height;
  const double k = std::min(s.width, s.height) / 480.0;
  h.palm_w = static_cast<int>(100 * k);
  h.palm_h = static_cast<int>(80 * k);
  h.finger.width = static_cast<int>(15 * k) | 1;
  h.finger.length = std::max(2 * h.finger.width, std::min(static_cast<int>(110 * k),
                                                         ch - h.palm_h - 2));
  h.chroma_jitter_sigma = 2.0;

  SceneSpec scene;
  scene.width = s.width;
  scene.height = s.height;
  if (s.complex_background) {
    ComplexBackground b;
    b.seed = s.seed;
    b.size_min = static_cast<int>(20 * k);
    b.size_max = static_cast<int>(120 * k);
    scene.background = b;
  }

  const int lo = h.palm_w / 2 + 2;
  const int hi = cw - h.palm_w / 2 - 2;
  for (int i = 0; i < s.n_frames; ++i) {
    scene.seed = s.seed * 1000 + static_cast<std::uint64_t>(i);
    const std::int64_t t = pipeline::synthesized_timestamp_ms(static_cast<std::size_t>(i), s.fps);
    SweepFrame f;
    if (i >= s.gap_begin && i < s.gap_end) {
      const auto [ccw, cch] = canonical_dims(scene, h.entry);
      Canvas c(ccw, cch, {});
      paint_background(c, scene);
      f.frame = rotate_canvas(c, h.entry).frame;
    } else {
      const double u = s.n_frames > 1 ? static_cast<double>(i) / (s.n_frames - 1) : 0.5;
      h.palm_center = lo + static_cast<int>(std::floor(u * (hi - lo) + 0.5));
      GeneratedFrame g = gen_frame(h, scene);
      f.frame = std::move(g.frame);
      f.truth = g.truth;
    }
    f.frame.set_timestamp_ms(t);
    out.push_back(std::move(f));
  }
  return out;
}

}  // namespace fingerstylus::synthbench

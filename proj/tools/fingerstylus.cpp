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

#include <csignal>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <pthread.h>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "fingerstylus/config.hpp"
#include "fingerstylus/image_io.hpp"
#include "fingerstylus/pipeline.hpp"
#include "fingerstylus/service.hpp"
#include "fingerstylus/stroke.hpp"
#include "fingerstylus/synthbench.hpp"

namespace fs = std::filesystem;
using namespace fingerstylus;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitFailure = 1;
constexpr int kExitConfig = 2;
constexpr int kExitInput = 3;

PipelineConfig build_config(const std::string& path, const std::vector<std::string>& sets) {
  PipelineConfig cfg = path.empty() ? PipelineConfig{} : load_config(path);
  for (const auto& s : sets) cfg = apply_override(cfg, s);
  cfg.validate();
  return cfg;
}

void write_json(const fs::path& path, const nlohmann::ordered_json& j) {
  image_io::write_file(path, j.dump(2) + "\n");
}

// Stroke k > 0 of a multi-session run goes next to the first as
// "<stem>.<k+1><ext>".
fs::path numbered(const fs::path& base, std::size_t k) {
  if (k == 0) return base;
  fs::path p = base;
  p.replace_filename(base.stem().string() + "." + std::to_string(k + 1) +
                     base.extension().string());
  return p;
}

struct ProcessArgs {
  std::string input;
  std::string config;
  std::string out;
  std::string svg;
  std::string png;
  std::string overlay_dir;
  std::string metrics;
  std::vector<std::string> sets;
  double fps = 12.0;
};

int cmd_process(const ProcessArgs& a) {
  PipelineConfig cfg;
  try {
    cfg = build_config(a.config, a.sets);
  } catch (const std::exception& e) {
    std::cerr << "invalid config: " << e.what() << "\n";
    return kExitConfig;
  }

  pipeline::RunOutput run;
  std::vector<imaging::FrameRgb> frames;
  try {
    if (!fs::is_directory(a.input)) {
      std::cerr << "input is not a directory: " << a.input << "\n";
      return kExitInput;
    }
    pipeline::DirectorySource src(a.input, a.fps);
    if (src.size() == 0) {
      std::cerr << "no .png or .ppm frames in " << a.input << "\n";
      return kExitInput;
    }
    if (!a.overlay_dir.empty()) {
      // Overlays need the source pixels; keep them alongside the results.
      std::vector<imaging::FrameRgb> all;
      while (auto f = src.next()) all.push_back(std::move(*f));
      frames = all;
      pipeline::VectorSource vs(std::move(all));
      run = pipeline::run_sequence(vs, cfg, "s");
    } else {
      run = pipeline::run_sequence(src, cfg, "s");
    }
  } catch (const pipeline::InvalidFrameAt& e) {
    std::cerr << "invalid input " << e.what() << "\n";
    return kExitInput;
  }

  if (run.sessions.empty()) {
    std::cerr << "no fingertip detected in " << run.results.size()
              << " frames; no stroke written\n";
  }
  for (std::size_t k = 0; k < run.sessions.size(); ++k) {
    const stroke::Stroke& s = run.sessions[k];
    image_io::write_file(numbered(a.out, k), stroke::export_stroke(s, stroke::ExportFormat::Json));
    if (!a.svg.empty()) {
      image_io::write_file(numbered(a.svg, k), stroke::export_stroke(s, stroke::ExportFormat::Svg));
    }
    if (!a.png.empty()) {
      image_io::write_file(numbered(a.png, k), stroke::export_stroke(s, stroke::ExportFormat::Png));
    }
  }
  if (!a.overlay_dir.empty()) {
    fs::create_directories(a.overlay_dir);
    for (std::size_t i = 0; i < run.results.size(); ++i) {
      char name[32];
      std::snprintf(name, sizeof name, "overlay_%05zu.png", i);
      image_io::write_file(fs::path(a.overlay_dir) / name,
                           image_io::encode_png(pipeline::overlay(frames[i], run.results[i])));
    }
  }
  if (!a.metrics.empty()) {
    nlohmann::ordered_json m = pipeline::metrics_to_json(run.metrics);
    auto frames_json = nlohmann::ordered_json::array();
    for (const auto& r : run.results) frames_json.push_back(pipeline::frame_result_to_json(r));
    m["frames"] = std::move(frames_json);
    write_json(a.metrics, m);
  }
  std::cout << run.results.size() << " frames, " << run.metrics.frames_with_detection
            << " with a tip, " << run.sessions.size() << " session(s)\n";
  return kExitOk;
}

struct BenchArgs {
  std::string regime = "plain";
  std::int64_t frames = 200;
  double tolerance = 5.0;
  std::uint64_t seed = 1;
  std::string report;
  std::string latency_report;
  std::string config;
  std::vector<std::string> sets;
  int jobs = 1;
  int width = 640;
  int height = 480;
  std::optional<double> brightness;
};

int cmd_bench(const BenchArgs& a) {
  PipelineConfig cfg;
  try {
    cfg = build_config(a.config, a.sets);
  } catch (const std::exception& e) {
    std::cerr << "invalid config: " << e.what() << "\n";
    return kExitConfig;
  }
  synthbench::BenchOptions opt;
  opt.regime = synthbench::regime_from_string(a.regime);
  opt.n_frames = a.frames;
  opt.tolerance_px = a.tolerance;
  opt.seed = a.seed;
  opt.jobs = a.jobs;
  opt.width = a.width;
  opt.height = a.height;
  opt.brightness_scale = a.brightness;
  const synthbench::BenchReport r = synthbench::run_benchmark(opt, cfg);

  const auto report = synthbench::report_to_json(r);
  if (!a.report.empty()) write_json(a.report, report);
  if (!a.latency_report.empty()) write_json(a.latency_report, synthbench::latency_to_json(r));
  std::cout << "regime " << a.regime << ": hit_rate " << synthbench::fixed4(r.hit_rate)
            << " (" << r.hits << "/" << r.n_frames << "), mean latency " << r.latency.mean_ms
            << " ms\n";
  return kExitOk;
}

struct ServeArgs {
  std::string address = "127.0.0.1";
  std::uint16_t port = 8080;
  std::string config;
  std::vector<std::string> sets;
  std::size_t retain = 64;
  int workers = 2;
};

int cmd_serve(const ServeArgs& a) {
  service::ServiceOptions opt;
  try {
    opt.config = build_config(a.config, a.sets);
  } catch (const std::exception& e) {
    std::cerr << "invalid config: " << e.what() << "\n";
    return kExitConfig;
  }
  opt.address = a.address;
  opt.port = a.port;
  opt.retain = a.retain;
  opt.worker_threads = a.workers;

  // Block the stop signals before any thread starts so only sigwait sees them.
  sigset_t stop_signals;
  sigemptyset(&stop_signals);
  sigaddset(&stop_signals, SIGINT);
  sigaddset(&stop_signals, SIGTERM);
  pthread_sigmask(SIG_BLOCK, &stop_signals, nullptr);

  service::PaintService svc(opt);
  const std::uint16_t port = svc.start();
  std::cout << "listening on " << a.address << ":" << port << std::endl;
  int sig = 0;
  sigwait(&stop_signals, &sig);
  std::cout << "stopping" << std::endl;
  svc.stop();
  return kExitOk;
}

struct GenerateArgs {
  std::string out;
  int frames = 100;
  std::uint64_t seed = 7;
  int width = 640;
  int height = 480;
  std::string entry = "bottom";
  int gap_begin = 0;
  int gap_end = 0;
  bool complex = false;
  std::string format = "png";
};

int cmd_generate(const GenerateArgs& a) {
  synthbench::SweepSpec spec;
  spec.n_frames = a.frames;
  spec.seed = a.seed;
  spec.width = a.width;
  spec.height = a.height;
  spec.entry = edge_from_string(a.entry);
  spec.gap_begin = a.gap_begin;
  spec.gap_end = a.gap_end;
  spec.complex_background = a.complex;
  const auto seq = synthbench::sweep_sequence(spec);
  fs::create_directories(a.out);
  auto truth = nlohmann::ordered_json::array();
  for (std::size_t i = 0; i < seq.size(); ++i) {
    char name[32];
    std::snprintf(name, sizeof name, "frame_%05zu.%s", i, a.format.c_str());
    const auto bytes = a.format == "ppm" ? image_io::encode_ppm(seq[i].frame)
                                         : image_io::encode_png(seq[i].frame);
    image_io::write_file(fs::path(a.out) / name, bytes);
    if (seq[i].truth) {
      truth.push_back({{"frame", i},
                       {"x", seq[i].truth->tip.x},
                       {"y", seq[i].truth->tip.y},
                       {"entry", std::string(to_string(seq[i].truth->entry))}});
    } else {
      truth.push_back({{"frame", i}, {"x", nullptr}, {"y", nullptr}, {"entry", nullptr}});
    }
  }
  // Kept outside the frame directory so `process` never sees it.
  write_json(fs::path(a.out).string() + ".truth.json", truth);
  std::cout << seq.size() << " frames written to " << a.out << "\n";
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"fingerstylus: fingertip drawing from camera frames"};
  app.require_subcommand(1);

  ProcessArgs pa;
  auto* process = app.add_subcommand("process", "Turn a directory of frames into strokes");
  process->add_option("--input", pa.input, "Directory of numbered .png/.ppm frames")->required();
  process->add_option("--config", pa.config, "PipelineConfig JSON file");
  process->add_option("--out", pa.out, "Stroke JSON output")->required();
  process->add_option("--svg", pa.svg, "Stroke SVG output");
  process->add_option("--png", pa.png, "Stroke PNG output");
  process->add_option("--overlay-dir", pa.overlay_dir, "Per-frame images with the tip band");
  process->add_option("--metrics", pa.metrics, "Run metrics and per-frame timings JSON");
  process->add_option("--set", pa.sets, "Config override key=value (repeatable)");
  process->add_option("--fps", pa.fps, "Timestamp rate for the frame files")
      ->check(CLI::PositiveNumber);

  BenchArgs ba;
  auto* bench = app.add_subcommand("bench", "Synthetic accuracy and latency benchmark");
  bench->add_option("--regime", ba.regime)->check(CLI::IsMember({"plain", "complex"}));
  bench->add_option("--frames", ba.frames)->check(CLI::PositiveNumber);
  bench->add_option("--tolerance", ba.tolerance)->check(CLI::NonNegativeNumber);
  bench->add_option("--seed", ba.seed);
  bench->add_option("--report", ba.report, "BenchReport JSON output");
  bench->add_option("--latency-report", ba.latency_report, "Latency JSON output");
  bench->add_option("--config", ba.config);
  bench->add_option("--set", ba.sets);
  bench->add_option("--jobs", ba.jobs)->check(CLI::PositiveNumber);
  bench->add_option("--width", ba.width)->check(CLI::Range(64, imaging::kMaxFrameDim));
  bench->add_option("--height", ba.height)->check(CLI::Range(64, imaging::kMaxFrameDim));
  bench->add_option("--brightness", ba.brightness, "Force one brightness scale");

  ServeArgs sa;
  auto* serve = app.add_subcommand("serve", "Live drawing service");
  serve->add_option("--address", sa.address);
  serve->add_option("--port", sa.port);
  serve->add_option("--config", sa.config);
  serve->add_option("--set", sa.sets);
  serve->add_option("--retain", sa.retain, "Finished sessions kept for export")
      ->check(CLI::PositiveNumber);
  serve->add_option("--workers", sa.workers)->check(CLI::PositiveNumber);

  GenerateArgs ga;
  auto* generate = app.add_subcommand("generate", "Write a synthetic sweep as frame files");
  generate->add_option("--out", ga.out)->required();
  generate->add_option("--frames", ga.frames)->check(CLI::PositiveNumber);
  generate->add_option("--seed", ga.seed);
  generate->add_option("--width", ga.width);
  generate->add_option("--height", ga.height);
  generate->add_option("--entry", ga.entry)
      ->check(CLI::IsMember({"top", "bottom", "left", "right"}));
  generate->add_option("--gap-begin", ga.gap_begin);
  generate->add_option("--gap-end", ga.gap_end);
  generate->add_flag("--complex", ga.complex);
  generate->add_option("--format", ga.format)->check(CLI::IsMember({"png", "ppm"}));

  CLI11_PARSE(app, argc, argv);

  try {
    if (*process) return cmd_process(pa);
    if (*bench) return cmd_bench(ba);
    if (*serve) return cmd_serve(sa);
    if (*generate) return cmd_generate(ga);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitFailure;
  }
  return kExitFailure;
}

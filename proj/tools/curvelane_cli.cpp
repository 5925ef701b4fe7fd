#include <algorithm>
#include <filesystem>
#include <fnmatch.h>
#include <fstream>
#include <iostream>
#include <iterator>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "curvelane/birdseye.hpp"
#include "curvelane/config.hpp"
#include "curvelane/error.hpp"
#include "curvelane/pipeline.hpp"
#include "curvelane/pnm.hpp"
#include "curvelane/result_json.hpp"
#include "curvelane/synth.hpp"

namespace fs = std::filesystem;
using namespace curvelane;

namespace {

struct Common {
  std::string config_path;
  long long seed = -1;
  std::string overlay;
  std::string json;
  std::vector<std::string> overrides;
};

void add_common(CLI::App* cmd, Common& c) {
  cmd->add_option("--config", c.config_path, "Config file (key = value lines)");
  cmd->add_option("--seed", c.seed, "Random seed for the probabilistic Hough stage");
  cmd->add_option("--overlay", c.overlay, "Write an overlay image (PPM)");
  cmd->add_option("--json", c.json, "Write result records here instead of stdout");
  cmd->add_option("--set", c.overrides, "Override a config key, e.g. --set hough.votes_min=12");
}

PipelineConfig build_config(const Common& c) {
  PipelineConfig cfg;
  if (!c.config_path.empty()) cfg = load_config(c.config_path);
  for (const auto& o : c.overrides) apply_override(cfg, o);
  if (c.seed >= 0) cfg.seed = static_cast<std::uint64_t>(c.seed);
  if (!c.json.empty()) cfg.json_path = c.json;
  if (!c.overlay.empty()) cfg.overlay_path = c.overlay;
  cfg.validate();
  return cfg;
}

// Appends lines to the configured JSON file, or prints them.
class Sink {
 public:
  explicit Sink(const std::string& path) {
    if (!path.empty()) {
      file_.open(path);
      if (!file_) throw Error(ErrorCode::IoError, "cannot write " + path);
    }
  }
  void line(const std::string& s) { (file_.is_open() ? static_cast<std::ostream&>(file_) : std::cout) << s << '\n'; }

 private:
  std::ofstream file_;
};

// The input as the detector sees it: warped to the bird's-eye plane when calibrated.
Image view_for_overlay(const Image& img, const PipelineConfig& cfg) {
  if (!cfg.calibration_src) return img;
  const int w = cfg.birdseye_width > 0 ? cfg.birdseye_width : img.width;
  const int h = cfg.birdseye_height > 0 ? cfg.birdseye_height : img.height;
  return warp(img, cfg.homography(), w, h);
}

std::vector<fs::path> expand_frames(const std::string& pattern) {
  std::vector<fs::path> out;
  const fs::path p(pattern);
  auto is_image = [](const fs::path& f) {
    const auto ext = f.extension().string();
    return ext == ".pgm" || ext == ".ppm" || ext == ".pnm";
  };
  if (fs::is_directory(p)) {
    for (const auto& e : fs::directory_iterator(p))
      if (e.is_regular_file() && is_image(e.path())) out.push_back(e.path());
  } else if (pattern.find_first_of("*?[") != std::string::npos) {
    const fs::path dir = p.has_parent_path() ? p.parent_path() : fs::path(".");
    const std::string glob = p.filename().string();
    if (fs::is_directory(dir))
      for (const auto& e : fs::directory_iterator(dir))
        if (e.is_regular_file() && fnmatch(glob.c_str(), e.path().filename().c_str(), 0) == 0)
          out.push_back(e.path());
  } else if (fs::exists(p)) {
    out.push_back(p);
  }
  std::sort(out.begin(), out.end());
  if (out.empty()) throw Error(ErrorCode::IoError, "no frames match " + pattern);
  return out;
}

std::string read_text(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::IoError, "cannot open " + path);
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

std::array<Point2, 4> quad_from(const std::vector<double>& v) {
  std::array<Point2, 4> q;
  for (int i = 0; i < 4; ++i) q[i] = {v[2 * i], v[2 * i + 1]};
  return q;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Curved lane detection from tangent line segments"};
  app.require_subcommand(1);

  Common detect_opts, track_opts, classify_opts;
  std::string detect_image, track_frames, classify_image_path;

  auto* detect = app.add_subcommand("detect", "Detect lanes in one image");
  detect->add_option("image", detect_image, "Input PGM/PPM")->required();
  add_common(detect, detect_opts);

  auto* track = app.add_subcommand("track", "Process an ordered frame sequence");
  track->add_option("frames", track_frames, "Directory or glob of PGM/PPM frames")->required();
  add_common(track, track_opts);

  auto* classify = app.add_subcommand("classify", "Classify the dominant curve in an image");
  classify->add_option("image", classify_image_path, "Input PGM/PPM")->required();
  add_common(classify, classify_opts);

  std::string spec_path, synth_out, synth_truth;
  long long synth_seed = -1;
  auto* synth = app.add_subcommand("synth", "Render a synthetic scene with ground truth");
  synth->add_option("spec", spec_path, "Scene spec file")->required();
  synth->add_option("--out", synth_out, "Output image (PPM)")->required();
  synth->add_option("--truth", synth_truth, "Ground-truth JSON (default: <out>.truth.json)");
  synth->add_option("--seed", synth_seed, "Override the spec seed");

  std::vector<double> cal_src, cal_dst;
  double cal_ppcm = 10.0;
  std::string cal_out;
  auto* calibrate = app.add_subcommand("calibrate", "Write a homography config block from 4 point pairs");
  calibrate->add_option("--src", cal_src, "Image points x0 y0 ... x3 y3")->expected(8);
  calibrate->add_option("--dst", cal_dst, "Bird's-eye points x0 y0 ... x3 y3")->expected(8);
  calibrate->add_option("--pixels-per-cm", cal_ppcm, "World scale of the bird's-eye plane");
  calibrate->add_option("--out", cal_out, "Append the block to this file instead of stdout");

  CLI11_PARSE(app, argc, argv);

  try {
    if (detect->parsed()) {
      const PipelineConfig cfg = build_config(detect_opts);
      const Image img = read_pnm(detect_image);
      const auto results = run_sequence({img}, cfg);
      Sink(cfg.json_path).line(result_to_json(results.front()));
      if (!cfg.overlay_path.empty())
        write_pnm(cfg.overlay_path, render_overlay(view_for_overlay(img, cfg), results.front(), cfg.bands));
      return results.front().error ? 2 : 0;
    }
    if (track->parsed()) {
      const PipelineConfig cfg = build_config(track_opts);
      const auto paths = expand_frames(track_frames);
      std::vector<Image> frames;
      for (const auto& p : paths) frames.push_back(read_pnm(p));
      const auto results = run_sequence(frames, cfg);
      Sink sink(cfg.json_path);
      for (const auto& r : results) sink.line(result_to_json(r));
      if (!cfg.overlay_path.empty())
        write_pnm(cfg.overlay_path, render_overlay(view_for_overlay(frames.back(), cfg), results.back(), cfg.bands));
      return 0;
    }
    if (classify->parsed()) {
      const PipelineConfig cfg = build_config(classify_opts);
      const auto r = classify_image(read_pnm(classify_image_path), cfg);
      Sink(cfg.json_path).line(classification_to_json(r));
      return 0;
    }
    if (synth->parsed()) {
      SceneSpec spec = parse_scene_spec(read_text(spec_path));
      if (synth_seed >= 0) spec.seed = static_cast<std::uint64_t>(synth_seed);
      const SceneRender scene = render(spec);
      write_pnm(synth_out, scene.image);
      const std::string truth_path = synth_truth.empty() ? synth_out + ".truth.json" : synth_truth;
      std::ofstream(truth_path) << truth_to_json(scene.truth) << '\n';
      return 0;
    }
    if (calibrate->parsed()) {
      if (cal_src.empty() != cal_dst.empty()) throw Error(ErrorCode::ConfigError, "give both --src and --dst");
      if (cal_src.empty()) {
        // 16 numbers on stdin: four source points, then four destination points.
        std::vector<double> v;
        double x;
        while (v.size() < 16 && std::cin >> x) v.push_back(x);
        if (v.size() != 16) throw Error(ErrorCode::ConfigError, "expected 16 numbers on stdin");
        cal_src.assign(v.begin(), v.begin() + 8);
        cal_dst.assign(v.begin() + 8, v.end());
      }
      PipelineConfig cfg;
      cfg.calibration_src = quad_from(cal_src);
      cfg.calibration_dst = quad_from(cal_dst);
      cfg.world.pixels_per_cm = cal_ppcm;
      cfg.validate();
      std::ostringstream block;
      for (const char* key : {"calibration.src", "calibration.dst", "world.pixels_per_cm"})
        block << key << " = " << get_setting(cfg, key) << '\n';
      if (cal_out.empty()) {
        std::cout << block.str();
      } else {
        std::ofstream out(cal_out, std::ios::app);
        if (!out) throw Error(ErrorCode::IoError, "cannot write " + cal_out);
        out << block.str();
      }
      return 0;
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}

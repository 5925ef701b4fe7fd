#include "curvelane/pipeline.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <map>
#include <mutex>

#include "curvelane/error.hpp"

namespace curvelane {

namespace {

using Clock = std::chrono::steady_clock;

// Runs one stage, recording its duration and tagging any library error with the stage name.
template <typename F>
auto timed(std::vector<StageTiming>& timing, const char* stage, F&& f) {
  const auto t0 = Clock::now();
  auto record = [&] {
    timing.push_back({stage, std::chrono::duration<double, std::milli>(Clock::now() - t0).count()});
  };
  try {
    if constexpr (std::is_void_v<decltype(f())>) {
      f();
      record();
    } else {
      auto out = f();
      record();
      return out;
    }
  } catch (const StageError&) {
    throw;
  } catch (const Error& e) {
    throw StageError(stage, e);
  }
}

const TemplateLibrary& library_for(int length) {
  static std::mutex mu;
  static std::map<int, TemplateLibrary> cache;
  std::lock_guard lock(mu);
  auto it = cache.find(length);
  if (it == cache.end()) it = cache.emplace(length, standard_library(length)).first;
  return it->second;
}

LaneStats describe(const std::vector<TangentSample>& tangents, int vote, double mass, double fallback_angle,
                   const PipelineConfig& cfg) {
  LaneStats stats;
  stats.vote = vote;
  stats.mass = mass;
  if (tangents.empty()) {
    stats.angle = fallback_angle;
    return stats;
  }
  std::vector<double> angles;
  for (const auto& t : tangents) angles.push_back(t.angle);
  stats.angle = axial_mean(angles);
  try {
    const auto sig = build_signature(tangents, cfg.signature_length, cfg.envelope_tolerance);
    const auto c = classify_curve(sig, library_for(cfg.signature_length), cfg.match_tolerance, cfg.match_threshold);
    stats.curve_class = c.curve_class;
    stats.signature_score = c.score;
  } catch (const Error& e) {
    // Too few samples or no horizontal extent: nothing to classify.
    if (e.code() != ErrorCode::InsufficientSamples && e.code() != ErrorCode::DegenerateSpan) throw;
  }
  return stats;
}

// The step from road to the empty area outside the warped frame is not a lane.
void suppress_border(EdgeMap& e, const Image& covered) {
  constexpr int r = 2;
  for (int y = 0; y < e.height; ++y) {
    for (int x = 0; x < e.width; ++x) {
      const std::size_t i = static_cast<std::size_t>(y) * e.width + x;
      if (!e.binary[i] && e.magnitude[i] == 0.0f) continue;
      bool inside = true;
      for (int dy = -r; dy <= r && inside; ++dy) {
        for (int dx = -r; dx <= r && inside; ++dx) {
          const int sx = std::clamp(x + dx, 0, e.width - 1), sy = std::clamp(y + dy, 0, e.height - 1);
          inside = covered.at(sx, sy) >= 0.999f;
        }
      }
      if (!inside) {
        e.binary[i] = 0;
        e.magnitude[i] = 0.0f;
      }
    }
  }
}

LaneResult to_result(const Lane& lane, const PipelineConfig& cfg) {
  LaneResult r;
  r.polyline = lane.polyline;
  for (const auto& p : lane.polyline)
    r.world.push_back({p.x / cfg.world.pixels_per_cm, p.y / cfg.world.pixels_per_cm});
  if (!lane.band.empty()) r.band = lane.band;
  r.angle = lane.stats.angle;
  r.curve_class = lane.stats.curve_class;
  r.signature_score = lane.stats.signature_score;
  r.vote = lane.stats.vote;
  r.mass = lane.stats.mass;
  r.carried = lane.missed > 0;
  return r;
}

}  // namespace

FrameAnalysis analyze_frame(const Image& img, const PipelineConfig& cfg) {
  if (img.empty() || (img.channels != 1 && img.channels != 3))
    throw StageError("input", Error(ErrorCode::ChannelMismatch, "expected a 1- or 3-channel image"));
  FrameAnalysis a;
  auto& timing = a.timing;

  Image hsv = timed(timing, "hsv", [&] {
    if (img.channels == 3) return to_hsv(img);
    Image out(img.width, img.height, 3);
    out.set_channel(2, img);
    return out;
  });
  Image value = timed(timing, "illumination", [&] {
    if (!cfg.illumination_enabled) return hsv.channel(2);
    return correct_illumination(hsv, cfg.illumination).channel(2);
  });
  value = timed(timing, "blur", [&] { return gaussian_blur(value, cfg.blur_sigma); });
  Image covered;  // 1 where the warp had source pixels
  a.value = timed(timing, "warp", [&] {
    if (!cfg.calibration_src) return std::move(value);
    const int w = cfg.birdseye_width > 0 ? cfg.birdseye_width : value.width;
    const int h = cfg.birdseye_height > 0 ? cfg.birdseye_height : value.height;
    const Homography hom = cfg.homography();
    covered = warp(Image(value.width, value.height, 1, 1.0f), hom, w, h);
    return warp(value, hom, w, h);
  });
  a.edges = timed(timing, "edges", [&] {
    EdgeMap e = edge_detect(a.value, cfg.edge_low, cfg.edge_high);
    if (!covered.empty()) suppress_border(e, covered);
    return e;
  });
  a.segments = timed(timing, "hough", [&] {
    if (a.edges.edge_count() == 0) return std::vector<LineSegment>{};
    auto lines = probabilistic_lines(a.edges, cfg.hough, cfg.seed);
    if (cfg.piece_length > 0.0) lines = dissect(lines, cfg.piece_length);
    return lines;
  });
  timed(timing, "centroids", [&] {
    const Image weights = cfg.centroid_weights == CentroidWeights::Edges ? a.edges.magnitude_image() : a.value;
    for (const auto& s : a.segments) {
      try {
        const double floor = cfg.centroid_background ? capsule_minimum(weights, s, cfg.centroid_band) : 0.0;
        a.items.push_back({s, weighted_centroid(weights, s, cfg.centroid_band, floor), edge_side(a.value, s)});
      } catch (const Error& e) {
        if (e.code() != ErrorCode::ZeroMass) throw;
      }
    }
  });
  auto clusters = timed(timing, "cluster", [&] {
    if (a.items.empty()) return std::vector<CurveCluster>{};
    return cluster_lines(a.items, cfg.cluster);
  });
  a.clusters = timed(timing, "threshold", [&] { return threshold_votes(clusters, cfg.cluster.votes_min); });
  timed(timing, "tangents", [&] {
    for (const auto& c : a.clusters) {
      std::vector<WeightedPoint> centroids;
      std::vector<double> angles;
      std::vector<int> sides;
      for (const auto& m : c.members) {
        centroids.push_back(m.centroid);
        angles.push_back(segment_angle(m.segment));
        sides.push_back(m.side);
      }
      a.tangents.push_back(tangent_field(centroids, angles, cfg.mvt, sides));
    }
  });
  return a;
}

Lane lane_from_cluster(const CurveCluster& cluster, double bin) {
  if (!(bin > 0.0)) throw Error(ErrorCode::InvalidParameter, "lane bin must be positive");
  std::vector<Point2> pts;
  for (const auto& m : cluster.members) {
    pts.push_back(m.segment.start());
    pts.push_back(m.segment.midpoint());
    pts.push_back(m.segment.end());
  }
  Lane lane;
  lane.axis = dominant_axis(pts);
  struct Acc {
    double key = 0.0, cross = 0.0;
    int n = 0;
  };
  std::map<long, Acc> bins;
  for (const auto& p : pts) {
    auto& acc = bins[static_cast<long>(std::floor(along(p, lane.axis) / bin))];
    acc.key += along(p, lane.axis);
    acc.cross += across(p, lane.axis);
    ++acc.n;
  }
  for (const auto& [b, acc] : bins) {
    const double key = acc.key / acc.n, cross = acc.cross / acc.n;
    lane.polyline.push_back(lane.axis == DominantAxis::Y ? Point2{cross, key} : Point2{key, cross});
  }
  return lane;
}

std::pair<DetectionResult, TrackerState> detect_frame(const Image& img, const PipelineConfig& cfg,
                                                      const TrackerState& state) {
  const auto start = Clock::now();
  cfg.validate();
  DetectionResult result;
  result.frame_index = state.next_frame;

  FrameAnalysis a = analyze_frame(img, cfg);
  auto& timing = a.timing;

  std::optional<TextureDescriptor> texture = timed(timing, "texture", [&]() -> std::optional<TextureDescriptor> {
    if (cfg.texture_tile > std::min(a.value.width, a.value.height)) return std::nullopt;
    return texture_descriptor(a.value, cfg.texture_tile);
  });
  bool have_previous = cfg.tracker_enabled && state.model.has_value();
  if (have_previous && texture && state.texture && texture_distance(*texture, *state.texture) > cfg.texture_gate) {
    result.tracker_reset = true;
    have_previous = false;
  }

  LaneModel current = timed(timing, "signature", [&] {
    LaneModel model;
    model.frame_index = result.frame_index;
    for (std::size_t i = 0; i < a.clusters.size(); ++i) {
      Lane lane = lane_from_cluster(a.clusters[i], cfg.lane_bin);
      if (lane.polyline.size() < 2) continue;
      lane.tangents = a.tangents[i];
      const auto& c = a.clusters[i];
      lane.stats = describe(a.tangents[i], c.vote, c.mass, c.representative_angle, cfg);
      lane.band = assign_band(lane.stats.angle, cfg.bands).value_or("");
      model.lanes.push_back(std::move(lane));
    }
    return model;
  });

  LaneModel final_model = std::move(current);
  if (have_previous) {
    auto filled = timed(timing, "fill", [&] { return fill_discontinuities(final_model, *state.model, cfg.fill); });
    result.gaps_filled = filled.gaps_filled;
    // Joined detections get their description from the combined tangents.
    for (auto& lane : filled.model.lanes) {
      if (lane.fragments < 2 || lane.missed > 0) continue;
      lane.stats = describe(lane.tangents, lane.stats.vote, lane.stats.mass, lane.stats.angle, cfg);
      lane.band = assign_band(lane.stats.angle, cfg.bands).value_or("");
    }
    final_model = timed(timing, "smooth", [&] {
      return smooth_model(filled.model, *state.model, cfg.smooth_alpha, cfg.fill.match_distance);
    });
  }

  for (const auto& lane : final_model.lanes) result.lanes.push_back(to_result(lane, cfg));
  result.timing = std::move(timing);
  result.total_ms = std::chrono::duration<double, std::milli>(Clock::now() - start).count();

  TrackerState next;
  next.next_frame = state.next_frame + 1;
  if (cfg.tracker_enabled) next.model = std::move(final_model);
  next.texture = std::move(texture);
  return {std::move(result), std::move(next)};
}

std::vector<DetectionResult> run_sequence(const std::vector<Image>& frames, const PipelineConfig& cfg) {
  std::vector<DetectionResult> out;
  TrackerState state;
  for (const auto& frame : frames) {
    try {
      auto [result, next] = detect_frame(frame, cfg, state);
      out.push_back(std::move(result));
      state = std::move(next);
    } catch (const std::exception& e) {
      DetectionResult failed;
      failed.frame_index = state.next_frame;
      failed.error = e.what();
      failed.tracker_reset = state.model.has_value();
      out.push_back(std::move(failed));
      state = TrackerState{state.next_frame + 1, std::nullopt, std::nullopt};
    }
  }
  return out;
}

ClassifyResult classify_image(const Image& img, const PipelineConfig& cfg) {
  cfg.validate();
  const FrameAnalysis a = analyze_frame(img, cfg);
  ClassifyResult out;
  if (a.clusters.empty()) return out;
  // Curves split into several clusters where chord angles jump, so the whole
  // surviving tangent field is classified as one curve.
  std::vector<TangentSample> tangents;
  for (const auto& field : a.tangents) tangents.insert(tangents.end(), field.begin(), field.end());
  std::vector<double> angles;
  for (const auto& t : tangents) angles.push_back(t.angle);
  if (!angles.empty()) out.band = assign_band(axial_mean(angles), cfg.bands);
  try {
    out.signature = build_signature(tangents, cfg.signature_length, cfg.envelope_tolerance);
    out.classification = classify_curve(out.signature, library_for(cfg.signature_length), cfg.match_tolerance,
                                        cfg.match_threshold);
  } catch (const Error& e) {
    if (e.code() != ErrorCode::InsufficientSamples && e.code() != ErrorCode::DegenerateSpan)
      throw StageError("signature", e);
  }
  return out;
}

std::array<float, 3> band_color(const std::optional<std::string>& band, const std::vector<AngleBand>& bands) {
  static constexpr std::array<std::array<float, 3>, 4> palette = {
      {{1.0f, 0.0f, 0.0f}, {1.0f, 1.0f, 0.0f}, {1.0f, 0.0f, 1.0f}, {0.0f, 1.0f, 1.0f}}};
  if (!band) return {1.0f, 0.5f, 0.0f};
  if (*band == "blue") return {0.0f, 0.0f, 1.0f};
  if (*band == "green") return {0.0f, 1.0f, 0.0f};
  std::size_t slot = 0;
  for (const auto& b : bands) {
    if (b.label == *band) break;
    if (b.label != "blue" && b.label != "green") ++slot;
  }
  return palette[slot % palette.size()];
}

Image render_overlay(const Image& img, const DetectionResult& result, const std::vector<AngleBand>& bands) {
  Image out = img.channels == 3 ? img : gray_to_rgb(img);
  constexpr double half_width = 1.0;
  for (const auto& lane : result.lanes) {
    const auto color = band_color(lane.band, bands);
    for (std::size_t i = 1; i < lane.polyline.size(); ++i) {
      const Point2 a = lane.polyline[i - 1], b = lane.polyline[i];
      const int x0 = std::max(0, static_cast<int>(std::floor(std::min(a.x, b.x) - half_width)));
      const int x1 = std::min(out.width - 1, static_cast<int>(std::ceil(std::max(a.x, b.x) + half_width)));
      const int y0 = std::max(0, static_cast<int>(std::floor(std::min(a.y, b.y) - half_width)));
      const int y1 = std::min(out.height - 1, static_cast<int>(std::ceil(std::max(a.y, b.y) + half_width)));
      for (int y = y0; y <= y1; ++y)
        for (int x = x0; x <= x1; ++x)
          if (point_segment_distance({double(x), double(y)}, a, b) <= half_width)
            for (int c = 0; c < 3; ++c) out.at(x, y, c) = color[c];
    }
  }
  return out;
}

}  // namespace curvelane

#pragma once

#include <array>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "curvelane/cluster.hpp"
#include "curvelane/config.hpp"
#include "curvelane/imaging.hpp"
#include "curvelane/tracker.hpp"

namespace curvelane {

struct StageTiming {
  std::string stage;
  double ms = 0.0;
};

struct LaneResult {
  std::vector<Point2> polyline;  // bird's-eye pixels
  std::vector<Point2> world;     // centimetres
  std::optional<std::string> band;
  double angle = 0.0;
  CurveClass curve_class = CurveClass::Unknown;
  double signature_score = 0.0;
  int vote = 0;
  double mass = 0.0;
  bool carried = false;  // persisted from an earlier frame, not detected in this one
};

struct DetectionResult {
  int frame_index = 0;
  std::vector<LaneResult> lanes;
  bool tracker_reset = false;
  int gaps_filled = 0;
  std::vector<StageTiming> timing;
  double total_ms = 0.0;
  std::optional<std::string> error;
};

struct TrackerState {
  int next_frame = 0;
  std::optional<LaneModel> model;  // lanes reported for frame next_frame - 1
  std::optional<TextureDescriptor> texture;
};

// Everything the front half of the pipeline produces for one frame.
struct FrameAnalysis {
  Image value;      // corrected, blurred and warped V channel
  EdgeMap edges;
  std::vector<LineSegment> segments;
  std::vector<ClusterItem> items;
  std::vector<CurveCluster> clusters;           // after the vote threshold
  std::vector<std::vector<TangentSample>> tangents;  // one field per cluster
  std::vector<StageTiming> timing;
};

// Stages up to the per-cluster tangent fields.
FrameAnalysis analyze_frame(const Image& img, const PipelineConfig& cfg);

// Lane polyline from cluster members: member segment points averaged in bins of
// `bin` pixels along the dominant axis.
Lane lane_from_cluster(const CurveCluster& cluster, double bin);

std::pair<DetectionResult, TrackerState> detect_frame(const Image& img, const PipelineConfig& cfg,
                                                      const TrackerState& state = {});

std::vector<DetectionResult> run_sequence(const std::vector<Image>& frames, const PipelineConfig& cfg);

// Signature of all surviving clusters' tangents, classified against the
// standard templates. Meant for single-curve images.
struct ClassifyResult {
  Classification classification;
  SlopeSignature signature;
  std::optional<std::string> band;
};
ClassifyResult classify_image(const Image& img, const PipelineConfig& cfg);

// Draws each lane in its band colour with a 2-px stroke onto an RGB copy.
Image render_overlay(const Image& img, const DetectionResult& result, const std::vector<AngleBand>& bands);

// Fixed colour for a band label: blue and green as named, others from a palette.
std::array<float, 3> band_color(const std::optional<std::string>& band, const std::vector<AngleBand>& bands);

}  // namespace curvelane

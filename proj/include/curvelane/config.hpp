#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "curvelane/birdseye.hpp"
#include "curvelane/cluster.hpp"
#include "curvelane/curvemath.hpp"
#include "curvelane/hough.hpp"
#include "curvelane/imaging.hpp"
#include "curvelane/signature.hpp"
#include "curvelane/tracker.hpp"

namespace curvelane {

enum class CentroidWeights { Edges, Intensity };

struct PipelineConfig {
  std::uint64_t seed = 0;

  bool illumination_enabled = true;
  IlluminationParams illumination;
  double blur_sigma = 1.0;

  // Four source/destination pairs for the bird's-eye homography; identity when unset.
  std::optional<std::array<Point2, 4>> calibration_src;
  std::optional<std::array<Point2, 4>> calibration_dst;
  int birdseye_width = 0;   // 0 keeps the input size
  int birdseye_height = 0;
  WorldScale world;

  double edge_low = 0.22;
  double edge_high = 0.3;

  HoughParams hough;
  double piece_length = 8.0;

  CentroidWeights centroid_weights = CentroidWeights::Intensity;
  double centroid_band = 5.0;
  bool centroid_background = true;  // subtract the local minimum before weighting
  MvtConfig mvt{16.0, 6.0, 15.0};
  ClusterParams cluster{24.0, 20.0, 30};

  int signature_length = kDefaultSignatureLength;
  double envelope_tolerance = kDefaultEnvelopeTolerance;
  double match_tolerance = 10.0;
  double match_threshold = 0.9;
  std::vector<AngleBand> bands = default_bands();

  double lane_bin = 10.0;  // polyline resolution along the lane axis, pixels

  bool tracker_enabled = true;
  FillParams fill;
  double smooth_alpha = 0.7;
  double texture_gate = 0.2;
  int texture_tile = 32;

  std::string json_path;
  std::string overlay_path;

  void validate() const;
  Homography homography() const;
};

// Every recognised key, in file order.
std::vector<std::string> config_keys();

// Sets one dotted key from its text form. Unknown keys and malformed values throw ConfigError.
void apply_setting(PipelineConfig& cfg, std::string_view key, std::string_view value);
std::string get_setting(const PipelineConfig& cfg, std::string_view key);

// "key = value" lines; '#' starts a comment. Later lines override earlier ones.
PipelineConfig parse_config(std::string_view text, PipelineConfig base = {});
PipelineConfig load_config(const std::filesystem::path& path, PipelineConfig base = {});
std::string format_config(const PipelineConfig& cfg);

// "key=value" as given on the command line.
void apply_override(PipelineConfig& cfg, std::string_view assignment);

}  // namespace curvelane

#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "curvelane/imaging.hpp"
#include "curvelane/shapes.hpp"
#include "curvelane/tracker.hpp"

namespace curvelane {

// Arc-length fractions [begin, end) of a curve that are not drawn.
struct GapInterval {
  double begin = 0.0;
  double end = 0.0;
};

struct CurveSpec {
  Shape shape;
  double width = 2.0;  // stroke width, pixels
  std::vector<GapInterval> gaps;
};

// Random straight strokes scattered uniformly over the image.
struct NoiseSpec {
  int count = 0;
  double min_length = 5.0;
  double max_length = 20.0;
  double width = 2.0;
};

// Darkens the image along `direction_deg` (0 = towards +x, 90 = towards +y).
// Brightness is 1 before `start`, falls linearly to 1 - strength over `ramp`,
// and stays there. Positions are fractions of the image extent in that direction.
struct ShadowSpec {
  double direction_deg = 0.0;
  double strength = 0.5;
  double start = 0.45;
  double ramp = 0.1;
};

struct SceneSpec {
  int width = 640;
  int height = 480;
  std::vector<CurveSpec> curves;
  NoiseSpec noise;
  std::optional<ShadowSpec> shadow;
  double road_level = 0.3;
  double paint_level = 0.9;
  double grain = 0.0;  // std-dev of per-pixel road noise
  std::uint64_t seed = 0;
};

struct TruthCurve {
  CurveClass label = CurveClass::Unknown;
  std::string kind;
  std::vector<Point2> points;   // dense, evenly spaced along the arc
  std::vector<double> angles;   // analytic tangent, degrees in [0, 180)
  std::vector<bool> visible;    // false inside gaps
  double arc_length = 0.0;
};

struct GroundTruth {
  int width = 0;
  int height = 0;
  std::vector<TruthCurve> curves;

  // Distance to the nearest truth point of any curve (brute force).
  double distance(double x, double y) const;
  // Per-pixel distance() at pixel centres.
  Image distance_field() const;
};

struct SceneRender {
  Image image;  // RGB
  GroundTruth truth;
};

void validate_scene(const SceneSpec& spec);
SceneRender render(const SceneSpec& spec);

struct CurveScore {
  double coverage = 0.0;          // fraction of in-frame truth points near a detection
  double mean_angle_error = 0.0;  // degrees, over covered points
  std::size_t matched = 0;
  double max_deviation = 0.0;     // largest distance over covered points
};

struct DetectionScore {
  std::vector<CurveScore> curves;
  double false_positive_length = 0.0;  // detected arc farther than dist_tol from all truth
  double mean_coverage() const;
  double min_coverage() const;
};

// Coverage counts truth points (visible or not) inside the image; a point is
// covered when some detected polyline passes within dist_tol. angle_tol caps
// the angle error a covered point may have before it stops counting.
DetectionScore score_detection(const LaneModel& detected, const GroundTruth& truth, double dist_tol,
                               double angle_tol = 180.0);

// Distance from p to a polyline and the direction (degrees, [0, 180)) of the
// nearest piece.
struct PolylineProjection {
  double distance = 0.0;
  double angle = 0.0;
};
PolylineProjection project_to_polyline(Point2 p, const std::vector<Point2>& polyline);

// Scene specs in the flat "key = value" dialect, e.g.
//   size = 640 480
//   curve.0.shape = parabola x 240 0 0.001 0 480
//   curve.0.gaps = 0.4 0.5
SceneSpec parse_scene_spec(std::string_view text);
std::string format_scene_spec(const SceneSpec& spec);

}  // namespace curvelane

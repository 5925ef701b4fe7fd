#pragma once

#include <span>
#include <string>
#include <utility>
#include <vector>

#include "curvelane/curvemath.hpp"
#include "curvelane/geometry.hpp"
#include "curvelane/imaging.hpp"
#include "curvelane/shapes.hpp"

namespace curvelane {

enum class DominantAxis { X, Y };

// Detection details carried along with a lane so persisted lanes can still be reported.
struct LaneStats {
  CurveClass curve_class = CurveClass::Unknown;
  double signature_score = 0.0;
  double angle = 0.0;  // axial mean tangent angle, degrees
  int vote = 0;
  double mass = 0.0;
};

struct Lane {
  std::vector<Point2> polyline;  // strictly increasing along `axis`
  std::string band;              // empty when no band applies
  std::vector<TangentSample> tangents;
  DominantAxis axis = DominantAxis::Y;
  LaneStats stats;
  int missed = 0;     // consecutive frames this lane has been carried without detection
  int fragments = 1;  // detections joined into this lane
};

struct LaneModel {
  std::vector<Lane> lanes;
  int frame_index = 0;
};

DominantAxis dominant_axis(std::span<const Point2> points);
inline double along(Point2 p, DominantAxis a) { return a == DominantAxis::Y ? p.y : p.x; }
inline double across(Point2 p, DominantAxis a) { return a == DominantAxis::Y ? p.x : p.y; }
double polyline_length(std::span<const Point2> polyline);
bool is_strictly_monotonic(std::span<const Point2> polyline, DominantAxis axis);

// Cross coordinate of the polyline at a position along its axis (linear).
double interpolate_across(std::span<const Point2> polyline, DominantAxis axis, double key);

struct TextureDescriptor {
  int tile = 0;
  int cols = 0;
  int rows = 0;
  std::vector<double> mean;      // row-major per tile
  std::vector<double> variance;
};

TextureDescriptor texture_descriptor(const Image& gray, int tile);

// Mean over tiles of |dmean| / (mean_a + mean_b + eps) + |dvar| / (var_a + var_b + eps).
// Each term is a metric on non-negative values, so the sum is one too.
double texture_distance(const TextureDescriptor& a, const TextureDescriptor& b);

// Mean |cross offset| of `lane` from `reference` over the keys both cover;
// infinity when they share fewer than two keys.
double lane_offset(const Lane& lane, const Lane& reference);

// Pairs (current lane index, previous lane index) on the same axis within
// max_distance, assigned greedily: same-band pairs first, then closest first.
// The distance is lane_offset where the lanes overlap, else the difference of
// mean cross coordinates.
std::vector<std::pair<std::size_t, std::size_t>> match_lanes(const LaneModel& current, const LaneModel& previous,
                                                             double max_distance);

struct FillResult {
  LaneModel model;
  int gaps_filled = 0;
};

struct FillParams {
  double max_gap_fraction = 0.15;
  int persistence_limit = 5;
  double match_distance = 40.0;
};

// Bridges short gaps in each current lane with the matching span of the previous
// frame's lane, shifted so it meets both gap ends. Existing points never move.
// A gap can also separate two detections: consecutive current lanes lying along
// the same previous lane are joined first when the gap between them is short
// enough to bridge.
// Previous lanes with no current match persist for up to persistence_limit frames.
FillResult fill_discontinuities(const LaneModel& current, const LaneModel& previous, const FillParams& params = {});

// Exponential blend alpha * current + (1 - alpha) * previous of matched lanes.
LaneModel smooth_model(const LaneModel& current, const LaneModel& previous, double alpha,
                       double match_distance = 40.0);

}  // namespace curvelane

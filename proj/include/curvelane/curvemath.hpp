#pragma once

#include <span>
#include <vector>

#include "curvelane/geometry.hpp"
#include "curvelane/hough.hpp"
#include "curvelane/imaging.hpp"

namespace curvelane {

struct WeightedPoint {
  double x = 0.0;
  double y = 0.0;
  double mass = 0.0;  // summed intensity weight

  Point2 position() const { return {x, y}; }
};

// A point on the curve and the tangent direction there.
struct TangentSample {
  double x = 0.0;
  double y = 0.0;
  double angle = 0.0;    // degrees in [0, 180)
  double support = 0.0;  // combined mass of the generating pair
};

struct MvtConfig {
  double max_pair_gap = 16.0;     // pixels
  double min_pair_gap = 0.0;      // pairs closer than this are too short a baseline
  double max_angle_spread = 15.0; // degrees

  void validate() const;
};

// Intensity-weighted centroid sum f(n) x(n) / sum f(n) over the pixels within
// `band` (+ half a pixel) of the segment. Only the first channel is used.
// Weights are max(0, f - floor), so a floor at the local background level
// centres the result on the bright stroke rather than the whole window.
WeightedPoint weighted_centroid(const Image& img, const LineSegment& s, double band, double floor = 0.0);

// Smallest first-channel value within `band` (+ half a pixel) of the segment.
double capsule_minimum(const Image& img, const LineSegment& s, double band);

// Secant between two centroids read as the tangent at their midpoint.
TangentSample mvt_tangent(const WeightedPoint& a, const WeightedPoint& b);

// Weighted centroid of every segment, then pairs of nearby, similarly oriented
// centroids turned into tangents. Each centroid joins at most two pairs, taken
// nearest first, so samples chain along the curve. A pair is admissible when the
// two segment angles and the secant itself agree within max_angle_spread.
std::vector<TangentSample> tangent_field(const Image& img, std::span<const LineSegment> segments,
                                         const MvtConfig& cfg, double band = 1.0);

// Same pairing on precomputed centroids; angles[i] is the segment angle of centroids[i].
// When `sides` is given (see edge_side), centroids only pair with others on the
// same side of their stroke; 0 pairs with anything.
std::vector<TangentSample> tangent_field(std::span<const WeightedPoint> centroids,
                                         std::span<const double> angles, const MvtConfig& cfg,
                                         std::span<const int> sides = {});

// Which side of the segment is brighter: +1 for the left of its folded direction
// (angle in [0, 180), y down), -1 for the right, 0 when no difference is seen.
// The two boundaries of a bright stroke get opposite signs.
int edge_side(const Image& intensity, const LineSegment& s, double offset = 2.0);

// True when two sides/angles describe the same boundary orientation. Accounts
// for the flip of the reference direction at the 0/180 wrap.
bool same_side(int side_a, double angle_a, int side_b, double angle_b);

}  // namespace curvelane

#pragma once

#include <cstdint>
#include <span>
#include <utility>
#include <vector>

#include "curvelane/geometry.hpp"
#include "curvelane/imaging.hpp"

namespace curvelane {

// Normal form x*cos(theta) + y*sin(theta) = r, theta canonical in [0, pi).
struct PolarLine {
  double theta = 0.0;
  double r = 0.0;
};

struct LineSegment {
  double x0 = 0.0, y0 = 0.0, x1 = 0.0, y1 = 0.0;

  Point2 start() const { return {x0, y0}; }
  Point2 end() const { return {x1, y1}; }
  Point2 midpoint() const { return {0.5 * (x0 + x1), 0.5 * (y0 + y1)}; }
  double length() const;
  LineSegment reversed() const { return {x1, y1, x0, y0}; }

  friend bool operator==(const LineSegment&, const LineSegment&) = default;
};

struct HoughParams {
  int theta_bins = 180;
  double r_resolution = 1.0;
  int votes_min = 10;
  double min_length = 5.0;
  double max_gap = 2.0;

  void validate() const;
};

// Dense (theta, r) vote grid. Row t covers theta = t * pi / theta_bins; column j
// is centred on r = (j - r_center) * r_resolution.
class Accumulator {
 public:
  Accumulator(int theta_bins, double r_resolution, int width, int height);

  int theta_bins() const { return theta_bins_; }
  int r_bins() const { return r_bins_; }
  double r_resolution() const { return r_resolution_; }

  double theta_of(int t) const;
  double r_of(int j) const { return (j - r_center_) * r_resolution_; }
  int r_bin(double r) const;

  std::int32_t at(int t, int j) const { return votes_[static_cast<std::size_t>(t) * r_bins_ + j]; }
  std::int32_t& at(int t, int j) { return votes_[static_cast<std::size_t>(t) * r_bins_ + j]; }
  const std::vector<std::int32_t>& votes() const { return votes_; }

  // Bin containing a polar line, resolving the theta wrap at pi.
  std::pair<int, int> bin_of(const PolarLine& line) const;

 private:
  int theta_bins_;
  int r_bins_;
  int r_center_;
  double r_resolution_;
  std::vector<std::int32_t> votes_;
};

struct AccumulatorPeak {
  int theta_bin = 0;
  int r_bin = 0;
  std::int32_t votes = 0;
};

// Standard Hough transform: every edge pixel votes for one r bin per theta row.
Accumulator accumulate(const EdgeMap& edges, int theta_bins, double r_resolution);

// Greedy peak picking: strongest bin first, suppressing a (theta, r) window around
// each pick. The window wraps at theta = pi where r changes sign.
std::vector<AccumulatorPeak> top_peaks(const Accumulator& acc, std::size_t count, int theta_window = 2,
                                       int r_window = 2);

// Progressive probabilistic Hough transform over the binary edges. Deterministic
// for a given seed.
std::vector<LineSegment> probabilistic_lines(const EdgeMap& edges, const HoughParams& params,
                                             std::uint64_t seed);

// Splits each segment into equal pieces no longer than max_piece.
std::vector<LineSegment> dissect(std::span<const LineSegment> segments, double max_piece);

PolarLine segment_to_polar(const LineSegment& s);

// Slope-intercept form y = slope * x + intercept.
std::pair<double, double> polar_to_slope_intercept(const PolarLine& l);

// Direction angle of the segment in degrees, folded into [0, 180).
double segment_angle(const LineSegment& s);

}  // namespace curvelane

#pragma once

#include <cmath>
#include <numbers>
#include <span>

namespace curvelane {

struct Point2 {
  double x = 0.0;
  double y = 0.0;

  friend bool operator==(const Point2&, const Point2&) = default;
};

inline Point2 operator+(Point2 a, Point2 b) { return {a.x + b.x, a.y + b.y}; }
inline Point2 operator-(Point2 a, Point2 b) { return {a.x - b.x, a.y - b.y}; }
inline Point2 operator*(double s, Point2 p) { return {s * p.x, s * p.y}; }

inline double distance(Point2 a, Point2 b) { return std::hypot(a.x - b.x, a.y - b.y); }

inline double deg_to_rad(double deg) { return deg * std::numbers::pi / 180.0; }
inline double rad_to_deg(double rad) { return rad * 180.0 / std::numbers::pi; }

// Folds any angle in degrees into [0, 180). Lines have no orientation sign.
double fold_degrees(double deg);

// Shortest distance between two axial angles (period 180 degrees); result in [0, 90].
double axial_difference(double a_deg, double b_deg);

// Signed shortest step from a to b on the 180-degree circle; result in [-90, 90).
double axial_delta(double from_deg, double to_deg);

// Weighted circular mean with period 180 degrees (doubled-angle mean).
// Returns the folded mean; falls back to the first angle if the resultant vanishes.
double axial_mean(std::span<const double> angles_deg, std::span<const double> weights = {});

// Distance from p to the closed segment [a, b].
double point_segment_distance(Point2 p, Point2 a, Point2 b);

}  // namespace curvelane

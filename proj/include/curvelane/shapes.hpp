#pragma once

#include <numbers>
#include <optional>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "curvelane/geometry.hpp"

namespace curvelane {

enum class CurveClass { Line, Parabola, Circle, Ellipse, Hyperbola, Unknown };

std::string_view to_string(CurveClass c);
std::optional<CurveClass> parse_curve_class(std::string_view name);

// Which coordinate is the free parameter of a graph-type curve.
enum class FreeAxis { X, Y };

struct LineShape {
  Point2 from;
  Point2 to;
};

// dependent = c0 + c1 t + c2 t^2 for t in [t0, t1].
struct ParabolaShape {
  FreeAxis axis = FreeAxis::X;
  double c0 = 0.0, c1 = 0.0, c2 = 0.0;
  double t0 = 0.0, t1 = 1.0;
};

// One branch: dependent = centre_dep + sign * b * sqrt(1 + ((t - centre_free) / a)^2).
struct HyperbolaShape {
  FreeAxis axis = FreeAxis::X;
  double centre_free = 0.0, centre_dep = 0.0;
  double a = 1.0, b = 1.0;
  int sign = 1;
  double t0 = -1.0, t1 = 1.0;
};

// dependent = c0 + c1 t + amplitude * sin(2 pi t / period + phase).
struct SineShape {
  FreeAxis axis = FreeAxis::Y;
  double c0 = 0.0, c1 = 0.0;
  double amplitude = 1.0, period = 100.0, phase = 0.0;
  double t0 = 0.0, t1 = 100.0;
};

struct CircleShape {
  Point2 centre;
  double radius = 1.0;
  double phi0 = 0.0, phi1 = 2.0 * std::numbers::pi;
};

struct EllipseShape {
  Point2 centre;
  double a = 1.0, b = 1.0;  // semi-axes along the rotated x and y
  double rotation = 0.0;    // radians
  double phi0 = 0.0, phi1 = 2.0 * std::numbers::pi;
};

using Shape = std::variant<LineShape, ParabolaShape, HyperbolaShape, SineShape, CircleShape, EllipseShape>;

// Class label of a shape; sine curves have no standard class.
CurveClass curve_class_of(const Shape& s);
std::string_view shape_kind_name(const Shape& s);

Point2 shape_point(const Shape& s, double t);
Point2 shape_velocity(const Shape& s, double t);
std::pair<double, double> shape_range(const Shape& s);
void validate_shape(const Shape& s);

struct CurvePoint {
  Point2 p;
  double angle = 0.0;  // analytic tangent, degrees in [0, 180)
  double arc = 0.0;    // arc length from the start
  double t = 0.0;
};

// Points spaced `spacing` apart along the curve, evaluated analytically.
std::vector<CurvePoint> sample_by_arc_length(const Shape& s, double spacing);

double shape_arc_length(const Shape& s);

}  // namespace curvelane

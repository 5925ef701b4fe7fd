#include "curvelane/geometry.hpp"

#include <algorithm>

namespace curvelane {

double fold_degrees(double deg) {
  double a = std::fmod(deg, 180.0);
  if (a < 0.0) a += 180.0;
  if (a >= 180.0) a -= 180.0;
  return a + 0.0;  // normalizes -0.0
}

double axial_difference(double a_deg, double b_deg) {
  const double d = std::fabs(fold_degrees(a_deg) - fold_degrees(b_deg));
  return std::min(d, 180.0 - d);
}

double axial_delta(double from_deg, double to_deg) {
  double d = fold_degrees(to_deg) - fold_degrees(from_deg);
  if (d >= 90.0) d -= 180.0;
  if (d < -90.0) d += 180.0;
  return d;
}

double axial_mean(std::span<const double> angles_deg, std::span<const double> weights) {
  if (angles_deg.empty()) return 0.0;
  // Sum relative to the first angle so equal inputs reproduce it exactly.
  const double ref = fold_degrees(angles_deg[0]);
  double c = 0.0;
  double s = 0.0;
  for (std::size_t i = 0; i < angles_deg.size(); ++i) {
    const double w = weights.empty() ? 1.0 : weights[i];
    const double twice = deg_to_rad(2.0 * axial_delta(ref, angles_deg[i]));
    c += w * std::cos(twice);
    s += w * std::sin(twice);
  }
  if (std::hypot(c, s) < 1e-12) return ref;
  return fold_degrees(ref + 0.5 * rad_to_deg(std::atan2(s, c)));
}

double point_segment_distance(Point2 p, Point2 a, Point2 b) {
  const double dx = b.x - a.x;
  const double dy = b.y - a.y;
  const double len2 = dx * dx + dy * dy;
  if (len2 <= 0.0) return distance(p, a);
  double t = ((p.x - a.x) * dx + (p.y - a.y) * dy) / len2;
  t = std::clamp(t, 0.0, 1.0);
  return std::hypot(p.x - (a.x + t * dx), p.y - (a.y + t * dy));
}

}  // namespace curvelane

#include "curvelane/curvemath.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <tuple>

#include "curvelane/error.hpp"

namespace curvelane {

void MvtConfig::validate() const {
  if (!(max_pair_gap > 0.0) || !(max_angle_spread > 0.0) || !(min_pair_gap >= 0.0) ||
      min_pair_gap > max_pair_gap) {
    throw Error(ErrorCode::InvalidParameter, "MVT gap and angle spread must be positive");
  }
}

namespace {

// Calls f(x, y, value) for every pixel within band + 0.5 of the segment.
template <typename F>
void for_each_in_capsule(const Image& img, const LineSegment& s, double band, F&& f) {
  const double reach = band + 0.5;
  const int xmin = std::max(0, static_cast<int>(std::floor(std::min(s.x0, s.x1) - reach)));
  const int xmax = std::min(img.width - 1, static_cast<int>(std::ceil(std::max(s.x0, s.x1) + reach)));
  const int ymin = std::max(0, static_cast<int>(std::floor(std::min(s.y0, s.y1) - reach)));
  const int ymax = std::min(img.height - 1, static_cast<int>(std::ceil(std::max(s.y0, s.y1) + reach)));
  for (int y = ymin; y <= ymax; ++y) {
    for (int x = xmin; x <= xmax; ++x) {
      if (point_segment_distance({double(x), double(y)}, s.start(), s.end()) > reach) continue;
      f(x, y, static_cast<double>(img.at(x, y, 0)));
    }
  }
}

}  // namespace

WeightedPoint weighted_centroid(const Image& img, const LineSegment& s, double band, double floor) {
  if (!(band >= 0.0)) throw Error(ErrorCode::InvalidParameter, "band must be non-negative");
  double sum_w = 0.0, sum_x = 0.0, sum_y = 0.0;
  for_each_in_capsule(img, s, band, [&](int x, int y, double v) {
    const double f = v - floor;
    if (f <= 0.0) return;
    sum_w += f;
    sum_x += f * x;
    sum_y += f * y;
  });
  if (sum_w <= 0.0) throw Error(ErrorCode::ZeroMass, "segment covers no positive intensity");
  return {sum_x / sum_w, sum_y / sum_w, sum_w};
}

double capsule_minimum(const Image& img, const LineSegment& s, double band) {
  if (!(band >= 0.0)) throw Error(ErrorCode::InvalidParameter, "band must be non-negative");
  double lowest = std::numeric_limits<double>::infinity();
  for_each_in_capsule(img, s, band, [&](int, int, double v) { lowest = std::min(lowest, v); });
  return std::isfinite(lowest) ? lowest : 0.0;
}

TangentSample mvt_tangent(const WeightedPoint& a, const WeightedPoint& b) {
  if (std::hypot(b.x - a.x, b.y - a.y) <= 1e-6) {
    throw Error(ErrorCode::DegeneratePair, "centroids coincide");
  }
  return {0.5 * (a.x + b.x), 0.5 * (a.y + b.y), fold_degrees(rad_to_deg(std::atan2(b.y - a.y, b.x - a.x))),
          a.mass + b.mass};
}

int edge_side(const Image& intensity, const LineSegment& s, double offset) {
  const double len = s.length();
  if (len <= 0.0) return 0;
  double ux = (s.x1 - s.x0) / len, uy = (s.y1 - s.y0) / len;
  if (uy < 0.0 || (uy == 0.0 && ux < 0.0)) {  // direction angle into [0, 180)
    ux = -ux;
    uy = -uy;
  }
  const double nx = uy, ny = -ux;  // left of (ux, uy) with y pointing down
  auto sample = [&](double x, double y) {
    const int xi = std::clamp(static_cast<int>(std::lround(x)), 0, intensity.width - 1);
    const int yi = std::clamp(static_cast<int>(std::lround(y)), 0, intensity.height - 1);
    return static_cast<double>(intensity.at(xi, yi, 0));
  };
  double diff = 0.0;
  for (double t : {0.25, 0.5, 0.75}) {
    const double px = s.x0 + t * (s.x1 - s.x0), py = s.y0 + t * (s.y1 - s.y0);
    diff += sample(px + offset * nx, py + offset * ny) - sample(px - offset * nx, py - offset * ny);
  }
  return diff > 1e-6 ? 1 : (diff < -1e-6 ? -1 : 0);
}

bool same_side(int side_a, double angle_a, int side_b, double angle_b) {
  if (side_a == 0 || side_b == 0) return true;
  const bool wrapped = std::abs(fold_degrees(angle_a) - fold_degrees(angle_b)) > 90.0;
  return (side_a == side_b) != wrapped;
}

std::vector<TangentSample> tangent_field(std::span<const WeightedPoint> centroids,
                                         std::span<const double> angles, const MvtConfig& cfg,
                                         std::span<const int> sides) {
  cfg.validate();
  if (centroids.size() != angles.size() || (!sides.empty() && sides.size() != angles.size())) {
    throw Error(ErrorCode::ShapeMismatch, "one angle (and side) per centroid required");
  }
  const std::size_t n = centroids.size();
  // Canonical order: by x, then y, then angle.
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](std::size_t i, std::size_t j) {
    return std::tie(centroids[i].x, centroids[i].y, angles[i]) < std::tie(centroids[j].x, centroids[j].y, angles[j]);
  });

  struct Candidate {
    double dist;
    std::size_t i, j;  // positions in `order`, i < j
  };
  std::vector<Candidate> candidates;
  for (std::size_t a = 0; a < n; ++a) {
    const auto& pa = centroids[order[a]];
    for (std::size_t b = a + 1; b < n; ++b) {
      const auto& pb = centroids[order[b]];
      if (pb.x - pa.x > cfg.max_pair_gap) break;  // sorted by x
      const double d = std::hypot(pb.x - pa.x, pb.y - pa.y);
      if (d > cfg.max_pair_gap || d <= 1e-6 || d < cfg.min_pair_gap) continue;
      const double ang_a = angles[order[a]];
      const double ang_b = angles[order[b]];
      if (axial_difference(ang_a, ang_b) > cfg.max_angle_spread) continue;
      if (!sides.empty() && !same_side(sides[order[a]], ang_a, sides[order[b]], ang_b)) continue;
      const double pair_angles[2] = {ang_a, ang_b};
      const double secant = fold_degrees(rad_to_deg(std::atan2(pb.y - pa.y, pb.x - pa.x)));
      if (axial_difference(secant, axial_mean(pair_angles)) > cfg.max_angle_spread) continue;
      candidates.push_back({d, a, b});
    }
  }
  std::sort(candidates.begin(), candidates.end(), [](const Candidate& l, const Candidate& r) {
    return std::tie(l.dist, l.i, l.j) < std::tie(r.dist, r.i, r.j);
  });

  std::vector<int> degree(n, 0);
  std::vector<TangentSample> out;
  for (const auto& c : candidates) {
    if (degree[c.i] >= 2 || degree[c.j] >= 2) continue;
    ++degree[c.i];
    ++degree[c.j];
    out.push_back(mvt_tangent(centroids[order[c.i]], centroids[order[c.j]]));
  }
  std::sort(out.begin(), out.end(), [](const TangentSample& l, const TangentSample& r) {
    return std::tie(l.x, l.y, l.angle) < std::tie(r.x, r.y, r.angle);
  });
  return out;
}

std::vector<TangentSample> tangent_field(const Image& img, std::span<const LineSegment> segments,
                                         const MvtConfig& cfg, double band) {
  std::vector<WeightedPoint> centroids;
  std::vector<double> angles;
  for (const auto& s : segments) {
    if (s.length() <= 0.0) continue;
    try {
      centroids.push_back(weighted_centroid(img, s, band));
      angles.push_back(segment_angle(s));
    } catch (const Error& e) {
      if (e.code() != ErrorCode::ZeroMass) throw;
    }
  }
  return tangent_field(centroids, angles, cfg);
}

}  // namespace curvelane

#include "curvelane/synth.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>

#include "curvelane/error.hpp"

namespace curvelane {

namespace {

constexpr double kTruthSpacing = 0.5;

void stamp_segment(std::vector<float>& coverage, int w, int h, Point2 a, Point2 b, double width) {
  const double reach = width / 2.0 + 0.5;
  const int x0 = std::max(0, static_cast<int>(std::floor(std::min(a.x, b.x) - reach)));
  const int x1 = std::min(w - 1, static_cast<int>(std::ceil(std::max(a.x, b.x) + reach)));
  const int y0 = std::max(0, static_cast<int>(std::floor(std::min(a.y, b.y) - reach)));
  const int y1 = std::min(h - 1, static_cast<int>(std::ceil(std::max(a.y, b.y) + reach)));
  for (int y = y0; y <= y1; ++y) {
    for (int x = x0; x <= x1; ++x) {
      const double d = point_segment_distance({static_cast<double>(x), static_cast<double>(y)}, a, b);
      const double c = std::clamp(reach - d, 0.0, 1.0);
      float& slot = coverage[static_cast<std::size_t>(y) * w + x];
      slot = std::max(slot, static_cast<float>(c));
    }
  }
}

bool in_gap(double fraction, const std::vector<GapInterval>& gaps) {
  for (const auto& g : gaps)
    if (fraction >= g.begin && fraction < g.end) return true;
  return false;
}

double shadow_factor(const ShadowSpec& s, double u) {
  if (u < s.start) return 1.0;
  if (s.ramp > 0.0 && u < s.start + s.ramp) return 1.0 - s.strength * (u - s.start) / s.ramp;
  return 1.0 - s.strength;
}

}  // namespace

double GroundTruth::distance(double x, double y) const {
  double best = std::numeric_limits<double>::infinity();
  for (const auto& c : curves) {
    for (const auto& p : c.points) {
      const double dx = p.x - x, dy = p.y - y;
      best = std::min(best, dx * dx + dy * dy);
    }
  }
  return std::sqrt(best);
}

Image GroundTruth::distance_field() const {
  Image out(width, height, 1);
  for (int y = 0; y < height; ++y)
    for (int x = 0; x < width; ++x) out.at(x, y) = static_cast<float>(distance(x, y));
  return out;
}

void validate_scene(const SceneSpec& spec) {
  auto fail = [](const char* what) { throw Error(ErrorCode::SpecInvalid, what); };
  if (spec.width < 1 || spec.height < 1) fail("scene size must be positive");
  if (!(spec.road_level >= 0.0 && spec.road_level <= 1.0) || !(spec.paint_level >= 0.0 && spec.paint_level <= 1.0))
    fail("intensity levels must lie in [0, 1]");
  if (!(spec.grain >= 0.0)) fail("grain must be non-negative");
  for (const auto& c : spec.curves) {
    validate_shape(c.shape);
    if (!(c.width >= 1.0)) fail("stroke width below 1 px");
    std::vector<GapInterval> gaps = c.gaps;
    std::sort(gaps.begin(), gaps.end(), [](const GapInterval& a, const GapInterval& b) { return a.begin < b.begin; });
    for (std::size_t i = 0; i < gaps.size(); ++i) {
      const auto& g = gaps[i];
      if (!(g.begin >= 0.0 && g.begin < 1.0 && g.end > g.begin && g.end <= 1.0)) fail("gap outside [0, 1)");
      if (i > 0 && g.begin < gaps[i - 1].end) fail("gaps overlap");
    }
  }
  if (spec.noise.count < 0) fail("negative distractor count");
  if (spec.noise.count > 0) {
    if (!(spec.noise.min_length > 0.0 && spec.noise.max_length >= spec.noise.min_length))
      fail("bad distractor length range");
    if (!(spec.noise.width >= 1.0)) fail("distractor width below 1 px");
  }
  if (spec.shadow) {
    const auto& s = *spec.shadow;
    if (!(s.strength >= 0.0 && s.strength <= 1.0)) fail("shadow strength outside [0, 1]");
    if (!(s.ramp >= 0.0) || !std::isfinite(s.start) || !std::isfinite(s.direction_deg)) fail("bad shadow geometry");
  }
}

SceneRender render(const SceneSpec& spec) {
  validate_scene(spec);
  const int w = spec.width, h = spec.height;
  SceneRender out;
  out.truth.width = w;
  out.truth.height = h;
  std::vector<float> coverage(static_cast<std::size_t>(w) * h, 0.0f);

  for (const auto& c : spec.curves) {
    TruthCurve tc;
    tc.label = curve_class_of(c.shape);
    tc.kind = std::string(shape_kind_name(c.shape));
    const auto samples = sample_by_arc_length(c.shape, kTruthSpacing);
    tc.arc_length = samples.empty() ? 0.0 : samples.back().arc;
    for (const auto& s : samples) {
      tc.points.push_back(s.p);
      tc.angles.push_back(s.angle);
      const double frac = tc.arc_length > 0.0 ? s.arc / tc.arc_length : 0.0;
      tc.visible.push_back(!in_gap(frac, c.gaps));
    }
    for (std::size_t i = 1; i < tc.points.size(); ++i)
      if (tc.visible[i - 1] && tc.visible[i]) stamp_segment(coverage, w, h, tc.points[i - 1], tc.points[i], c.width);
    out.truth.curves.push_back(std::move(tc));
  }

  std::mt19937_64 rng(spec.seed);
  if (spec.noise.count > 0) {
    std::uniform_real_distribution<double> ux(0.0, w), uy(0.0, h), ua(0.0, std::numbers::pi);
    std::uniform_real_distribution<double> ul(spec.noise.min_length, spec.noise.max_length);
    for (int i = 0; i < spec.noise.count; ++i) {
      const Point2 c{ux(rng), uy(rng)};
      const double a = ua(rng), len = ul(rng);
      const Point2 d{std::cos(a) * len / 2.0, std::sin(a) * len / 2.0};
      stamp_segment(coverage, w, h, c - d, c + d, spec.noise.width);
    }
  }

  Image img(w, h, 3);
  std::normal_distribution<double> grain(0.0, spec.grain > 0.0 ? spec.grain : 1.0);
  double ux = 1.0, uy = 0.0, umin = 0.0, uspan = 1.0;
  if (spec.shadow) {
    const double a = deg_to_rad(spec.shadow->direction_deg);
    ux = std::cos(a);
    uy = std::sin(a);
    const double corners[4] = {0.0, ux * (w - 1), uy * (h - 1), ux * (w - 1) + uy * (h - 1)};
    umin = *std::min_element(corners, corners + 4);
    uspan = std::max(1e-9, *std::max_element(corners, corners + 4) - umin);
  }
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      const double c = coverage[static_cast<std::size_t>(y) * w + x];
      double v = spec.road_level + (spec.paint_level - spec.road_level) * c;
      if (spec.grain > 0.0) v += grain(rng);
      if (spec.shadow) v *= shadow_factor(*spec.shadow, (ux * x + uy * y - umin) / uspan);
      const float fv = static_cast<float>(std::clamp(v, 0.0, 1.0));
      for (int ch = 0; ch < 3; ++ch) img.at(x, y, ch) = fv;
    }
  }
  out.image = std::move(img);
  return out;
}

PolylineProjection project_to_polyline(Point2 p, const std::vector<Point2>& polyline) {
  PolylineProjection best{std::numeric_limits<double>::infinity(), 0.0};
  if (polyline.size() == 1) return {distance(p, polyline[0]), 0.0};
  for (std::size_t i = 1; i < polyline.size(); ++i) {
    const double d = point_segment_distance(p, polyline[i - 1], polyline[i]);
    if (d < best.distance) {
      const Point2 v = polyline[i] - polyline[i - 1];
      best = {d, fold_degrees(rad_to_deg(std::atan2(v.y, v.x)))};
    }
  }
  return best;
}

double DetectionScore::mean_coverage() const {
  if (curves.empty()) return 0.0;
  double s = 0.0;
  for (const auto& c : curves) s += c.coverage;
  return s / static_cast<double>(curves.size());
}

double DetectionScore::min_coverage() const {
  double m = curves.empty() ? 0.0 : 1.0;
  for (const auto& c : curves) m = std::min(m, c.coverage);
  return m;
}

DetectionScore score_detection(const LaneModel& detected, const GroundTruth& truth, double dist_tol,
                               double angle_tol) {
  DetectionScore score;
  auto inside = [&](Point2 p) { return p.x >= 0.0 && p.y >= 0.0 && p.x <= truth.width - 1 && p.y <= truth.height - 1; };
  for (const auto& curve : truth.curves) {
    CurveScore cs;
    std::size_t total = 0;
    double angle_sum = 0.0;
    for (std::size_t i = 0; i < curve.points.size(); ++i) {
      const Point2 p = curve.points[i];
      if (!inside(p)) continue;
      ++total;
      PolylineProjection best{std::numeric_limits<double>::infinity(), 0.0};
      for (const auto& lane : detected.lanes) {
        if (lane.polyline.empty()) continue;
        const auto proj = project_to_polyline(p, lane.polyline);
        if (proj.distance < best.distance) best = proj;
      }
      if (best.distance > dist_tol) continue;
      const double err = axial_difference(best.angle, curve.angles[i]);
      if (err > angle_tol) continue;
      ++cs.matched;
      angle_sum += err;
      cs.max_deviation = std::max(cs.max_deviation, best.distance);
    }
    cs.coverage = total ? static_cast<double>(cs.matched) / static_cast<double>(total) : 0.0;
    cs.mean_angle_error = cs.matched ? angle_sum / static_cast<double>(cs.matched) : 0.0;
    score.curves.push_back(cs);
  }
  for (const auto& lane : detected.lanes) {
    for (std::size_t i = 1; i < lane.polyline.size(); ++i) {
      const Point2 a = lane.polyline[i - 1], b = lane.polyline[i];
      const Point2 mid = 0.5 * (a + b);
      if (truth.distance(mid.x, mid.y) > dist_tol) score.false_positive_length += distance(a, b);
    }
  }
  return score;
}

}  // namespace curvelane

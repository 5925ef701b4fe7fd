#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <numbers>
#include <vector>

#include "curvelane/curvemath.hpp"
#include "curvelane/error.hpp"
#include "curvelane/synth.hpp"
#include "support.hpp"

using namespace curvelane;

namespace {

double seg_dist(double px, double py, const LineSegment& s) {
  const double dx = s.x1 - s.x0, dy = s.y1 - s.y0;
  const double len2 = dx * dx + dy * dy;
  double t = len2 > 0 ? ((px - s.x0) * dx + (py - s.y0) * dy) / len2 : 0.0;
  t = std::clamp(t, 0.0, 1.0);
  return std::hypot(px - (s.x0 + t * dx), py - (s.y0 + t * dy));
}

struct Oracle {
  double x = 0, y = 0, mass = 0;
  double xmin = 1e9, xmax = -1e9, ymin = 1e9, ymax = -1e9;
};

// Direct weighted sums over every pixel of the image, no bounding box.
Oracle centroid_oracle(const Image& img, const LineSegment& s, double band, double floor = 0.0) {
  Oracle o;
  for (int y = 0; y < img.height; ++y) {
    for (int x = 0; x < img.width; ++x) {
      if (seg_dist(x, y, s) > band + 0.5) continue;
      const double f = std::max(0.0, img.at(x, y) - floor);
      if (f <= 0) continue;
      o.x += f * x;
      o.y += f * y;
      o.mass += f;
      o.xmin = std::min<double>(o.xmin, x);
      o.xmax = std::max<double>(o.xmax, x);
      o.ymin = std::min<double>(o.ymin, y);
      o.ymax = std::max<double>(o.ymax, y);
    }
  }
  o.x /= o.mass;
  o.y /= o.mass;
  return o;
}

double deriv_angle(double slope) { return fold_degrees(rad_to_deg(std::atan(slope))); }

double median(std::vector<double> v) {
  std::sort(v.begin(), v.end());
  return v.size() % 2 ? v[v.size() / 2] : 0.5 * (v[v.size() / 2 - 1] + v[v.size() / 2]);
}

// Median tangent error on exact centroids of y = f(x), sampled every `step` px of x.
template <typename F, typename D>
double analytic_median_error(F f, D df, double x0, double x1, double step, double gap) {
  std::vector<WeightedPoint> pts;
  std::vector<double> angles;
  for (double x = x0; x <= x1; x += step) {
    pts.push_back({x, f(x), 1.0});
    angles.push_back(deriv_angle(df(x)));
  }
  MvtConfig cfg{gap, gap / 2, 45.0};
  std::vector<double> errs;
  for (const auto& t : tangent_field(pts, angles, cfg)) errs.push_back(axial_difference(t.angle, deriv_angle(df(t.x))));
  REQUIRE(!errs.empty());
  return median(errs);
}

}  // namespace

TEST_CASE("centroid of a uniform segment is its middle") {
  const Image ones(5, 3, 1, 1.0f);
  const WeightedPoint c = weighted_centroid(ones, {0, 0, 2, 0}, 0.0);
  CHECK(c.x == doctest::Approx(1.0));
  CHECK(c.y == doctest::Approx(0.0).scale(1.0));
  CHECK(c.mass == doctest::Approx(3.0));
}

TEST_CASE("centroid weights pixels by intensity") {
  Image img(11, 1, 1, 0.0f);
  img.at(0, 0) = 0.25f;
  img.at(10, 0) = 0.75f;
  const WeightedPoint c = weighted_centroid(img, {0, 0, 10, 0}, 0.0);
  CHECK(c.x == doctest::Approx((1 * 0 + 3 * 10) / 4.0));
  CHECK(c.mass == doctest::Approx(1.0));
}

TEST_CASE("centroid of a dark window has no mass") {
  const Image zero(8, 8, 1, 0.0f);
  CHECK_THROWS_AS(weighted_centroid(zero, {1, 1, 6, 6}, 1.0), Error);
  const Image flat(8, 8, 1, 0.5f);
  CHECK_THROWS_AS(weighted_centroid(flat, {1, 1, 6, 6}, 1.0, 0.5), Error);
}

TEST_CASE("centroid matches the direct sum on random images") {
  testing::Gen g(12);
  for (int trial = 0; trial < 50; ++trial) {
    const Image img = g.image(24, 24);
    const LineSegment s{g.real(2, 21), g.real(2, 21), g.real(2, 21), g.real(2, 21)};
    const double band = g.real(0, 3);
    const double floor = trial % 2 ? g.real(0, 0.5) : 0.0;
    const WeightedPoint c = weighted_centroid(img, s, band, floor);
    const Oracle o = centroid_oracle(img, s, band, floor);
    CHECK(c.x == doctest::Approx(o.x).epsilon(1e-9));
    CHECK(c.y == doctest::Approx(o.y).epsilon(1e-9));
    CHECK(c.mass == doctest::Approx(o.mass).epsilon(1e-9));
    CHECK(c.x >= o.xmin);
    CHECK(c.x <= o.xmax);
    CHECK(c.y >= o.ymin);
    CHECK(c.y <= o.ymax);
  }
}

TEST_CASE("uniform weights give the plain pixel centroid") {
  testing::Gen g(13);
  const Image ones(30, 30, 1, 1.0f);
  for (int trial = 0; trial < 50; ++trial) {
    const LineSegment s{g.real(3, 26), g.real(3, 26), g.real(3, 26), g.real(3, 26)};
    const double band = g.real(0, 2);
    double sx = 0, sy = 0;
    int n = 0;
    for (int y = 0; y < 30; ++y)
      for (int x = 0; x < 30; ++x)
        if (seg_dist(x, y, s) <= band + 0.5) {
          sx += x;
          sy += y;
          ++n;
        }
    const WeightedPoint c = weighted_centroid(ones, s, band);
    CHECK(std::abs(c.x - sx / n) < 1e-9);
    CHECK(std::abs(c.y - sy / n) < 1e-9);
  }
}

TEST_CASE("capsule minimum") {
  testing::Gen g(14);
  const Image img = g.image(20, 20);
  const LineSegment s{3, 4, 15, 12};
  double lowest = 1e9;
  for (int y = 0; y < 20; ++y)
    for (int x = 0; x < 20; ++x)
      if (seg_dist(x, y, s) <= 2.5) lowest = std::min<double>(lowest, img.at(x, y));
  CHECK(capsule_minimum(img, s, 2.0) == doctest::Approx(lowest));
}

TEST_CASE("secant on a parabola is the tangent at the midpoint") {
  const TangentSample t = mvt_tangent({0, 0, 1}, {2, 4, 2});
  CHECK(t.angle == doctest::Approx(rad_to_deg(std::atan(2.0))));
  CHECK(t.x == doctest::Approx(1.0));
  CHECK(t.y == doctest::Approx(2.0));
  CHECK(t.support == doctest::Approx(3.0));
  CHECK(mvt_tangent({0, 0, 1}, {3, 3, 1}).angle == doctest::Approx(45.0));
  CHECK_THROWS_AS(mvt_tangent({1, 1, 1}, {1, 1, 1}), Error);
}

TEST_CASE("secant angle is symmetric") {
  testing::Gen g(15);
  for (int i = 0; i < 500; ++i) {
    const WeightedPoint a{g.real(-100, 100), g.real(-100, 100), g.real(0.1, 5)};
    const WeightedPoint b{g.real(-100, 100), g.real(-100, 100), g.real(0.1, 5)};
    const double ab = mvt_tangent(a, b).angle, ba = mvt_tangent(b, a).angle;
    CHECK(ab == doctest::Approx(ba));
    CHECK(ab >= 0.0);
    CHECK(ab < 180.0);
  }
}

TEST_CASE("chords along y = x^2 / 100 give tangents within 3 degrees") {
  SceneSpec spec;
  spec.curves.push_back({ParabolaShape{FreeAxis::X, 20, 0, 0.01, 0, 200}, 2.0, {}});
  const Image v = to_hsv(render(spec).image).channel(2);
  auto f = [](double x) { return 20 + x * x / 100; };
  std::vector<LineSegment> chords;
  for (int i = 0; i < 40; ++i) {
    const double x = 5.0 * i;
    chords.push_back({x, f(x), x + 2.0, f(x + 2.0)});
  }
  MvtConfig cfg;
  cfg.max_pair_gap = 25;
  const auto field = tangent_field(v, chords, cfg);
  REQUIRE(field.size() >= 20);
  int good = 0;
  for (const auto& t : field)
    if (axial_difference(t.angle, deriv_angle(t.x / 50)) <= 3.0) ++good;
  CHECK(good >= 0.9 * field.size());
}

TEST_CASE("collinear segments give the line angle") {
  Image img(100, 100, 1, 0.0f);
  for (int i = 10; i < 90; ++i) img.at(i, i) = 1.0f;
  const std::vector<LineSegment> segs{{10, 10, 20, 20}, {18, 18, 28, 28}};
  const auto field = tangent_field(img, segs, MvtConfig{});
  REQUIRE(field.size() == 1);
  CHECK(std::abs(field[0].angle - 45.0) < 1e-6);
}

TEST_CASE("distant segments give no tangents") {
  const Image img(200, 200, 1, 1.0f);
  const std::vector<LineSegment> segs{{10, 10, 14, 10}, {60, 10, 64, 10}, {120, 10, 124, 10}};
  CHECK(tangent_field(img, segs, MvtConfig{}).empty());
}

TEST_CASE("a rendered straight line has a tight tangent field") {
  SceneSpec spec;
  spec.curves.push_back({LineShape{{40, 30}, {600, 420}}, 2.0, {}});
  const Image v = to_hsv(render(spec).image).channel(2);
  const double a = rad_to_deg(std::atan2(390.0, 560.0));
  std::vector<LineSegment> segs;
  for (int i = 0; i < 60; ++i) {
    const double t0 = i / 60.0, t1 = t0 + 0.01;
    segs.push_back({40 + 560 * t0, 30 + 390 * t0, 40 + 560 * t1, 30 + 390 * t1});
  }
  MvtConfig cfg;
  cfg.max_pair_gap = 20;
  const auto field = tangent_field(v, segs, cfg, 2.0);
  REQUIRE(field.size() > 30);
  double lo = 180, hi = 0;
  for (const auto& t : field) {
    lo = std::min(lo, t.angle);
    hi = std::max(hi, t.angle);
    CHECK(axial_difference(t.angle, a) < 1.0);
  }
  CHECK(hi - lo < 1.0);
}

TEST_CASE("each centroid joins at most two pairs") {
  testing::Gen g(16);
  std::vector<WeightedPoint> pts;
  std::vector<double> angles;
  for (int i = 0; i < 80; ++i) {
    pts.push_back({g.real(0, 60), g.real(0, 60), 1.0});
    angles.push_back(g.real(0, 180));
  }
  const auto field = tangent_field(pts, angles, MvtConfig{20, 0, 90});
  CHECK(field.size() <= pts.size());
  for (const auto& t : field) {
    CHECK(t.support > 0.0);
    CHECK(t.angle >= 0.0);
    CHECK(t.angle < 180.0);
  }
}

TEST_CASE("pairing gates on gap, spread and side") {
  const std::vector<WeightedPoint> pts{{0, 0, 1}, {3, 0, 1}, {10, 0, 1}};
  const std::vector<double> flat{0, 0, 0};
  CHECK(tangent_field(pts, flat, MvtConfig{16, 5, 15}).size() == 2);
  CHECK(tangent_field(pts, flat, MvtConfig{16, 0, 15}).size() == 3);
  CHECK(tangent_field(pts, flat, MvtConfig{5, 0, 15}).size() == 1);
  const std::vector<double> skew{0, 40, 0};
  CHECK(tangent_field(pts, skew, MvtConfig{16, 0, 15}).size() == 1);
  const std::vector<int> sides{1, -1, 1};
  CHECK(tangent_field(pts, flat, MvtConfig{16, 0, 15}, sides).size() == 1);
}

TEST_CASE("brighter side of a stroke boundary") {
  Image img(40, 40, 1, 0.2f);
  for (int y = 0; y < 40; ++y)
    for (int x = 18; x <= 21; ++x) img.at(x, y) = 0.9f;
  // Vertical boundaries on both sides of the stroke.
  const int left = edge_side(img, {17.5, 5, 17.5, 35});
  const int right = edge_side(img, {21.5, 5, 21.5, 35});
  CHECK(left != 0);
  CHECK(right == -left);
  CHECK(edge_side(Image(10, 10, 1, 0.5f), {2, 2, 8, 2}) == 0);
  // Reversing the segment does not change the answer.
  CHECK(edge_side(img, {17.5, 35, 17.5, 5}) == left);
}

TEST_CASE("same side across the angle wrap") {
  CHECK(same_side(1, 10, 1, 20));
  CHECK_FALSE(same_side(1, 10, -1, 20));
  CHECK(same_side(1, 1, -1, 179));
  CHECK(same_side(0, 50, -1, 60));
}

TEST_CASE("discrete tangent error shrinks with the pair gap") {
  // y = x^2: the midpoint secant is exact, so every gap reads zero error.
  double prev = 1e9;
  for (double gap : {16.0, 8.0, 4.0}) {
    const double e = analytic_median_error([](double x) { return x * x / 200; }, [](double x) { return x / 100; },
                                           0, 300, 1.0, gap);
    CHECK(e <= prev + 1e-9);
    CHECK(e < 1e-6);
    prev = e;
  }
  // A sine has third-order terms, so the error falls strictly as the gap halves.
  prev = 1e9;
  for (double gap : {16.0, 8.0, 4.0}) {
    const double e = analytic_median_error([](double x) { return 40 * std::sin(x / 30); },
                                           [](double x) { return 40.0 / 30 * std::cos(x / 30); }, 0, 300, 1.0, gap);
    CHECK(e < prev);
    prev = e;
  }
}

TEST_CASE("mvt config validation") {
  CHECK_THROWS_AS((MvtConfig{0, 0, 15}.validate()), Error);
  CHECK_THROWS_AS((MvtConfig{16, 0, 0}.validate()), Error);
  CHECK_THROWS_AS((MvtConfig{8, 10, 15}.validate()), Error);
  CHECK_NOTHROW(MvtConfig{}.validate());
}

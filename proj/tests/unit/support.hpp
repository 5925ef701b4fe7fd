#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numbers>
#include <random>
#include <set>
#include <utility>
#include <vector>

#include "curvelane/hough.hpp"
#include "curvelane/imaging.hpp"
#include "curvelane/shapes.hpp"

namespace testing {

// Small seeded generator wrapper for the property tests.
class Gen {
 public:
  explicit Gen(std::uint64_t seed) : rng_(seed) {}

  double real(double lo, double hi) { return std::uniform_real_distribution<double>(lo, hi)(rng_); }
  int integer(int lo, int hi) { return std::uniform_int_distribution<int>(lo, hi)(rng_); }
  bool coin() { return integer(0, 1) == 1; }
  std::mt19937_64& engine() { return rng_; }

  curvelane::Image image(int w, int h, int channels = 1) {
    curvelane::Image img(w, h, channels);
    for (auto& v : img.data) v = static_cast<float>(real(0.0, 1.0));
    return img;
  }

 private:
  std::mt19937_64 rng_;
};

using Pixel = std::pair<int, int>;

inline curvelane::EdgeMap edge_map(int w, int h, const std::set<Pixel>& pixels) {
  curvelane::EdgeMap e;
  e.width = w;
  e.height = h;
  e.magnitude.assign(static_cast<std::size_t>(w) * h, 0.0f);
  e.binary.assign(e.magnitude.size(), 0);
  for (const auto& [x, y] : pixels) {
    const std::size_t i = static_cast<std::size_t>(y) * w + x;
    e.magnitude[i] = 1.0f;
    e.binary[i] = 1;
  }
  return e;
}

struct PlantedLine {
  double theta = 0.0;  // radians, [0, pi)
  double r = 0.0;
};

// Pixels nearest to the line x cos(theta) + y sin(theta) = r inside a w x h grid.
inline std::set<Pixel> rasterize(const PlantedLine& l, int w, int h) {
  std::set<Pixel> out;
  const double c = std::cos(l.theta), s = std::sin(l.theta);
  const double span = 2.0 * (w + h);
  for (double t = -span; t <= span; t += 0.1) {
    const int x = static_cast<int>(std::lround(l.r * c - t * s));
    const int y = static_cast<int>(std::lround(l.r * s + t * c));
    if (x >= 0 && y >= 0 && x < w && y < h) out.insert({x, y});
  }
  return out;
}

// 1..3 well separated lines through the middle of a w x h grid, each at least
// 16 pixels long.
inline std::vector<PlantedLine> plant_lines(Gen& g, int w, int h, int count) {
  std::vector<PlantedLine> lines;
  while (static_cast<int>(lines.size()) < count) {
    const double theta = g.real(0.0, std::numbers::pi);
    const double cx = g.real(0.25 * w, 0.75 * w), cy = g.real(0.25 * h, 0.75 * h);
    const PlantedLine l{theta, cx * std::cos(theta) + cy * std::sin(theta)};
    if (rasterize(l, w, h).size() < 16) continue;
    bool apart = true;
    for (const auto& o : lines) {
      double dt = std::abs(o.theta - l.theta);
      dt = std::min(dt, std::numbers::pi - dt);
      if (dt < 10.0 * std::numbers::pi / 180.0) apart = false;
    }
    if (apart) lines.push_back(l);
  }
  return lines;
}

// Bins equal up to one step in each direction, with the theta wrap flipping r.
inline bool near_bin(const curvelane::Accumulator& acc, std::pair<int, int> a, std::pair<int, int> b) {
  const int nt = acc.theta_bins(), center = (acc.r_bins() - 1) / 2;
  for (int shift : {-1, 0, 1}) {
    int t = b.first + shift, j = b.second;
    if (t < 0 || t >= nt) {
      t = (t + nt) % nt;
      j = 2 * center - j;
    }
    if (t == a.first && std::abs(j - a.second) <= 1) return true;
  }
  return false;
}

// A random instance of one standard class, sized to fit a 640 x 480 frame.
inline curvelane::Shape random_standard_shape(Gen& g, curvelane::CurveClass cls) {
  using namespace curvelane;
  const double cx = 320 + g.real(-30, 30), cy = 240 + g.real(-30, 30);
  switch (cls) {
    case CurveClass::Line: {
      double ang;
      do ang = g.real(0, 180);
      while (ang > 80 && ang < 100);  // keep some horizontal extent
      const double len = g.real(150, 200), r = deg_to_rad(ang);
      const Point2 d{len * std::cos(r), len * std::sin(r)};
      return LineShape{Point2{cx, cy} - d, Point2{cx, cy} + d};
    }
    case CurveClass::Parabola: {
      const double k = g.real(1, 4);
      const int sign = g.coin() ? 1 : -1;
      const double w = g.real(120, std::min(250.0, 800.0 / k));
      const double c2 = sign * k / (2 * w);
      const double vy = sign > 0 ? 40 + g.real(0, 20) : 440 - g.real(0, 20);
      return ParabolaShape{FreeAxis::X, vy + c2 * cx * cx, -2 * c2 * cx, c2, cx - w, cx + w};
    }
    case CurveClass::Circle:
      return CircleShape{{cx, cy}, g.real(60, 200)};
    case CurveClass::Ellipse: {
      const double ratio = g.real(1.5, 3.8);
      const bool wide = g.coin();
      const double smax = std::min(200.0, (wide ? 290.0 : 220.0) / ratio);
      const double s = g.real(std::min(50.0, smax), smax);
      return wide ? EllipseShape{{cx, cy}, s * ratio, s} : EllipseShape{{cx, cy}, s, s * ratio};
    }
    default: {
      const double e = g.real(1.4, 3.0);
      const double a = g.real(40, std::min(80.0, 400 / (2.16 * std::sqrt(e * e - 1))));
      const double b = a * std::sqrt(e * e - 1);
      const int sign = g.coin() ? 1 : -1;
      const double h = b * (std::sqrt(10.0) - 1);
      const double vy = sign > 0 ? 240 - h / 2 - b : 240 + h / 2 + b;
      return HyperbolaShape{FreeAxis::X, cx, vy, a, b, sign, cx - 3 * a, cx + 3 * a};
    }
  }
}

}  // namespace testing

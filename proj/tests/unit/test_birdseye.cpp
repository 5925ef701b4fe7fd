#include <doctest.h>

#include <array>
#include <cmath>
#include <utility>

#include "curvelane/birdseye.hpp"
#include "curvelane/error.hpp"
#include "curvelane/synth.hpp"
#include "support.hpp"

using namespace curvelane;

namespace {

using Quad = std::array<Point2, 4>;

// Plain DLT with h33 = 1: eight equations, Gaussian elimination with partial pivoting.
std::array<double, 9> dlt_oracle(const Quad& src, const Quad& dst) {
  double a[8][9] = {};
  for (int i = 0; i < 4; ++i) {
    const double x = src[i].x, y = src[i].y, u = dst[i].x, v = dst[i].y;
    double r0[9] = {x, y, 1, 0, 0, 0, -u * x, -u * y, u};
    double r1[9] = {0, 0, 0, x, y, 1, -v * x, -v * y, v};
    for (int k = 0; k < 9; ++k) {
      a[2 * i][k] = r0[k];
      a[2 * i + 1][k] = r1[k];
    }
  }
  for (int c = 0; c < 8; ++c) {
    int piv = c;
    for (int r = c + 1; r < 8; ++r)
      if (std::abs(a[r][c]) > std::abs(a[piv][c])) piv = r;
    for (int k = 0; k < 9; ++k) std::swap(a[c][k], a[piv][k]);
    for (int r = 0; r < 8; ++r) {
      if (r == c) continue;
      const double f = a[r][c] / a[c][c];
      for (int k = c; k < 9; ++k) a[r][k] -= f * a[c][k];
    }
  }
  std::array<double, 9> h{};
  for (int i = 0; i < 8; ++i) h[i] = a[i][8] / a[i][i];
  h[8] = 1.0;
  return h;
}

double triangle_area(Point2 a, Point2 b, Point2 c) {
  return 0.5 * std::abs((b.x - a.x) * (c.y - a.y) - (b.y - a.y) * (c.x - a.x));
}

bool well_spread(const Quad& q) {
  for (int skip = 0; skip < 4; ++skip) {
    std::array<Point2, 3> t;
    int n = 0;
    for (int i = 0; i < 4; ++i)
      if (i != skip) t[n++] = q[i];
    if (triangle_area(t[0], t[1], t[2]) < 2000.0) return false;
  }
  return true;
}

Quad random_quad(testing::Gen& g) {
  Quad q;
  do {
    for (auto& p : q) p = {g.real(0, 640), g.real(0, 480)};
  } while (!well_spread(q));
  return q;
}

double max_corner_error(const Homography& h, const Quad& src, const Quad& dst) {
  double worst = 0.0;
  for (int i = 0; i < 4; ++i) worst = std::max(worst, distance(h.project(src[i]), dst[i]));
  return worst;
}

}  // namespace

TEST_CASE("same quad gives the identity") {
  const Quad q{{{10, 20}, {300, 25}, {280, 400}, {30, 390}}};
  const Homography h = estimate_homography(q, q);
  const auto id = Homography::identity().matrix();
  for (int i = 0; i < 9; ++i) CHECK(h.matrix()[i] == doctest::Approx(id[i]).scale(1.0).epsilon(1e-9));
}

TEST_CASE("translated quad gives a translation") {
  const Quad src{{{10, 20}, {300, 25}, {280, 400}, {30, 390}}};
  Quad dst = src;
  for (auto& p : dst) p = p + Point2{5, 7};
  const Homography h = estimate_homography(src, dst);
  CHECK(max_corner_error(h, src, dst) < 1e-6);
  const auto t = Homography::translation(5, 7).matrix();
  for (int i = 0; i < 9; ++i) CHECK(h.matrix()[i] == doctest::Approx(t[i]).scale(1.0).epsilon(1e-9));
}

TEST_CASE("square to trapezoid matches the linear solve") {
  const Quad src{{{0, 0}, {1, 0}, {0, 1}, {1, 1}}};
  const Quad dst{{{0, 0}, {1, 0}, {0.25, 1}, {0.75, 1}}};
  const Homography h = estimate_homography(src, dst);
  CHECK(max_corner_error(h, src, dst) < 1e-6);
  const auto oracle = dlt_oracle(src, dst);
  for (int i = 0; i < 9; ++i) CHECK(h.matrix()[i] == doctest::Approx(oracle[i]).scale(1.0).epsilon(1e-9));
}

TEST_CASE("collinear points are rejected") {
  const Quad bad{{{0, 0}, {1, 1}, {2, 2}, {0, 5}}};
  const Quad ok{{{0, 0}, {1, 0}, {1, 1}, {0, 1}}};
  CHECK_THROWS_AS(estimate_homography(bad, ok), Error);
  CHECK_THROWS_AS(estimate_homography(ok, bad), Error);
  try {
    estimate_homography(bad, ok);
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::DegenerateConfiguration);
  }
}

TEST_CASE("random quads: corners land within 1e-6 px and agree with the oracle") {
  testing::Gen g(1234);
  for (int trial = 0; trial < 1000; ++trial) {
    const Quad src = random_quad(g);
    const Quad dst = random_quad(g);
    const Homography h = estimate_homography(src, dst);
    REQUIRE(max_corner_error(h, src, dst) < 1e-6);
    CHECK(h(2, 2) == 1.0);
    CHECK(h.determinant() != 0.0);
  }
}

TEST_CASE("composition matches chained projection") {
  testing::Gen g(99);
  for (int trial = 0; trial < 200; ++trial) {
    const Homography h1 = estimate_homography(random_quad(g), random_quad(g));
    const Homography h2 = estimate_homography(random_quad(g), random_quad(g));
    const Point2 p{g.real(0, 640), g.real(0, 480)};
    const Point2 chained = h2.project(h1.project(p));
    const Point2 direct = h2.compose(h1).project(p);
    // Relative tolerance; random projective maps can send points far away.
    const double scale = std::max(1.0, std::hypot(chained.x, chained.y));
    CHECK(distance(chained, direct) / scale < 1e-9);
  }
}

TEST_CASE("inverse undoes the map") {
  testing::Gen g(7);
  const Homography h = estimate_homography(random_quad(g), random_quad(g));
  const Homography hi = h.inverse();
  for (int i = 0; i < 20; ++i) {
    const Point2 p{g.real(0, 640), g.real(0, 480)};
    const Point2 back = hi.project(h.project(p));
    CHECK(distance(back, p) < 1e-6);
  }
}

TEST_CASE("identity warp copies the image") {
  testing::Gen g(3);
  const Image img = g.image(23, 17, 3);
  CHECK(warp(img, Homography::identity(), 23, 17) == img);
}

TEST_CASE("integer translation warp is an exact shift") {
  testing::Gen g(4);
  const Image img = g.image(30, 20);
  const Image out = warp(img, Homography::translation(3, 2), 30, 20);
  for (int y = 0; y < 20; ++y) {
    for (int x = 0; x < 30; ++x) {
      if (x >= 3 && y >= 2) {
        CHECK(out.at(x, y) == img.at(x - 3, y - 2));
      } else {
        CHECK(out.at(x, y) == 0.0f);
      }
    }
  }
}

TEST_CASE("warp round trip on a smooth scene") {
  SceneSpec s;
  s.curves.push_back({ParabolaShape{FreeAxis::Y, 200, 0.3, -0.0008, 0, 480}, 4.0, {}});
  s.curves.push_back({CircleShape{{420, 240}, 120}, 4.0, {}});
  const Image v = gaussian_blur(to_hsv(render(s).image).channel(2), 2.0);
  const Quad src{{{0, 0}, {640, 0}, {640, 480}, {0, 480}}};
  const Quad dst{{{40, 30}, {600, 10}, {620, 470}, {20, 450}}};
  const Homography h = estimate_homography(src, dst);
  const Image there = warp(v, h, 640, 480);
  const Image back = warp(there, h.inverse(), 640, 480);
  double total = 0.0;
  int count = 0;
  for (int y = 0; y < 480; ++y) {
    for (int x = 0; x < 640; ++x) {
      const Point2 q = h.project({static_cast<double>(x), static_cast<double>(y)});
      if (q.x < 1 || q.y < 1 || q.x > 638 || q.y > 478) continue;
      total += std::abs(back.at(x, y) - v.at(x, y));
      ++count;
    }
  }
  REQUIRE(count > 200000);
  CHECK(total / count < 0.02);
}

TEST_CASE("world distances") {
  const WorldScale ten_per_cm{10.0};
  CHECK(to_world(10.0, ten_per_cm) == doctest::Approx(1.0));
  CHECK(to_world(0.0, ten_per_cm) == 0.0);
  CHECK(to_world(100.0, ten_per_cm) == doctest::Approx(10.0));
  testing::Gen g(5);
  for (int i = 0; i < 100; ++i) {
    const WorldScale sc{g.real(0.5, 50)};
    const double a = g.real(0, 1000), b = g.real(0, 1000);
    CHECK(to_world(a + b, sc) == doctest::Approx(to_world(a, sc) + to_world(b, sc)));
  }
}

#include "curvelane/birdseye.hpp"

#include <Eigen/Dense>
#include <cmath>

#include "curvelane/error.hpp"

namespace curvelane {

namespace {

std::array<double, 9> normalised(std::array<double, 9> m) {
  if (std::fabs(m[8]) < 1e-12) {
    throw Error(ErrorCode::DegenerateConfiguration, "homography cannot be normalised (m22 ~ 0)");
  }
  const double s = m[8];
  for (double& v : m) v /= s;
  m[8] = 1.0;
  return m;
}

void check_non_collinear(std::span<const Point2, 4> pts, const char* which) {
  double scale = 0.0;
  for (const auto& p : pts) {
    for (const auto& q : pts) scale = std::max(scale, distance(p, q));
  }
  if (scale <= 0.0) throw Error(ErrorCode::DegenerateConfiguration, std::string(which) + " points coincide");
  for (int i = 0; i < 4; ++i) {
    for (int j = i + 1; j < 4; ++j) {
      for (int k = j + 1; k < 4; ++k) {
        const Point2 a = pts[j] - pts[i];
        const Point2 b = pts[k] - pts[i];
        if (std::fabs(a.x * b.y - a.y * b.x) <= 1e-9 * scale * scale) {
          throw Error(ErrorCode::DegenerateConfiguration, std::string("three ") + which + " points are collinear");
        }
      }
    }
  }
}

// Similarity moving the centroid to the origin with mean distance sqrt(2).
Eigen::Matrix3d conditioner(std::span<const Point2, 4> pts) {
  double cx = 0.0, cy = 0.0;
  for (const auto& p : pts) {
    cx += p.x / 4.0;
    cy += p.y / 4.0;
  }
  double mean_dist = 0.0;
  for (const auto& p : pts) mean_dist += std::hypot(p.x - cx, p.y - cy) / 4.0;
  const double s = std::sqrt(2.0) / mean_dist;
  Eigen::Matrix3d t;
  t << s, 0, -s * cx, 0, s, -s * cy, 0, 0, 1;
  return t;
}

}  // namespace

Homography::Homography() : m_{1, 0, 0, 0, 1, 0, 0, 0, 1} {}

Homography::Homography(const std::array<double, 9>& m) : m_(normalised(m)) {
  if (std::fabs(determinant()) < 1e-12) {
    throw Error(ErrorCode::DegenerateConfiguration, "homography is singular");
  }
}

Homography Homography::translation(double dx, double dy) { return Homography({1, 0, dx, 0, 1, dy, 0, 0, 1}); }

double Homography::determinant() const {
  const auto& m = m_;
  return m[0] * (m[4] * m[8] - m[5] * m[7]) - m[1] * (m[3] * m[8] - m[5] * m[6]) +
         m[2] * (m[3] * m[7] - m[4] * m[6]);
}

Homography Homography::inverse() const {
  const auto& m = m_;
  const std::array<double, 9> adj{
      m[4] * m[8] - m[5] * m[7], m[2] * m[7] - m[1] * m[8], m[1] * m[5] - m[2] * m[4],
      m[5] * m[6] - m[3] * m[8], m[0] * m[8] - m[2] * m[6], m[2] * m[3] - m[0] * m[5],
      m[3] * m[7] - m[4] * m[6], m[1] * m[6] - m[0] * m[7], m[0] * m[4] - m[1] * m[3]};
  // The adjugate is the inverse up to scale; normalisation removes the determinant.
  return Homography(adj);
}

Point2 Homography::project(Point2 p) const {
  const auto& m = m_;
  const double w = m[6] * p.x + m[7] * p.y + m[8];
  return {(m[0] * p.x + m[1] * p.y + m[2]) / w, (m[3] * p.x + m[4] * p.y + m[5]) / w};
}

Homography Homography::compose(const Homography& rhs) const {
  std::array<double, 9> out{};
  for (int r = 0; r < 3; ++r) {
    for (int c = 0; c < 3; ++c) {
      double s = 0.0;
      for (int k = 0; k < 3; ++k) s += m_[r * 3 + k] * rhs.m_[k * 3 + c];
      out[r * 3 + c] = s;
    }
  }
  return Homography(out);
}

Homography estimate_homography(std::span<const Point2, 4> src, std::span<const Point2, 4> dst) {
  check_non_collinear(src, "source");
  check_non_collinear(dst, "destination");
  const Eigen::Matrix3d ts = conditioner(src);
  const Eigen::Matrix3d td = conditioner(dst);

  Eigen::Matrix<double, 9, 9> a = Eigen::Matrix<double, 9, 9>::Zero();
  for (int i = 0; i < 4; ++i) {
    const Eigen::Vector3d u = ts * Eigen::Vector3d(src[i].x, src[i].y, 1.0);
    const Eigen::Vector3d v = td * Eigen::Vector3d(dst[i].x, dst[i].y, 1.0);
    a.block<1, 3>(2 * i, 3) = -v.z() * u.transpose();
    a.block<1, 3>(2 * i, 6) = v.y() * u.transpose();
    a.block<1, 3>(2 * i + 1, 0) = v.z() * u.transpose();
    a.block<1, 3>(2 * i + 1, 6) = -v.x() * u.transpose();
  }
  // Row 8 stays zero so the system is square; its null space is the solution.
  Eigen::JacobiSVD<Eigen::Matrix<double, 9, 9>> svd(a, Eigen::ComputeFullV);
  const Eigen::Matrix<double, 9, 1> h = svd.matrixV().col(8);
  Eigen::Matrix3d hn;
  hn << h(0), h(1), h(2), h(3), h(4), h(5), h(6), h(7), h(8);
  const Eigen::Matrix3d full = td.inverse() * hn * ts;
  std::array<double, 9> m{};
  for (int r = 0; r < 3; ++r) {
    for (int c = 0; c < 3; ++c) m[r * 3 + c] = full(r, c);
  }
  return Homography(m);
}

namespace {

double snap(double v) {
  const double r = std::round(v);
  return std::fabs(v - r) < 1e-9 ? r : v;
}

}  // namespace

Image warp(const Image& img, const Homography& h, int out_width, int out_height) {
  if (out_width <= 0 || out_height <= 0) throw Error(ErrorCode::InvalidParameter, "warp output must be non-empty");
  const Homography inv = h.inverse();
  Image out(out_width, out_height, img.channels);
  const int w = img.width;
  const int hgt = img.height;
  for (int y = 0; y < out_height; ++y) {
    for (int x = 0; x < out_width; ++x) {
      const Point2 s = inv.project({static_cast<double>(x), static_cast<double>(y)});
      const double sx = snap(s.x);
      const double sy = snap(s.y);
      if (!(sx >= 0.0 && sy >= 0.0 && sx <= w - 1 && sy <= hgt - 1)) continue;
      const int x0 = static_cast<int>(sx);
      const int y0 = static_cast<int>(sy);
      const double tx = sx - x0;
      const double ty = sy - y0;
      const int x1 = std::min(x0 + 1, w - 1);
      const int y1 = std::min(y0 + 1, hgt - 1);
      for (int c = 0; c < img.channels; ++c) {
        if (tx == 0.0 && ty == 0.0) {
          out.at(x, y, c) = img.at(x0, y0, c);
          continue;
        }
        const double top = (1.0 - tx) * img.at(x0, y0, c) + tx * img.at(x1, y0, c);
        const double bottom = (1.0 - tx) * img.at(x0, y1, c) + tx * img.at(x1, y1, c);
        out.at(x, y, c) = static_cast<float>((1.0 - ty) * top + ty * bottom);
      }
    }
  }
  return out;
}

double to_world(double distance_px, const WorldScale& scale) {
  if (!(scale.pixels_per_cm > 0.0)) throw Error(ErrorCode::InvalidParameter, "pixels_per_cm must be positive");
  if (distance_px < 0.0) throw Error(ErrorCode::InvalidParameter, "distance must be non-negative");
  return distance_px / scale.pixels_per_cm;
}

}  // namespace curvelane

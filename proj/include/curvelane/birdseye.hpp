#pragma once

#include <array>
#include <span>

#include "curvelane/geometry.hpp"
#include "curvelane/imaging.hpp"

namespace curvelane {

// Plane-to-plane projective map, row-major, normalised so m[8] == 1.
class Homography {
 public:
  Homography();  // identity
  explicit Homography(const std::array<double, 9>& m);

  static Homography identity() { return Homography(); }
  static Homography translation(double dx, double dy);

  const std::array<double, 9>& matrix() const { return m_; }
  double operator()(int row, int col) const { return m_[row * 3 + col]; }

  double determinant() const;
  Homography inverse() const;
  Point2 project(Point2 p) const;

  // (*this) * rhs: apply rhs first.
  Homography compose(const Homography& rhs) const;

 private:
  std::array<double, 9> m_;
};

struct WorldScale {
  double pixels_per_cm = 10.0;
};

// Four-point correspondence solved with a Hartley-normalised DLT.
// Throws DegenerateConfiguration if any three src (or dst) points are collinear.
Homography estimate_homography(std::span<const Point2, 4> src, std::span<const Point2, 4> dst);

// Inverse-mapped bilinear warp; samples falling outside the source read as 0.
Image warp(const Image& img, const Homography& h, int out_width, int out_height);

double to_world(double distance_px, const WorldScale& scale);

}  // namespace curvelane

#include "curvelane/hough.hpp"

#include <algorithm>
#include <cmath>
#include <random>

#include "curvelane/error.hpp"

namespace curvelane {

double LineSegment::length() const { return std::hypot(x1 - x0, y1 - y0); }

void HoughParams::validate() const {
  if (theta_bins <= 0 || !(r_resolution > 0.0) || votes_min <= 0 || !(min_length > 0.0) || !(max_gap > 0.0)) {
    throw Error(ErrorCode::InvalidParameter, "Hough parameters must all be strictly positive");
  }
}

Accumulator::Accumulator(int theta_bins, double r_resolution, int width, int height)
    : theta_bins_(theta_bins), r_resolution_(r_resolution) {
  if (theta_bins <= 0 || !(r_resolution > 0.0)) {
    throw Error(ErrorCode::InvalidParameter, "accumulator needs positive theta_bins and r_resolution");
  }
  const double diagonal = std::hypot(static_cast<double>(width), static_cast<double>(height));
  r_center_ = static_cast<int>(std::ceil(diagonal / r_resolution));
  r_bins_ = 2 * r_center_ + 1;
  votes_.assign(static_cast<std::size_t>(theta_bins_) * r_bins_, 0);
}

double Accumulator::theta_of(int t) const { return t * std::numbers::pi / theta_bins_; }

int Accumulator::r_bin(double r) const {
  const long j = std::lround(r / r_resolution_) + r_center_;
  return static_cast<int>(std::clamp<long>(j, 0, r_bins_ - 1));
}

std::pair<int, int> Accumulator::bin_of(const PolarLine& line) const {
  long t = std::lround(line.theta / (std::numbers::pi / theta_bins_));
  double r = line.r;
  if (t >= theta_bins_) {
    t -= theta_bins_;
    r = -r;
  }
  return {static_cast<int>(t), r_bin(r)};
}

namespace {

struct TrigTable {
  std::vector<double> cos_t;
  std::vector<double> sin_t;

  explicit TrigTable(int bins) : cos_t(bins), sin_t(bins) {
    for (int t = 0; t < bins; ++t) {
      const double th = t * std::numbers::pi / bins;
      cos_t[t] = std::cos(th);
      sin_t[t] = std::sin(th);
    }
  }
};

// Unbiased bounded draw; std::uniform_int_distribution is implementation-defined.
std::uint64_t bounded(std::mt19937_64& rng, std::uint64_t bound) {
  const std::uint64_t limit = std::numeric_limits<std::uint64_t>::max() -
                              std::numeric_limits<std::uint64_t>::max() % bound;
  std::uint64_t v;
  do {
    v = rng();
  } while (v >= limit);
  return v % bound;
}

}  // namespace

Accumulator accumulate(const EdgeMap& edges, int theta_bins, double r_resolution) {
  if (edges.width == 0 || edges.height == 0 || edges.edge_count() == 0) {
    throw Error(ErrorCode::EmptyEdgeMap, "no edge pixels to accumulate");
  }
  Accumulator acc(theta_bins, r_resolution, edges.width, edges.height);
  const TrigTable trig(theta_bins);
  for (int y = 0; y < edges.height; ++y) {
    for (int x = 0; x < edges.width; ++x) {
      if (!edges.is_edge(x, y)) continue;
      for (int t = 0; t < theta_bins; ++t) {
        ++acc.at(t, acc.r_bin(x * trig.cos_t[t] + y * trig.sin_t[t]));
      }
    }
  }
  return acc;
}

std::vector<AccumulatorPeak> top_peaks(const Accumulator& acc, std::size_t count, int theta_window,
                                       int r_window) {
  std::vector<std::int32_t> work = acc.votes();
  const int nt = acc.theta_bins();
  const int nr = acc.r_bins();
  const int r_center = (nr - 1) / 2;
  std::vector<AccumulatorPeak> peaks;
  while (peaks.size() < count) {
    const auto best = std::max_element(work.begin(), work.end());
    if (best == work.end() || *best <= 0) break;
    const auto idx = static_cast<int>(best - work.begin());
    const int t = idx / nr;
    const int j = idx % nr;
    peaks.push_back({t, j, *best});
    for (int dt = -theta_window; dt <= theta_window; ++dt) {
      int tt = t + dt;
      int jj = j;
      if (tt < 0 || tt >= nt) {
        tt = (tt + nt) % nt;
        jj = 2 * r_center - j;  // r -> -r across the wrap
      }
      for (int dr = -r_window; dr <= r_window; ++dr) {
        const int jr = jj + dr;
        if (jr >= 0 && jr < nr) work[static_cast<std::size_t>(tt) * nr + jr] = -1;
      }
    }
  }
  return peaks;
}

std::vector<LineSegment> probabilistic_lines(const EdgeMap& edges, const HoughParams& params,
                                             std::uint64_t seed) {
  params.validate();
  const int width = edges.width;
  const int height = edges.height;
  std::vector<int> points;
  for (int i = 0; i < width * height; ++i) {
    if (edges.binary[i]) points.push_back(i);
  }
  if (points.empty()) throw Error(ErrorCode::EmptyEdgeMap, "no edge pixels for probabilistic Hough");

  std::mt19937_64 rng(seed);
  for (std::size_t i = points.size() - 1; i > 0; --i) {
    std::swap(points[i], points[bounded(rng, i + 1)]);
  }

  Accumulator acc(params.theta_bins, params.r_resolution, width, height);
  const TrigTable trig(params.theta_bins);
  const int nt = params.theta_bins;
  // 1 = live edge pixel; cleared once a walk consumes it.
  std::vector<std::uint8_t> mask(edges.binary);
  std::vector<std::uint8_t> voted(mask.size(), 0);
  auto vote = [&](int x, int y, int delta) {
    for (int t = 0; t < nt; ++t) acc.at(t, acc.r_bin(x * trig.cos_t[t] + y * trig.sin_t[t])) += delta;
  };

  constexpr int kShift = 16;
  const int max_gap = static_cast<int>(std::floor(params.max_gap));
  std::vector<LineSegment> lines;

  for (const int p : points) {
    if (!mask[p]) continue;
    const int px = p % width;
    const int py = p / width;
    vote(px, py, +1);
    voted[p] = 1;

    int best_t = 0;
    std::int32_t best_votes = 0;
    for (int t = 0; t < nt; ++t) {
      const std::int32_t v = acc.at(t, acc.r_bin(px * trig.cos_t[t] + py * trig.sin_t[t]));
      if (v > best_votes) {
        best_votes = v;
        best_t = t;
      }
    }
    if (best_votes < params.votes_min) continue;

    // Walk along the line direction (-sin, cos) in fixed point on the minor axis.
    const double a = -trig.sin_t[best_t];
    const double b = trig.cos_t[best_t];
    const bool x_major = std::fabs(a) > std::fabs(b);
    long x0, y0, dx0, dy0;
    if (x_major) {
      x0 = px;
      dx0 = a > 0 ? 1 : -1;
      dy0 = std::lround(b * (1L << kShift) / std::fabs(a));
      y0 = (static_cast<long>(py) << kShift) + (1L << (kShift - 1));
    } else {
      y0 = py;
      dy0 = b > 0 ? 1 : -1;
      dx0 = std::lround(a * (1L << kShift) / std::fabs(b));
      x0 = (static_cast<long>(px) << kShift) + (1L << (kShift - 1));
    }
    auto to_pixel = [&](long x, long y, int& ix, int& iy) {
      if (x_major) {
        ix = static_cast<int>(x);
        iy = static_cast<int>(y >> kShift);
      } else {
        ix = static_cast<int>(x >> kShift);
        iy = static_cast<int>(y);
      }
    };

    int end_x[2] = {px, px};
    int end_y[2] = {py, py};
    for (int k = 0; k < 2; ++k) {
      long x = x0, y = y0;
      const long dx = k == 0 ? dx0 : -dx0;
      const long dy = k == 0 ? dy0 : -dy0;
      int gap = 0;
      for (;; x += dx, y += dy) {
        int ix, iy;
        to_pixel(x, y, ix, iy);
        if (ix < 0 || ix >= width || iy < 0 || iy >= height) break;
        if (mask[static_cast<std::size_t>(iy) * width + ix]) {
          gap = 0;
          end_x[k] = ix;
          end_y[k] = iy;
        } else if (++gap > max_gap) {
          break;
        }
      }
    }

    const bool good = std::hypot(end_x[1] - end_x[0], end_y[1] - end_y[0]) >= params.min_length;
    for (int k = 0; k < 2; ++k) {
      long x = x0, y = y0;
      const long dx = k == 0 ? dx0 : -dx0;
      const long dy = k == 0 ? dy0 : -dy0;
      for (;; x += dx, y += dy) {
        int ix, iy;
        to_pixel(x, y, ix, iy);
        if (ix < 0 || ix >= width || iy < 0 || iy >= height) break;
        const std::size_t i = static_cast<std::size_t>(iy) * width + ix;
        if (mask[i]) {
          if (good && voted[i]) {
            vote(ix, iy, -1);
            voted[i] = 0;
          }
          mask[i] = 0;
        }
        if (ix == end_x[k] && iy == end_y[k]) break;
      }
    }
    if (good) {
      lines.push_back({static_cast<double>(end_x[0]), static_cast<double>(end_y[0]),
                       static_cast<double>(end_x[1]), static_cast<double>(end_y[1])});
    }
  }
  return lines;
}

std::vector<LineSegment> dissect(std::span<const LineSegment> segments, double max_piece) {
  if (!(max_piece > 0.0)) throw Error(ErrorCode::InvalidParameter, "piece length must be positive");
  std::vector<LineSegment> out;
  for (const auto& s : segments) {
    const double len = s.length();
    const int pieces = std::max(1, static_cast<int>(std::ceil(len / max_piece - 1e-9)));
    for (int i = 0; i < pieces; ++i) {
      const double t0 = static_cast<double>(i) / pieces;
      const double t1 = static_cast<double>(i + 1) / pieces;
      out.push_back({s.x0 + t0 * (s.x1 - s.x0), s.y0 + t0 * (s.y1 - s.y0), s.x0 + t1 * (s.x1 - s.x0),
                     s.y0 + t1 * (s.y1 - s.y0)});
    }
  }
  return out;
}

PolarLine segment_to_polar(const LineSegment& s) {
  const double dx = s.x1 - s.x0;
  const double dy = s.y1 - s.y0;
  if (std::hypot(dx, dy) <= 0.0) throw Error(ErrorCode::DegenerateSegment, "zero-length segment");
  double theta = std::atan2(dx, -dy);  // angle of the normal (-dy, dx)
  if (theta < 0.0) theta += std::numbers::pi;
  if (theta >= std::numbers::pi) theta -= std::numbers::pi;
  return {theta, s.x0 * std::cos(theta) + s.y0 * std::sin(theta)};
}

std::pair<double, double> polar_to_slope_intercept(const PolarLine& l) {
  const double s = std::sin(l.theta);
  if (std::fabs(s) < 1e-9) throw Error(ErrorCode::VerticalLine, "sin(theta) ~ 0; use the polar form");
  return {-std::cos(l.theta) / s, l.r / s};
}

double segment_angle(const LineSegment& s) {
  const double dx = s.x1 - s.x0;
  const double dy = s.y1 - s.y0;
  if (std::hypot(dx, dy) <= 0.0) throw Error(ErrorCode::DegenerateSegment, "zero-length segment");
  return fold_degrees(rad_to_deg(std::atan2(dy, dx)));
}

}  // namespace curvelane

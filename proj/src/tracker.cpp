#include "curvelane/tracker.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <optional>
#include <tuple>

#include "curvelane/error.hpp"

namespace curvelane {

DominantAxis dominant_axis(std::span<const Point2> points) {
  if (points.empty()) return DominantAxis::Y;
  double xmin = points[0].x, xmax = xmin, ymin = points[0].y, ymax = ymin;
  for (const auto& p : points) {
    xmin = std::min(xmin, p.x);
    xmax = std::max(xmax, p.x);
    ymin = std::min(ymin, p.y);
    ymax = std::max(ymax, p.y);
  }
  return (ymax - ymin) >= (xmax - xmin) ? DominantAxis::Y : DominantAxis::X;
}

double polyline_length(std::span<const Point2> polyline) {
  double total = 0.0;
  for (std::size_t i = 1; i < polyline.size(); ++i) total += distance(polyline[i - 1], polyline[i]);
  return total;
}

bool is_strictly_monotonic(std::span<const Point2> polyline, DominantAxis axis) {
  for (std::size_t i = 1; i < polyline.size(); ++i)
    if (!(along(polyline[i], axis) > along(polyline[i - 1], axis))) return false;
  return true;
}

double interpolate_across(std::span<const Point2> polyline, DominantAxis axis, double key) {
  if (polyline.empty()) throw Error(ErrorCode::EmptyInput, "interpolate_across on empty polyline");
  if (key <= along(polyline.front(), axis)) return across(polyline.front(), axis);
  if (key >= along(polyline.back(), axis)) return across(polyline.back(), axis);
  auto it = std::lower_bound(polyline.begin(), polyline.end(), key,
                             [axis](const Point2& p, double k) { return along(p, axis) < k; });
  const Point2 b = *it;
  const Point2 a = *(it - 1);
  const double ka = along(a, axis), kb = along(b, axis);
  const double t = (key - ka) / (kb - ka);
  return across(a, axis) + t * (across(b, axis) - across(a, axis));
}

namespace {

Point2 make_point(double key, double cross, DominantAxis axis) {
  return axis == DominantAxis::Y ? Point2{cross, key} : Point2{key, cross};
}

double mean_across(const Lane& lane) {
  double s = 0.0;
  for (const auto& p : lane.polyline) s += across(p, lane.axis);
  return lane.polyline.empty() ? 0.0 : s / static_cast<double>(lane.polyline.size());
}

double median(std::vector<double> v) {
  std::sort(v.begin(), v.end());
  const std::size_t n = v.size();
  return n % 2 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
}

bool covers(const Lane& lane, double k0, double k1) {
  return lane.polyline.size() >= 2 && along(lane.polyline.front(), lane.axis) <= k0 &&
         along(lane.polyline.back(), lane.axis) >= k1;
}

// Points of `source` strictly between keys ka and kb, resampled every `step` along
// the axis and shifted by an offset that ramps linearly from off_a to off_b.
std::vector<Point2> splice(const Lane& source, DominantAxis axis, double ka, double kb, double off_a, double off_b,
                           double step) {
  std::vector<Point2> out;
  const int n = static_cast<int>(std::floor((kb - ka) / step));
  for (int j = 1; j <= n; ++j) {
    const double key = ka + j * step;
    if (key >= kb - 1e-9) break;
    const double t = (key - ka) / (kb - ka);
    const double cross = interpolate_across(source.polyline, axis, key) + off_a + t * (off_b - off_a);
    out.push_back(make_point(key, cross, axis));
  }
  return out;
}

std::vector<double> spacings(std::span<const Point2> pts) {
  std::vector<double> out;
  for (std::size_t k = 1; k < pts.size(); ++k) out.push_back(distance(pts[k - 1], pts[k]));
  return out;
}

// The gap rule shared by joining and filling.
bool bridgeable(Point2 a, Point2 b, DominantAxis axis, double med, double arc, const Lane& prev, double fraction) {
  const double gap = distance(a, b);
  return gap > 3.0 * med && gap - med <= fraction * arc && covers(prev, along(a, axis), along(b, axis));
}

// Joins consecutive current lanes that follow the same previous lane when the
// gap between them is short enough to bridge. The joined lane takes the previous lane's band so the usual
// matching pairs them.
LaneModel join_fragments(const LaneModel& current, const LaneModel& previous, const FillParams& params) {
  const std::size_t n = current.lanes.size();
  std::vector<long> guide(n, -1);
  for (std::size_t i = 0; i < n; ++i) {
    double best = params.match_distance;
    for (std::size_t j = 0; j < previous.lanes.size(); ++j) {
      if (previous.lanes[j].missed > 0) continue;
      const double d = lane_offset(current.lanes[i], previous.lanes[j]);
      if (d <= best) {
        best = d;
        guide[i] = static_cast<long>(j);
      }
    }
  }
  std::vector<std::optional<Lane>> slots(current.lanes.begin(), current.lanes.end());
  for (std::size_t j = 0; j < previous.lanes.size(); ++j) {
    const Lane& prev = previous.lanes[j];
    std::vector<std::size_t> group;
    for (std::size_t i = 0; i < n; ++i)
      if (guide[i] == static_cast<long>(j) && current.lanes[i].polyline.size() >= 2) group.push_back(i);
    if (group.size() < 2) continue;
    std::sort(group.begin(), group.end(), [&](std::size_t a, std::size_t b) {
      const auto& la = current.lanes[a];
      const auto& lb = current.lanes[b];
      return std::pair(along(la.polyline.front(), la.axis), a) < std::pair(along(lb.polyline.front(), lb.axis), b);
    });
    std::size_t head = group[0];
    for (std::size_t g = 1; g < group.size(); ++g) {
      Lane& merged = *slots[head];
      const Lane& next = current.lanes[group[g]];
      const DominantAxis axis = merged.axis;
      const Point2 a = merged.polyline.back(), b = next.polyline.front();
      bool join = along(b, axis) > along(a, axis);
      if (join) {
        std::vector<Point2> joined = merged.polyline;
        joined.insert(joined.end(), next.polyline.begin(), next.polyline.end());
        // A separation within the usual spacing needs no bridge, only the join.
        const double med = median(spacings(joined));
        join = distance(a, b) - med <= params.max_gap_fraction * polyline_length(joined) &&
               covers(prev, along(a, axis), along(b, axis));
      }
      if (!join) {
        head = group[g];
        continue;
      }
      merged.polyline.insert(merged.polyline.end(), next.polyline.begin(), next.polyline.end());
      merged.tangents.insert(merged.tangents.end(), next.tangents.begin(), next.tangents.end());
      merged.stats.vote += next.stats.vote;
      merged.stats.mass += next.stats.mass;
      merged.fragments += next.fragments;
      merged.band = prev.band;
      slots[group[g]].reset();
    }
  }
  LaneModel out;
  out.frame_index = current.frame_index;
  for (auto& slot : slots)
    if (slot) out.lanes.push_back(std::move(*slot));
  return out;
}

}  // namespace

double lane_offset(const Lane& lane, const Lane& reference) {
  constexpr double inf = std::numeric_limits<double>::infinity();
  if (reference.polyline.size() < 2 || lane.axis != reference.axis) return inf;
  const double k0 = along(reference.polyline.front(), reference.axis);
  const double k1 = along(reference.polyline.back(), reference.axis);
  double total = 0.0;
  int count = 0;
  for (const auto& p : lane.polyline) {
    const double key = along(p, lane.axis);
    if (key < k0 || key > k1) continue;
    total += std::abs(across(p, lane.axis) - interpolate_across(reference.polyline, lane.axis, key));
    ++count;
  }
  return count >= 2 ? total / count : inf;
}

TextureDescriptor texture_descriptor(const Image& gray, int tile) {
  if (gray.channels != 1) throw Error(ErrorCode::ChannelMismatch, "texture_descriptor expects one channel");
  if (tile < 4) throw Error(ErrorCode::InvalidParameter, "texture tile must be at least 4");
  if (tile > std::min(gray.width, gray.height))
    throw Error(ErrorCode::TileTooLarge, "texture tile larger than the image");
  TextureDescriptor d;
  d.tile = tile;
  d.cols = (gray.width + tile - 1) / tile;
  d.rows = (gray.height + tile - 1) / tile;
  d.mean.assign(static_cast<std::size_t>(d.cols * d.rows), 0.0);
  d.variance.assign(d.mean.size(), 0.0);
  for (int ty = 0; ty < d.rows; ++ty) {
    for (int tx = 0; tx < d.cols; ++tx) {
      const int x0 = tx * tile, y0 = ty * tile;
      const int x1 = std::min(gray.width, x0 + tile), y1 = std::min(gray.height, y0 + tile);
      double s = 0.0, s2 = 0.0;
      for (int y = y0; y < y1; ++y) {
        for (int x = x0; x < x1; ++x) {
          const double v = gray.at(x, y);
          s += v;
          s2 += v * v;
        }
      }
      const double n = static_cast<double>((x1 - x0) * (y1 - y0));
      const double m = s / n;
      const std::size_t idx = static_cast<std::size_t>(ty * d.cols + tx);
      d.mean[idx] = m;
      d.variance[idx] = std::max(0.0, s2 / n - m * m);
    }
  }
  return d;
}

double texture_distance(const TextureDescriptor& a, const TextureDescriptor& b) {
  if (a.cols != b.cols || a.rows != b.rows || a.mean.size() != b.mean.size())
    throw Error(ErrorCode::ShapeMismatch, "texture descriptors have different grids");
  if (a.mean.empty()) return 0.0;
  constexpr double eps = 1e-6;
  double total = 0.0;
  for (std::size_t i = 0; i < a.mean.size(); ++i) {
    total += std::abs(a.mean[i] - b.mean[i]) / (std::abs(a.mean[i]) + std::abs(b.mean[i]) + eps);
    total += std::abs(a.variance[i] - b.variance[i]) / (a.variance[i] + b.variance[i] + eps);
  }
  return total / static_cast<double>(a.mean.size());
}

std::vector<std::pair<std::size_t, std::size_t>> match_lanes(const LaneModel& current, const LaneModel& previous,
                                                             double max_distance) {
  // (band differs, distance, current, previous): same-band pairs go first.
  std::vector<std::tuple<bool, double, std::size_t, std::size_t>> candidates;
  for (std::size_t i = 0; i < current.lanes.size(); ++i) {
    const Lane& c = current.lanes[i];
    if (c.polyline.empty()) continue;
    for (std::size_t j = 0; j < previous.lanes.size(); ++j) {
      const Lane& p = previous.lanes[j];
      if (p.polyline.empty() || p.axis != c.axis) continue;
      double d = lane_offset(c, p);
      if (!std::isfinite(d)) d = std::abs(mean_across(c) - mean_across(p));
      if (d <= max_distance) candidates.emplace_back(p.band != c.band, d, i, j);
    }
  }
  std::sort(candidates.begin(), candidates.end());
  std::vector<bool> used_c(current.lanes.size(), false), used_p(previous.lanes.size(), false);
  std::vector<std::pair<std::size_t, std::size_t>> pairs;
  for (const auto& [other_band, d, i, j] : candidates) {
    if (used_c[i] || used_p[j]) continue;
    used_c[i] = used_p[j] = true;
    pairs.emplace_back(i, j);
  }
  std::sort(pairs.begin(), pairs.end());
  return pairs;
}

FillResult fill_discontinuities(const LaneModel& current, const LaneModel& previous, const FillParams& params) {
  if (previous.frame_index != current.frame_index - 1)
    throw Error(ErrorCode::FrameOrderViolation, "previous model is not from the preceding frame");
  if (!(params.max_gap_fraction >= 0.0) || params.persistence_limit < 0 || !(params.match_distance >= 0.0))
    throw Error(ErrorCode::InvalidParameter, "bad fill parameters");

  FillResult result;
  result.model.frame_index = current.frame_index;
  const LaneModel joined = join_fragments(current, previous, params);
  const auto pairs = match_lanes(joined, previous, params.match_distance);
  std::vector<long> partner(joined.lanes.size(), -1);
  std::vector<bool> prev_used(previous.lanes.size(), false);
  for (const auto& [i, j] : pairs) {
    partner[i] = static_cast<long>(j);
    prev_used[j] = true;
  }

  for (std::size_t i = 0; i < joined.lanes.size(); ++i) {
    Lane lane = joined.lanes[i];
    lane.missed = 0;
    const auto& pts = joined.lanes[i].polyline;
    if (partner[i] >= 0 && pts.size() >= 3) {
      const Lane& prev = previous.lanes[static_cast<std::size_t>(partner[i])];
      const std::vector<double> spacing = spacings(pts);
      std::vector<double> key_spacing;
      for (std::size_t k = 1; k < pts.size(); ++k)
        key_spacing.push_back(along(pts[k], lane.axis) - along(pts[k - 1], lane.axis));
      const double med = median(spacing);
      const double med_key = median(key_spacing);
      const double arc = polyline_length(pts);
      if (med > 0.0 && med_key > 0.0) {
        std::vector<Point2> out{pts.front()};
        for (std::size_t k = 1; k < pts.size(); ++k) {
          const double ka = along(pts[k - 1], lane.axis), kb = along(pts[k], lane.axis);
          if (bridgeable(pts[k - 1], pts[k], lane.axis, med, arc, prev, params.max_gap_fraction)) {
            const double off_a = across(pts[k - 1], lane.axis) - interpolate_across(prev.polyline, lane.axis, ka);
            const double off_b = across(pts[k], lane.axis) - interpolate_across(prev.polyline, lane.axis, kb);
            const auto bridge = splice(prev, lane.axis, ka, kb, off_a, off_b, med_key);
            if (!bridge.empty()) {
              out.insert(out.end(), bridge.begin(), bridge.end());
              ++result.gaps_filled;
            }
          }
          out.push_back(pts[k]);
        }
        lane.polyline = std::move(out);
      }
    }
    result.model.lanes.push_back(std::move(lane));
  }

  for (std::size_t j = 0; j < previous.lanes.size(); ++j) {
    if (prev_used[j]) continue;
    Lane carried = previous.lanes[j];
    carried.missed += 1;
    if (carried.missed <= params.persistence_limit) result.model.lanes.push_back(std::move(carried));
  }
  return result;
}

LaneModel smooth_model(const LaneModel& current, const LaneModel& previous, double alpha, double match_distance) {
  if (!(alpha >= 0.0 && alpha <= 1.0)) throw Error(ErrorCode::InvalidParameter, "smoothing alpha outside [0,1]");
  LaneModel out = current;
  for (const auto& [i, j] : match_lanes(current, previous, match_distance)) {
    Lane& lane = out.lanes[i];
    const Lane& prev = previous.lanes[j];
    if (lane.missed > 0 || prev.polyline.size() < 2) continue;
    const double k0 = along(prev.polyline.front(), prev.axis), k1 = along(prev.polyline.back(), prev.axis);
    for (auto& p : lane.polyline) {
      const double key = along(p, lane.axis);
      if (key < k0 || key > k1) continue;
      const double cross = alpha * across(p, lane.axis) +
                           (1.0 - alpha) * interpolate_across(prev.polyline, lane.axis, key);
      p = make_point(key, cross, lane.axis);
    }
  }
  return out;
}

}  // namespace curvelane

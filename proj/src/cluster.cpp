#include "curvelane/cluster.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <tuple>

#include "curvelane/error.hpp"

namespace curvelane {

void ClusterParams::validate() const {
  if (!(centroid_radius > 0.0) || !(angle_tolerance > 0.0) || votes_min <= 0) {
    throw Error(ErrorCode::InvalidParameter, "cluster parameters must be positive");
  }
}

namespace {

class DisjointSet {
 public:
  explicit DisjointSet(std::size_t n) : parent_(n) { std::iota(parent_.begin(), parent_.end(), 0); }

  std::size_t find(std::size_t i) {
    while (parent_[i] != i) {
      parent_[i] = parent_[parent_[i]];
      i = parent_[i];
    }
    return i;
  }

  void unite(std::size_t a, std::size_t b) {
    a = find(a);
    b = find(b);
    if (a != b) parent_[std::max(a, b)] = std::min(a, b);
  }

 private:
  std::vector<std::size_t> parent_;
};

auto item_key(const ClusterItem& it) {
  return std::make_tuple(it.centroid.x, it.centroid.y, it.centroid.mass, it.segment.x0, it.segment.y0,
                         it.segment.x1, it.segment.y1);
}

CurveCluster summarise(std::vector<ClusterItem> members) {
  std::sort(members.begin(), members.end(),
            [](const ClusterItem& a, const ClusterItem& b) { return item_key(a) < item_key(b); });
  CurveCluster c;
  double sx = 0.0, sy = 0.0, mass = 0.0;
  std::vector<double> angles;
  for (const auto& m : members) {
    sx += m.centroid.mass * m.centroid.x;
    sy += m.centroid.mass * m.centroid.y;
    mass += m.centroid.mass;
    angles.push_back(segment_angle(m.segment));
  }
  c.vote = static_cast<int>(members.size());
  c.mass = mass;
  if (mass > 0.0) {
    c.representative = {sx / mass, sy / mass, mass};
  } else {
    double ax = 0.0, ay = 0.0;
    for (const auto& m : members) {
      ax += m.centroid.x / c.vote;
      ay += m.centroid.y / c.vote;
    }
    c.representative = {ax, ay, 0.0};
  }
  c.representative_angle = axial_mean(angles);
  c.members = std::move(members);
  return c;
}

bool cluster_order(const CurveCluster& a, const CurveCluster& b) {
  if (a.vote != b.vote) return a.vote > b.vote;
  if (a.mass != b.mass) return a.mass > b.mass;
  if (a.representative.x != b.representative.x) return a.representative.x < b.representative.x;
  if (a.representative.y != b.representative.y) return a.representative.y < b.representative.y;
  return item_key(a.members.front()) < item_key(b.members.front());
}

}  // namespace

std::vector<CurveCluster> cluster_lines(std::span<const ClusterItem> items, const ClusterParams& p) {
  p.validate();
  if (items.empty()) throw Error(ErrorCode::EmptyInput, "nothing to cluster");
  const std::size_t n = items.size();
  std::vector<double> angles(n);
  for (std::size_t i = 0; i < n; ++i) angles[i] = segment_angle(items[i].segment);

  // Sweep in x so only nearby pairs are tested.
  std::vector<std::size_t> by_x(n);
  std::iota(by_x.begin(), by_x.end(), 0);
  std::sort(by_x.begin(), by_x.end(),
            [&](std::size_t a, std::size_t b) { return items[a].centroid.x < items[b].centroid.x; });
  DisjointSet sets(n);
  for (std::size_t a = 0; a < n; ++a) {
    const auto& ca = items[by_x[a]].centroid;
    for (std::size_t b = a + 1; b < n; ++b) {
      const auto& cb = items[by_x[b]].centroid;
      if (cb.x - ca.x > p.centroid_radius) break;
      if (std::hypot(cb.x - ca.x, cb.y - ca.y) > p.centroid_radius) continue;
      if (axial_difference(angles[by_x[a]], angles[by_x[b]]) > p.angle_tolerance) continue;
      sets.unite(by_x[a], by_x[b]);
    }
  }

  std::vector<std::vector<ClusterItem>> groups(n);
  for (std::size_t i = 0; i < n; ++i) groups[sets.find(i)].push_back(items[i]);
  std::vector<CurveCluster> clusters;
  for (auto& g : groups) {
    if (!g.empty()) clusters.push_back(summarise(std::move(g)));
  }
  std::sort(clusters.begin(), clusters.end(), cluster_order);
  return clusters;
}

std::vector<CurveCluster> threshold_votes(std::span<const CurveCluster> clusters, int votes_min) {
  std::vector<CurveCluster> kept;
  for (const auto& c : clusters) {
    if (c.vote >= votes_min) kept.push_back(c);
  }
  return kept;
}

const CurveCluster& select_heaviest(std::span<const CurveCluster> clusters) {
  if (clusters.empty()) throw Error(ErrorCode::EmptyInput, "no clusters to choose from");
  const CurveCluster* best = &clusters[0];
  for (const auto& c : clusters.subspan(1)) {
    if (c.mass != best->mass) {
      if (c.mass > best->mass) best = &c;
    } else if (c.vote != best->vote) {
      if (c.vote > best->vote) best = &c;
    } else if (c.representative.x < best->representative.x) {
      best = &c;
    }
  }
  return *best;
}

}  // namespace curvelane

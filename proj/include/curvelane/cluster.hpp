#pragma once

#include <span>
#include <vector>

#include "curvelane/curvemath.hpp"
#include "curvelane/hough.hpp"

namespace curvelane {

struct ClusterParams {
  double centroid_radius = 12.0;  // pixels
  double angle_tolerance = 10.0;  // degrees
  int votes_min = 4;

  void validate() const;
};

struct ClusterItem {
  LineSegment segment;
  WeightedPoint centroid;
  int side = 0;  // edge_side of the segment, 0 when unknown
};

struct CurveCluster {
  std::vector<ClusterItem> members;
  int vote = 0;
  WeightedPoint representative;   // mass-weighted mean of member centroids
  double representative_angle = 0.0;
  double mass = 0.0;
};

// Single-linkage grouping: two items link when their centroids are within
// centroid_radius and their segment angles within angle_tolerance (mod 180).
// Clusters come back ordered by vote desc, mass desc, representative x asc.
std::vector<CurveCluster> cluster_lines(std::span<const ClusterItem> items, const ClusterParams& p);

std::vector<CurveCluster> threshold_votes(std::span<const CurveCluster> clusters, int votes_min);

// The cluster with the greatest mass ("thickest" boundary); ties go to the higher
// vote, then the smaller representative x.
const CurveCluster& select_heaviest(std::span<const CurveCluster> clusters);

}  // namespace curvelane

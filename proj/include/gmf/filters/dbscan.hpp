#pragma once

#include <cstddef>
#include <vector>

#include "gmf/types.hpp"

namespace gmf {

struct ClusterAssignment {
  static constexpr int kNoise = -1;

  /// Cluster id per point (0-based, contiguous) or kNoise.
  std::vector<int> labels;
  int num_clusters = 0;

  [[nodiscard]] std::size_t noise_count() const;
};

/// Density-based clustering of the columns of `points`.
///
/// A point is core when at least `min_pts` points (itself included) lie within
/// Euclidean distance `eps`. Clusters grow from core points in input order;
/// a border point joins the first cluster that reaches it. The result is a
/// deterministic function of the input order.
ClusterAssignment dbscan(const Matrix& points, double eps, int min_pts);

}  // namespace gmf

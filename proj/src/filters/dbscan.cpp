#include "gmf/filters/dbscan.hpp"

#include <algorithm>

#include "gmf/errors.hpp"

namespace gmf {
namespace {

constexpr int kUnvisited = -2;

void region_query(const Matrix& points, Eigen::Index center, double eps_sq, std::vector<Eigen::Index>& out) {
  out.clear();
  const Vector dist = (points.colwise() - points.col(center)).colwise().squaredNorm().transpose();
  for (Eigen::Index j = 0; j < dist.size(); ++j) {
    if (dist[j] <= eps_sq) {
      out.push_back(j);
    }
  }
}

}  // namespace

std::size_t ClusterAssignment::noise_count() const {
  return static_cast<std::size_t>(std::count(labels.begin(), labels.end(), kNoise));
}

ClusterAssignment dbscan(const Matrix& points, double eps, int min_pts) {
  if (!(eps > 0.0)) {
    throw DomainError("dbscan: eps must be positive");
  }
  if (min_pts < 1) {
    throw DomainError("dbscan: min_pts must be at least 1");
  }
  const Eigen::Index n = points.cols();
  const double eps_sq = eps * eps;
  ClusterAssignment out;
  out.labels.assign(static_cast<std::size_t>(n), kUnvisited);

  std::vector<Eigen::Index> neighbors;
  std::vector<Eigen::Index> frontier;
  for (Eigen::Index p = 0; p < n; ++p) {
    if (out.labels[static_cast<std::size_t>(p)] != kUnvisited) {
      continue;
    }
    region_query(points, p, eps_sq, neighbors);
    if (static_cast<int>(neighbors.size()) < min_pts) {
      out.labels[static_cast<std::size_t>(p)] = ClusterAssignment::kNoise;
      continue;
    }
    const int cluster = out.num_clusters++;
    out.labels[static_cast<std::size_t>(p)] = cluster;
    frontier.clear();
    // Claims the neighbors of a core point. Points are labeled when queued,
    // so each one is queried at most once.
    const auto claim = [&](const std::vector<Eigen::Index>& around) {
      for (const Eigen::Index r : around) {
        int& label = out.labels[static_cast<std::size_t>(r)];
        if (label == ClusterAssignment::kNoise) {
          label = cluster;  // border point, already known not to be core
        } else if (label == kUnvisited) {
          label = cluster;
          frontier.push_back(r);
        }
      }
    };
    claim(neighbors);
    for (std::size_t k = 0; k < frontier.size(); ++k) {
      region_query(points, frontier[k], eps_sq, neighbors);
      if (static_cast<int>(neighbors.size()) >= min_pts) {
        claim(neighbors);
      }
    }
  }
  return out;
}

}  // namespace gmf

// SPDX-License-Identifier: Apache-2.0

#include "unlidar/voxel.hpp"

#include <algorithm>

#include "unlidar/error.hpp"

namespace unlidar {

VoxelGrid::VoxelGrid(double edge) : edge_(edge) {
  if (!(edge > 0.0) || !std::isfinite(edge)) {
    throw Error(ErrorCode::NonPositiveEdge, "voxel edge must be positive and finite");
  }
}

VoxelGrid VoxelGrid::from_keys(double edge, std::vector<VoxelKey> keys) {
  VoxelGrid g(edge);
  std::sort(keys.begin(), keys.end());
  keys.erase(std::unique(keys.begin(), keys.end()), keys.end());
  g.occupied_ = std::move(keys);
  return g;
}

VoxelGrid voxelize(const PointSet& ps, double edge) {
  VoxelGrid probe(edge);
  std::vector<VoxelKey> keys;
  keys.reserve(ps.points.size());
  for (const Point3T& p : ps.points) keys.push_back(voxel_key(p.position, edge));
  return VoxelGrid::from_keys(edge, std::move(keys));
}

double voxel_volume(const VoxelGrid& g) {
  return static_cast<double>(g.size()) * g.edge() * g.edge() * g.edge();
}

double density(const PointSet& cluster, double edge) {
  if (cluster.empty()) throw Error(ErrorCode::EmptyCluster, "density of an empty point set is undefined");
  return static_cast<double>(cluster.cardinality()) / voxel_volume(voxelize(cluster, edge));
}

double voxel_iou(const VoxelGrid& a, const VoxelGrid& b) {
  if (a.edge() != b.edge()) throw Error(ErrorCode::EdgeMismatch, "voxel grids use different edges");
  if (a.empty() && b.empty()) throw Error(ErrorCode::BothEmpty, "IoU of two empty grids is undefined");
  const auto& x = a.occupied();
  const auto& y = b.occupied();
  std::size_t inter = 0;
  for (auto i = x.begin(), j = y.begin(); i != x.end() && j != y.end();) {
    if (*i < *j) {
      ++i;
    } else if (*j < *i) {
      ++j;
    } else {
      ++inter;
      ++i;
      ++j;
    }
  }
  const std::size_t uni = x.size() + y.size() - inter;
  return static_cast<double>(inter) / static_cast<double>(uni);
}

double relative_density(double local, double global) {
  if (!(global > 0.0)) throw Error(ErrorCode::ZeroGlobalDensity, "global density must be positive");
  return local / global;
}

}  // namespace unlidar

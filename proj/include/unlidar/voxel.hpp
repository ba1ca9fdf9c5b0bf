// SPDX-License-Identifier: Apache-2.0
//
// Origin-anchored voxel lattice and cluster statistics: occupied volume,
// point density, voxel IoU and relative density.

#pragma once

#include <array>
#include <cmath>
#include <cstdint>
#include <vector>

#include <Eigen/Core>

#include "unlidar/types.hpp"

namespace unlidar {

using VoxelKey = std::array<std::int64_t, 3>;

/// Voxel (0,0,0) spans [0, edge)^3.
template <typename Derived>
VoxelKey voxel_key(const Eigen::MatrixBase<Derived>& p, typename Derived::Scalar edge) {
  EIGEN_STATIC_ASSERT_VECTOR_SPECIFIC_SIZE(Derived, 3);
  return {static_cast<std::int64_t>(std::floor(p(0) / edge)),
          static_cast<std::int64_t>(std::floor(p(1) / edge)),
          static_cast<std::int64_t>(std::floor(p(2) / edge))};
}

class VoxelGrid {
 public:
  /// Throws NonPositiveEdge.
  explicit VoxelGrid(double edge);

  double edge() const noexcept { return edge_; }
  /// Sorted, duplicate-free.
  const std::vector<VoxelKey>& occupied() const noexcept { return occupied_; }
  std::size_t size() const noexcept { return occupied_.size(); }
  bool empty() const noexcept { return occupied_.empty(); }

  /// Builds from arbitrary keys (duplicates removed).
  static VoxelGrid from_keys(double edge, std::vector<VoxelKey> keys);

 private:
  double edge_;
  std::vector<VoxelKey> occupied_;
};

VoxelGrid voxelize(const PointSet& ps, double edge);

/// |occupied| * edge^3 in cubic meters.
double voxel_volume(const VoxelGrid& g);

/// Points per cubic meter of occupied voxel volume. Throws EmptyCluster.
double density(const PointSet& cluster, double edge);

/// Throws EdgeMismatch, BothEmpty.
double voxel_iou(const VoxelGrid& a, const VoxelGrid& b);

/// local / global. Throws ZeroGlobalDensity.
double relative_density(double local, double global);

}  // namespace unlidar

// SPDX-License-Identifier: Apache-2.0
//
// DBSCAN over superimposed point sets.

#pragma once

#include <cstddef>
#include <vector>

#include "unlidar/types.hpp"

namespace unlidar {

struct DbscanParams {
  double eps = 2.0;  ///< neighborhood radius (m), closed ball
  int min_pts = 4;   ///< neighborhood size threshold, counting the query point

  void validate() const;
};

/// Per-point cluster labels. Cluster ids are canonical: they increase with
/// the lowest point index of each cluster.
struct ClusterLabeling {
  static constexpr int kNoise = -1;

  std::vector<int> labels;
  std::vector<bool> core;
  int cluster_count = 0;
  WindowSpec source_window;

  std::size_t noise_count() const;
  /// Point indices of every cluster, ordered by id.
  std::vector<std::vector<std::size_t>> members() const;
};

/// Grid-indexed DBSCAN. A border point reachable from several
/// clusters joins the one owning its lowest-index core neighbor.
/// Throws EmptyInput.
ClusterLabeling dbscan(const PointSet& ps, const DbscanParams& params);

/// Throws UnknownClusterId.
PointSet cluster_members(const ClusterLabeling& cl, const PointSet& ps, int k);

}  // namespace unlidar

// SPDX-License-Identifier: Apache-2.0

#include "unlidar/clustering.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <numeric>
#include <string>
#include <unordered_map>

#include "unlidar/error.hpp"

namespace unlidar {

void DbscanParams::validate() const {
  if (!(eps > 0.0) || !std::isfinite(eps)) throw Error(ErrorCode::InvalidConfig, "dbscan eps must be > 0");
  if (min_pts < 1) throw Error(ErrorCode::InvalidConfig, "dbscan min_pts must be >= 1");
}

std::size_t ClusterLabeling::noise_count() const {
  return static_cast<std::size_t>(std::count(labels.begin(), labels.end(), kNoise));
}

std::vector<std::vector<std::size_t>> ClusterLabeling::members() const {
  std::vector<std::vector<std::size_t>> out(static_cast<std::size_t>(cluster_count));
  for (std::size_t i = 0; i < labels.size(); ++i) {
    if (labels[i] != kNoise) out[static_cast<std::size_t>(labels[i])].push_back(i);
  }
  return out;
}

namespace {

struct CellKey {
  std::int64_t x, y, z;
  bool operator==(const CellKey&) const = default;
};

struct CellKeyHash {
  std::size_t operator()(const CellKey& k) const noexcept {
    std::uint64_t h = static_cast<std::uint64_t>(k.x) * 0x9E3779B97F4A7C15ull;
    h ^= static_cast<std::uint64_t>(k.y) * 0xC2B2AE3D27D4EB4Full + (h << 6) + (h >> 2);
    h ^= static_cast<std::uint64_t>(k.z) * 0x165667B19E3779F9ull + (h << 6) + (h >> 2);
    return static_cast<std::size_t>(h);
  }
};

// Cells of side slightly below eps/sqrt(3): any two points sharing a cell are
// within eps, and every eps-neighbor lies within two cells along each axis.
class GridIndex {
 public:
  GridIndex(const std::vector<Point3T>& pts, double eps) : pts_(pts), cell_(eps / std::sqrt(3.0) * (1.0 - 1e-9)) {
    const std::size_t n = pts.size();
    std::vector<CellKey> keys(n);
    for (std::size_t i = 0; i < n; ++i) keys[i] = key_of(pts[i].position);
    order_.resize(n);
    std::iota(order_.begin(), order_.end(), std::size_t{0});
    std::sort(order_.begin(), order_.end(), [&keys](std::size_t a, std::size_t b) {
      const CellKey& ka = keys[a];
      const CellKey& kb = keys[b];
      if (ka.x != kb.x) return ka.x < kb.x;
      if (ka.y != kb.y) return ka.y < kb.y;
      if (ka.z != kb.z) return ka.z < kb.z;
      return a < b;
    });

    std::unordered_map<CellKey, std::size_t, CellKeyHash> lookup;
    cell_of_.resize(n);
    for (std::size_t b = 0; b < n;) {
      std::size_t e = b + 1;
      while (e < n && keys[order_[e]] == keys[order_[b]]) ++e;
      lookup.emplace(keys[order_[b]], cells_.size());
      for (std::size_t o = b; o < e; ++o) cell_of_[order_[o]] = cells_.size();
      cells_.push_back(Cell{b, e, {}});
      b = e;
    }
    std::size_t c = 0;
    for (std::size_t b = 0; b < n; ++c) {
      const CellKey& k = keys[order_[b]];
      for (std::int64_t dx = -2; dx <= 2; ++dx) {
        for (std::int64_t dy = -2; dy <= 2; ++dy) {
          for (std::int64_t dz = -2; dz <= 2; ++dz) {
            auto it = lookup.find(CellKey{k.x + dx, k.y + dy, k.z + dz});
            if (it != lookup.end()) cells_[c].neighbors.push_back(it->second);
          }
        }
      }
      b = cells_[c].end;
    }
  }

  std::size_t cell_count() const noexcept { return cells_.size(); }
  std::size_t cell_of(std::size_t i) const noexcept { return cell_of_[i]; }
  std::size_t cell_size(std::size_t c) const noexcept { return cells_[c].end - cells_[c].begin; }
  const std::vector<std::size_t>& neighbor_cells(std::size_t c) const noexcept { return cells_[c].neighbors; }

  /// Point indices of cell c, ascending.
  template <typename Fn>
  void for_each_in_cell(std::size_t c, Fn&& fn) const {
    for (std::size_t o = cells_[c].begin; o < cells_[c].end; ++o) {
      if (!fn(order_[o])) return;
    }
  }

  /// Calls fn(j) for every j within the closed eps-ball of point i
  /// (including i). fn returns false to stop early.
  template <typename Fn>
  void for_each_neighbor(std::size_t i, double eps2, Fn&& fn) const {
    const Vector3& p = pts_[i].position;
    for (std::size_t c : cells_[cell_of_[i]].neighbors) {
      for (std::size_t o = cells_[c].begin; o < cells_[c].end; ++o) {
        const std::size_t j = order_[o];
        if ((pts_[j].position - p).squaredNorm() <= eps2) {
          if (!fn(j)) return;
        }
      }
    }
  }

 private:
  struct Cell {
    std::size_t begin, end;
    std::vector<std::size_t> neighbors;  // includes the cell itself
  };

  CellKey key_of(const Vector3& p) const {
    return {static_cast<std::int64_t>(std::floor(p.x() / cell_)),
            static_cast<std::int64_t>(std::floor(p.y() / cell_)),
            static_cast<std::int64_t>(std::floor(p.z() / cell_))};
  }

  const std::vector<Point3T>& pts_;
  double cell_;
  std::vector<std::size_t> order_;
  std::vector<std::size_t> cell_of_;
  std::vector<Cell> cells_;
};

class DisjointSet {
 public:
  explicit DisjointSet(std::size_t n) : parent_(n) { std::iota(parent_.begin(), parent_.end(), std::size_t{0}); }

  std::size_t find(std::size_t x) {
    while (parent_[x] != x) {
      parent_[x] = parent_[parent_[x]];
      x = parent_[x];
    }
    return x;
  }

  void unite(std::size_t a, std::size_t b) {
    a = find(a);
    b = find(b);
    if (a == b) return;
    if (b < a) std::swap(a, b);
    parent_[b] = a;
  }

 private:
  std::vector<std::size_t> parent_;
};

}  // namespace

ClusterLabeling dbscan(const PointSet& ps, const DbscanParams& params) {
  params.validate();
  if (ps.empty()) throw Error(ErrorCode::EmptyInput, "dbscan on an empty point set");

  const auto& pts = ps.points;
  const std::size_t n = pts.size();
  const double eps2 = params.eps * params.eps;
  const auto min_pts = static_cast<std::size_t>(params.min_pts);
  const GridIndex grid(pts, params.eps);

  ClusterLabeling cl;
  cl.core.assign(n, false);
  for (std::size_t i = 0; i < n; ++i) {
    if (grid.cell_size(grid.cell_of(i)) >= min_pts) {
      cl.core[i] = true;
      continue;
    }
    std::size_t count = 0;
    grid.for_each_neighbor(i, eps2, [&](std::size_t) { return ++count < min_pts; });
    cl.core[i] = count >= min_pts;
  }

  // Core points of one cell are pairwise within eps; two cells are merged as
  // soon as one cross pair of core points is.
  constexpr std::size_t kNone = std::numeric_limits<std::size_t>::max();
  DisjointSet dsu(n);
  std::vector<std::size_t> cell_rep(grid.cell_count(), kNone);
  for (std::size_t c = 0; c < grid.cell_count(); ++c) {
    grid.for_each_in_cell(c, [&](std::size_t i) {
      if (!cl.core[i]) return true;
      if (cell_rep[c] == kNone) cell_rep[c] = i;
      else dsu.unite(cell_rep[c], i);
      return true;
    });
  }
  for (std::size_t c = 0; c < grid.cell_count(); ++c) {
    if (cell_rep[c] == kNone) continue;
    for (std::size_t d : grid.neighbor_cells(c)) {
      if (d <= c || cell_rep[d] == kNone) continue;
      if (dsu.find(cell_rep[c]) == dsu.find(cell_rep[d])) continue;
      bool linked = false;
      grid.for_each_in_cell(c, [&](std::size_t i) {
        if (!cl.core[i]) return true;
        const Vector3& p = pts[i].position;
        grid.for_each_in_cell(d, [&](std::size_t j) {
          if (cl.core[j] && (pts[j].position - p).squaredNorm() <= eps2) linked = true;
          return !linked;
        });
        return !linked;
      });
      if (linked) dsu.unite(cell_rep[c], cell_rep[d]);
    }
  }

  std::vector<std::size_t> root(n, kNone);
  for (std::size_t i = 0; i < n; ++i) {
    if (cl.core[i]) {
      root[i] = dsu.find(i);
      continue;
    }
    std::size_t claimant = kNone;
    grid.for_each_neighbor(i, eps2, [&](std::size_t j) {
      if (cl.core[j] && j < claimant) claimant = j;
      return true;
    });
    if (claimant != kNone) root[i] = dsu.find(claimant);
  }

  // Canonical ids: first appearance in index order.
  std::unordered_map<std::size_t, int> id_of_root;
  cl.labels.assign(n, ClusterLabeling::kNoise);
  for (std::size_t i = 0; i < n; ++i) {
    if (root[i] == kNone) continue;
    auto [it, inserted] = id_of_root.try_emplace(root[i], cl.cluster_count);
    if (inserted) ++cl.cluster_count;
    cl.labels[i] = it->second;
  }
  if (!pts.empty()) {
    auto [lo, hi] = std::minmax_element(pts.begin(), pts.end(), [](const Point3T& a, const Point3T& b) {
      return a.frame_index < b.frame_index;
    });
    cl.source_window = {lo->frame_index, hi->frame_index};
  }
  return cl;
}

PointSet cluster_members(const ClusterLabeling& cl, const PointSet& ps, int k) {
  if (k < 0 || k >= cl.cluster_count) {
    throw Error(ErrorCode::UnknownClusterId, "cluster " + std::to_string(k) + " not in 0.." +
                                                 std::to_string(cl.cluster_count - 1));
  }
  if (cl.labels.size() != ps.points.size()) {
    throw Error(ErrorCode::LabelingMismatch, "labeling size differs from point set size");
  }
  PointSet out;
  for (std::size_t i = 0; i < ps.points.size(); ++i) {
    if (cl.labels[i] == k) out.points.push_back(ps.points[i]);
  }
  return out;
}

}  // namespace unlidar

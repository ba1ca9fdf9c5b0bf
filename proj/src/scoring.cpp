// SPDX-License-Identifier: Apache-2.0

#include "unlidar/scoring.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>

#include "unlidar/error.hpp"
#include "unlidar/pointcloud.hpp"
#include "unlidar/voxel.hpp"

namespace unlidar {

PairSchedule parse_pair_schedule(const std::string& name) {
  if (name == "consecutive") return PairSchedule::Consecutive;
  if (name == "all_pairs") return PairSchedule::AllPairs;
  if (name == "endpoints") return PairSchedule::Endpoints;
  throw Error(ErrorCode::InvalidConfig, "unknown pair_schedule '" + name + "'");
}

std::string to_string(PairSchedule s) {
  switch (s) {
    case PairSchedule::Consecutive: return "consecutive";
    case PairSchedule::AllPairs: return "all_pairs";
    case PairSchedule::Endpoints: return "endpoints";
  }
  return "consecutive";
}

void ScoringParams::validate() const {
  if (!(lambda >= 0.0) || !std::isfinite(lambda)) throw Error(ErrorCode::InvalidConfig, "lambda must be >= 0");
  if (!(iou_floor > 0.0 && iou_floor <= 1.0)) throw Error(ErrorCode::InvalidConfig, "iou_floor must be in (0, 1]");
  if (window_len < 2) throw Error(ErrorCode::InvalidConfig, "window_len must be >= 2");
  if (min_frames < 1) throw Error(ErrorCode::InvalidConfig, "min_frames must be >= 1");
  if (rerun_local_clustering) local_dbscan.validate();
}

double iou_score(std::span<const double> ious, double floor) {
  double s = 0.0;
  for (double v : ious) s += std::log(1.0 / std::max(v, floor));
  return s;
}

double density_score(std::span<const double> relative) {
  double s = 0.0;
  for (double r : relative) s += std::exp(r);
  return s;
}

std::vector<WindowSpec> partition_windows(int frame_count, int window_len) {
  std::vector<WindowSpec> out;
  for (int s = 0; s < frame_count; s += window_len) {
    out.push_back({s, std::min(s + window_len, frame_count) - 1});
  }
  return out;
}

std::vector<std::pair<int, int>> frame_pairs(const WindowSpec& w, PairSchedule schedule) {
  std::vector<std::pair<int, int>> out;
  switch (schedule) {
    case PairSchedule::Consecutive:
      for (int a = w.start; a < w.end; ++a) out.emplace_back(a, a + 1);
      break;
    case PairSchedule::AllPairs:
      for (int a = w.start; a < w.end; ++a) {
        for (int b = a + 1; b <= w.end; ++b) out.emplace_back(a, b);
      }
      break;
    case PairSchedule::Endpoints:
      if (w.end > w.start) out.emplace_back(w.start, w.end);
      break;
  }
  return out;
}

namespace {

// Points of one cluster grouped per frame, with cached voxel grids.
struct FrameSlices {
  std::map<int, PointSet> by_frame;
  std::map<int, VoxelGrid> grids;

  FrameSlices(const PointSet& ps, double edge) {
    for (const Point3T& p : ps.points) by_frame[p.frame_index].points.push_back(p);
    for (const auto& [f, pts] : by_frame) grids.emplace(f, voxelize(pts, edge));
  }

  PointSet window_points(const WindowSpec& w) const {
    PointSet out;
    for (auto it = by_frame.lower_bound(w.start); it != by_frame.end() && it->first <= w.end; ++it) {
      out.points.insert(out.points.end(), it->second.points.begin(), it->second.points.end());
    }
    return out;
  }

  const VoxelGrid* grid(int frame) const {
    auto it = grids.find(frame);
    return it == grids.end() ? nullptr : &it->second;
  }
};

// Re-clustered view of each window, shared by all clusters.
struct LocalClustering {
  WindowSpec window;
  std::size_t offset = 0;  // index of the window's first point in the full superposition
  PointSet points;
  ClusterLabeling labeling;
};

std::vector<LocalClustering> recluster_windows(const ScanSequence& seq, const std::vector<WindowSpec>& windows,
                                               const DbscanParams& params) {
  std::vector<LocalClustering> out;
  std::size_t offset = 0;
  for (const WindowSpec& w : windows) {
    LocalClustering lc;
    lc.window = w;
    lc.offset = offset;
    lc.points = superimpose(seq, w);
    offset += lc.points.cardinality();
    if (!lc.points.empty()) lc.labeling = dbscan(lc.points, params);
    out.push_back(std::move(lc));
  }
  return out;
}

// Local cluster holding most of the global cluster's window points; empty
// when they are all local noise.
PointSet matching_local_cluster(const LocalClustering& lc, const std::vector<std::size_t>& global_members) {
  if (lc.points.empty() || lc.labeling.cluster_count == 0) return {};
  std::vector<std::size_t> votes(static_cast<std::size_t>(lc.labeling.cluster_count), 0);
  const std::size_t end = lc.offset + lc.points.cardinality();
  for (std::size_t g : global_members) {
    if (g < lc.offset || g >= end) continue;
    const int l = lc.labeling.labels[g - lc.offset];
    if (l != ClusterLabeling::kNoise) ++votes[static_cast<std::size_t>(l)];
  }
  const auto best = std::max_element(votes.begin(), votes.end());
  if (*best == 0) return {};
  return cluster_members(lc.labeling, lc.points, static_cast<int>(best - votes.begin()));
}

void score_window(const FrameSlices& slices, const WindowSpec& w, double global_density, double edge,
                  const ScoringParams& params, WindowContribution& wc, std::vector<double>& rs,
                  std::vector<double>& ious) {
  const PointSet local = slices.window_points(w);
  wc.points = local.cardinality();
  if (local.empty()) return;
  wc.local_density = density(local, edge);
  wc.relative_density = relative_density(*wc.local_density, global_density);
  rs.push_back(*wc.relative_density);
  for (const auto& [a, b] : frame_pairs(w, params.pair_schedule)) {
    const VoxelGrid* ga = slices.grid(a);
    const VoxelGrid* gb = slices.grid(b);
    if (ga == nullptr || gb == nullptr) continue;
    const double v = voxel_iou(*ga, *gb);
    wc.pairs.push_back({a, b, v});
    ious.push_back(v);
  }
}

}  // namespace

std::vector<ScoreBreakdown> score_all_clusters(const ScanSequence& seq, const ClusterLabeling& labeling,
                                               const ScoringParams& params, double edge) {
  params.validate();
  VoxelGrid probe(edge);
  if (seq.empty() || labeling.labels.size() != seq.point_count() ||
      !(labeling.source_window == full_window(seq))) {
    throw Error(ErrorCode::LabelingMismatch, "labeling does not cover the full sequence");
  }

  const PointSet all = superimpose(seq, full_window(seq));
  const auto windows = partition_windows(seq.frame_count(), params.window_len);
  const auto members = labeling.members();

  std::vector<LocalClustering> local;
  if (params.rerun_local_clustering) local = recluster_windows(seq, windows, params.local_dbscan);

  std::vector<ScoreBreakdown> out;
  out.reserve(members.size());
  for (int k = 0; k < labeling.cluster_count; ++k) {
    const auto& idx = members[static_cast<std::size_t>(k)];
    PointSet cluster;
    cluster.points.reserve(idx.size());
    for (std::size_t i : idx) cluster.points.push_back(all.points[i]);

    ScoreBreakdown sb;
    sb.cluster_id = k;
    sb.points = cluster.cardinality();
    const VoxelGrid global_grid = voxelize(cluster, edge);
    sb.global_voxels = global_grid.size();
    sb.global_density = static_cast<double>(cluster.cardinality()) / voxel_volume(global_grid);

    const FrameSlices slices(cluster, edge);
    sb.frames_present = static_cast<int>(slices.by_frame.size());

    if (params.prefilter && sb.global_voxels > params.prefilter_max_voxels) {
      sb.excluded_reason = "prefilter: global voxel count exceeds limit";
      out.push_back(std::move(sb));
      continue;
    }

    std::vector<double> rs;
    std::vector<double> ious;
    for (std::size_t wi = 0; wi < windows.size(); ++wi) {
      const WindowSpec& w = windows[wi];
      WindowContribution wc;
      wc.window = w;
      if (params.rerun_local_clustering) {
        const PointSet matched = matching_local_cluster(local[wi], idx);
        if (!matched.empty()) score_window(FrameSlices(matched, edge), w, sb.global_density, edge, params, wc, rs, ious);
      } else if (!slices.by_frame.empty()) {
        score_window(slices, w, sb.global_density, edge, params, wc, rs, ious);
      }
      sb.windows.push_back(std::move(wc));
    }

    sb.psi_iou = iou_score(ious, params.iou_floor);
    sb.psi_rho = density_score(rs);
    sb.psi = combined_score(sb.psi_rho, sb.psi_iou, params.lambda);
    if (sb.frames_present < params.min_frames) {
      sb.excluded_reason = "present in fewer than " + std::to_string(params.min_frames) + " frames";
    } else {
      sb.eligible = true;
    }
    out.push_back(std::move(sb));
  }
  return out;
}

TargetSelection select_target(std::span<const ScoreBreakdown> scores, double min_margin) {
  std::vector<const ScoreBreakdown*> cand;
  for (const ScoreBreakdown& s : scores) {
    if (s.eligible) cand.push_back(&s);
  }
  if (cand.empty()) throw Error(ErrorCode::NoClusters, "no eligible cluster to select");

  std::stable_sort(cand.begin(), cand.end(), [](const ScoreBreakdown* a, const ScoreBreakdown* b) {
    if (a->psi != b->psi) return a->psi > b->psi;
    if (a->global_voxels != b->global_voxels) return a->global_voxels < b->global_voxels;
    return a->cluster_id < b->cluster_id;
  });

  TargetSelection sel;
  sel.cluster_id = cand.front()->cluster_id;
  sel.psi = cand.front()->psi;
  sel.candidates = static_cast<int>(cand.size());
  if (cand.size() >= 2 && sel.psi != 0.0) {
    sel.confidence = (sel.psi - cand[1]->psi) / std::abs(sel.psi);
  }
  sel.low_confidence = sel.confidence < min_margin;
  return sel;
}

}  // namespace unlidar

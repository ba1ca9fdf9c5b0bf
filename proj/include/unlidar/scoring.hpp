// SPDX-License-Identifier: Apache-2.0
//
// Motion scoring of global clusters and target selection.
//
// For each cluster the sequence is cut into windows of `window_len` frames.
// Every window contributes exp(R), R being the cluster's window density over
// its full-sequence density, and every frame pair inside the window
// contributes ln(1 / max(IoU, floor)) of the two frames' voxel sets. Movers
// keep their density while static surfaces accumulate, and movers leave the
// voxels they occupied, so both terms grow for the UAV.

#pragma once

#include <optional>
#include <span>
#include <string>
#include <vector>

#include "unlidar/clustering.hpp"
#include "unlidar/types.hpp"

namespace unlidar {

enum class PairSchedule { Consecutive, AllPairs, Endpoints };

PairSchedule parse_pair_schedule(const std::string& name);
std::string to_string(PairSchedule s);

struct ScoringParams {
  double lambda = 1.0;
  double iou_floor = 1e-6;
  PairSchedule pair_schedule = PairSchedule::Consecutive;
  int window_len = 10;
  bool rerun_local_clustering = false;
  DbscanParams local_dbscan;  ///< only used when rerun_local_clustering is set
  bool prefilter = true;
  std::size_t prefilter_max_voxels = 5000;
  int min_frames = 2;

  void validate() const;
};

struct PairIoU {
  int frame_a = 0;
  int frame_b = 0;
  double iou = 0.0;
};

struct WindowContribution {
  WindowSpec window;
  std::size_t points = 0;
  std::optional<double> local_density;
  std::optional<double> relative_density;
  std::vector<PairIoU> pairs;
};

struct ScoreBreakdown {
  int cluster_id = 0;
  double psi_iou = 0.0;
  double psi_rho = 0.0;
  double psi = 0.0;
  std::size_t points = 0;
  std::size_t global_voxels = 0;
  double global_density = 0.0;
  int frames_present = 0;
  bool eligible = false;
  std::string excluded_reason;
  std::vector<WindowContribution> windows;
};

/// Sum of ln(1 / max(iou, floor)).
double iou_score(std::span<const double> ious, double floor);

/// Sum of exp(r).
double density_score(std::span<const double> relative);

inline double combined_score(double psi_rho, double psi_iou, double lambda) {
  return psi_rho + lambda * psi_iou;
}

/// Consecutive windows [0, L-1], [L, 2L-1], ...; the last one may be shorter.
std::vector<WindowSpec> partition_windows(int frame_count, int window_len);

/// Frame pairs visited inside one window.
std::vector<std::pair<int, int>> frame_pairs(const WindowSpec& w, PairSchedule schedule);

/// `labeling` must come from the full-sequence superposition of `seq`.
/// Throws LabelingMismatch. Result is ordered by cluster id.
std::vector<ScoreBreakdown> score_all_clusters(const ScanSequence& seq, const ClusterLabeling& labeling,
                                               const ScoringParams& params, double edge);

struct TargetSelection {
  int cluster_id = 0;
  double psi = 0.0;
  double confidence = 0.0;
  bool low_confidence = false;
  int candidates = 0;
};

/// Argmax of psi over eligible clusters; ties go to the smaller global voxel
/// count. confidence = (best - second) / |best|; a lone candidate has no
/// runner-up and is reported with confidence 0. Throws NoClusters.
TargetSelection select_target(std::span<const ScoreBreakdown> scores, double min_margin);

}  // namespace unlidar

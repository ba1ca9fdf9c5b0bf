// SPDX-License-Identifier: Apache-2.0
//
// End-to-end detection: global DBSCAN, motion scoring, target selection and
// trajectory reconstruction, plus the run configuration document.

#pragma once

#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "unlidar/clustering.hpp"
#include "unlidar/pointcloud.hpp"
#include "unlidar/scoring.hpp"
#include "unlidar/trajectory.hpp"

namespace unlidar {

struct PipelineConfig {
  std::filesystem::path input;
  ScanFormat format = ScanFormat::Csv;
  std::filesystem::path output_dir = "out";
  std::filesystem::path query_times;  ///< optional trajectory CSV whose t column is queried

  DbscanParams dbscan;
  double voxel_edge = 0.5;
  ScoringParams scoring;
  double min_margin = 0.1;
  ControlParams control;
  int degree_cap = 3;
  double max_dt = 0.5;

  void validate() const;

  /// Sets one key from its textual value. Throws InvalidConfig.
  void set(const std::string& key, const std::string& value);
  /// Every key accepted by set(), in document order.
  static const std::vector<std::string>& keys();

  nlohmann::ordered_json to_json() const;
  /// Unknown keys are rejected.
  static PipelineConfig from_json(const nlohmann::json& j);
  static PipelineConfig load(const std::filesystem::path& path);
};

struct DetectionResult {
  PointSet superposition;
  ClusterLabeling labeling;
  std::vector<ScoreBreakdown> scores;
  TargetSelection selection;
  ControlSequence control;
  SplineModel spline;
  Interpolation trajectory;
  PointSet target_points;
  std::map<std::string, double> timings_ms;
};

/// Query times default to every frame timestamp inside the spline domain.
DetectionResult run_detection(const ScanSequence& seq, const PipelineConfig& config,
                              const std::vector<double>& query_times = {});

/// Score audit document: per-cluster breakdowns and the selection.
nlohmann::ordered_json score_audit(const DetectionResult& result, const PipelineConfig& config);

}  // namespace unlidar

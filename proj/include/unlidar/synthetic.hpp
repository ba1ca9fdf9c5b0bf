// SPDX-License-Identifier: Apache-2.0
//
// Deterministic synthetic scenes: static boxes resampled every frame, one UAV
// on a parametric path with sparse Poisson returns, and isolated clutter.
// The sensor sits at the origin.

#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "unlidar/clustering.hpp"
#include "unlidar/trajectory.hpp"
#include "unlidar/types.hpp"

namespace unlidar::synthetic {

struct StaticBox {
  Vector3 center = Vector3::Zero();
  Vector3 dims = Vector3::Ones();
  double points_per_frame = 0.0;  ///< samples over the sensor-facing faces
};

enum class PathKind { Polyline, Circle, Lissajous };

struct UavPath {
  PathKind kind = PathKind::Circle;
  double speed = 10.0;             ///< m/s along polyline and circle paths
  std::vector<Vector3> waypoints;  ///< polyline, traversed back and forth
  Vector3 center = Vector3::Zero();
  double radius = 10.0;            ///< circle, horizontal plane through center
  double phase = 0.0;              ///< radians
  Vector3 amplitude = Vector3::Ones();    ///< lissajous
  Vector3 angular_rate = Vector3::Ones(); ///< lissajous, rad/s

  /// Position at time `t` seconds after the scene start.
  Vector3 at(double t) const;
};

struct SceneConfig {
  std::uint64_t rng_seed = 1;
  double start_time = 0.0;
  double duration = 10.0;
  double frame_rate = 10.0;
  std::vector<StaticBox> static_structures;
  UavPath uav_path;
  double uav_returns_per_frame = 2.0;  ///< Poisson mean
  double dropout_at_100m = 0.0;        ///< drop probability, linear in range
  double noise_sigma = 0.05;
  double clutter_rate = 0.0;           ///< Poisson mean per frame
  Vector3 clutter_center = Vector3(50.0, 0.0, 15.0);
  Vector3 clutter_dims = Vector3(100.0, 100.0, 30.0);

  void validate() const;
  int frame_count() const;
};

enum class PointTag : std::uint8_t { Static, Uav, Clutter };

struct Scene {
  ScanSequence sequence;
  Trajectory ground_truth;     ///< UAV path at every frame timestamp
  std::vector<PointTag> tags;  ///< aligned with the full superposition
  std::size_t uav_points = 0;

  /// Cluster holding most UAV-tagged points, or -1 when none is clustered.
  int uav_cluster(const ClusterLabeling& labeling) const;
};

/// Throws InvalidConfig.
Scene generate(const SceneConfig& config);

/// Probability that a UAV return at `range` meters is dropped.
double dropout_probability(double dropout_at_100m, double range);

/// Wall 20 x 10 x 0.5 m at 30 m, UAV circling at 60 m, sigma 0.05 m.
SceneConfig scene_s1(std::uint64_t seed = 1);
/// A single dense static box; no UAV returns.
SceneConfig scene_s2(std::uint64_t seed = 2);
/// Benchmark family: random wall and building placement, UAV speed 3-15 m/s,
/// sigma <= 0.1 m, dropout <= 0.3.
SceneConfig random_scene(std::uint64_t seed);

nlohmann::json to_json(const SceneConfig& config);
/// Unknown keys are rejected. Throws InvalidConfig.
SceneConfig scene_from_json(const nlohmann::json& j);
SceneConfig load_scene_config(const std::filesystem::path& path);

}  // namespace unlidar::synthetic

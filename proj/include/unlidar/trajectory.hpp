// SPDX-License-Identifier: Apache-2.0
//
// Per-frame control points of the selected cluster, spline fit and temporal
// interpolation.

#pragma once

#include <filesystem>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include "unlidar/bspline.hpp"
#include "unlidar/clustering.hpp"
#include "unlidar/types.hpp"

namespace unlidar {

struct ControlPoint {
  double t = 0.0;
  Vector3 position = Vector3::Zero();
};

using ControlSequence = std::vector<ControlPoint>;

enum class ControlReducer { Centroid, Median };

ControlReducer parse_control_reducer(const std::string& name);
std::string to_string(ControlReducer r);

struct ControlParams {
  double outlier_gate = 3.0;  ///< meters; <= 0 disables the gate
  ControlReducer reducer = ControlReducer::Centroid;
};

/// One control point per frame where cluster `target` has points, then one
/// pass dropping points farther than the gate from the segment joining their
/// temporal neighbors. Throws UnknownClusterId, TooFewFrames.
ControlSequence extract_control_points(const ScanSequence& seq, const ClusterLabeling& labeling, int target,
                                       const ControlParams& params = {});

/// Reduces one frame's points to a single position.
Vector3 reduce_points(std::span<const Point3T> pts, ControlReducer reducer);

/// Distance from `p` to the segment [a, b].
double distance_to_segment(const Vector3& p, const Vector3& a, const Vector3& b);

struct SplineModel {
  BSpline<double, 3> curve;
  double t_min = 0.0;
  double t_max = 0.0;
  int degree() const noexcept { return curve.degree(); }
};

/// Cubic (not-a-knot) interpolation over raw timestamps; degree drops to
/// |cs| - 1 for two or three control points. Throws TooFewFrames,
/// DuplicateTimestamps.
SplineModel fit_spline(const ControlSequence& cs, int degree_cap = 3);

struct TrajectorySample {
  double t = 0.0;
  Vector3 position = Vector3::Zero();
};

struct Trajectory {
  std::vector<TrajectorySample> samples;

  bool empty() const noexcept { return samples.empty(); }
  std::size_t size() const noexcept { return samples.size(); }
};

struct Interpolation {
  Trajectory trajectory;
  std::size_t clamped = 0;  ///< queries outside [t_min, t_max]
};

/// Samples in query order; out-of-domain times are clamped to the boundary
/// and counted. Throws EmptyQuery.
Interpolation interpolate(const SplineModel& sm, std::span<const double> ts);

/// Trajectory CSV: header `t,x,y,z`. Reading enforces strictly increasing t
/// unless `strict_time` is false (point dumps carry several rows per frame).
void write_trajectory_csv(std::ostream& out, const Trajectory& tr);
void save_trajectory_csv(const std::filesystem::path& path, const Trajectory& tr);
Trajectory read_trajectory_csv(std::istream& in, bool strict_time = true);
Trajectory load_trajectory_csv(const std::filesystem::path& path, bool strict_time = true);

}  // namespace unlidar

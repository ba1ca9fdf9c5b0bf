// SPDX-License-Identifier: Apache-2.0
//
// SVG rendering of trajectories in three orthographic projections.

#pragma once

#include <string>
#include <vector>

#include "unlidar/trajectory.hpp"

namespace unlidar {

struct PlotLayer {
  std::string label;
  std::vector<Vector3> points;
  bool as_markers = false;  ///< scatter instead of polyline
  std::string color;        ///< empty selects from the default palette
};

/// Renders XY, XZ and YZ panels with shared legend and metric tick labels.
/// Throws EmptyInput when no layer has points.
std::string render_projections_svg(const std::vector<PlotLayer>& layers, const std::string& title = "");

PlotLayer trajectory_layer(const Trajectory& tr, std::string label, bool as_markers = false);

/// Tick positions covering [lo, hi] with a 1/2/5 x 10^k step.
std::vector<double> nice_ticks(double lo, double hi, int target = 5);

}  // namespace unlidar

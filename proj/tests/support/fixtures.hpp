// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <random>
#include <vector>

#include "unlidar/types.hpp"

namespace fixtures {

using unlidar::Frame;
using unlidar::Point3T;
using unlidar::PointSet;
using unlidar::ScanSequence;
using unlidar::Vector3;

inline Point3T pt(double x, double y, double z, double t = 0.0, int frame = 0) {
  return {Vector3(x, y, z), t, frame};
}

/// Frames at t = i * dt holding the given positions.
inline ScanSequence sequence(const std::vector<std::vector<Vector3>>& frames, double dt = 0.1) {
  std::vector<Frame> fs;
  for (std::size_t i = 0; i < frames.size(); ++i) {
    Frame f{static_cast<int>(i), static_cast<double>(i) * dt, {}};
    for (const Vector3& p : frames[i]) f.points.push_back({p, 0.0, 0});
    fs.push_back(std::move(f));
  }
  return ScanSequence::from_frames(std::move(fs));
}

inline PointSet uniform_cloud(std::mt19937_64& rng, std::size_t n, double side) {
  std::uniform_real_distribution<double> u(0.0, side);
  PointSet ps;
  for (std::size_t i = 0; i < n; ++i) ps.points.push_back(pt(u(rng), u(rng), u(rng)));
  return ps;
}

/// A few Gaussian blobs plus uniform background; exercises core, border and noise.
inline PointSet blobby_cloud(std::mt19937_64& rng, std::size_t n, double side) {
  std::uniform_real_distribution<double> u(0.0, side);
  std::normal_distribution<double> g(0.0, side / 20.0);
  std::vector<Vector3> centers;
  for (int c = 0; c < 4; ++c) centers.emplace_back(u(rng), u(rng), u(rng));
  PointSet ps;
  for (std::size_t i = 0; i < n; ++i) {
    if (i % 3 == 0) {
      ps.points.push_back(pt(u(rng), u(rng), u(rng)));
    } else {
      const Vector3& c = centers[i % centers.size()];
      ps.points.push_back(pt(c.x() + g(rng), c.y() + g(rng), c.z() + g(rng)));
    }
  }
  return ps;
}

}  // namespace fixtures

// SPDX-License-Identifier: Apache-2.0
//
// Core data model: timestamped points, frames, scan sequences and point sets.

#pragma once

#include <cstddef>
#include <vector>

#include <Eigen/Core>

namespace unlidar {

using Vector3 = Eigen::Vector3d;

/// A single LiDAR return. `t` is the timestamp of the originating frame.
struct Point3T {
  Vector3 position = Vector3::Zero();
  double t = 0.0;
  int frame_index = 0;

  bool operator==(const Point3T& o) const {
    return position == o.position && t == o.t && frame_index == o.frame_index;
  }
};

struct Frame {
  int index = 0;
  double timestamp = 0.0;
  std::vector<Point3T> points;
};

/// Ordered scan frames with contiguous indices 0..f-1 and strictly
/// increasing timestamps. Construct through `ScanSequence::from_frames`
/// (validating) or the loaders.
class ScanSequence {
 public:
  ScanSequence() = default;

  /// Validates the invariants and takes ownership. Throws Error.
  static ScanSequence from_frames(std::vector<Frame> frames);

  const std::vector<Frame>& frames() const noexcept { return frames_; }
  const Frame& frame(int index) const { return frames_.at(static_cast<std::size_t>(index)); }
  int frame_count() const noexcept { return static_cast<int>(frames_.size()); }
  std::size_t point_count() const noexcept;
  bool empty() const noexcept { return frames_.empty(); }

  bool operator==(const ScanSequence& o) const;

 private:
  std::vector<Frame> frames_;
};

/// Inclusive frame range [start, end].
struct WindowSpec {
  int start = 0;
  int end = 0;

  int length() const noexcept { return end - start + 1; }
  bool contains(int frame) const noexcept { return frame >= start && frame <= end; }
  bool operator==(const WindowSpec&) const = default;
};

/// Multiset of points; frames may be mixed.
struct PointSet {
  std::vector<Point3T> points;

  std::size_t cardinality() const noexcept { return points.size(); }
  bool empty() const noexcept { return points.empty(); }
};

/// Copies positions into a 3xN matrix.
Eigen::Matrix3Xd positions(const PointSet& ps);

}  // namespace unlidar

// SPDX-License-Identifier: Apache-2.0

#include "unlidar/types.hpp"

#include <cmath>
#include <string>

#include "unlidar/error.hpp"

namespace unlidar {

ScanSequence ScanSequence::from_frames(std::vector<Frame> frames) {
  if (frames.empty()) throw Error(ErrorCode::EmptySequence, "sequence has no frames");
  for (std::size_t i = 0; i < frames.size(); ++i) {
    Frame& f = frames[i];
    if (f.index != static_cast<int>(i)) {
      throw Error(ErrorCode::MalformedRecord,
                  "frame indices must be contiguous from 0; expected " + std::to_string(i) +
                      ", got " + std::to_string(f.index));
    }
    if (!std::isfinite(f.timestamp) || f.timestamp < 0.0) {
      throw Error(ErrorCode::MalformedRecord,
                  "frame " + std::to_string(i) + " has an invalid timestamp");
    }
    if (i > 0 && !(f.timestamp > frames[i - 1].timestamp)) {
      throw Error(ErrorCode::NonMonotonicTimestamps,
                  "frame " + std::to_string(i) + " timestamp does not increase");
    }
    for (Point3T& p : f.points) {
      if (!p.position.allFinite()) {
        throw Error(ErrorCode::MalformedRecord,
                    "non-finite coordinate in frame " + std::to_string(i));
      }
      p.frame_index = f.index;
      p.t = f.timestamp;
    }
  }
  ScanSequence seq;
  seq.frames_ = std::move(frames);
  return seq;
}

std::size_t ScanSequence::point_count() const noexcept {
  std::size_t n = 0;
  for (const Frame& f : frames_) n += f.points.size();
  return n;
}

bool ScanSequence::operator==(const ScanSequence& o) const {
  if (frames_.size() != o.frames_.size()) return false;
  for (std::size_t i = 0; i < frames_.size(); ++i) {
    const Frame& a = frames_[i];
    const Frame& b = o.frames_[i];
    if (a.index != b.index || a.timestamp != b.timestamp || a.points != b.points) return false;
  }
  return true;
}

Eigen::Matrix3Xd positions(const PointSet& ps) {
  Eigen::Matrix3Xd m(3, static_cast<Eigen::Index>(ps.points.size()));
  for (std::size_t i = 0; i < ps.points.size(); ++i) {
    m.col(static_cast<Eigen::Index>(i)) = ps.points[i].position;
  }
  return m;
}

}  // namespace unlidar

// SPDX-License-Identifier: Apache-2.0
//
// Per-axis and aggregate RMSE of a predicted trajectory against ground truth.

#pragma once

#include <cmath>
#include <cstddef>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "unlidar/trajectory.hpp"

namespace unlidar {

struct SamplePair {
  double t = 0.0;
  Vector3 predicted = Vector3::Zero();
  Vector3 truth = Vector3::Zero();
};

struct Alignment {
  std::vector<SamplePair> pairs;
  std::size_t dropped = 0;
};

/// Pairs each ground-truth sample with the prediction linearly interpolated
/// at its timestamp. Samples more than `max_dt` outside the prediction's time
/// span are dropped; those within it use the nearest endpoint.
/// Throws EmptyInput, NoOverlap.
Alignment align_by_timestamp(const Trajectory& pred, const Trajectory& gt, double max_dt);

/// Root mean square of each column of an N x 3 residual matrix.
template <typename Derived>
Eigen::Matrix<typename Derived::Scalar, 3, 1> per_axis_rmse(const Eigen::MatrixBase<Derived>& residuals) {
  using Scalar = typename Derived::Scalar;
  const auto n = static_cast<Scalar>(residuals.rows());
  return (residuals.array().square().colwise().sum() / n).sqrt().matrix().transpose();
}

/// Throws EmptyPairs.
Vector3 per_axis_rmse(const std::vector<SamplePair>& pairs);

template <typename Scalar>
Scalar aggregate_rmse(Scalar dx, Scalar dy, Scalar dz) {
  return std::sqrt(dx * dx + dy * dy + dz * dz);
}

struct RmseReport {
  double dx = 0.0;
  double dy = 0.0;
  double dz = 0.0;
  double aggregate = 0.0;
  std::size_t n_pairs = 0;
  std::size_t dropped = 0;

  std::string to_json() const;
};

RmseReport evaluate(const Trajectory& pred, const Trajectory& gt, double max_dt);

}  // namespace unlidar

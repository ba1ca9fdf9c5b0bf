// SPDX-License-Identifier: Apache-2.0

#include "unlidar/evaluation.hpp"

#include <algorithm>

#include <nlohmann/json.hpp>

#include "unlidar/error.hpp"

namespace unlidar {

namespace {

Vector3 linear_at(const Trajectory& tr, double t) {
  const auto& s = tr.samples;
  if (t <= s.front().t) return s.front().position;
  if (t >= s.back().t) return s.back().position;
  const auto hi = std::upper_bound(s.begin(), s.end(), t,
                                   [](double v, const TrajectorySample& x) { return v < x.t; });
  const auto lo = hi - 1;
  const double a = (t - lo->t) / (hi->t - lo->t);
  return lo->position + a * (hi->position - lo->position);
}

}  // namespace

Alignment align_by_timestamp(const Trajectory& pred, const Trajectory& gt, double max_dt) {
  if (pred.empty() || gt.empty()) throw Error(ErrorCode::EmptyInput, "trajectory is empty");
  const double lo = pred.samples.front().t - max_dt;
  const double hi = pred.samples.back().t + max_dt;
  Alignment out;
  for (const TrajectorySample& g : gt.samples) {
    if (g.t < lo || g.t > hi) {
      ++out.dropped;
      continue;
    }
    out.pairs.push_back({g.t, linear_at(pred, g.t), g.position});
  }
  if (out.pairs.empty()) throw Error(ErrorCode::NoOverlap, "prediction and ground truth do not overlap in time");
  return out;
}

Vector3 per_axis_rmse(const std::vector<SamplePair>& pairs) {
  if (pairs.empty()) throw Error(ErrorCode::EmptyPairs, "no matched samples");
  Eigen::MatrixX3d res(static_cast<Eigen::Index>(pairs.size()), 3);
  for (std::size_t i = 0; i < pairs.size(); ++i) {
    res.row(static_cast<Eigen::Index>(i)) = (pairs[i].predicted - pairs[i].truth).transpose();
  }
  return per_axis_rmse(res);
}

std::string RmseReport::to_json() const {
  nlohmann::ordered_json j;
  j["dx"] = dx;
  j["dy"] = dy;
  j["dz"] = dz;
  j["aggregate"] = aggregate;
  j["n_pairs"] = n_pairs;
  j["dropped"] = dropped;
  return j.dump(2) + "\n";
}

RmseReport evaluate(const Trajectory& pred, const Trajectory& gt, double max_dt) {
  const Alignment al = align_by_timestamp(pred, gt, max_dt);
  const Vector3 d = per_axis_rmse(al.pairs);
  RmseReport r;
  r.dx = d.x();
  r.dy = d.y();
  r.dz = d.z();
  r.aggregate = aggregate_rmse(r.dx, r.dy, r.dz);
  r.n_pairs = al.pairs.size();
  r.dropped = al.dropped;
  return r;
}

}  // namespace unlidar

// SPDX-License-Identifier: Apache-2.0

#include "unlidar/trajectory.hpp"

#include <algorithm>
#include <fstream>
#include <map>
#include <sstream>

#include "unlidar/error.hpp"
#include "unlidar/numfmt.hpp"
#include "unlidar/pointcloud.hpp"

namespace unlidar {

ControlReducer parse_control_reducer(const std::string& name) {
  if (name == "centroid") return ControlReducer::Centroid;
  if (name == "median") return ControlReducer::Median;
  throw Error(ErrorCode::InvalidConfig, "unknown control reducer '" + name + "'");
}

std::string to_string(ControlReducer r) { return r == ControlReducer::Median ? "median" : "centroid"; }

Vector3 reduce_points(std::span<const Point3T> pts, ControlReducer reducer) {
  if (reducer == ControlReducer::Centroid) {
    Vector3 sum = Vector3::Zero();
    for (const Point3T& p : pts) sum += p.position;
    return sum / static_cast<double>(pts.size());
  }
  Vector3 out;
  std::vector<double> v(pts.size());
  for (int a = 0; a < 3; ++a) {
    for (std::size_t i = 0; i < pts.size(); ++i) v[i] = pts[i].position[a];
    std::sort(v.begin(), v.end());
    const std::size_t m = v.size() / 2;
    out[a] = v.size() % 2 == 1 ? v[m] : 0.5 * (v[m - 1] + v[m]);
  }
  return out;
}

double distance_to_segment(const Vector3& p, const Vector3& a, const Vector3& b) {
  const Vector3 ab = b - a;
  const double len2 = ab.squaredNorm();
  if (len2 == 0.0) return (p - a).norm();
  const double s = std::clamp((p - a).dot(ab) / len2, 0.0, 1.0);
  return (p - (a + s * ab)).norm();
}

ControlSequence extract_control_points(const ScanSequence& seq, const ClusterLabeling& labeling, int target,
                                       const ControlParams& params) {
  const PointSet all = superimpose(seq, full_window(seq));
  const PointSet members = cluster_members(labeling, all, target);

  std::map<int, std::vector<Point3T>> by_frame;
  for (const Point3T& p : members.points) by_frame[p.frame_index].push_back(p);
  if (by_frame.size() < 2) {
    throw Error(ErrorCode::TooFewFrames, "target cluster present in " + std::to_string(by_frame.size()) +
                                             " frame(s); at least 2 required");
  }

  ControlSequence raw;
  raw.reserve(by_frame.size());
  for (const auto& [frame, pts] : by_frame) {
    raw.push_back({seq.frame(frame).timestamp, reduce_points(pts, params.reducer)});
  }
  if (params.outlier_gate <= 0.0 || raw.size() < 3) return raw;

  ControlSequence kept;
  kept.reserve(raw.size());
  kept.push_back(raw.front());
  for (std::size_t i = 1; i + 1 < raw.size(); ++i) {
    const double d = distance_to_segment(raw[i].position, raw[i - 1].position, raw[i + 1].position);
    if (d <= params.outlier_gate) kept.push_back(raw[i]);
  }
  kept.push_back(raw.back());
  return kept;
}

SplineModel fit_spline(const ControlSequence& cs, int degree_cap) {
  if (cs.size() < 2) throw Error(ErrorCode::TooFewFrames, "spline fit needs at least 2 control points");
  if (degree_cap < 1) throw Error(ErrorCode::InvalidConfig, "spline degree cap must be >= 1");
  const auto n = static_cast<Eigen::Index>(cs.size());
  Eigen::VectorXd sites(n);
  Eigen::MatrixX3d values(n, 3);
  for (Eigen::Index j = 0; j < n; ++j) {
    const ControlPoint& c = cs[static_cast<std::size_t>(j)];
    if (!std::isfinite(c.t) || !c.position.allFinite()) {
      throw Error(ErrorCode::MalformedRecord, "non-finite control point");
    }
    if (j > 0 && !(c.t > sites(j - 1))) {
      throw Error(ErrorCode::DuplicateTimestamps, "control timestamps must be strictly increasing");
    }
    sites(j) = c.t;
    values.row(j) = c.position.transpose();
  }
  SplineModel sm;
  if (!sm.curve.interpolate(sites, values, degree_cap)) {
    throw Error(ErrorCode::DuplicateTimestamps, "singular collocation system");
  }
  sm.t_min = cs.front().t;
  sm.t_max = cs.back().t;
  return sm;
}

Interpolation interpolate(const SplineModel& sm, std::span<const double> ts) {
  if (ts.empty()) throw Error(ErrorCode::EmptyQuery, "no query timestamps");
  Interpolation out;
  out.trajectory.samples.reserve(ts.size());
  for (double t : ts) {
    double q = t;
    if (q < sm.t_min || q > sm.t_max) {
      q = std::clamp(q, sm.t_min, sm.t_max);
      ++out.clamped;
    }
    // Site values are reproduced to interpolation tolerance; evaluate at the
    // clamped time but report the requested one.
    out.trajectory.samples.push_back({t, sm.curve(q)});
  }
  return out;
}

void write_trajectory_csv(std::ostream& out, const Trajectory& tr) {
  out << "t,x,y,z\n";
  for (const TrajectorySample& s : tr.samples) {
    out << format_time(s.t) << ',' << format_coord(s.position.x()) << ',' << format_coord(s.position.y()) << ','
        << format_coord(s.position.z()) << '\n';
  }
}

void save_trajectory_csv(const std::filesystem::path& path, const Trajectory& tr) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorCode::Io, "cannot write " + path.string());
  write_trajectory_csv(out, tr);
}

Trajectory read_trajectory_csv(std::istream& in, bool strict_time) {
  Trajectory tr;
  std::string line;
  std::size_t lineno = 0;
  bool have_header = false;
  auto bad = [&](const std::string& what) {
    throw Error(ErrorCode::MalformedRecord, "line " + std::to_string(lineno) + ": " + what);
  };
  while (std::getline(in, line)) {
    ++lineno;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    std::vector<std::string> f;
    std::stringstream ss(line);
    std::string tok;
    while (std::getline(ss, tok, ',')) f.push_back(tok);
    if (!have_header) {
      auto strip = [](std::string s) {
        s.erase(0, s.find_first_not_of(" \t"));
        s.erase(s.find_last_not_of(" \t\r") + 1);
        return s;
      };
      if (f.size() != 4 || strip(f[0]) != "t" || strip(f[1]) != "x" || strip(f[2]) != "y" || strip(f[3]) != "z") {
        bad("expected header 't,x,y,z'");
      }
      have_header = true;
      continue;
    }
    if (f.size() != 4) bad("expected 4 fields");
    TrajectorySample s;
    if (!parse_finite(f[0], s.t)) bad("field 't' is not a finite number");
    for (int a = 0; a < 3; ++a) {
      double v = 0.0;
      if (!parse_finite(f[static_cast<std::size_t>(a + 1)], v)) bad("coordinate is not a finite number");
      s.position[a] = v;
    }
    if (strict_time && !tr.samples.empty() && !(s.t > tr.samples.back().t)) bad("timestamps must be strictly increasing");
    tr.samples.push_back(s);
  }
  return tr;
}

Trajectory load_trajectory_csv(const std::filesystem::path& path, bool strict_time) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::Io, "cannot read " + path.string());
  return read_trajectory_csv(in, strict_time);
}

}  // namespace unlidar

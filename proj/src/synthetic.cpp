// SPDX-License-Identifier: Apache-2.0

#include "unlidar/synthetic.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <fstream>
#include <map>
#include <numbers>
#include <random>
#include <set>

#include "unlidar/error.hpp"
#include "unlidar/numfmt.hpp"

namespace unlidar::synthetic {

namespace {

[[noreturn]] void invalid(const std::string& what) { throw Error(ErrorCode::InvalidConfig, what); }

double polyline_length(const std::vector<Vector3>& w) {
  double len = 0.0;
  for (std::size_t i = 1; i < w.size(); ++i) len += (w[i] - w[i - 1]).norm();
  return len;
}

}  // namespace

Vector3 UavPath::at(double t) const {
  switch (kind) {
    case PathKind::Circle: {
      const double a = phase + speed * t / radius;
      return center + Vector3(radius * std::cos(a), radius * std::sin(a), 0.0);
    }
    case PathKind::Lissajous:
      return center + Vector3(amplitude.x() * std::sin(angular_rate.x() * t + phase),
                              amplitude.y() * std::sin(angular_rate.y() * t),
                              amplitude.z() * std::sin(angular_rate.z() * t));
    case PathKind::Polyline: {
      const double len = polyline_length(waypoints);
      if (len == 0.0) return waypoints.front();
      double s = std::fmod(speed * t, 2.0 * len);
      if (s > len) s = 2.0 * len - s;
      for (std::size_t i = 1; i < waypoints.size(); ++i) {
        const double seg = (waypoints[i] - waypoints[i - 1]).norm();
        if (s <= seg || i + 1 == waypoints.size()) {
          const double a = seg > 0.0 ? std::min(s / seg, 1.0) : 0.0;
          return waypoints[i - 1] + a * (waypoints[i] - waypoints[i - 1]);
        }
        s -= seg;
      }
      return waypoints.back();
    }
  }
  return center;
}

void SceneConfig::validate() const {
  if (!(frame_rate > 0.0) || !std::isfinite(frame_rate)) invalid("frame_rate must be > 0");
  if (!(duration > 0.0) || !std::isfinite(duration)) invalid("duration must be > 0");
  if (!(start_time >= 0.0)) invalid("start_time must be >= 0");
  if (!(noise_sigma >= 0.0)) invalid("noise_sigma must be >= 0");
  if (!(uav_returns_per_frame >= 0.0)) invalid("uav_returns_per_frame must be >= 0");
  if (!(clutter_rate >= 0.0)) invalid("clutter_rate must be >= 0");
  if (!(dropout_at_100m >= 0.0 && dropout_at_100m <= 1.0)) invalid("dropout_at_100m must be in [0, 1]");
  if (!(clutter_dims.array() >= 0.0).all()) invalid("clutter_dims must be >= 0");
  for (const StaticBox& b : static_structures) {
    if (!(b.points_per_frame >= 0.0)) invalid("static points_per_frame must be >= 0");
    if (!(b.dims.array() > 0.0).all()) invalid("static box dims must be > 0");
  }
  if (!(uav_path.speed >= 0.0)) invalid("uav speed must be >= 0");
  switch (uav_path.kind) {
    case PathKind::Circle:
      if (!(uav_path.radius > 0.0)) invalid("circle radius must be > 0");
      break;
    case PathKind::Polyline:
      if (uav_path.waypoints.size() < 2) invalid("polyline needs at least 2 waypoints");
      break;
    case PathKind::Lissajous:
      break;
  }
  if (frame_count() < 1) invalid("scene has no frames");
}

int SceneConfig::frame_count() const {
  return static_cast<int>(std::floor(duration * frame_rate + 1e-9));
}

double dropout_probability(double dropout_at_100m, double range) {
  return std::clamp(dropout_at_100m * range / 100.0, 0.0, 1.0);
}

int Scene::uav_cluster(const ClusterLabeling& labeling) const {
  std::map<int, std::size_t> votes;
  for (std::size_t i = 0; i < tags.size() && i < labeling.labels.size(); ++i) {
    if (tags[i] == PointTag::Uav && labeling.labels[i] != ClusterLabeling::kNoise) ++votes[labeling.labels[i]];
  }
  int best = -1;
  std::size_t best_votes = 0;
  for (const auto& [k, v] : votes) {
    if (v > best_votes) {
      best = k;
      best_votes = v;
    }
  }
  return best;
}

namespace {

struct Face {
  Vector3 origin;  // min corner
  Vector3 u, v;    // spanning edges
  double area;
};

std::vector<Face> visible_faces(const StaticBox& b) {
  std::vector<Face> out;
  const Vector3 h = 0.5 * b.dims;
  for (int axis = 0; axis < 3; ++axis) {
    for (int sign : {-1, 1}) {
      Vector3 n = Vector3::Zero();
      n[axis] = sign;
      const Vector3 face_center = b.center + n.cwiseProduct(h);
      if (n.dot(face_center) >= 0.0) continue;
      const int a1 = (axis + 1) % 3;
      const int a2 = (axis + 2) % 3;
      Face f;
      f.origin = face_center;
      f.origin[a1] -= h[a1];
      f.origin[a2] -= h[a2];
      f.u = Vector3::Zero();
      f.v = Vector3::Zero();
      f.u[a1] = b.dims[a1];
      f.v[a2] = b.dims[a2];
      f.area = b.dims[a1] * b.dims[a2];
      out.push_back(f);
    }
  }
  return out;
}

Vector3 quantized(const Vector3& p) {
  return Vector3(quantize_coord(p.x()), quantize_coord(p.y()), quantize_coord(p.z()));
}

}  // namespace

Scene generate(const SceneConfig& config) {
  config.validate();
  std::mt19937_64 rng(config.rng_seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::normal_distribution<double> gauss(0.0, 1.0);
  std::poisson_distribution<int> uav_count(std::max(config.uav_returns_per_frame, 1e-300));
  std::poisson_distribution<int> clutter_count(std::max(config.clutter_rate, 1e-300));
  const double jitter = config.noise_sigma / 5.0;

  struct BoxSampler {
    std::vector<Face> faces;
    std::discrete_distribution<int> pick;
    int count;
  };
  std::vector<BoxSampler> boxes;
  for (const StaticBox& b : config.static_structures) {
    BoxSampler s;
    s.faces = visible_faces(b);
    std::vector<double> w;
    for (const Face& f : s.faces) w.push_back(f.area);
    s.pick = std::discrete_distribution<int>(w.begin(), w.end());
    s.count = s.faces.empty() ? 0 : static_cast<int>(std::lround(b.points_per_frame));
    boxes.push_back(std::move(s));
  }

  Scene scene;
  std::vector<Frame> frames;
  const int n_frames = config.frame_count();
  frames.reserve(static_cast<std::size_t>(n_frames));
  for (int i = 0; i < n_frames; ++i) {
    Frame f;
    f.index = i;
    const double rel = static_cast<double>(i) / config.frame_rate;
    f.timestamp = config.start_time + rel;
    auto emit = [&](const Vector3& p, PointTag tag) {
      f.points.push_back(Point3T{quantized(p), f.timestamp, i});
      scene.tags.push_back(tag);
    };

    for (BoxSampler& b : boxes) {
      for (int c = 0; c < b.count; ++c) {
        const Face& face = b.faces[static_cast<std::size_t>(b.pick(rng))];
        Vector3 p = face.origin + unit(rng) * face.u + unit(rng) * face.v;
        if (jitter > 0.0) p += jitter * Vector3(gauss(rng), gauss(rng), gauss(rng));
        emit(p, PointTag::Static);
      }
    }

    const Vector3 truth = config.uav_path.at(rel);
    scene.ground_truth.samples.push_back({f.timestamp, truth});
    const int returns = config.uav_returns_per_frame > 0.0 ? uav_count(rng) : 0;
    const double drop = dropout_probability(config.dropout_at_100m, truth.norm());
    for (int r = 0; r < returns; ++r) {
      const bool dropped = unit(rng) < drop;
      const Vector3 noise = Vector3(gauss(rng), gauss(rng), gauss(rng));
      if (dropped) continue;
      emit(truth + config.noise_sigma * noise, PointTag::Uav);
      ++scene.uav_points;
    }

    const int clutter = config.clutter_rate > 0.0 ? clutter_count(rng) : 0;
    for (int c = 0; c < clutter; ++c) {
      const Vector3 u(unit(rng) - 0.5, unit(rng) - 0.5, unit(rng) - 0.5);
      emit(config.clutter_center + config.clutter_dims.cwiseProduct(u), PointTag::Clutter);
    }
    frames.push_back(std::move(f));
  }
  scene.sequence = ScanSequence::from_frames(std::move(frames));
  return scene;
}

SceneConfig scene_s1(std::uint64_t seed) {
  SceneConfig c;
  c.rng_seed = seed;
  c.duration = 10.0;
  c.frame_rate = 10.0;
  c.static_structures.push_back({Vector3(30.0, 0.0, 5.0), Vector3(0.5, 20.0, 10.0), 600.0});
  c.uav_path.kind = PathKind::Circle;
  c.uav_path.center = Vector3(60.0, 0.0, 20.0);
  c.uav_path.radius = 8.0;
  c.uav_path.speed = 8.0;
  c.uav_returns_per_frame = 3.0;
  c.dropout_at_100m = 0.2;
  c.noise_sigma = 0.05;
  c.clutter_rate = 2.0;
  return c;
}

SceneConfig scene_s2(std::uint64_t seed) {
  SceneConfig c;
  c.rng_seed = seed;
  c.duration = 10.0;
  c.frame_rate = 10.0;
  // Faces sit mid-voxel at the default edge so jitter never crosses a voxel boundary.
  c.static_structures.push_back({Vector3(25.25, 5.25, 1.25), Vector3(2.0, 2.0, 2.0), 1500.0});
  c.uav_returns_per_frame = 0.0;
  c.noise_sigma = 0.05;
  return c;
}

SceneConfig random_scene(std::uint64_t seed) {
  std::mt19937_64 rng(seed * 0x9E3779B97F4A7C15ull + 0x5EEDull);
  auto U = [&](double lo, double hi) { return std::uniform_real_distribution<double>(lo, hi)(rng); };

  SceneConfig c;
  c.rng_seed = seed;
  c.duration = 10.0;
  c.frame_rate = 10.0;

  const double wall_w = U(10.0, 25.0);
  const double wall_h = U(5.0, 12.0);
  c.static_structures.push_back({Vector3(U(20.0, 50.0), U(-20.0, 20.0), wall_h / 2.0),
                                 Vector3(0.5, wall_w, wall_h), U(400.0, 800.0)});
  const double bh = U(8.0, 18.0);
  c.static_structures.push_back({Vector3(U(35.0, 80.0), U(-40.0, 40.0), bh / 2.0),
                                 Vector3(U(5.0, 15.0), U(5.0, 15.0), bh), U(600.0, 1000.0)});

  c.uav_path.speed = U(3.0, 15.0);
  const double altitude = U(25.0, 40.0);
  if (U(0.0, 1.0) < 0.5) {
    c.uav_path.kind = PathKind::Circle;
    c.uav_path.center = Vector3(U(50.0, 80.0), U(-25.0, 25.0), altitude);
    c.uav_path.radius = U(5.0, 15.0);
    c.uav_path.phase = U(0.0, 2.0 * std::numbers::pi);
  } else {
    c.uav_path.kind = PathKind::Polyline;
    const int n = 3 + static_cast<int>(U(0.0, 2.0));
    for (int i = 0; i < n; ++i) {
      c.uav_path.waypoints.emplace_back(U(40.0, 90.0), U(-30.0, 30.0), altitude + U(-3.0, 3.0));
    }
  }
  c.uav_returns_per_frame = U(2.0, 3.0);
  c.dropout_at_100m = U(0.0, 0.3);
  c.noise_sigma = U(0.02, 0.1);
  c.clutter_rate = U(0.0, 5.0);
  return c;
}

namespace {

using nlohmann::json;

json vec_json(const Vector3& v) { return json::array({v.x(), v.y(), v.z()}); }

Vector3 json_vec(const json& j, const std::string& key) {
  if (!j.is_array() || j.size() != 3) invalid("'" + key + "' must be an array of 3 numbers");
  Vector3 v;
  for (int a = 0; a < 3; ++a) {
    if (!j[static_cast<std::size_t>(a)].is_number()) invalid("'" + key + "' must be an array of 3 numbers");
    v[a] = j[static_cast<std::size_t>(a)].get<double>();
  }
  return v;
}

void reject_unknown(const json& j, const std::set<std::string>& known, const std::string& where) {
  if (!j.is_object()) invalid(where + " must be an object");
  for (const auto& [k, _] : j.items()) {
    if (!known.count(k)) invalid("unknown key '" + k + "' in " + where);
  }
}

double num(const json& j, const std::string& key, double fallback) {
  if (!j.contains(key)) return fallback;
  if (!j[key].is_number()) invalid("'" + key + "' must be a number");
  return j[key].get<double>();
}

std::string path_kind_name(PathKind k) {
  switch (k) {
    case PathKind::Polyline: return "polyline";
    case PathKind::Circle: return "circle";
    case PathKind::Lissajous: return "lissajous";
  }
  return "circle";
}

}  // namespace

nlohmann::json to_json(const SceneConfig& c) {
  json boxes = json::array();
  for (const StaticBox& b : c.static_structures) {
    boxes.push_back({{"center", vec_json(b.center)}, {"dims", vec_json(b.dims)}, {"points_per_frame", b.points_per_frame}});
  }
  json waypoints = json::array();
  for (const Vector3& w : c.uav_path.waypoints) waypoints.push_back(vec_json(w));
  json path = {{"kind", path_kind_name(c.uav_path.kind)},
               {"speed", c.uav_path.speed},
               {"waypoints", waypoints},
               {"center", vec_json(c.uav_path.center)},
               {"radius", c.uav_path.radius},
               {"phase", c.uav_path.phase},
               {"amplitude", vec_json(c.uav_path.amplitude)},
               {"angular_rate", vec_json(c.uav_path.angular_rate)}};
  return {{"rng_seed", c.rng_seed},
          {"start_time", c.start_time},
          {"duration", c.duration},
          {"frame_rate", c.frame_rate},
          {"static_structures", boxes},
          {"uav_path", path},
          {"uav_returns_per_frame", c.uav_returns_per_frame},
          {"dropout_at_100m", c.dropout_at_100m},
          {"noise_sigma", c.noise_sigma},
          {"clutter_rate", c.clutter_rate},
          {"clutter_center", vec_json(c.clutter_center)},
          {"clutter_dims", vec_json(c.clutter_dims)}};
}

SceneConfig scene_from_json(const nlohmann::json& j) {
  reject_unknown(j,
                 {"rng_seed", "start_time", "duration", "frame_rate", "static_structures", "uav_path",
                  "uav_returns_per_frame", "dropout_at_100m", "noise_sigma", "clutter_rate", "clutter_center",
                  "clutter_dims"},
                 "scene config");
  SceneConfig c;
  if (j.contains("rng_seed")) {
    if (!j["rng_seed"].is_number_unsigned()) invalid("'rng_seed' must be a non-negative integer");
    c.rng_seed = j["rng_seed"].get<std::uint64_t>();
  }
  c.start_time = num(j, "start_time", c.start_time);
  c.duration = num(j, "duration", c.duration);
  c.frame_rate = num(j, "frame_rate", c.frame_rate);
  c.uav_returns_per_frame = num(j, "uav_returns_per_frame", c.uav_returns_per_frame);
  c.dropout_at_100m = num(j, "dropout_at_100m", c.dropout_at_100m);
  c.noise_sigma = num(j, "noise_sigma", c.noise_sigma);
  c.clutter_rate = num(j, "clutter_rate", c.clutter_rate);
  if (j.contains("clutter_center")) c.clutter_center = json_vec(j["clutter_center"], "clutter_center");
  if (j.contains("clutter_dims")) c.clutter_dims = json_vec(j["clutter_dims"], "clutter_dims");

  if (j.contains("static_structures")) {
    if (!j["static_structures"].is_array()) invalid("'static_structures' must be an array");
    for (const json& b : j["static_structures"]) {
      reject_unknown(b, {"center", "dims", "points_per_frame"}, "static structure");
      StaticBox box;
      if (b.contains("center")) box.center = json_vec(b["center"], "center");
      if (b.contains("dims")) box.dims = json_vec(b["dims"], "dims");
      box.points_per_frame = num(b, "points_per_frame", box.points_per_frame);
      c.static_structures.push_back(box);
    }
  }
  if (j.contains("uav_path")) {
    const json& p = j["uav_path"];
    reject_unknown(p, {"kind", "speed", "waypoints", "center", "radius", "phase", "amplitude", "angular_rate"},
                   "uav_path");
    UavPath& u = c.uav_path;
    if (p.contains("kind")) {
      const std::string k = p["kind"].is_string() ? p["kind"].get<std::string>() : "";
      if (k == "polyline") u.kind = PathKind::Polyline;
      else if (k == "circle") u.kind = PathKind::Circle;
      else if (k == "lissajous") u.kind = PathKind::Lissajous;
      else invalid("uav_path.kind must be polyline, circle or lissajous");
    }
    u.speed = num(p, "speed", u.speed);
    u.radius = num(p, "radius", u.radius);
    u.phase = num(p, "phase", u.phase);
    if (p.contains("center")) u.center = json_vec(p["center"], "center");
    if (p.contains("amplitude")) u.amplitude = json_vec(p["amplitude"], "amplitude");
    if (p.contains("angular_rate")) u.angular_rate = json_vec(p["angular_rate"], "angular_rate");
    if (p.contains("waypoints")) {
      if (!p["waypoints"].is_array()) invalid("'waypoints' must be an array");
      for (const json& w : p["waypoints"]) u.waypoints.push_back(json_vec(w, "waypoints"));
    }
  }
  c.validate();
  return c;
}

SceneConfig load_scene_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::Io, "cannot read " + path.string());
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& e) {
    invalid(path.string() + ": " + e.what());
  }
  return scene_from_json(j);
}

}  // namespace unlidar::synthetic

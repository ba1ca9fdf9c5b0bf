// SPDX-License-Identifier: Apache-2.0

#include <doctest.h>

#include <random>
#include <sstream>

#include "unlidar/error.hpp"
#include "unlidar/pointcloud.hpp"
#include "unlidar/synthetic.hpp"

using namespace unlidar;
using namespace unlidar::synthetic;

namespace {

SceneConfig straight_line() {
  SceneConfig cfg;
  cfg.rng_seed = 42;
  cfg.duration = 5.0;
  cfg.frame_rate = 10.0;
  cfg.static_structures.push_back({Vector3(30, 0, 5), Vector3(0.5, 20, 10), 200});
  cfg.uav_path.kind = PathKind::Polyline;
  cfg.uav_path.speed = 10.0;
  cfg.uav_path.waypoints = {Vector3(50, -100, 20), Vector3(50, 100, 20)};
  cfg.uav_returns_per_frame = 2.0;
  cfg.noise_sigma = 0.0;
  cfg.clutter_rate = 0.0;
  return cfg;
}

}  // namespace

TEST_CASE("generation is deterministic per seed") {
  const Scene a = generate(scene_s1(5)), b = generate(scene_s1(5)), c = generate(scene_s1(6));
  CHECK(a.sequence == b.sequence);
  CHECK(a.tags == b.tags);
  CHECK_FALSE(a.sequence == c.sequence);
  std::ostringstream sa, sb;
  write_scan_csv(sa, a.sequence);
  write_scan_csv(sb, b.sequence);
  CHECK(sa.str() == sb.str());
}

TEST_CASE("noise-free straight flight") {
  const SceneConfig cfg = straight_line();
  const Scene s = generate(cfg);
  CHECK(s.sequence.frame_count() == 50);
  std::size_t tagged = 0;
  for (PointTag t : s.tags) tagged += t == PointTag::Uav;
  CHECK(tagged == s.uav_points);
  CHECK(s.uav_points > 50);

  // Same draws on a re-run.
  CHECK(generate(cfg).uav_points == s.uav_points);
}

TEST_CASE("one return per frame lies on the path") {
  SceneConfig cfg = straight_line();
  cfg.static_structures.clear();
  cfg.uav_returns_per_frame = 1.0;
  cfg.noise_sigma = 0.05;
  const Scene s = generate(cfg);
  int frames_with_point = 0;
  for (const Frame& f : s.sequence.frames()) {
    for (const Point3T& p : f.points) {
      CHECK((p.position - cfg.uav_path.at(f.timestamp - cfg.start_time)).norm() < 6.0 * cfg.noise_sigma);
    }
    frames_with_point += !f.points.empty();
  }
  CHECK(frames_with_point > 0);
}

TEST_CASE("ground truth matches the path exactly") {
  const SceneConfig cfg = scene_s1();
  const Scene s = generate(cfg);
  REQUIRE(static_cast<int>(s.ground_truth.size()) == s.sequence.frame_count());
  for (std::size_t i = 0; i < s.ground_truth.size(); ++i) {
    const TrajectorySample& g = s.ground_truth.samples[i];
    CHECK(g.t == s.sequence.frame(static_cast<int>(i)).timestamp);
    CHECK(g.position == cfg.uav_path.at(g.t - cfg.start_time));
  }
}

TEST_CASE("paths") {
  UavPath circle;
  circle.kind = PathKind::Circle;
  circle.center = Vector3(60, 0, 20);
  circle.radius = 8.0;
  circle.speed = 8.0;
  for (double t = 0; t < 10; t += 0.7) {
    const Vector3 p = circle.at(t);
    CHECK(p.z() == 20.0);
    CHECK((p - circle.center).norm() == doctest::Approx(8.0));
  }
  UavPath poly;
  poly.kind = PathKind::Polyline;
  poly.speed = 2.0;
  poly.waypoints = {Vector3(0, 0, 0), Vector3(10, 0, 0)};
  CHECK((poly.at(2.5) - Vector3(5, 0, 0)).norm() < 1e-12);
  CHECK((poly.at(7.5) - Vector3(5, 0, 0)).norm() < 1e-12);  // on the way back
}

TEST_CASE("dropout probability") {
  CHECK(dropout_probability(0.0, 100.0) == 0.0);
  CHECK(dropout_probability(0.3, 100.0) == doctest::Approx(0.3));
  CHECK(dropout_probability(0.6, 400.0) == 1.0);
}

TEST_CASE("config validation and json") {
  SceneConfig cfg = scene_s1();
  cfg.frame_rate = 0.0;
  CHECK_THROWS_AS(cfg.validate(), Error);
  cfg = scene_s1();
  cfg.noise_sigma = -1.0;
  CHECK_THROWS_AS(generate(cfg), Error);

  cfg = random_scene(17);
  const SceneConfig back = scene_from_json(to_json(cfg));
  CHECK(to_json(back) == to_json(cfg));
  CHECK(generate(back).sequence == generate(cfg).sequence);

  auto j = to_json(cfg);
  j["colour"] = "red";
  CHECK_THROWS_AS(scene_from_json(j), Error);
  j = to_json(cfg);
  j["uav_path"]["wobble"] = 1;
  CHECK_THROWS_AS(scene_from_json(j), Error);
}

TEST_CASE("oracle picks the majority cluster") {
  const Scene s = generate(scene_s1());
  ClusterLabeling cl;
  cl.cluster_count = 2;
  cl.labels.resize(s.tags.size());
  cl.core.assign(s.tags.size(), true);
  for (std::size_t i = 0; i < s.tags.size(); ++i) cl.labels[i] = s.tags[i] == PointTag::Uav ? 1 : 0;
  CHECK(s.uav_cluster(cl) == 1);
  std::fill(cl.labels.begin(), cl.labels.end(), ClusterLabeling::kNoise);
  CHECK(s.uav_cluster(cl) == -1);
}

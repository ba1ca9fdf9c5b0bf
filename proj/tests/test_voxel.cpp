// SPDX-License-Identifier: Apache-2.0

#include <doctest.h>

#include <random>

#include "support/fixtures.hpp"
#include "support/oracles.hpp"
#include "unlidar/error.hpp"
#include "unlidar/pointcloud.hpp"
#include "unlidar/synthetic.hpp"
#include "unlidar/voxel.hpp"

using namespace unlidar;
using fixtures::pt;

namespace {

std::set<VoxelKey> as_set(const VoxelGrid& g) { return {g.occupied().begin(), g.occupied().end()}; }

PointSet translated(const PointSet& ps, const Vector3& v) {
  PointSet out = ps;
  for (auto& p : out.points) p.position += v;
  return out;
}

}  // namespace

TEST_CASE("voxelize: single point") {
  PointSet ps;
  ps.points.push_back(pt(0.1, 0.2, 0.3));
  const VoxelGrid g = voxelize(ps, 0.5);
  REQUIRE(g.size() == 1);
  CHECK(g.occupied()[0] == VoxelKey{0, 0, 0});
  CHECK(voxel_volume(g) == 0.125);
  CHECK(density(ps, 0.5) == 8.0);
}

TEST_CASE("voxelize: negative coordinates floor toward -inf") {
  PointSet ps;
  ps.points.push_back(pt(-0.1, -0.5, -0.6));
  CHECK(voxelize(ps, 0.5).occupied()[0] == VoxelKey{-1, -1, -2});
}

TEST_CASE("voxelize: repeated points share a voxel") {
  PointSet ps;
  for (int i = 0; i < 100; ++i) ps.points.push_back(pt(1.3, 2.7, -4.1));
  CHECK(voxelize(ps, 0.5).size() == 1);
  PointSet ten;
  for (int i = 0; i < 10; ++i) ten.points.push_back(pt(0.5, 0.5, 0.5));
  CHECK(density(ten, 1.0) == 10.0);
}

TEST_CASE("voxel volume") {
  CHECK(voxel_volume(VoxelGrid(0.5)) == 0.0);
  std::vector<VoxelKey> keys;
  for (int i = 0; i < 8; ++i) keys.push_back({i, 0, 0});
  CHECK(voxel_volume(VoxelGrid::from_keys(0.5, keys)) == 1.0);
  keys.push_back({0, 0, 0});
  CHECK(VoxelGrid::from_keys(0.5, keys).size() == 8);
}

TEST_CASE("voxel errors") {
  CHECK_THROWS_AS(VoxelGrid(0.0), Error);
  CHECK_THROWS_AS(VoxelGrid(-1.0), Error);
  CHECK_THROWS_AS(voxelize(PointSet{}, 0.0), Error);
  CHECK_THROWS_AS(density(PointSet{}, 0.5), Error);
  CHECK_THROWS_AS(voxel_iou(VoxelGrid(0.5), VoxelGrid(0.5)), Error);
  CHECK_THROWS_AS(voxel_iou(VoxelGrid::from_keys(0.5, {{0, 0, 0}}), VoxelGrid::from_keys(1.0, {{0, 0, 0}})), Error);
  CHECK_THROWS_AS(relative_density(1.0, 0.0), Error);
}

TEST_CASE("voxel iou") {
  const VoxelGrid a = VoxelGrid::from_keys(1.0, {{0, 0, 0}, {1, 0, 0}});
  const VoxelGrid b = VoxelGrid::from_keys(1.0, {{1, 0, 0}, {2, 0, 0}});
  const VoxelGrid c = VoxelGrid::from_keys(1.0, {{5, 5, 5}});
  CHECK(voxel_iou(a, b) == doctest::Approx(1.0 / 3.0).epsilon(1e-15));
  CHECK(voxel_iou(a, a) == 1.0);
  CHECK(voxel_iou(a, c) == 0.0);
  CHECK(voxel_iou(a, VoxelGrid(1.0)) == 0.0);
}

TEST_CASE("relative density") {
  CHECK(relative_density(8.0, 2.0) == 4.0);
  CHECK(relative_density(3.7, 3.7) == 1.0);
}

TEST_CASE("voxel functions match brute force on random clusters") {
  std::mt19937_64 rng(77);
  std::uniform_real_distribution<double> side(0.5, 6.0);
  std::uniform_int_distribution<int> count(1, 400);
  for (int rep = 0; rep < 100; ++rep) {
    const double edge = rep % 2 ? 0.5 : 1.0;
    const PointSet a = fixtures::uniform_cloud(rng, static_cast<std::size_t>(count(rng)), side(rng));
    const PointSet b = translated(fixtures::uniform_cloud(rng, static_cast<std::size_t>(count(rng)), side(rng)),
                                  Vector3(-1.3, 0.4, -2.2));
    const VoxelGrid ga = voxelize(a, edge), gb = voxelize(b, edge);
    CHECK(as_set(ga) == oracle::voxels(a, edge));
    CHECK(std::is_sorted(ga.occupied().begin(), ga.occupied().end()));
    CHECK(voxel_volume(ga) == static_cast<double>(oracle::voxels(a, edge).size()) * edge * edge * edge);
    CHECK(density(a, edge) == oracle::density(a, edge));
    CHECK(voxel_iou(ga, gb) == oracle::iou(oracle::voxels(a, edge), oracle::voxels(b, edge)));
  }
}

TEST_CASE("iou symmetry, bounds and self-iou") {
  std::mt19937_64 rng(3);
  for (int rep = 0; rep < 50; ++rep) {
    const VoxelGrid a = voxelize(fixtures::uniform_cloud(rng, 50, 3.0), 0.5);
    const VoxelGrid b = voxelize(translated(fixtures::uniform_cloud(rng, 50, 3.0), Vector3(1, 0, 0)), 0.5);
    const double ab = voxel_iou(a, b);
    CHECK(ab == voxel_iou(b, a));
    CHECK(ab >= 0.0);
    CHECK(ab <= 1.0);
    CHECK(voxel_iou(a, a) == 1.0);
  }
}

TEST_CASE("lattice translations leave metrics bit-identical") {
  std::mt19937_64 rng(4);
  const double edge = 0.5;
  const PointSet a = fixtures::uniform_cloud(rng, 300, 4.0);
  const PointSet b = translated(fixtures::uniform_cloud(rng, 300, 4.0), Vector3(0.7, 0, 0));
  for (const Vector3& shift : {Vector3(edge * 3, 0, 0), Vector3(0, -edge * 8, 0), Vector3(0, 0, edge * 1000),
                               Vector3(-edge * 5, edge * 2, -edge * 7)}) {
    const PointSet a2 = translated(a, shift), b2 = translated(b, shift);
    CHECK(voxelize(a2, edge).size() == voxelize(a, edge).size());
    CHECK(voxel_volume(voxelize(a2, edge)) == voxel_volume(voxelize(a, edge)));
    CHECK(density(a2, edge) == density(a, edge));
    CHECK(voxel_iou(voxelize(a2, edge), voxelize(b2, edge)) == voxel_iou(voxelize(a, edge), voxelize(b, edge)));
  }
}

TEST_CASE("duplicating points doubles density exactly") {
  std::mt19937_64 rng(6);
  const PointSet a = fixtures::uniform_cloud(rng, 123, 3.0);
  PointSet twice = a;
  twice.points.insert(twice.points.end(), a.points.begin(), a.points.end());
  CHECK(density(twice, 0.5) == 2.0 * density(a, 0.5));
}

TEST_CASE("relative density of static and moving synthetic structure") {
  // Straight fast flight, so no voxel is revisited by the UAV.
  synthetic::SceneConfig cfg = synthetic::scene_s1(3);
  cfg.clutter_rate = 0.0;
  cfg.uav_path.kind = synthetic::PathKind::Polyline;
  cfg.uav_path.speed = 12.0;
  cfg.uav_path.waypoints = {Vector3(60, -80, 20), Vector3(60, 80, 20)};
  const synthetic::Scene scene = synthetic::generate(cfg);
  const PointSet all = superimpose(scene.sequence, full_window(scene.sequence));
  PointSet wall, uav;
  for (std::size_t i = 0; i < all.points.size(); ++i) {
    if (scene.tags[i] == synthetic::PointTag::Static) wall.points.push_back(all.points[i]);
    if (scene.tags[i] == synthetic::PointTag::Uav) uav.points.push_back(all.points[i]);
  }
  const double edge = 0.5;
  const int half = scene.sequence.frame_count() / 2;
  double uav_sum = 0.0;
  for (const WindowSpec w : {WindowSpec{0, half - 1}, WindowSpec{half, scene.sequence.frame_count() - 1}}) {
    const double r_wall = relative_density(density(restrict_to_window(wall, w), edge), density(wall, edge));
    const double r_uav = relative_density(density(restrict_to_window(uav, w), edge), density(uav, edge));
    CHECK(r_wall < 1.0);
    CHECK(r_uav > 1.5 * r_wall);
    CHECK(r_uav == doctest::Approx(1.0).epsilon(0.1));
    uav_sum += r_uav;
  }
  // Over a partition at least one window has R <= 1, so a mover cannot
  // exceed 1 everywhere; it stays near 1 instead.
  CHECK(uav_sum == doctest::Approx(2.0).epsilon(0.05));
  CHECK(relative_density(density(wall, edge), density(wall, edge)) == 1.0);
}

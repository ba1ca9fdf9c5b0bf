// SPDX-License-Identifier: Apache-2.0

#include <doctest.h>

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>
#include <tuple>

#include "support/fixtures.hpp"
#include "unlidar/error.hpp"
#include "unlidar/pointcloud.hpp"
#include "unlidar/synthetic.hpp"

using namespace unlidar;
using fixtures::sequence;

namespace {

ErrorCode code_of(const std::string& csv) {
  std::istringstream in(csv);
  try {
    read_scan_csv(in);
  } catch (const Error& e) {
    return e.code();
  }
  FAIL("expected an error");
  return ErrorCode::Io;
}

bool same_multiset(std::vector<Point3T> a, std::vector<Point3T> b) {
  auto less = [](const Point3T& p, const Point3T& q) {
    return std::tie(p.frame_index, p.position.x(), p.position.y(), p.position.z()) <
           std::tie(q.frame_index, q.position.x(), q.position.y(), q.position.z());
  };
  std::sort(a.begin(), a.end(), less);
  std::sort(b.begin(), b.end(), less);
  return a == b;
}

}  // namespace

TEST_CASE("scan csv: two frames one point each") {
  std::istringstream in("frame,t,x,y,z\n0,0.0,1.0,2.0,3.0\n1,0.1,1.1,2.0,3.0\n");
  const ScanSequence seq = read_scan_csv(in);
  REQUIRE(seq.frame_count() == 2);
  CHECK(seq.frame(0).points.size() == 1);
  CHECK(seq.frame(1).points.size() == 1);
  CHECK(seq.frame(1).timestamp == 0.1);
  CHECK(seq.frame(1).points[0].t == 0.1);
  CHECK(seq.frame(1).points[0].frame_index == 1);
  CHECK(seq.frame(1).points[0].position == Vector3(1.1, 2.0, 3.0));
}

TEST_CASE("scan csv: malformed input") {
  CHECK(code_of("frame,t,x,y,z\n0,0.0,nan,2.0,3.0\n") == ErrorCode::MalformedRecord);
  CHECK(code_of("frame,t,x,y,z\n0,0.0,1,2\n") == ErrorCode::MalformedRecord);
  CHECK(code_of("frame,t,x,y,z\n0,0.0,1,abc,3\n") == ErrorCode::MalformedRecord);
  CHECK(code_of("frame,t,x,y,z\n0,0.0,1,2,3\n2,0.2,1,2,3\n") == ErrorCode::MalformedRecord);
  CHECK(code_of("frame,t,x,y,z\n0,0.0,1,2,3\n0,0.5,1,2,3\n") == ErrorCode::MalformedRecord);
  CHECK(code_of("frame,t,x,y,z\n0,0.5,1,2,3\n1,0.5,1,2,3\n") == ErrorCode::NonMonotonicTimestamps);
  CHECK(code_of("frame,t,x,y,z\n") == ErrorCode::EmptySequence);
  CHECK(code_of("") == ErrorCode::EmptySequence);
}

TEST_CASE("scan csv: error message names the line") {
  std::istringstream in("frame,t,x,y,z\n0,0.0,1,2,3\n0,0.0,1,inf,3\n");
  try {
    read_scan_csv(in);
    FAIL("expected an error");
  } catch (const Error& e) {
    CHECK(std::string(e.what()).find("line 3") != std::string::npos);
  }
}

TEST_CASE("scan csv: rows need not be grouped by frame") {
  std::istringstream in("frame,t,x,y,z\n1,0.1,4,5,6\n0,0.0,1,2,3\n1,0.1,7,8,9\n");
  const ScanSequence seq = read_scan_csv(in);
  REQUIRE(seq.frame_count() == 2);
  CHECK(seq.frame(1).points.size() == 2);
}

TEST_CASE("scan csv: empty frames survive a round trip") {
  const ScanSequence seq = sequence({{Vector3(1, 2, 3)}, {}, {Vector3(4, 5, 6)}});
  std::stringstream io;
  write_scan_csv(io, seq);
  CHECK(read_scan_csv(io) == seq);
}

TEST_CASE("synthetic export round-trips bit-exactly") {
  synthetic::SceneConfig cfg = synthetic::scene_s1(7);
  cfg.duration = 1.0;  // 10 frames
  const ScanSequence seq = synthetic::generate(cfg).sequence;
  REQUIRE(seq.frame_count() == 10);

  std::stringstream io;
  write_scan_csv(io, seq);
  CHECK(read_scan_csv(io) == seq);

  const auto dir = std::filesystem::temp_directory_path() / "unlidar_pcd_roundtrip";
  std::filesystem::remove_all(dir);
  save_pcd_series(dir, seq);
  CHECK(load_pcd_series(dir) == seq);
  CHECK(load_sequence(dir, ScanFormat::PcdSeries) == seq);
  std::filesystem::remove_all(dir);
}

TEST_CASE("epoch timestamps survive a round trip") {
  std::vector<Frame> fs{{0, 1700000000.123456, {}}, {1, 1700000000.223456, {}}};
  fs[0].points.push_back(fixtures::pt(1, 2, 3));
  const ScanSequence seq = ScanSequence::from_frames(fs);
  std::stringstream io;
  write_scan_csv(io, seq);
  CHECK(read_scan_csv(io) == seq);
}

TEST_CASE("pcd series: header POINTS must match") {
  const auto dir = std::filesystem::temp_directory_path() / "unlidar_pcd_bad";
  std::filesystem::remove_all(dir);
  save_pcd_series(dir, sequence({{Vector3(1, 2, 3)}, {Vector3(1, 2, 3)}}));
  {
    std::ofstream f(dir / "000001.pcd", std::ios::app);
    f << "4 5 6\n";
  }
  CHECK_THROWS_AS(load_pcd_series(dir), Error);
  std::filesystem::remove_all(dir);
}

TEST_CASE("superimpose") {
  const ScanSequence seq = sequence({{Vector3(0, 0, 0), Vector3(1, 0, 0), Vector3(2, 0, 0), Vector3(3, 0, 0),
                                      Vector3(4, 0, 0)},
                                     {},
                                     {Vector3(0, 1, 0), Vector3(0, 2, 0), Vector3(0, 3, 0), Vector3(0, 4, 0),
                                      Vector3(0, 5, 0), Vector3(0, 6, 0), Vector3(0, 7, 0)}});
  CHECK(superimpose(seq, {0, 2}).cardinality() == 12);
  CHECK(superimpose(seq, {0, 0}).points == seq.frame(0).points);
  CHECK(superimpose(seq, {1, 1}).empty());
  CHECK_THROWS_AS(superimpose(seq, {0, 3}), Error);
  CHECK_THROWS_AS(superimpose(seq, {2, 1}), Error);
  CHECK_THROWS_AS(superimpose(seq, {-1, 1}), Error);

  const PointSet all = superimpose(seq, {0, 2});
  CHECK(restrict_to_frame(all, 2).points == seq.frame(2).points);
  CHECK(restrict_to_frame(all, 7).empty());
  CHECK(restrict_to_window(all, {1, 2}).cardinality() == 7);
}

TEST_CASE("superposition partitions into frames on random synthetic sequences") {
  for (std::uint64_t seed = 1; seed <= 5; ++seed) {
    synthetic::SceneConfig cfg = synthetic::random_scene(seed);
    cfg.duration = 2.0;
    const ScanSequence seq = synthetic::generate(cfg).sequence;
    std::mt19937_64 rng(seed);
    std::uniform_int_distribution<int> pick(0, seq.frame_count() - 1);
    int a = pick(rng), b = pick(rng);
    const WindowSpec w{std::min(a, b), std::max(a, b)};
    const PointSet sup = superimpose(seq, w);

    std::size_t total = 0;
    std::vector<Point3T> reunited;
    for (int n = w.start; n <= w.end; ++n) {
      const PointSet part = restrict_to_frame(sup, n);
      CHECK(part.points == seq.frame(n).points);
      total += part.cardinality();
      reunited.insert(reunited.end(), part.points.begin(), part.points.end());
    }
    CHECK(total == sup.cardinality());
    CHECK(same_multiset(reunited, sup.points));
  }
}

TEST_CASE("superposition content is independent of frame row order") {
  std::istringstream a("frame,t,x,y,z\n0,0,1,2,3\n0,0,4,5,6\n1,1,7,8,9\n");
  std::istringstream b("frame,t,x,y,z\n1,1,7,8,9\n0,0,4,5,6\n0,0,1,2,3\n");
  const ScanSequence sa = read_scan_csv(a), sb = read_scan_csv(b);
  CHECK(same_multiset(superimpose(sa, full_window(sa)).points, superimpose(sb, full_window(sb)).points));
}

TEST_CASE("sequence invariants") {
  std::vector<Frame> fs{{0, 0.0, {}}, {1, 0.0, {}}};
  CHECK_THROWS_AS(ScanSequence::from_frames(fs), Error);
  fs = {{0, 0.0, {}}, {2, 0.1, {}}};
  CHECK_THROWS_AS(ScanSequence::from_frames(fs), Error);
  CHECK_THROWS_AS(ScanSequence::from_frames({}), Error);
  fs = {{0, 0.0, {fixtures::pt(std::nan(""), 0, 0)}}};
  CHECK_THROWS_AS(ScanSequence::from_frames(fs), Error);
}

// SPDX-License-Identifier: Apache-2.0

#include <doctest.h>

#include <cmath>
#include <numbers>

#include "support/fixtures.hpp"
#include "unlidar/error.hpp"
#include "unlidar/pointcloud.hpp"
#include "unlidar/scoring.hpp"
#include "unlidar/synthetic.hpp"

using namespace unlidar;

namespace {

ScoreBreakdown candidate(int id, double psi, std::size_t voxels) {
  ScoreBreakdown s;
  s.cluster_id = id;
  s.psi = psi;
  s.global_voxels = voxels;
  s.eligible = true;
  return s;
}

struct Detected {
  synthetic::Scene scene;
  ClusterLabeling labeling;
  std::vector<ScoreBreakdown> scores;
};

Detected score_scene(const synthetic::SceneConfig& cfg, const ScoringParams& params = {}, double edge = 0.5) {
  Detected d{synthetic::generate(cfg), {}, {}};
  const PointSet all = superimpose(d.scene.sequence, full_window(d.scene.sequence));
  d.labeling = dbscan(all, DbscanParams{});
  d.labeling.source_window = full_window(d.scene.sequence);
  d.scores = score_all_clusters(d.scene.sequence, d.labeling, params, edge);
  return d;
}

ScanSequence shifted(const ScanSequence& seq, const Vector3& v) {
  std::vector<Frame> frames = seq.frames();
  for (auto& f : frames) {
    for (auto& p : f.points) p.position += v;
  }
  return ScanSequence::from_frames(frames);
}

}  // namespace

TEST_CASE("iou score") {
  const std::vector<double> ones{1.0, 1.0, 1.0};
  CHECK(iou_score(ones, 1e-6) == 0.0);
  const std::vector<double> zero{0.0};
  CHECK(iou_score(zero, 1e-6) == doctest::Approx(13.8155).epsilon(1e-5));
  const std::vector<double> halves{0.5, 0.25};
  CHECK(iou_score(halves, 1e-6) == doctest::Approx(3.0 * std::log(2.0)).epsilon(1e-14));
  CHECK(iou_score(halves, 1e-6) == doctest::Approx(2.0794).epsilon(1e-4));
  CHECK(iou_score({}, 1e-6) == 0.0);
}

TEST_CASE("iou score is non-increasing in each iou") {
  std::vector<double> v{0.3, 0.6};
  double prev = INFINITY;
  for (double x = 0.0; x <= 1.0 + 1e-12; x += 0.05) {
    v[0] = std::min(x, 1.0);
    const double s = iou_score(v, 1e-6);
    CHECK(s <= prev);
    prev = s;
  }
}

TEST_CASE("density score") {
  const std::vector<double> one{1.0};
  CHECK(density_score(one) == doctest::Approx(std::numbers::e).epsilon(1e-15));
  const std::vector<double> two{1.0, 2.0};
  CHECK(density_score(two) == doctest::Approx(10.1073).epsilon(1e-5));
  CHECK(density_score({}) == 0.0);
}

TEST_CASE("combined score") {
  CHECK(combined_score(10.1073, 2.0794, 0.0) == 10.1073);
  CHECK(combined_score(10.1073, 2.0794, 1.0) == doctest::Approx(12.1867).epsilon(1e-12));
  CHECK(combined_score(10.0, 2.0, 2.0) - combined_score(10.0, 2.0, 1.0) == 2.0);
}

TEST_CASE("partition windows") {
  const auto ws = partition_windows(25, 10);
  REQUIRE(ws.size() == 3);
  CHECK(ws[0] == WindowSpec{0, 9});
  CHECK(ws[2] == WindowSpec{20, 24});
  for (int f = 1; f <= 40; ++f) {
    for (int len = 2; len <= 12; ++len) {
      const auto w = partition_windows(f, len);
      int next = 0;
      for (const WindowSpec& s : w) {
        CHECK(s.start == next);
        CHECK(s.length() <= len);
        next = s.end + 1;
      }
      CHECK(next == f);
    }
  }
}

TEST_CASE("frame pair schedules") {
  const WindowSpec w{3, 6};
  CHECK(frame_pairs(w, PairSchedule::Consecutive) == std::vector<std::pair<int, int>>{{3, 4}, {4, 5}, {5, 6}});
  CHECK(frame_pairs(w, PairSchedule::AllPairs).size() == 6);
  CHECK(frame_pairs(w, PairSchedule::Endpoints) == std::vector<std::pair<int, int>>{{3, 6}});
  CHECK(frame_pairs({2, 2}, PairSchedule::Consecutive).empty());
  CHECK(parse_pair_schedule("all_pairs") == PairSchedule::AllPairs);
  CHECK(to_string(PairSchedule::Endpoints) == "endpoints");
  CHECK_THROWS_AS(parse_pair_schedule("random"), Error);
}

TEST_CASE("scoring params validation") {
  ScoringParams p;
  CHECK_NOTHROW(p.validate());
  p.window_len = 1;
  CHECK_THROWS_AS(p.validate(), Error);
  p = {};
  p.lambda = -1;
  CHECK_THROWS_AS(p.validate(), Error);
  p = {};
  p.iou_floor = 0;
  CHECK_THROWS_AS(p.validate(), Error);
  p.iou_floor = 1.5;
  CHECK_THROWS_AS(p.validate(), Error);
}

TEST_CASE("select target") {
  std::vector<ScoreBreakdown> s{candidate(0, 5.0, 10), candidate(1, 12.2, 10), candidate(2, 3.1, 10)};
  TargetSelection t = select_target(s, 0.1);
  CHECK(t.cluster_id == 1);
  CHECK(t.confidence == doctest::Approx((12.2 - 5.0) / 12.2));
  CHECK_FALSE(t.low_confidence);
  CHECK(t.candidates == 3);

  s = {candidate(0, 7.0, 100), candidate(1, 7.0, 4)};
  t = select_target(s, 0.1);
  CHECK(t.cluster_id == 1);
  CHECK(t.confidence == 0.0);
  CHECK(t.low_confidence);

  s = {candidate(0, 7.0, 4), candidate(1, 7.0, 4)};
  CHECK(select_target(s, 0.1).cluster_id == 0);

  s = {candidate(0, 100.0, 4), candidate(1, 1.0, 4)};
  s[0].eligible = false;
  CHECK(select_target(s, 0.1).cluster_id == 1);
  CHECK(select_target(s, 0.1).low_confidence);

  CHECK_THROWS_AS(select_target(std::vector<ScoreBreakdown>{}, 0.1), Error);
  s[1].eligible = false;
  CHECK_THROWS_AS(select_target(s, 0.1), Error);
}

TEST_CASE("adding a shared constant to psi_rho keeps the argmax") {
  std::vector<ScoreBreakdown> s{candidate(0, 5.0, 10), candidate(1, 12.2, 30), candidate(2, 3.1, 2)};
  const int before = select_target(s, 0.1).cluster_id;
  for (auto& c : s) {
    c.psi_rho += std::exp(1.0);
    c.psi += std::exp(1.0);
  }
  CHECK(select_target(s, 0.1).cluster_id == before);
}

TEST_CASE("S1: the moving cluster wins") {
  const Detected d = score_scene(synthetic::scene_s1());
  const int uav = d.scene.uav_cluster(d.labeling);
  REQUIRE(uav >= 0);
  CHECK(select_target(d.scores, 0.1).cluster_id == uav);
  for (const ScoreBreakdown& s : d.scores) {
    CHECK(s.psi == s.psi_rho + 1.0 * s.psi_iou);
    CHECK(s.psi_iou >= 0.0);
    if (s.cluster_id != uav && s.eligible) CHECK(d.scores[static_cast<std::size_t>(uav)].psi_iou > s.psi_iou);
  }
}

TEST_CASE("S2: a lone static cluster is low confidence") {
  const Detected d = score_scene(synthetic::scene_s2());
  const TargetSelection t = select_target(d.scores, 0.1);
  CHECK(t.low_confidence);
  const ScoreBreakdown& s = d.scores[static_cast<std::size_t>(t.cluster_id)];
  CHECK(s.psi_iou < 1e-3);
  for (const WindowContribution& w : s.windows) {
    REQUIRE(w.relative_density.has_value());
    CHECK(*w.relative_density < 1.0);
  }
}

TEST_CASE("two identical static walls score alike") {
  // Second wall is an exact lattice-shifted copy of the first.
  const ScanSequence one = synthetic::generate(synthetic::scene_s2()).sequence;
  std::vector<Frame> frames = one.frames();
  for (auto& f : frames) {
    const std::size_t n = f.points.size();
    for (std::size_t i = 0; i < n; ++i) {
      Point3T copy = f.points[i];
      copy.position.y() += 32.0;
      f.points.push_back(copy);
    }
  }
  const ScanSequence seq = ScanSequence::from_frames(frames);
  ClusterLabeling cl = dbscan(superimpose(seq, full_window(seq)), DbscanParams{});
  cl.source_window = full_window(seq);
  const auto scores = score_all_clusters(seq, cl, ScoringParams{}, 0.5);
  REQUIRE(scores.size() == 2);
  CHECK(std::abs(scores[0].psi - scores[1].psi) <= 1e-9 * std::abs(scores[0].psi));
}

TEST_CASE("full-window relative density is exactly one") {
  ScoringParams p;
  p.window_len = 1000;
  const Detected d = score_scene(synthetic::scene_s1(), p);
  for (const ScoreBreakdown& s : d.scores) {
    if (!s.eligible) continue;
    REQUIRE(s.windows.size() == 1);
    CHECK(*s.windows[0].relative_density == 1.0);
    CHECK(s.psi_rho == std::exp(1.0));
  }
}

TEST_CASE("lattice translation leaves score breakdowns bit-identical") {
  synthetic::SceneConfig cfg = synthetic::scene_s1();
  cfg.duration = 4.0;
  const Detected d = score_scene(cfg);
  const ScanSequence moved = shifted(d.scene.sequence, Vector3(0.5 * 12, -0.5 * 40, 0.5 * 6));
  const std::vector<ScoreBreakdown> again = score_all_clusters(moved, d.labeling, ScoringParams{}, 0.5);
  REQUIRE(again.size() == d.scores.size());
  for (std::size_t k = 0; k < again.size(); ++k) {
    CHECK(again[k].psi == d.scores[k].psi);
    CHECK(again[k].psi_iou == d.scores[k].psi_iou);
    CHECK(again[k].psi_rho == d.scores[k].psi_rho);
    CHECK(again[k].global_voxels == d.scores[k].global_voxels);
    CHECK(again[k].global_density == d.scores[k].global_density);
    REQUIRE(again[k].windows.size() == d.scores[k].windows.size());
    for (std::size_t w = 0; w < again[k].windows.size(); ++w) {
      CHECK(again[k].windows[w].relative_density == d.scores[k].windows[w].relative_density);
      REQUIRE(again[k].windows[w].pairs.size() == d.scores[k].windows[w].pairs.size());
      for (std::size_t p = 0; p < again[k].windows[w].pairs.size(); ++p) {
        CHECK(again[k].windows[w].pairs[p].iou == d.scores[k].windows[w].pairs[p].iou);
      }
    }
  }
}

TEST_CASE("pair schedules and re-clustering all pick the UAV on S1") {
  for (const PairSchedule sched : {PairSchedule::Consecutive, PairSchedule::AllPairs, PairSchedule::Endpoints}) {
    for (const bool rerun : {false, true}) {
      ScoringParams p;
      p.pair_schedule = sched;
      p.rerun_local_clustering = rerun;
      const Detected d = score_scene(synthetic::scene_s1(), p);
      CHECK(select_target(d.scores, 0.1).cluster_id == d.scene.uav_cluster(d.labeling));
    }
  }
}

TEST_CASE("prefilter excludes very large clusters") {
  ScoringParams p;
  p.prefilter_max_voxels = 10;
  const Detected d = score_scene(synthetic::scene_s1(), p);
  for (const ScoreBreakdown& s : d.scores) {
    if (s.global_voxels > 10) {
      CHECK_FALSE(s.eligible);
      CHECK_FALSE(s.excluded_reason.empty());
    }
  }
}

TEST_CASE("scoring rejects a labeling of a different point set") {
  const Detected d = score_scene(synthetic::scene_s2());
  ClusterLabeling bad = d.labeling;
  bad.labels.pop_back();
  CHECK_THROWS_AS(score_all_clusters(d.scene.sequence, bad, ScoringParams{}, 0.5), Error);
}

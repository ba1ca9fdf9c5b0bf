// SPDX-License-Identifier: Apache-2.0

#include "unlidar/pipeline.hpp"

#include <chrono>
#include <fstream>

#include "unlidar/error.hpp"
#include "unlidar/numfmt.hpp"

namespace unlidar {

namespace {

[[noreturn]] void invalid(const std::string& what) { throw Error(ErrorCode::InvalidConfig, what); }

double to_double(const std::string& key, const std::string& v) {
  double out = 0.0;
  if (!parse_finite(v, out)) invalid("'" + key + "' expects a number, got '" + v + "'");
  return out;
}

int to_int(const std::string& key, const std::string& v) {
  int out = 0;
  if (!parse_int(v, out)) invalid("'" + key + "' expects an integer, got '" + v + "'");
  return out;
}

bool to_bool(const std::string& key, const std::string& v) {
  if (v == "true" || v == "1") return true;
  if (v == "false" || v == "0") return false;
  invalid("'" + key + "' expects true or false, got '" + v + "'");
}

std::string format_name(ScanFormat f) { return f == ScanFormat::PcdSeries ? "pcd_series" : "csv"; }

class Stopwatch {
 public:
  double lap_ms() {
    const auto now = std::chrono::steady_clock::now();
    const double ms = std::chrono::duration<double, std::milli>(now - last_).count();
    last_ = now;
    return ms;
  }

 private:
  std::chrono::steady_clock::time_point last_ = std::chrono::steady_clock::now();
};

}  // namespace

const std::vector<std::string>& PipelineConfig::keys() {
  static const std::vector<std::string> k = {
      "input",         "format",        "output_dir",      "query_times",          "eps",
      "min_pts",       "voxel_edge",    "lambda",          "iou_floor",            "pair_schedule",
      "window_len",    "rerun_local_clustering", "prefilter", "prefilter_max_voxels", "min_frames",
      "min_margin",    "outlier_gate",  "control_reducer", "degree_cap",           "max_dt"};
  return k;
}

void PipelineConfig::set(const std::string& key, const std::string& v) {
  if (key == "input") input = v;
  else if (key == "format") format = parse_scan_format(v);
  else if (key == "output_dir") output_dir = v;
  else if (key == "query_times") query_times = v;
  else if (key == "eps") dbscan.eps = to_double(key, v);
  else if (key == "min_pts") dbscan.min_pts = to_int(key, v);
  else if (key == "voxel_edge") voxel_edge = to_double(key, v);
  else if (key == "lambda") scoring.lambda = to_double(key, v);
  else if (key == "iou_floor") scoring.iou_floor = to_double(key, v);
  else if (key == "pair_schedule") scoring.pair_schedule = parse_pair_schedule(v);
  else if (key == "window_len") scoring.window_len = to_int(key, v);
  else if (key == "rerun_local_clustering") scoring.rerun_local_clustering = to_bool(key, v);
  else if (key == "prefilter") scoring.prefilter = to_bool(key, v);
  else if (key == "prefilter_max_voxels") {
    const int n = to_int(key, v);
    if (n < 0) invalid("'prefilter_max_voxels' must be >= 0");
    scoring.prefilter_max_voxels = static_cast<std::size_t>(n);
  } else if (key == "min_frames") scoring.min_frames = to_int(key, v);
  else if (key == "min_margin") min_margin = to_double(key, v);
  else if (key == "outlier_gate") control.outlier_gate = to_double(key, v);
  else if (key == "control_reducer") control.reducer = parse_control_reducer(v);
  else if (key == "degree_cap") degree_cap = to_int(key, v);
  else if (key == "max_dt") max_dt = to_double(key, v);
  else invalid("unknown configuration key '" + key + "'");
  scoring.local_dbscan = dbscan;
}

void PipelineConfig::validate() const {
  dbscan.validate();
  if (!(voxel_edge > 0.0)) invalid("voxel_edge must be > 0");
  scoring.validate();
  if (!(min_margin >= 0.0)) invalid("min_margin must be >= 0");
  if (degree_cap < 1) invalid("degree_cap must be >= 1");
  if (!(max_dt >= 0.0)) invalid("max_dt must be >= 0");
}

nlohmann::ordered_json PipelineConfig::to_json() const {
  nlohmann::ordered_json j;
  j["input"] = input.string();
  j["format"] = format_name(format);
  j["output_dir"] = output_dir.string();
  j["query_times"] = query_times.string();
  j["eps"] = dbscan.eps;
  j["min_pts"] = dbscan.min_pts;
  j["voxel_edge"] = voxel_edge;
  j["lambda"] = scoring.lambda;
  j["iou_floor"] = scoring.iou_floor;
  j["pair_schedule"] = to_string(scoring.pair_schedule);
  j["window_len"] = scoring.window_len;
  j["rerun_local_clustering"] = scoring.rerun_local_clustering;
  j["prefilter"] = scoring.prefilter;
  j["prefilter_max_voxels"] = scoring.prefilter_max_voxels;
  j["min_frames"] = scoring.min_frames;
  j["min_margin"] = min_margin;
  j["outlier_gate"] = control.outlier_gate;
  j["control_reducer"] = to_string(control.reducer);
  j["degree_cap"] = degree_cap;
  j["max_dt"] = max_dt;
  return j;
}

PipelineConfig PipelineConfig::from_json(const nlohmann::json& j) {
  if (!j.is_object()) invalid("configuration must be a JSON object");
  PipelineConfig c;
  for (const auto& [key, value] : j.items()) {
    std::string text;
    if (value.is_string()) text = value.get<std::string>();
    else if (value.is_boolean()) text = value.get<bool>() ? "true" : "false";
    else if (value.is_number_integer()) text = std::to_string(value.get<long long>());
    else if (value.is_number()) text = format_time(value.get<double>());
    else invalid("'" + key + "' must be a string, number or boolean");
    c.set(key, text);
  }
  return c;
}

PipelineConfig PipelineConfig::load(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::Io, "cannot read " + path.string());
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& e) {
    invalid(path.string() + ": " + e.what());
  }
  return from_json(j);
}

DetectionResult run_detection(const ScanSequence& seq, const PipelineConfig& config,
                              const std::vector<double>& query_times) {
  config.validate();
  if (seq.empty()) throw Error(ErrorCode::EmptySequence, "sequence has no frames");
  DetectionResult r;
  Stopwatch sw;

  r.superposition = superimpose(seq, full_window(seq));
  if (r.superposition.empty()) throw Error(ErrorCode::EmptyInput, "sequence contains no points");
  r.labeling = dbscan(r.superposition, config.dbscan);
  r.timings_ms["clustering"] = sw.lap_ms();

  ScoringParams sp = config.scoring;
  sp.local_dbscan = config.dbscan;
  r.scores = score_all_clusters(seq, r.labeling, sp, config.voxel_edge);
  r.selection = select_target(r.scores, config.min_margin);
  r.timings_ms["scoring"] = sw.lap_ms();

  r.target_points = cluster_members(r.labeling, r.superposition, r.selection.cluster_id);
  r.control = extract_control_points(seq, r.labeling, r.selection.cluster_id, config.control);
  r.spline = fit_spline(r.control, config.degree_cap);

  std::vector<double> ts = query_times;
  if (ts.empty()) {
    for (const Frame& f : seq.frames()) {
      if (f.timestamp >= r.spline.t_min && f.timestamp <= r.spline.t_max) ts.push_back(f.timestamp);
    }
  }
  r.trajectory = interpolate(r.spline, ts);
  r.timings_ms["trajectory"] = sw.lap_ms();
  return r;
}

nlohmann::ordered_json score_audit(const DetectionResult& result, const PipelineConfig& config) {
  using nlohmann::ordered_json;
  ordered_json doc;
  doc["voxel_edge"] = config.voxel_edge;
  doc["lambda"] = config.scoring.lambda;
  doc["iou_floor"] = config.scoring.iou_floor;
  doc["pair_schedule"] = to_string(config.scoring.pair_schedule);
  doc["window_len"] = config.scoring.window_len;
  doc["rerun_local_clustering"] = config.scoring.rerun_local_clustering;
  doc["cluster_count"] = result.labeling.cluster_count;
  doc["noise_points"] = result.labeling.noise_count();

  ordered_json clusters = ordered_json::array();
  for (const ScoreBreakdown& s : result.scores) {
    ordered_json c;
    c["id"] = s.cluster_id;
    c["points"] = s.points;
    c["global_voxels"] = s.global_voxels;
    c["global_density"] = s.global_density;
    c["frames_present"] = s.frames_present;
    c["eligible"] = s.eligible;
    c["excluded_reason"] = s.excluded_reason;
    c["psi_rho"] = s.psi_rho;
    c["psi_iou"] = s.psi_iou;
    c["psi"] = s.psi;
    ordered_json windows = ordered_json::array();
    for (const WindowContribution& w : s.windows) {
      ordered_json wj;
      wj["start"] = w.window.start;
      wj["end"] = w.window.end;
      wj["points"] = w.points;
      wj["local_density"] = w.local_density ? ordered_json(*w.local_density) : ordered_json(nullptr);
      wj["relative_density"] = w.relative_density ? ordered_json(*w.relative_density) : ordered_json(nullptr);
      ordered_json pairs = ordered_json::array();
      for (const PairIoU& p : w.pairs) pairs.push_back(ordered_json::array({p.frame_a, p.frame_b, p.iou}));
      wj["pairs"] = pairs;
      windows.push_back(wj);
    }
    c["windows"] = windows;
    clusters.push_back(c);
  }
  doc["clusters"] = clusters;

  ordered_json sel;
  sel["cluster_id"] = result.selection.cluster_id;
  sel["psi"] = result.selection.psi;
  sel["confidence"] = result.selection.confidence;
  sel["low_confidence"] = result.selection.low_confidence;
  sel["candidates"] = result.selection.candidates;
  doc["selection"] = sel;
  return doc;
}

}  // namespace unlidar

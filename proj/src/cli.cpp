// SPDX-License-Identifier: Apache-2.0

#include "unlidar/cli.hpp"

#include <algorithm>
#include <cstdint>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <sstream>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "unlidar/error.hpp"
#include "unlidar/evaluation.hpp"
#include "unlidar/numfmt.hpp"
#include "unlidar/pipeline.hpp"
#include "unlidar/plot.hpp"
#include "unlidar/synthetic.hpp"

namespace fs = std::filesystem;

namespace unlidar::cli {

namespace {

constexpr const char* kExitCodes =
    "Exit codes: 0 success, 1 internal error, 2 configuration error, 3 input error,\n"
    "            4 low-confidence detection, 5 evaluation overlap failure.";

int exit_code_for(const Error& e) {
  switch (e.code()) {
    case ErrorCode::InvalidConfig: return kConfigError;
    case ErrorCode::NoOverlap:
    case ErrorCode::EmptyPairs: return kNoOverlap;
    default: return kInputError;
  }
}

void write_text(const fs::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorCode::Io, "cannot write " + path.string());
  out << text;
}

std::vector<double> query_times_from(const fs::path& path) {
  std::vector<double> ts;
  for (const TrajectorySample& s : load_trajectory_csv(path).samples) ts.push_back(s.t);
  return ts;
}

Trajectory to_trajectory(const PointSet& ps) {
  Trajectory tr;
  for (const Point3T& p : ps.points) tr.samples.push_back({p.t, p.position});
  return tr;
}

// ---- detect --------------------------------------------------------------

struct DetectOptions {
  std::string config_path;
  std::map<std::string, std::string> flags;  // config key -> flag value
  std::vector<std::string> sets;
  std::vector<std::string> sweeps;
};

std::pair<std::string, std::string> split_assignment(const std::string& s) {
  const auto eq = s.find('=');
  if (eq == std::string::npos || eq == 0) {
    throw Error(ErrorCode::InvalidConfig, "expected key=value, got '" + s + "'");
  }
  return {s.substr(0, eq), s.substr(eq + 1)};
}

std::vector<std::vector<std::pair<std::string, std::string>>> sweep_combinations(
    const std::vector<std::string>& sweeps) {
  std::vector<std::vector<std::pair<std::string, std::string>>> combos{{}};
  for (const std::string& s : sweeps) {
    const auto [key, list] = split_assignment(s);
    std::vector<std::string> values;
    std::stringstream ss(list);
    std::string v;
    while (std::getline(ss, v, ',')) {
      if (!v.empty()) values.push_back(v);
    }
    if (values.empty()) throw Error(ErrorCode::InvalidConfig, "sweep '" + key + "' has no values");
    std::vector<std::vector<std::pair<std::string, std::string>>> next;
    for (const auto& c : combos) {
      for (const std::string& value : values) {
        auto e = c;
        e.emplace_back(key, value);
        next.push_back(std::move(e));
      }
    }
    combos = std::move(next);
  }
  return combos;
}

int detect_once(const PipelineConfig& cfg) {
  if (cfg.input.empty()) throw Error(ErrorCode::InvalidConfig, "no input given (config 'input' or --input)");
  const ScanSequence seq = load_sequence(cfg.input, cfg.format);
  std::vector<double> query;
  if (!cfg.query_times.empty()) query = query_times_from(cfg.query_times);

  const DetectionResult r = run_detection(seq, cfg, query);

  fs::create_directories(cfg.output_dir);
  save_trajectory_csv(cfg.output_dir / "trajectory.csv", r.trajectory.trajectory);
  save_trajectory_csv(cfg.output_dir / "target_points.csv", to_trajectory(r.target_points));
  write_text(cfg.output_dir / "scores.json", score_audit(r, cfg).dump(2) + "\n");

  nlohmann::ordered_json run;
  run["command"] = "detect";
  run["config"] = cfg.to_json();
  run["input_hash_fnv1a64"] = content_hash(cfg.input);
  run["query_times_hash_fnv1a64"] = cfg.query_times.empty() ? "" : content_hash(cfg.query_times);
  run["frames"] = seq.frame_count();
  run["points"] = seq.point_count();
  run["cluster_count"] = r.labeling.cluster_count;
  run["selected_cluster"] = r.selection.cluster_id;
  run["psi"] = r.selection.psi;
  run["confidence"] = r.selection.confidence;
  run["low_confidence"] = r.selection.low_confidence;
  run["candidates"] = r.selection.candidates;
  run["control_points"] = r.control.size();
  run["spline_degree"] = r.spline.degree();
  run["trajectory_samples"] = r.trajectory.trajectory.size();
  run["clamped_queries"] = r.trajectory.clamped;
  write_text(cfg.output_dir / "run.json", run.dump(2) + "\n");

  nlohmann::ordered_json timings(r.timings_ms);
  write_text(cfg.output_dir / "timings.json", timings.dump(2) + "\n");

  std::cout << "selected cluster " << r.selection.cluster_id << " of " << r.labeling.cluster_count
            << " (psi " << format_coord(r.selection.psi) << ", confidence " << format_coord(r.selection.confidence)
            << "), " << r.trajectory.trajectory.size() << " trajectory samples -> " << cfg.output_dir.string()
            << "\n";
  if (r.selection.low_confidence) {
    std::cerr << "warning: low-confidence selection (margin " << format_coord(r.selection.confidence)
              << " < " << format_coord(cfg.min_margin) << ")\n";
    return kLowConfidence;
  }
  return kOk;
}

int cmd_detect(const DetectOptions& opt) {
  PipelineConfig base;
  if (!opt.config_path.empty()) base = PipelineConfig::load(opt.config_path);
  for (const auto& [key, value] : opt.flags) base.set(key, value);
  for (const std::string& s : opt.sets) {
    const auto [key, value] = split_assignment(s);
    base.set(key, value);
  }

  const auto combos = sweep_combinations(opt.sweeps);
  std::vector<PipelineConfig> runs;
  for (const auto& combo : combos) {
    PipelineConfig cfg = base;
    std::string name;
    for (const auto& [key, value] : combo) {
      cfg.set(key, value);
      name += (name.empty() ? "" : "_") + key + "=" + value;
    }
    if (!name.empty()) cfg.output_dir = base.output_dir / name;
    cfg.validate();
    runs.push_back(std::move(cfg));
  }

  int worst = kOk;
  for (const PipelineConfig& cfg : runs) worst = std::max(worst, detect_once(cfg));
  return worst;
}

// ---- eval ----------------------------------------------------------------

int cmd_eval(const std::string& pred_path, const std::string& gt_path, double max_dt, const std::string& out) {
  if (!(max_dt >= 0.0)) throw Error(ErrorCode::InvalidConfig, "max_dt must be >= 0");
  const Trajectory pred = load_trajectory_csv(pred_path);
  const Trajectory gt = load_trajectory_csv(gt_path);
  const RmseReport rep = evaluate(pred, gt, max_dt);
  if (!out.empty()) write_text(out, rep.to_json());
  std::printf("%-10s %12s\n", "axis", "RMSE (m)");
  std::printf("%-10s %12.4f\n%-10s %12.4f\n%-10s %12.4f\n%-10s %12.4f\n", "Dx", rep.dx, "Dy", rep.dy, "Dz", rep.dz,
              "aggregate", rep.aggregate);
  std::printf("%zu pairs, %zu ground-truth samples dropped\n", rep.n_pairs, rep.dropped);
  return kOk;
}

// ---- synth ---------------------------------------------------------------

int cmd_synth(const std::string& scene_path, const std::string& preset, std::optional<std::uint64_t> seed,
              const fs::path& out_dir, const std::string& format) {
  synthetic::SceneConfig cfg;
  if (!scene_path.empty()) {
    cfg = synthetic::load_scene_config(scene_path);
    if (seed) cfg.rng_seed = *seed;
  } else if (preset == "s1") {
    cfg = synthetic::scene_s1(seed.value_or(1));
  } else if (preset == "s2") {
    cfg = synthetic::scene_s2(seed.value_or(2));
  } else if (preset == "random") {
    cfg = synthetic::random_scene(seed.value_or(0));
  } else {
    throw Error(ErrorCode::InvalidConfig, "give --scene FILE or --preset s1|s2|random");
  }
  const ScanFormat fmt = parse_scan_format(format);
  const synthetic::Scene scene = synthetic::generate(cfg);

  fs::create_directories(out_dir);
  if (fmt == ScanFormat::Csv) save_scan_csv(out_dir / "scan.csv", scene.sequence);
  else save_pcd_series(out_dir / "scan", scene.sequence);
  save_trajectory_csv(out_dir / "ground_truth.csv", scene.ground_truth);
  write_text(out_dir / "scene.json", synthetic::to_json(cfg).dump(2) + "\n");
  std::cout << scene.sequence.frame_count() << " frames, " << scene.sequence.point_count() << " points ("
            << scene.uav_points << " UAV returns) -> " << out_dir.string() << "\n";
  return kOk;
}

// ---- plot ----------------------------------------------------------------

int cmd_plot(const std::vector<std::string>& preds, const std::string& gt, const std::string& points,
             const std::string& out, const std::string& title) {
  std::vector<PlotLayer> layers;
  if (!points.empty()) {
    PlotLayer l = trajectory_layer(load_trajectory_csv(points, false), "sampled target points", true);
    if (l.points.empty()) throw Error(ErrorCode::EmptyInput, points + " has no samples");
    layers.push_back(std::move(l));
  }
  if (!gt.empty()) {
    PlotLayer l = trajectory_layer(load_trajectory_csv(gt), "ground truth");
    if (l.points.empty()) throw Error(ErrorCode::EmptyInput, gt + " has no samples");
    layers.push_back(std::move(l));
  }
  for (const std::string& p : preds) {
    PlotLayer l = trajectory_layer(load_trajectory_csv(p), preds.size() == 1 ? "prediction" : fs::path(p).stem().string());
    if (l.points.empty()) throw Error(ErrorCode::EmptyInput, p + " has no samples");
    layers.push_back(std::move(l));
  }
  // Fixed roles: points green, ground truth red, first prediction blue.
  bool first_pred = true;
  for (PlotLayer& l : layers) {
    if (l.as_markers) l.color = "#2ca02c";
    else if (!gt.empty() && &l == &layers[points.empty() ? 0 : 1]) l.color = "#d62728";
    else if (first_pred) {
      l.color = "#1f77b4";
      first_pred = false;
    }
  }
  write_text(out, render_projections_svg(layers, title));
  std::cout << layers.size() << " layer(s) -> " << out << "\n";
  return kOk;
}

}  // namespace

std::string content_hash(const fs::path& path) {
  std::uint64_t h = 0xcbf29ce484222325ull;
  auto feed = [&h](const fs::path& file) {
    std::ifstream in(file, std::ios::binary);
    if (!in) throw Error(ErrorCode::Io, "cannot read " + file.string());
    char buf[1 << 14];
    while (in) {
      in.read(buf, sizeof(buf));
      for (std::streamsize i = 0; i < in.gcount(); ++i) {
        h ^= static_cast<unsigned char>(buf[i]);
        h *= 0x100000001b3ull;
      }
    }
  };
  if (fs::is_directory(path)) {
    std::vector<fs::path> files;
    for (const auto& e : fs::directory_iterator(path)) {
      if (e.is_regular_file()) files.push_back(e.path());
    }
    std::sort(files.begin(), files.end());
    for (const fs::path& f : files) feed(f);
  } else {
    feed(path);
  }
  char out[17];
  std::snprintf(out, sizeof(out), "%016llx", static_cast<unsigned long long>(h));
  return out;
}

int run(int argc, const char* const* argv) {
  CLI::App app{"Unsupervised UAV trajectory estimation from sparse LiDAR scan sequences", "unlidar"};
  app.footer(kExitCodes);
  app.require_subcommand(1);

  DetectOptions det;
  auto* detect = app.add_subcommand("detect", "Cluster, score and reconstruct the UAV trajectory");
  detect->add_option("-c,--config", det.config_path, "JSON configuration document");
  struct FlagSpec {
    const char* flag;
    const char* key;
    const char* help;
  };
  static const FlagSpec kFlags[] = {
      {"-i,--input", "input", "scan CSV file or PCD-series directory"},
      {"--format", "format", "csv | pcd_series"},
      {"-o,--output-dir", "output_dir", "output directory"},
      {"--query-times", "query_times", "CSV with a t column of query timestamps"},
      {"--eps", "eps", "DBSCAN radius (m)"},
      {"--min-pts", "min_pts", "DBSCAN minimum neighborhood size"},
      {"--voxel-edge", "voxel_edge", "voxel edge (m)"},
      {"--lambda", "lambda", "weight of the IoU score"},
      {"--iou-floor", "iou_floor", "IoU clamp before the logarithm"},
      {"--pair-schedule", "pair_schedule", "consecutive | all_pairs | endpoints"},
      {"--window-len", "window_len", "frames per local window (>= 2)"},
      {"--rerun-local-clustering", "rerun_local_clustering", "re-cluster each window (true/false)"},
      {"--prefilter", "prefilter", "exclude very large clusters (true/false)"},
      {"--prefilter-max-voxels", "prefilter_max_voxels", "voxel count above which a cluster is excluded"},
      {"--min-frames", "min_frames", "frames a cluster must appear in to be selectable"},
      {"--min-margin", "min_margin", "confidence below which selection is flagged LOW"},
      {"--outlier-gate", "outlier_gate", "control-point outlier gate (m), <= 0 disables"},
      {"--control-reducer", "control_reducer", "centroid | median"},
      {"--degree-cap", "degree_cap", "maximum spline degree"},
      {"--max-dt", "max_dt", "evaluation time gate (s)"},
  };
  std::map<std::string, std::string> flag_values;
  std::map<std::string, CLI::Option*> flag_opts;
  for (const FlagSpec& f : kFlags) {
    flag_opts[f.key] = detect->add_option(f.flag, flag_values[f.key], f.help);
  }
  detect->add_option("--set", det.sets, "override any configuration key: key=value")->take_all();
  detect->add_option("--sweep", det.sweeps, "key=v1,v2,... ; one output directory per combination")->take_all();
  detect->footer(kExitCodes);

  std::string pred, gt, eval_out;
  double max_dt = 0.5;
  auto* eval = app.add_subcommand("eval", "RMSE of a predicted trajectory against ground truth");
  eval->add_option("-p,--pred", pred, "predicted trajectory CSV (t,x,y,z)")->required();
  eval->add_option("-g,--gt", gt, "ground-truth trajectory CSV (t,x,y,z)")->required();
  eval->add_option("--max-dt", max_dt, "drop ground truth this far outside the prediction (s)");
  eval->add_option("-o,--output", eval_out, "report JSON path");
  eval->footer(kExitCodes);

  std::string scene_path, preset, synth_format = "csv", synth_out = "scene";
  std::optional<std::uint64_t> seed;
  auto* synth = app.add_subcommand("synth", "Generate a synthetic scan sequence with ground truth");
  synth->add_option("--scene", scene_path, "scene configuration JSON");
  synth->add_option("--preset", preset, "s1 | s2 | random");
  synth->add_option("--seed", seed, "override the scene RNG seed");
  synth->add_option("--format", synth_format, "csv | pcd_series");
  synth->add_option("-o,--output-dir", synth_out, "output directory");
  synth->footer(kExitCodes);

  std::vector<std::string> plot_preds;
  std::string plot_gt, plot_points, plot_out = "trajectory.svg", plot_title;
  auto* plot = app.add_subcommand("plot", "Render XY/XZ/YZ projections as SVG");
  plot->add_option("predictions", plot_preds, "predicted trajectory CSV files");
  plot->add_option("-g,--gt", plot_gt, "ground-truth trajectory CSV");
  plot->add_option("--points", plot_points, "sampled target points CSV (t,x,y,z)");
  plot->add_option("-o,--output", plot_out, "SVG path");
  plot->add_option("--title", plot_title, "plot title");
  plot->footer(kExitCodes);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kOk : kConfigError;
  }

  try {
    if (detect->parsed()) {
      for (const auto& [key, opt] : flag_opts) {
        if (opt->count() > 0) det.flags[key] = flag_values[key];
      }
      return cmd_detect(det);
    }
    if (eval->parsed()) return cmd_eval(pred, gt, max_dt, eval_out);
    if (synth->parsed()) return cmd_synth(scene_path, preset, seed, synth_out, synth_format);
    if (plot->parsed()) {
      if (plot_preds.empty() && plot_gt.empty() && plot_points.empty()) {
        throw Error(ErrorCode::InvalidConfig, "nothing to plot");
      }
      return cmd_plot(plot_preds, plot_gt, plot_points, plot_out, plot_title);
    }
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return exit_code_for(e);
  } catch (const std::exception& e) {
    std::cerr << "internal error: " << e.what() << "\n";
    return kInternal;
  }
  return kInternal;
}

int run(const std::vector<std::string>& args) {
  std::vector<const char*> argv{"unlidar"};
  for (const std::string& a : args) argv.push_back(a.c_str());
  return run(static_cast<int>(argv.size()), argv.data());
}

}  // namespace unlidar::cli

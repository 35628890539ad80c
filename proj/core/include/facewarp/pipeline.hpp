#pragma once

#include <map>
#include <string>
#include <vector>

#include "facewarp/annotations.hpp"
#include "facewarp/lk_tracker.hpp"
#include "facewarp/optimize.hpp"
#include "facewarp/problem.hpp"
#include "facewarp/render.hpp"

namespace facewarp {

struct RunConfig {
  std::string frames_pattern;   // printf-style, e.g. frames/%06d.png
  std::string annotations_path;
  std::string output_dir;
  enum class Mode { Full, Sequential } mode = Mode::Full;
  int grid_cols = kDefaultGridCols;
  int grid_rows = kDefaultGridRows;
  std::map<std::string, double> weight_overrides;
  bool no_render = false;
  bool export_mesh = false;
  std::string metrics_path;      // empty = skip
  std::string dump_system_path;  // empty = skip
  int threads = 0;               // 0 = hardware concurrency
  SolverOptions solver;
};

struct StageTimings {
  double annotation_ingest_ms = 0.0;
  double line_tracking_ms = 0.0;
  double mesh_optimization_ms = 0.0;  // assembly + solve
  double image_warping_ms = 0.0;
  double total_ms = 0.0;
};

struct RunState {
  RunConfig config;
  VideoAnnotations annotations;
  WarpProblem problem;
  std::vector<LineTrack> tracks;
  OptimizeResult solution;
  RenderStats render_stats;
  StageTimings timings;
  int frames_rendered = 0;
};

// End-to-end pipeline: ingest, track, assemble, solve, render, export.
// Throws on any failure; the CLI maps exceptions to a machine-parseable
// error line and a nonzero exit status.
RunState run_pipeline(const RunConfig& config);

// Problem construction from in-memory inputs (also used by run_pipeline and
// the tests): builds face vertex sets, weights, per-frame stereographic
// targets, and line-quad crossings for the tracked lines.
WarpProblem build_problem(const VideoAnnotations& annotations,
                          const std::vector<std::vector<ImageU8>>& masks_per_frame,
                          const std::vector<LineTrack>& tracks, int grid_cols, int grid_rows,
                          const EnergyWeights& weights);

void export_mesh_csv(const std::string& path, const std::vector<Mesh>& meshes);
void export_latents_csv(const std::string& path,
                        const std::vector<std::map<int, LatentState>>& latents);
void export_metrics(const RunState& state, const std::string& path);

// expands a printf-style %d pattern for one frame index
std::string format_frame_path(const std::string& pattern, int index);

}  // namespace facewarp

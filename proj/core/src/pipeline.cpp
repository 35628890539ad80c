#include "facewarp/pipeline.hpp"

#include <algorithm>
#include <cctype>
#include <chrono>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <stdexcept>
#include <thread>

#include <json.hpp>

#include "facewarp/energy.hpp"
#include "facewarp/face_region.hpp"
#include "facewarp/image.hpp"
#include "facewarp/line_geometry.hpp"
#include "facewarp/pyramid.hpp"

namespace facewarp {

namespace {

namespace fs = std::filesystem;
using Clock = std::chrono::steady_clock;

double ms_since(Clock::time_point t0) {
  return std::chrono::duration<double, std::milli>(Clock::now() - t0).count();
}

// deterministic static partition over [0, n); the first worker exception
// is rethrown on the calling thread
void parallel_for(int n, int threads, const std::function<void(int)>& fn) {
  if (threads <= 0) threads = static_cast<int>(std::thread::hardware_concurrency());
  threads = std::max(1, std::min(threads, n));
  if (threads == 1) {
    for (int i = 0; i < n; ++i) fn(i);
    return;
  }
  std::vector<std::thread> pool;
  std::vector<std::exception_ptr> errors(threads);
  pool.reserve(threads);
  for (int t = 0; t < threads; ++t)
    pool.emplace_back([&, t] {
      try {
        for (int i = t; i < n; i += threads) fn(i);
      } catch (...) {
        errors[t] = std::current_exception();
      }
    });
  for (std::thread& th : pool) th.join();
  for (const std::exception_ptr& e : errors)
    if (e) std::rethrow_exception(e);
}

}  // namespace

std::string format_frame_path(const std::string& pattern, int index) {
  size_t pos = pattern.find('%');
  if (pos == std::string::npos)
    throw std::invalid_argument("frame pattern must contain one %d-style placeholder");
  size_t end = pos + 1;
  while (end < pattern.size() && (std::isdigit(static_cast<unsigned char>(pattern[end])) ||
                                  pattern[end] == '0'))
    ++end;
  if (end >= pattern.size() || pattern[end] != 'd')
    throw std::invalid_argument("frame pattern must contain one %d-style placeholder");
  if (pattern.find('%', end) != std::string::npos)
    throw std::invalid_argument("frame pattern must contain exactly one placeholder");
  char buf[4096];
  int written = std::snprintf(buf, sizeof(buf), pattern.c_str(), index);
  if (written < 0 || written >= static_cast<int>(sizeof(buf)))
    throw std::invalid_argument("frame pattern expansion failed");
  return std::string(buf);
}

WarpProblem build_problem(const VideoAnnotations& annotations,
                          const std::vector<std::vector<ImageU8>>& masks_per_frame,
                          const std::vector<LineTrack>& tracks, int grid_cols, int grid_rows,
                          const EnergyWeights& weights) {
  WarpProblem problem;
  problem.grid_cols = grid_cols;
  problem.grid_rows = grid_rows;
  problem.weights = weights;
  problem.source_mesh = uniform_mesh(annotations.camera, grid_cols, grid_rows);

  int W = annotations.camera.width_px;
  int H = annotations.camera.height_px;

  for (int n = 0; n < annotations.frame_count(); ++n) {
    FrameData fd;
    fd.intrinsics = annotations.intrinsics_for_frame(n);
    fd.stereo_target = stereographic_mesh(fd.intrinsics, grid_cols, grid_rows);

    const FrameAnnotations& fa = annotations.frames[n];
    std::vector<std::vector<int>> vertex_sets;
    for (size_t f = 0; f < fa.faces.size(); ++f) {
      const FaceAnnotation& face = fa.faces[f];
      std::vector<int> set = face_vertex_set(face.bbox, masks_per_frame[n][f], problem.source_mesh);
      if (set.empty()) continue;  // face contributes nothing this frame
      FaceInstance inst;
      inst.track_id = face.track_id;
      inst.bbox = face.bbox;
      inst.weight = face_weight(face.bbox.center(), W, H);
      inst.vertex_set = set;
      inst.latent_index = static_cast<int>(fd.faces.size());
      vertex_sets.push_back(inst.vertex_set);
      fd.faces.push_back(std::move(inst));
    }

    for (const LineTrack& t : tracks) {
      if (!t.alive_at(n)) continue;
      const std::array<Vec2, 2>& seg = t.at(n);
      std::vector<QuadCrossing> crossings =
          line_quad_crossings(seg[0], seg[1], problem.source_mesh, vertex_sets);
      fd.crossings.insert(fd.crossings.end(), crossings.begin(), crossings.end());
    }
    problem.frames.push_back(std::move(fd));
  }
  return problem;
}

RunState run_pipeline(const RunConfig& config) {
  auto t_start = Clock::now();
  RunState state;
  state.config = config;

  if (config.grid_cols < 2 || config.grid_rows < 2)
    throw std::invalid_argument("grid dimensions must be at least 2x2");

  // --- annotation ingest ---------------------------------------------------
  auto t0 = Clock::now();
  state.annotations = load_annotations(config.annotations_path);
  const VideoAnnotations& ann = state.annotations;
  int n_frames = ann.frame_count();

  fs::path ann_dir = fs::path(config.annotations_path).parent_path();

  std::vector<ImageU8> frames(n_frames);
  parallel_for(n_frames, config.threads, [&](int n) {
    frames[n] = read_png_rgb8(format_frame_path(config.frames_pattern, n));
  });
  for (int n = 0; n < n_frames; ++n) {
    if (frames[n].width != ann.camera.width_px || frames[n].height != ann.camera.height_px)
      throw std::runtime_error("frame " + std::to_string(n) +
                               " dimensions do not match the camera block");
  }

  std::map<std::string, ImageU8> mask_cache;
  std::vector<std::vector<ImageU8>> masks(n_frames);
  for (int n = 0; n < n_frames; ++n) {
    for (const FaceAnnotation& face : ann.frames[n].faces) {
      std::string path = (ann_dir / face.mask_path).string();
      auto it = mask_cache.find(path);
      if (it == mask_cache.end()) it = mask_cache.emplace(path, read_png_gray8(path)).first;
      if (it->second.width != ann.camera.width_px || it->second.height != ann.camera.height_px)
        throw std::runtime_error("mask " + face.mask_path + " dimensions do not match frame " +
                                 std::to_string(n));
      masks[n].push_back(it->second);
    }
  }
  state.timings.annotation_ingest_ms = ms_since(t0);

  // --- line tracking --------------------------------------------------------
  t0 = Clock::now();
  std::vector<SeedLine> seeds;
  for (int n = 0; n < n_frames; ++n) {
    for (const LineAnnotation& line : ann.frames[n].lines) {
      bool seen = std::any_of(seeds.begin(), seeds.end(),
                              [&](const SeedLine& s) { return s.track_id == line.track_id; });
      if (!seen) seeds.push_back({line.track_id, n, line.p0, line.p1});
    }
  }
  std::vector<ImagePyramid> pyramids(n_frames);
  if (!seeds.empty()) {
    parallel_for(n_frames, config.threads,
                 [&](int n) { pyramids[n] = build_pyramid(to_grayscale(frames[n]), 3); });
    state.tracks = track_lines(pyramids, seeds);
  }
  state.timings.line_tracking_ms = ms_since(t0);

  // --- mesh optimization ----------------------------------------------------
  t0 = Clock::now();
  EnergyWeights weights;
  for (const auto& [name, value] : config.weight_overrides) weights.set(name, value);
  state.problem = build_problem(ann, masks, state.tracks, config.grid_cols, config.grid_rows,
                                weights);

  if (!config.dump_system_path.empty()) {
    UnknownLayout layout = UnknownLayout::build(state.problem);
    SparseLsqSystem sys = build_system(state.problem, layout,
                                       {config.solver.tikhonov, config.solver.tikhonov_mu});
    dump_system(sys, config.dump_system_path);
  }

  state.solution = config.mode == RunConfig::Mode::Full
                       ? optimize_full(state.problem, config.solver)
                       : optimize_sequential(state.problem, config.solver);
  state.timings.mesh_optimization_ms = ms_since(t0);

  // --- image warping ----------------------------------------------------------
  t0 = Clock::now();
  if (!config.no_render) {
    fs::create_directories(config.output_dir);
    std::vector<RenderStats> stats(n_frames);
    parallel_for(n_frames, config.threads, [&](int n) {
      WarpField field{state.problem.source_mesh, state.solution.meshes[n]};
      ImageU8 out = render_frame(frames[n], field, &stats[n]);
      fs::path name = fs::path(format_frame_path(config.frames_pattern, n)).filename();
      write_png((fs::path(config.output_dir) / name).string(), out);
    });
    for (const RenderStats& s : stats) {
      state.render_stats.fold_over_triangles += s.fold_over_triangles;
      state.render_stats.uncovered_pixels += s.uncovered_pixels;
    }
    state.frames_rendered = n_frames;
  }
  state.timings.image_warping_ms = ms_since(t0);
  state.timings.total_ms = ms_since(t_start);

  // --- exports ---------------------------------------------------------------
  if (config.export_mesh) {
    fs::create_directories(config.output_dir);
    export_mesh_csv((fs::path(config.output_dir) / "meshes.csv").string(),
                    state.solution.meshes);
    export_latents_csv((fs::path(config.output_dir) / "latents.csv").string(),
                       state.solution.latents);
  }
  if (!config.metrics_path.empty()) export_metrics(state, config.metrics_path);
  return state;
}

void export_mesh_csv(const std::string& path, const std::vector<Mesh>& meshes) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path);
  out.precision(17);
  out << "frame,vertex_row,vertex_col,x,y\n";
  for (size_t n = 0; n < meshes.size(); ++n)
    for (int r = 0; r < meshes[n].rows; ++r)
      for (int c = 0; c < meshes[n].cols; ++c)
        out << n << ',' << r << ',' << c << ',' << meshes[n].at(r, c).x << ','
            << meshes[n].at(r, c).y << '\n';
}

void export_latents_csv(const std::string& path,
                        const std::vector<std::map<int, LatentState>>& latents) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path);
  out.precision(17);
  out << "frame,track_id,a,b,tx,ty\n";
  for (size_t n = 0; n < latents.size(); ++n)
    for (const auto& [track_id, s] : latents[n])
      out << n << ',' << track_id << ',' << s.a << ',' << s.b << ',' << s.tx << ',' << s.ty
          << '\n';
}

void export_metrics(const RunState& state, const std::string& path) {
  nlohmann::json j;
  j["timings_ms"] = {
      {"annotation_ingest", state.timings.annotation_ingest_ms},
      {"line_tracking", state.timings.line_tracking_ms},
      {"mesh_optimization", state.timings.mesh_optimization_ms},
      {"image_warping", state.timings.image_warping_ms},
      {"total", state.timings.total_ms},
  };
  j["mesh_optimization_breakdown_ms"] = {
      {"assembly", state.solution.report.assembly_ms},
      {"solve", state.solution.report.solve_ms},
  };
  const EnergyBreakdown& e = state.solution.report.energies;
  j["energies"] = {
      {"face", e.face},         {"smoothness", e.smoothness}, {"bending", e.bending},
      {"boundary", e.boundary}, {"line", e.line},             {"temporal", e.temporal},
      {"coherence", e.coherence}, {"total", e.total},
  };
  j["solver"] = {
      {"iterations", state.solution.report.iterations},
      {"relative_gradient_norm", state.solution.report.relative_gradient_norm},
      {"converged", state.solution.report.converged},
      {"initial_energy", state.solution.report.initial_energy},
      {"flagged_empty_faces", state.solution.report.flagged_empty_faces},
  };
  j["render"] = {
      {"frames", state.frames_rendered},
      {"fold_over_triangles", state.render_stats.fold_over_triangles},
      {"uncovered_pixels", state.render_stats.uncovered_pixels},
  };
  nlohmann::json tracks = nlohmann::json::array();
  for (const LineTrack& t : state.tracks)
    tracks.push_back({{"track_id", t.track_id},
                      {"first_frame", t.first_frame},
                      {"last_frame", t.last_frame()},
                      {"alive_frames", static_cast<int>(t.endpoints.size())}});
  j["line_tracks"] = tracks;

  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path);
  out << j.dump(2) << "\n";
}

}  // namespace facewarp

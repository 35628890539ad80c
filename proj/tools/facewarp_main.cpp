#include <cstdio>
#include <exception>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "facewarp/pipeline.hpp"

namespace {

bool parse_grid(const std::string& text, int& cols, int& rows) {
  size_t x = text.find_first_of("xX");
  if (x == std::string::npos) return false;
  try {
    cols = std::stoi(text.substr(0, x));
    rows = std::stoi(text.substr(x + 1));
  } catch (const std::exception&) {
    return false;
  }
  return cols >= 2 && rows >= 2;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"facewarp - corrects wide-angle face distortion in videos via mesh warping"};

  facewarp::RunConfig config;
  std::string mode = "full";
  std::string grid = "33x25";
  std::vector<std::string> weight_args;

  app.add_option("--frames", config.frames_pattern,
                 "printf-style input frame pattern, e.g. frames/%06d.png")
      ->required();
  app.add_option("--annotations", config.annotations_path, "annotations JSON path")->required();
  app.add_option("--out", config.output_dir, "output directory")->required();
  app.add_option("--mode", mode, "optimization schedule: full | sequential")
      ->check(CLI::IsMember({"full", "sequential"}));
  app.add_option("--grid", grid, "mesh grid dimensions as CxR (default 33x25)");
  app.add_option("--weight", weight_args,
                 "energy weight override name=value (repeatable); names: face, smoothness, "
                 "bending, boundary, line, coherence, temporal, face_scale_weight, "
                 "face_scale_target");
  app.add_flag("--no-render", config.no_render, "skip writing warped frames");
  app.add_flag("--export-mesh", config.export_mesh, "write meshes.csv and latents.csv");
  app.add_option("--export-metrics", config.metrics_path, "write metrics JSON to this path");
  app.add_option("--dump-system", config.dump_system_path,
                 "write the triplet matrix and rhs to this path");
  app.add_option("--threads", config.threads, "worker threads (0 = hardware concurrency)");

  CLI11_PARSE(app, argc, argv);

  try {
    config.mode = (mode == "sequential") ? facewarp::RunConfig::Mode::Sequential
                                         : facewarp::RunConfig::Mode::Full;
    if (!parse_grid(grid, config.grid_cols, config.grid_rows))
      throw std::invalid_argument("--grid expects CxR with C,R >= 2, e.g. 33x25");
    for (const std::string& w : weight_args) {
      size_t eq = w.find('=');
      if (eq == std::string::npos)
        throw std::invalid_argument("--weight expects name=value, got: " + w);
      config.weight_overrides[w.substr(0, eq)] = std::stod(w.substr(eq + 1));
    }

    facewarp::RunState state = facewarp::run_pipeline(config);

    std::printf("frames=%d rendered=%d solver_iterations=%d total_ms=%.1f\n",
                state.annotations.frame_count(), state.frames_rendered,
                state.solution.report.iterations, state.timings.total_ms);
    return 0;
  } catch (const std::exception& e) {
    std::string msg = e.what();
    for (char& c : msg)
      if (c == '\n' || c == '"') c = ' ';
    std::fprintf(stderr, "{\"error\":\"%s\"}\n", msg.c_str());
    return 1;
  }
}

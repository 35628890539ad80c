// Generates a small synthetic wide-angle clip (frames, subject masks, and
// an annotations file) so the warper can be exercised without real footage.

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <string>

#include <CLI11.hpp>
#include <json.hpp>

#include "facewarp/annotations.hpp"
#include "facewarp/image.hpp"

namespace fs = std::filesystem;
using namespace facewarp;

namespace {

double texture(double x, double y) {
  return 0.45 + 0.16 * std::sin(0.23 * x) * std::cos(0.19 * y) +
         0.12 * std::sin(0.07 * x + 0.11 * y) + 0.08 * std::cos(0.045 * x - 0.09 * y);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"facewarp-demo - writes a synthetic clip and annotations"};
  std::string out_dir = "demo_clip";
  int n_frames = 12, width = 1024, height = 768;
  double dfov = 100.0;
  app.add_option("--out", out_dir, "output directory");
  app.add_option("--frames", n_frames, "frame count")->check(CLI::PositiveNumber);
  app.add_option("--width", width, "frame width");
  app.add_option("--height", height, "frame height");
  app.add_option("--dfov", dfov, "diagonal field of view in degrees");
  CLI11_PARSE(app, argc, argv);

  try {
    fs::create_directories(fs::path(out_dir) / "frames");
    fs::create_directories(fs::path(out_dir) / "masks");

    VideoAnnotations ann;
    ann.camera = {width, height, focal_from_dfov(dfov, width, height)};
    ann.per_frame_focal.assign(n_frames, ann.camera.focal_px);

    Vec2 line_a{0.06 * width, 0.78 * height}, line_b{0.94 * width, 0.82 * height};
    double face_r = 0.11 * std::min(width, height);

    for (int n = 0; n < n_frames; ++n) {
      double cx = 0.62 * width + 0.01 * width * n;
      double cy = 0.30 * height + 0.003 * height * n;

      ImageU8 frame(width, height, 3);
      Vec2 line_d = line_b - line_a;
      Vec2 line_n = line_d.perp() * (1.0 / line_d.norm());
      for (int y = 0; y < height; ++y)
        for (int x = 0; x < width; ++x) {
          double v = texture(x, y);
          Vec2 rel = Vec2{x + 0.5, y + 0.5} - line_a;
          double t = rel.dot(line_d) / line_d.squared_norm();
          if (t >= 0.0 && t <= 1.0) {
            double dist = std::abs(rel.dot(line_n));
            v += 0.8 * std::exp(-0.5 * dist * dist / 2.0);
          }
          double d2 = (x + 0.5 - cx) * (x + 0.5 - cx) + (y + 0.5 - cy) * (y + 0.5 - cy);
          if (d2 < face_r * face_r) v = 0.65 + 0.15 * std::sin(0.2 * x) * std::sin(0.26 * y);
          auto q = static_cast<std::uint8_t>(std::lround(255.0 * std::clamp(v, 0.0, 1.0)));
          frame.at(x, y, 0) = q;
          frame.at(x, y, 1) = static_cast<std::uint8_t>(q * 0.92);
          frame.at(x, y, 2) = static_cast<std::uint8_t>(q * 0.85);
        }

      ImageU8 mask(width, height, 1, 0);
      for (int y = 0; y < height; ++y)
        for (int x = 0; x < width; ++x) {
          double d2 = (x + 0.5 - cx) * (x + 0.5 - cx) + (y + 0.5 - cy) * (y + 0.5 - cy);
          if (d2 < 1.8 * face_r * face_r) mask.at(x, y) = 255;
        }

      char name[64];
      std::snprintf(name, sizeof(name), "frames/%06d.png", n);
      write_png((fs::path(out_dir) / name).string(), frame);
      std::snprintf(name, sizeof(name), "masks/%06d.png", n);
      write_png((fs::path(out_dir) / name).string(), mask);

      FrameAnnotations fa;
      fa.index = n;
      std::snprintf(name, sizeof(name), "masks/%06d.png", n);
      fa.faces.push_back({1, {cx - face_r, cy - face_r, 2 * face_r, 2 * face_r}, name});
      if (n == 0) fa.lines.push_back({100, line_a, line_b});
      ann.frames.push_back(std::move(fa));
    }

    save_annotations((fs::path(out_dir) / "annotations.json").string(), ann);
    std::printf("wrote %d frames under %s\n", n_frames, out_dir.c_str());
    std::printf("run: facewarp --frames %s/frames/%%06d.png --annotations %s/annotations.json "
                "--out %s/corrected\n",
                out_dir.c_str(), out_dir.c_str(), out_dir.c_str());
    return 0;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "{\"error\":\"%s\"}\n", e.what());
    return 1;
  }
}

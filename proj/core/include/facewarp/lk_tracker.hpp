#pragma once

#include <array>
#include <optional>
#include <vector>

#include "facewarp/geometry.hpp"
#include "facewarp/pyramid.hpp"

namespace facewarp {

struct LkOptions {
  int pyramid_levels = 3;
  int window_radius = 10;  // 21x21 window
  int max_iterations = 30;
  double epsilon = 0.01;         // px, per-level update convergence
  double min_eigenvalue = 1e-4;  // structure tensor validity threshold
};

// Coarse-to-fine Lucas-Kanade for one point. Failure (degenerate texture or
// the point leaving the frame) is a value, not an exception.
std::optional<Vec2> lk_track_point(const ImagePyramid& prev, const ImagePyramid& next,
                                   const Vec2& p, const LkOptions& opts = {});

struct LineTrack {
  int track_id = -1;
  int first_frame = 0;
  // endpoints[i] holds the segment at frame first_frame + i
  std::vector<std::array<Vec2, 2>> endpoints;

  int last_frame() const { return first_frame + static_cast<int>(endpoints.size()) - 1; }
  bool alive_at(int frame) const { return frame >= first_frame && frame <= last_frame(); }
  const std::array<Vec2, 2>& at(int frame) const { return endpoints[frame - first_frame]; }
};

struct SeedLine {
  int track_id = -1;
  int first_frame = 0;
  Vec2 p0;
  Vec2 p1;
};

struct TrackOptions {
  LkOptions lk;
  double max_fb_error = 2.0;          // px, forward-backward re-projection
  double max_orientation_delta = 1.0; // degrees between adjacent frames
};

// Tracks each seed segment's endpoints across the frame pyramids, applying
// the forward-backward and orientation consistency filters. A track that
// fails either filter simply ends; there is no re-detection.
std::vector<LineTrack> track_lines(const std::vector<ImagePyramid>& frames,
                                   const std::vector<SeedLine>& seeds,
                                   const TrackOptions& opts = {});

}  // namespace facewarp

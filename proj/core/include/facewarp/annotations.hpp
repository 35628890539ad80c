#pragma once

#include <string>
#include <vector>

#include "facewarp/camera.hpp"
#include "facewarp/geometry.hpp"

namespace facewarp {

struct FaceAnnotation {
  int track_id = -1;
  BBox bbox;
  std::string mask_path;  // relative to the annotations file
};

struct LineAnnotation {
  int track_id = -1;
  Vec2 p0;
  Vec2 p1;
};

struct FrameAnnotations {
  int index = 0;
  std::vector<FaceAnnotation> faces;
  std::vector<LineAnnotation> lines;
};

struct VideoAnnotations {
  CameraIntrinsics camera;
  // per-frame focal override, same length as frames (filled with the global
  // focal when the file carries none); supports digital zoom
  std::vector<double> per_frame_focal;
  std::vector<FrameAnnotations> frames;

  int frame_count() const { return static_cast<int>(frames.size()); }
  CameraIntrinsics intrinsics_for_frame(int n) const {
    CameraIntrinsics c = camera;
    c.focal_px = per_frame_focal[n];
    return c;
  }
};

// Parses and validates the annotations document. Throws std::runtime_error
// with the offending frame index on malformed input.
VideoAnnotations load_annotations(const std::string& path);
void save_annotations(const std::string& path, const VideoAnnotations& ann);

}  // namespace facewarp

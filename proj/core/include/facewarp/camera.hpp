#pragma once

#include <vector>

#include "facewarp/geometry.hpp"

namespace facewarp {

inline constexpr int kDefaultGridCols = 33;
inline constexpr int kDefaultGridRows = 25;

struct CameraIntrinsics {
  int width_px = 0;
  int height_px = 0;
  double focal_px = 0.0;

  // throws std::invalid_argument when width/height < 2 or focal <= 0
  void validate() const;

  double min_dim() const { return static_cast<double>(width_px < height_px ? width_px : height_px); }
  Vec2 center() const { return {0.5 * width_px, 0.5 * height_px}; }
  double corner_radius() const { return center().norm(); }
};

// Diagonal field of view <-> focal length, pinhole model.
double focal_from_dfov(double dfov_deg, int width_px, int height_px);
double dfov_from_focal(double focal_px, int width_px, int height_px);

// Grid of 2-D vertices in pixel coordinates, row-major.
struct Mesh {
  int cols = 0;
  int rows = 0;
  std::vector<Vec2> vertices;

  int vertex_count() const { return cols * rows; }
  int index(int r, int c) const { return r * cols + c; }
  Vec2& at(int r, int c) { return vertices[index(r, c)]; }
  const Vec2& at(int r, int c) const { return vertices[index(r, c)]; }
};

// Axis-aligned grid spanning [0,W]x[0,H] inclusive.
Mesh uniform_mesh(const CameraIntrinsics& cam, int cols, int rows);

// Scale factor that keeps r_u = r_p at the nearest image boundary.
double stereographic_r0(const CameraIntrinsics& cam);

// Radial perspective->stereographic mapping about the image center.
Vec2 stereographic_point(const Vec2& p, const CameraIntrinsics& cam);

Mesh stereographic_mesh(const CameraIntrinsics& cam, int cols, int rows);

}  // namespace facewarp

#pragma once

#include <array>
#include <vector>

#include "facewarp/camera.hpp"
#include "facewarp/geometry.hpp"

namespace facewarp {

inline constexpr double kMinCrossingLength = 0.25;  // px

// One line segment clipped to one source quad. Corner order is
// top-left, top-right, bottom-left, bottom-right; `weights` is the
// difference of the exit and entry bilinear weight vectors (sums to 0),
// `dhat` the source-space clipped segment, `normal` its unit normal.
struct QuadCrossing {
  int quad_row = 0;
  int quad_col = 0;
  std::array<int, 4> corners{};  // mesh vertex indices
  std::array<double, 4> weights{};
  Vec2 dhat;
  Vec2 normal;
};

// Clips the segment against every axis-aligned source quad it passes
// through. Crossings shorter than min_length, and crossings in quads that
// touch any face vertex set, are dropped. Degenerate segments yield an
// empty list.
std::vector<QuadCrossing> line_quad_crossings(
    const Vec2& p0, const Vec2& p1, const Mesh& source_mesh,
    const std::vector<std::vector<int>>& face_vertex_sets,
    double min_length = kMinCrossingLength);

}  // namespace facewarp

#include "facewarp/face_region.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace facewarp {

std::vector<int> face_vertex_set(const BBox& bbox, const ImageU8& mask, const Mesh& source_mesh) {
  if (mask.channels != 1)
    throw std::invalid_argument("face_vertex_set: mask must be single-channel");
  double mesh_w = source_mesh.at(0, source_mesh.cols - 1).x;
  double mesh_h = source_mesh.at(source_mesh.rows - 1, 0).y;
  if (mask.width != static_cast<int>(mesh_w) || mask.height != static_cast<int>(mesh_h))
    throw std::invalid_argument("face_vertex_set: mask dimensions do not match the frame");

  Vec2 c = bbox.center();
  double x0 = std::max(0.0, c.x - bbox.w);
  double x1 = std::min(mesh_w, c.x + bbox.w);
  double y0 = std::max(0.0, c.y - bbox.h);
  double y1 = std::min(mesh_h, c.y + bbox.h);

  std::vector<int> out;
  for (int i = 0; i < source_mesh.vertex_count(); ++i) {
    const Vec2& p = source_mesh.vertices[i];
    if (p.x < x0 || p.x > x1 || p.y < y0 || p.y > y1) continue;
    int px = std::clamp(static_cast<int>(std::lround(p.x - 0.5)), 0, mask.width - 1);
    int py = std::clamp(static_cast<int>(std::lround(p.y - 0.5)), 0, mask.height - 1);
    if (mask.at(px, py) >= 128) out.push_back(i);
  }
  return out;
}

double face_weight(const Vec2& bbox_center, int width_px, int height_px) {
  Vec2 center{0.5 * width_px, 0.5 * height_px};
  double rk = (bbox_center - center).norm();
  double rmax = center.norm();
  return std::tanh(2.0 * rk / rmax);
}

}  // namespace facewarp

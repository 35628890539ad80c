#pragma once

#include <vector>

#include "facewarp/camera.hpp"
#include "facewarp/geometry.hpp"
#include "facewarp/image.hpp"

namespace facewarp {

// Mesh vertex indices covered by the face: source vertices inside the bbox
// expanded by a factor of two about its center (clipped to the frame) whose
// nearest mask pixel is >= 128. Mask dimensions must match the frame.
std::vector<int> face_vertex_set(const BBox& bbox, const ImageU8& mask, const Mesh& source_mesh);

// w_k = tanh(2 r_k / r_max), r_k measured from the image center to the bbox
// center, r_max to a corner.
double face_weight(const Vec2& bbox_center, int width_px, int height_px);

}  // namespace facewarp

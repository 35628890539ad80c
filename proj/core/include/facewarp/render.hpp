#pragma once

#include "facewarp/camera.hpp"
#include "facewarp/image.hpp"

namespace facewarp {

struct WarpField {
  Mesh source;  // uniform grid
  Mesh dest;    // optimized vertices, same dimensions
};

struct RenderStats {
  long fold_over_triangles = 0;
  long uncovered_pixels = 0;
};

// Forward mesh warp by inverse mapping: each destination quad is split into
// two triangles (fixed top-left to bottom-right diagonal); output pixels
// inside a triangle map to source coordinates through the triangle's affine
// inverse and are sampled bilinearly with border clamp. Pixels covered by
// no triangle take the nearest covered pixel's sample. Fold-over triangles
// render last-writer-wins and are counted.
ImageU8 render_frame(const ImageU8& src, const WarpField& field, RenderStats* stats = nullptr);

}  // namespace facewarp

#pragma once

#include <vector>

#include "facewarp/image.hpp"

namespace facewarp {

// Rec.601 luma scaled to [0,1].
ImageF to_grayscale(const ImageU8& rgb);

struct ImagePyramid {
  // level 0 = full resolution, each next level dims = ceil(previous / 2)
  std::vector<ImageF> levels;

  int level_count() const { return static_cast<int>(levels.size()); }
};

// 5-tap low-pass prefilter then 2x decimation per level. Throws when the
// input is smaller than 2^(levels-1) px on a side.
ImagePyramid build_pyramid(const ImageF& image, int levels);

}  // namespace facewarp

#include "facewarp/pyramid.hpp"

#include <algorithm>
#include <stdexcept>

namespace facewarp {

ImageF to_grayscale(const ImageU8& rgb) {
  if (rgb.channels != 3) throw std::invalid_argument("to_grayscale: expected 3-channel RGB");
  ImageF out(rgb.width, rgb.height);
  const double inv = 1.0 / 255.0;
  for (int y = 0; y < rgb.height; ++y)
    for (int x = 0; x < rgb.width; ++x) {
      double luma = 0.299 * rgb.at(x, y, 0) + 0.587 * rgb.at(x, y, 1) + 0.114 * rgb.at(x, y, 2);
      out.at(x, y) = static_cast<float>(luma * inv);
    }
  return out;
}

namespace {

// Burt-Adelson [1 4 6 4 1]/16 kernel with replicate border, evaluated at
// even positions only.
ImageF downsample2(const ImageF& in) {
  static const double k[5] = {1.0 / 16, 4.0 / 16, 6.0 / 16, 4.0 / 16, 1.0 / 16};
  int w2 = (in.width + 1) / 2;
  int h2 = (in.height + 1) / 2;

  // horizontal pass at even columns
  ImageF tmp(w2, in.height);
  for (int y = 0; y < in.height; ++y)
    for (int x = 0; x < w2; ++x) {
      double acc = 0.0;
      for (int t = -2; t <= 2; ++t) {
        int sx = std::clamp(2 * x + t, 0, in.width - 1);
        acc += k[t + 2] * in.at(sx, y);
      }
      tmp.at(x, y) = static_cast<float>(acc);
    }

  ImageF out(w2, h2);
  for (int y = 0; y < h2; ++y)
    for (int x = 0; x < w2; ++x) {
      double acc = 0.0;
      for (int t = -2; t <= 2; ++t) {
        int sy = std::clamp(2 * y + t, 0, in.height - 1);
        acc += k[t + 2] * tmp.at(x, sy);
      }
      out.at(x, y) = static_cast<float>(acc);
    }
  return out;
}

}  // namespace

ImagePyramid build_pyramid(const ImageF& image, int levels) {
  if (levels < 1) throw std::invalid_argument("build_pyramid: levels must be >= 1");
  int min_dim = 1 << (levels - 1);
  if (image.width < min_dim || image.height < min_dim)
    throw std::invalid_argument("build_pyramid: image too small for requested levels");
  ImagePyramid pyr;
  pyr.levels.reserve(levels);
  pyr.levels.push_back(image);
  for (int l = 1; l < levels; ++l) pyr.levels.push_back(downsample2(pyr.levels.back()));
  return pyr;
}

}  // namespace facewarp

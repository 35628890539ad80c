#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace facewarp {

// Interleaved 8-bit image, 1 (gray) or 3 (RGB) channels.
struct ImageU8 {
  int width = 0;
  int height = 0;
  int channels = 0;
  std::vector<std::uint8_t> data;

  ImageU8() = default;
  ImageU8(int w, int h, int ch, std::uint8_t fill = 0)
      : width(w), height(h), channels(ch),
        data(static_cast<size_t>(w) * h * ch, fill) {}

  std::uint8_t& at(int x, int y, int ch = 0) {
    return data[(static_cast<size_t>(y) * width + x) * channels + ch];
  }
  std::uint8_t at(int x, int y, int ch = 0) const {
    return data[(static_cast<size_t>(y) * width + x) * channels + ch];
  }
};

// Single-channel float image, values nominally in [0,1].
struct ImageF {
  int width = 0;
  int height = 0;
  std::vector<float> data;

  ImageF() = default;
  ImageF(int w, int h, float fill = 0.f)
      : width(w), height(h), data(static_cast<size_t>(w) * h, fill) {}

  float& at(int x, int y) { return data[static_cast<size_t>(y) * width + x]; }
  float at(int x, int y) const { return data[static_cast<size_t>(y) * width + x]; }
};

// PNG loaders convert whatever bit depth / palette the file uses to the
// requested 8-bit layout. Both throw std::runtime_error with the path on
// failure.
ImageU8 read_png_rgb8(const std::string& path);
ImageU8 read_png_gray8(const std::string& path);
void write_png(const std::string& path, const ImageU8& image);

// Bilinear sample with replicate border. Coordinates are frame coordinates:
// pixel (i,j) covers [i,i+1]x[j,j+1] with its center at (i+0.5, j+0.5).
float sample_bilinear(const ImageF& im, double x, double y);
double sample_bilinear_u8(const ImageU8& im, double x, double y, int ch);

}  // namespace facewarp

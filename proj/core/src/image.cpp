#include "facewarp/image.hpp"

#include <png.h>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <memory>
#include <stdexcept>

namespace facewarp {

namespace {

struct FileCloser {
  void operator()(std::FILE* f) const {
    if (f) std::fclose(f);
  }
};
using FilePtr = std::unique_ptr<std::FILE, FileCloser>;

[[noreturn]] void fail(const std::string& path, const char* what) {
  throw std::runtime_error("png: " + std::string(what) + ": " + path);
}

ImageU8 read_png(const std::string& path, int want_channels) {
  FilePtr fp(std::fopen(path.c_str(), "rb"));
  if (!fp) fail(path, "cannot open");

  png_byte header[8];
  if (std::fread(header, 1, 8, fp.get()) != 8 || png_sig_cmp(header, 0, 8))
    fail(path, "not a PNG file");

  png_structp png = png_create_read_struct(PNG_LIBPNG_VER_STRING, nullptr, nullptr, nullptr);
  if (!png) fail(path, "png_create_read_struct failed");
  png_infop info = png_create_info_struct(png);
  if (!info) {
    png_destroy_read_struct(&png, nullptr, nullptr);
    fail(path, "png_create_info_struct failed");
  }
  if (setjmp(png_jmpbuf(png))) {
    png_destroy_read_struct(&png, &info, nullptr);
    fail(path, "decode error");
  }

  png_init_io(png, fp.get());
  png_set_sig_bytes(png, 8);
  png_read_info(png, info);

  png_uint_32 w = png_get_image_width(png, info);
  png_uint_32 h = png_get_image_height(png, info);
  int color_type = png_get_color_type(png, info);
  int bit_depth = png_get_bit_depth(png, info);

  if (bit_depth == 16) png_set_strip_16(png);
  if (color_type == PNG_COLOR_TYPE_PALETTE) png_set_palette_to_rgb(png);
  if (color_type == PNG_COLOR_TYPE_GRAY && bit_depth < 8) png_set_expand_gray_1_2_4_to_8(png);
  if (png_get_valid(png, info, PNG_INFO_tRNS)) png_set_tRNS_to_alpha(png);
  if (color_type & PNG_COLOR_MASK_ALPHA) png_set_strip_alpha(png);

  if (want_channels == 3) {
    if (color_type == PNG_COLOR_TYPE_GRAY || color_type == PNG_COLOR_TYPE_GRAY_ALPHA)
      png_set_gray_to_rgb(png);
  } else {
    if (color_type == PNG_COLOR_TYPE_RGB || color_type == PNG_COLOR_TYPE_RGB_ALPHA ||
        color_type == PNG_COLOR_TYPE_PALETTE)
      png_set_rgb_to_gray_fixed(png, 1, -1, -1);  // default Rec.709-ish reduction
  }
  png_read_update_info(png, info);

  ImageU8 out(static_cast<int>(w), static_cast<int>(h), want_channels);
  size_t rowbytes = png_get_rowbytes(png, info);
  if (rowbytes != static_cast<size_t>(out.width) * want_channels) {
    png_destroy_read_struct(&png, &info, nullptr);
    fail(path, "unexpected row layout");
  }
  std::vector<png_bytep> rows(h);
  for (png_uint_32 y = 0; y < h; ++y) rows[y] = out.data.data() + static_cast<size_t>(y) * rowbytes;
  png_read_image(png, rows.data());
  png_read_end(png, nullptr);
  png_destroy_read_struct(&png, &info, nullptr);
  return out;
}

}  // namespace

ImageU8 read_png_rgb8(const std::string& path) { return read_png(path, 3); }
ImageU8 read_png_gray8(const std::string& path) { return read_png(path, 1); }

void write_png(const std::string& path, const ImageU8& image) {
  if (image.channels != 1 && image.channels != 3)
    throw std::invalid_argument("write_png: only 1- or 3-channel images");
  FilePtr fp(std::fopen(path.c_str(), "wb"));
  if (!fp) fail(path, "cannot open for writing");

  png_structp png = png_create_write_struct(PNG_LIBPNG_VER_STRING, nullptr, nullptr, nullptr);
  if (!png) fail(path, "png_create_write_struct failed");
  png_infop info = png_create_info_struct(png);
  if (!info) {
    png_destroy_write_struct(&png, nullptr);
    fail(path, "png_create_info_struct failed");
  }
  if (setjmp(png_jmpbuf(png))) {
    png_destroy_write_struct(&png, &info);
    fail(path, "encode error");
  }

  png_init_io(png, fp.get());
  png_set_IHDR(png, info, image.width, image.height, 8,
               image.channels == 3 ? PNG_COLOR_TYPE_RGB : PNG_COLOR_TYPE_GRAY,
               PNG_INTERLACE_NONE, PNG_COMPRESSION_TYPE_DEFAULT, PNG_FILTER_TYPE_DEFAULT);
  png_write_info(png, info);

  std::vector<png_bytep> rows(image.height);
  size_t rowbytes = static_cast<size_t>(image.width) * image.channels;
  for (int y = 0; y < image.height; ++y)
    rows[y] = const_cast<png_bytep>(image.data.data() + static_cast<size_t>(y) * rowbytes);
  png_write_image(png, rows.data());
  png_write_end(png, nullptr);
  png_destroy_write_struct(&png, &info);
}

float sample_bilinear(const ImageF& im, double x, double y) {
  double u = x - 0.5, v = y - 0.5;
  u = std::clamp(u, 0.0, static_cast<double>(im.width - 1));
  v = std::clamp(v, 0.0, static_cast<double>(im.height - 1));
  int x0 = static_cast<int>(u), y0 = static_cast<int>(v);
  int x1 = std::min(x0 + 1, im.width - 1), y1 = std::min(y0 + 1, im.height - 1);
  double fx = u - x0, fy = v - y0;
  double top = (1.0 - fx) * im.at(x0, y0) + fx * im.at(x1, y0);
  double bot = (1.0 - fx) * im.at(x0, y1) + fx * im.at(x1, y1);
  return static_cast<float>((1.0 - fy) * top + fy * bot);
}

double sample_bilinear_u8(const ImageU8& im, double x, double y, int ch) {
  double u = x - 0.5, v = y - 0.5;
  u = std::clamp(u, 0.0, static_cast<double>(im.width - 1));
  v = std::clamp(v, 0.0, static_cast<double>(im.height - 1));
  int x0 = static_cast<int>(u), y0 = static_cast<int>(v);
  int x1 = std::min(x0 + 1, im.width - 1), y1 = std::min(y0 + 1, im.height - 1);
  double fx = u - x0, fy = v - y0;
  double top = (1.0 - fx) * im.at(x0, y0, ch) + fx * im.at(x1, y0, ch);
  double bot = (1.0 - fx) * im.at(x0, y1, ch) + fx * im.at(x1, y1, ch);
  return (1.0 - fy) * top + fy * bot;
}

}  // namespace facewarp

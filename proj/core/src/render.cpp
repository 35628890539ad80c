#include "facewarp/render.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace facewarp {

namespace {

struct Triangle {
  Vec2 d0, d1, d2;  // destination
  Vec2 s0, s1, s2;  // source
};

void rasterize(const Triangle& t, const ImageU8& src, ImageU8& out, std::vector<char>& covered,
               long& fold_over) {
  Vec2 e1 = t.d1 - t.d0;
  Vec2 e2 = t.d2 - t.d0;
  double denom = e1.cross(e2);
  if (denom == 0.0) {
    ++fold_over;
    return;
  }
  if (denom < 0.0) ++fold_over;  // inverted vs. the source orientation

  double min_x = std::min({t.d0.x, t.d1.x, t.d2.x});
  double max_x = std::max({t.d0.x, t.d1.x, t.d2.x});
  double min_y = std::min({t.d0.y, t.d1.y, t.d2.y});
  double max_y = std::max({t.d0.y, t.d1.y, t.d2.y});
  int x0 = std::max(0, static_cast<int>(std::floor(min_x - 0.5)));
  int x1 = std::min(out.width - 1, static_cast<int>(std::ceil(max_x - 0.5)));
  int y0 = std::max(0, static_cast<int>(std::floor(min_y - 0.5)));
  int y1 = std::min(out.height - 1, static_cast<int>(std::ceil(max_y - 0.5)));

  Vec2 su = t.s1 - t.s0;
  Vec2 sv = t.s2 - t.s0;
  const double eps = 1e-9;

  for (int py = y0; py <= y1; ++py) {
    for (int px = x0; px <= x1; ++px) {
      Vec2 p{px + 0.5, py + 0.5};
      Vec2 d = p - t.d0;
      double l1 = d.cross(e2) / denom;
      double l2 = e1.cross(d) / denom;
      if (l1 < -eps || l2 < -eps || l1 + l2 > 1.0 + eps) continue;
      Vec2 s = t.s0 + su * l1 + sv * l2;
      for (int ch = 0; ch < src.channels; ++ch) {
        double value = sample_bilinear_u8(src, s.x, s.y, ch);
        out.at(px, py, ch) = static_cast<std::uint8_t>(
            std::clamp(std::lround(value), 0L, 255L));
      }
      covered[static_cast<size_t>(py) * out.width + px] = 1;
    }
  }
}

}  // namespace

ImageU8 render_frame(const ImageU8& src, const WarpField& field, RenderStats* stats) {
  const Mesh& sm = field.source;
  const Mesh& dm = field.dest;
  if (sm.cols != dm.cols || sm.rows != dm.rows || sm.cols < 2 || sm.rows < 2)
    throw std::invalid_argument("render_frame: mesh dimensions mismatch");
  double mesh_w = sm.at(0, sm.cols - 1).x;
  double mesh_h = sm.at(sm.rows - 1, 0).y;
  if (src.width != static_cast<int>(mesh_w) || src.height != static_cast<int>(mesh_h))
    throw std::invalid_argument("render_frame: image dimensions do not match the mesh");
  for (const Vec2& v : dm.vertices)
    if (!std::isfinite(v.x) || !std::isfinite(v.y))
      throw std::invalid_argument("render_frame: non-finite destination vertex");

  ImageU8 out(src.width, src.height, src.channels);
  std::vector<char> covered(static_cast<size_t>(src.width) * src.height, 0);
  long fold_over = 0;

  for (int r = 0; r + 1 < sm.rows; ++r) {
    for (int c = 0; c + 1 < sm.cols; ++c) {
      Vec2 s_tl = sm.at(r, c), s_tr = sm.at(r, c + 1);
      Vec2 s_bl = sm.at(r + 1, c), s_br = sm.at(r + 1, c + 1);
      Vec2 d_tl = dm.at(r, c), d_tr = dm.at(r, c + 1);
      Vec2 d_bl = dm.at(r + 1, c), d_br = dm.at(r + 1, c + 1);
      rasterize({d_tl, d_tr, d_br, s_tl, s_tr, s_br}, src, out, covered, fold_over);
      rasterize({d_tl, d_br, d_bl, s_tl, s_br, s_bl}, src, out, covered, fold_over);
    }
  }

  long uncovered = 0;
  for (char c : covered)
    if (!c) ++uncovered;

  if (uncovered > 0) {
    // row pass: copy from the nearest covered pixel in the same row
    std::vector<char> covered2 = covered;
    for (int y = 0; y < out.height; ++y) {
      for (int x = 0; x < out.width; ++x) {
        if (covered[static_cast<size_t>(y) * out.width + x]) continue;
        int best = -1, best_dist = out.width + 1;
        for (int d = 1; d <= best_dist; ++d) {
          int xl = x - d, xr = x + d;
          if (xl >= 0 && covered[static_cast<size_t>(y) * out.width + xl]) {
            best = xl;
            break;
          }
          if (xr < out.width && covered[static_cast<size_t>(y) * out.width + xr]) {
            best = xr;
            break;
          }
          if (xl < 0 && xr >= out.width) break;
        }
        if (best >= 0) {
          for (int ch = 0; ch < out.channels; ++ch) out.at(x, y, ch) = out.at(best, y, ch);
          covered2[static_cast<size_t>(y) * out.width + x] = 1;
        }
      }
    }
    // column pass for rows with no coverage at all
    for (int x = 0; x < out.width; ++x) {
      for (int y = 0; y < out.height; ++y) {
        if (covered2[static_cast<size_t>(y) * out.width + x]) continue;
        for (int d = 1; d < out.height; ++d) {
          int yu = y - d, yd = y + d;
          int from = -1;
          if (yu >= 0 && covered2[static_cast<size_t>(yu) * out.width + x]) from = yu;
          else if (yd < out.height && covered2[static_cast<size_t>(yd) * out.width + x]) from = yd;
          if (from >= 0) {
            for (int ch = 0; ch < out.channels; ++ch) out.at(x, y, ch) = out.at(x, from, ch);
            break;
          }
        }
      }
    }
  }

  if (stats) {
    stats->fold_over_triangles = fold_over;
    stats->uncovered_pixels = uncovered;
  }
  return out;
}

}  // namespace facewarp

#include "facewarp/lk_tracker.hpp"

#include <algorithm>
#include <cmath>

namespace facewarp {

namespace {

constexpr double kPi = 3.14159265358979323846;

// bilinear sample in index coordinates (pixel i at coordinate i), clamped
double sample_idx(const ImageF& im, double x, double y) {
  x = std::clamp(x, 0.0, static_cast<double>(im.width - 1));
  y = std::clamp(y, 0.0, static_cast<double>(im.height - 1));
  int x0 = static_cast<int>(x), y0 = static_cast<int>(y);
  int x1 = std::min(x0 + 1, im.width - 1), y1 = std::min(y0 + 1, im.height - 1);
  double fx = x - x0, fy = y - y0;
  double top = (1.0 - fx) * im.at(x0, y0) + fx * im.at(x1, y0);
  double bot = (1.0 - fx) * im.at(x0, y1) + fx * im.at(x1, y1);
  return (1.0 - fy) * top + fy * bot;
}

// undirected segment orientation in [0, 180)
double orientation_deg(const Vec2& d) {
  double a = std::atan2(d.y, d.x) * 180.0 / kPi;
  if (a < 0.0) a += 180.0;
  if (a >= 180.0) a -= 180.0;
  return a;
}

double orientation_delta_deg(const Vec2& a, const Vec2& b) {
  double d = std::abs(orientation_deg(a) - orientation_deg(b));
  return std::min(d, 180.0 - d);
}

}  // namespace

std::optional<Vec2> lk_track_point(const ImagePyramid& prev, const ImagePyramid& next,
                                   const Vec2& p, const LkOptions& opts) {
  int levels = std::min({opts.pyramid_levels, prev.level_count(), next.level_count()});
  const int r = opts.window_radius;
  const int n_win = (2 * r + 1) * (2 * r + 1);

  std::vector<double> gx(n_win), gy(n_win), tmpl(n_win);
  Vec2 p_idx{p.x - 0.5, p.y - 0.5};
  Vec2 guess{0.0, 0.0};

  for (int level = levels - 1; level >= 0; --level) {
    const ImageF& img_prev = prev.levels[level];
    const ImageF& img_next = next.levels[level];
    double scale = 1.0 / static_cast<double>(1 << level);
    Vec2 pl = p_idx * scale;

    // template window values and gradients (central differences,
    // replicate border) around the source point
    double gxx = 0.0, gxy = 0.0, gyy = 0.0;
    int k = 0;
    for (int dy = -r; dy <= r; ++dy)
      for (int dx = -r; dx <= r; ++dx, ++k) {
        double qx = pl.x + dx, qy = pl.y + dy;
        tmpl[k] = sample_idx(img_prev, qx, qy);
        gx[k] = 0.5 * (sample_idx(img_prev, qx + 1, qy) - sample_idx(img_prev, qx - 1, qy));
        gy[k] = 0.5 * (sample_idx(img_prev, qx, qy + 1) - sample_idx(img_prev, qx, qy - 1));
        gxx += gx[k] * gx[k];
        gxy += gx[k] * gy[k];
        gyy += gy[k] * gy[k];
      }

    double tr = gxx + gyy;
    double det = gxx * gyy - gxy * gxy;
    double disc = std::sqrt(std::max(0.0, tr * tr - 4.0 * det));
    double lambda_min = 0.5 * (tr - disc);
    if (level == 0 && lambda_min < opts.min_eigenvalue) return std::nullopt;

    Vec2 nu{0.0, 0.0};
    if (lambda_min > 1e-12) {
      for (int iter = 0; iter < opts.max_iterations; ++iter) {
        double bx = 0.0, by = 0.0;
        k = 0;
        for (int dy = -r; dy <= r; ++dy)
          for (int dx = -r; dx <= r; ++dx, ++k) {
            double jx = pl.x + dx + guess.x + nu.x;
            double jy = pl.y + dy + guess.y + nu.y;
            double di = tmpl[k] - sample_idx(img_next, jx, jy);
            bx += di * gx[k];
            by += di * gy[k];
          }
        Vec2 delta{(gyy * bx - gxy * by) / det, (gxx * by - gxy * bx) / det};
        nu += delta;
        if (!std::isfinite(nu.x) || !std::isfinite(nu.y)) return std::nullopt;
        if (delta.norm() < opts.epsilon) break;
        if ((guess + nu).norm() > img_next.width + img_next.height) break;  // runaway
      }
    }
    guess = (level > 0) ? (guess + nu) * 2.0 : guess + nu;
  }

  Vec2 tracked = p + guess;
  const ImageF& full = next.levels[0];
  if (tracked.x < 0.0 || tracked.x > full.width || tracked.y < 0.0 || tracked.y > full.height)
    return std::nullopt;
  return tracked;
}

std::vector<LineTrack> track_lines(const std::vector<ImagePyramid>& frames,
                                   const std::vector<SeedLine>& seeds,
                                   const TrackOptions& opts) {
  int n_frames = static_cast<int>(frames.size());
  std::vector<LineTrack> tracks;
  tracks.reserve(seeds.size());
  for (const SeedLine& seed : seeds) {
    LineTrack t;
    t.track_id = seed.track_id;
    t.first_frame = seed.first_frame;
    if (seed.first_frame < 0 || seed.first_frame >= n_frames) continue;
    t.endpoints.push_back({seed.p0, seed.p1});
    tracks.push_back(std::move(t));
  }

  for (int n = 0; n + 1 < n_frames; ++n) {
    for (LineTrack& t : tracks) {
      if (t.last_frame() != n) continue;  // not alive or already terminated
      const std::array<Vec2, 2>& cur = t.at(n);

      std::array<Vec2, 2> fwd;
      bool ok = true;
      for (int e = 0; e < 2 && ok; ++e) {
        auto f = lk_track_point(frames[n], frames[n + 1], cur[e], opts.lk);
        if (!f) {
          ok = false;
          break;
        }
        fwd[e] = *f;
        auto back = lk_track_point(frames[n + 1], frames[n], *f, opts.lk);
        if (!back || (*back - cur[e]).norm() > opts.max_fb_error) ok = false;
      }
      if (!ok) continue;

      if (orientation_delta_deg(cur[1] - cur[0], fwd[1] - fwd[0]) > opts.max_orientation_delta)
        continue;

      t.endpoints.push_back(fwd);
    }
  }
  return tracks;
}

}  // namespace facewarp

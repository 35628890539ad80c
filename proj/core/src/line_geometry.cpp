#include "facewarp/line_geometry.hpp"

#include <algorithm>
#include <cmath>

namespace facewarp {

namespace {

// Liang-Barsky parametric clip of p0 + t (p1 - p0), t in [t0, t1], against
// an axis-aligned rectangle. Returns false when the segment misses it.
bool clip_to_rect(const Vec2& p0, const Vec2& d, double xmin, double xmax,
                  double ymin, double ymax, double& t0, double& t1) {
  double p[4] = {-d.x, d.x, -d.y, d.y};
  double q[4] = {p0.x - xmin, xmax - p0.x, p0.y - ymin, ymax - p0.y};
  for (int i = 0; i < 4; ++i) {
    if (p[i] == 0.0) {
      if (q[i] < 0.0) return false;
    } else {
      double r = q[i] / p[i];
      if (p[i] < 0.0) {
        if (r > t1) return false;
        t0 = std::max(t0, r);
      } else {
        if (r < t0) return false;
        t1 = std::min(t1, r);
      }
    }
  }
  return t0 <= t1;
}

}  // namespace

std::vector<QuadCrossing> line_quad_crossings(
    const Vec2& p0, const Vec2& p1, const Mesh& source_mesh,
    const std::vector<std::vector<int>>& face_vertex_sets, double min_length) {
  std::vector<QuadCrossing> out;
  const Mesh& m = source_mesh;
  double W = m.at(0, m.cols - 1).x;
  double H = m.at(m.rows - 1, 0).y;
  Vec2 d = p1 - p0;
  if (d.norm() < min_length) return out;

  // restrict to the in-frame portion
  double t_in = 0.0, t_out = 1.0;
  if (!clip_to_rect(p0, d, 0.0, W, 0.0, H, t_in, t_out)) return out;

  // split at every interior grid line the segment crosses
  std::vector<double> ts{t_in, t_out};
  if (d.x != 0.0) {
    for (int c = 1; c < m.cols - 1; ++c) {
      double t = (m.at(0, c).x - p0.x) / d.x;
      if (t > t_in && t < t_out) ts.push_back(t);
    }
  }
  if (d.y != 0.0) {
    for (int r = 1; r < m.rows - 1; ++r) {
      double t = (m.at(r, 0).y - p0.y) / d.y;
      if (t > t_in && t < t_out) ts.push_back(t);
    }
  }
  std::sort(ts.begin(), ts.end());
  ts.erase(std::unique(ts.begin(), ts.end(),
                       [](double a, double b) { return std::abs(a - b) < 1e-12; }),
           ts.end());

  std::vector<char> excluded(m.vertex_count(), 0);
  for (const std::vector<int>& set : face_vertex_sets)
    for (int i : set)
      if (i >= 0 && i < m.vertex_count()) excluded[i] = 1;

  double cell_w = W / (m.cols - 1);
  double cell_h = H / (m.rows - 1);

  for (size_t s = 0; s + 1 < ts.size(); ++s) {
    Vec2 a = p0 + d * ts[s];
    Vec2 b = p0 + d * ts[s + 1];
    Vec2 dhat = b - a;
    double len = dhat.norm();
    if (len < min_length) continue;

    Vec2 mid = p0 + d * (0.5 * (ts[s] + ts[s + 1]));
    int qc = std::clamp(static_cast<int>(std::floor(mid.x / cell_w)), 0, m.cols - 2);
    int qr = std::clamp(static_cast<int>(std::floor(mid.y / cell_h)), 0, m.rows - 2);

    QuadCrossing cr;
    cr.quad_row = qr;
    cr.quad_col = qc;
    cr.corners = {m.index(qr, qc), m.index(qr, qc + 1), m.index(qr + 1, qc), m.index(qr + 1, qc + 1)};
    if (excluded[cr.corners[0]] || excluded[cr.corners[1]] || excluded[cr.corners[2]] ||
        excluded[cr.corners[3]])
      continue;

    const Vec2& tl = m.vertices[cr.corners[0]];
    const Vec2& br = m.vertices[cr.corners[3]];
    auto bilinear = [&](const Vec2& p) -> std::array<double, 4> {
      double sx = (p.x - tl.x) / (br.x - tl.x);
      double sy = (p.y - tl.y) / (br.y - tl.y);
      return {(1 - sx) * (1 - sy), sx * (1 - sy), (1 - sx) * sy, sx * sy};
    };
    std::array<double, 4> wa = bilinear(a), wb = bilinear(b);
    for (int i = 0; i < 4; ++i) cr.weights[i] = wb[i] - wa[i];
    cr.dhat = dhat;
    cr.normal = dhat.perp() * (1.0 / len);
    out.push_back(cr);
  }
  return out;
}

}  // namespace facewarp

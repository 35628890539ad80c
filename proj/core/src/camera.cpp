#include "facewarp/camera.hpp"

#include <cmath>
#include <stdexcept>

namespace facewarp {

namespace {
constexpr double kPi = 3.14159265358979323846;
}

void CameraIntrinsics::validate() const {
  if (width_px < 2 || height_px < 2)
    throw std::invalid_argument("camera: width and height must be >= 2 px");
  if (!(focal_px > 0.0))
    throw std::invalid_argument("camera: focal length must be positive");
}

double focal_from_dfov(double dfov_deg, int width_px, int height_px) {
  if (!(dfov_deg > 0.0) || !(dfov_deg < 180.0))
    throw std::invalid_argument("dfov must lie in (0, 180) degrees");
  double diag = std::hypot(static_cast<double>(width_px), static_cast<double>(height_px));
  return diag / (2.0 * std::tan(0.5 * dfov_deg * kPi / 180.0));
}

double dfov_from_focal(double focal_px, int width_px, int height_px) {
  if (!(focal_px > 0.0)) throw std::invalid_argument("focal length must be positive");
  double diag = std::hypot(static_cast<double>(width_px), static_cast<double>(height_px));
  return 2.0 * std::atan(diag / (2.0 * focal_px)) * 180.0 / kPi;
}

Mesh uniform_mesh(const CameraIntrinsics& cam, int cols, int rows) {
  if (cols < 2 || rows < 2) throw std::invalid_argument("mesh needs at least 2x2 vertices");
  cam.validate();
  Mesh m;
  m.cols = cols;
  m.rows = rows;
  m.vertices.resize(static_cast<size_t>(cols) * rows);
  for (int r = 0; r < rows; ++r)
    for (int c = 0; c < cols; ++c)
      m.at(r, c) = {c * static_cast<double>(cam.width_px) / (cols - 1),
                    r * static_cast<double>(cam.height_px) / (rows - 1)};
  return m;
}

double stereographic_r0(const CameraIntrinsics& cam) {
  double d = cam.min_dim();
  return d / (2.0 * std::tan(0.5 * std::atan(d / (2.0 * cam.focal_px))));
}

Vec2 stereographic_point(const Vec2& p, const CameraIntrinsics& cam) {
  Vec2 c = cam.center();
  Vec2 rel = p - c;
  double rp = rel.norm();
  double r0 = stereographic_r0(cam);
  // ratio r_u / r_p, with the analytic limit r0/(2f) at the center
  double ratio;
  if (rp == 0.0) {
    ratio = r0 / (2.0 * cam.focal_px);
  } else {
    ratio = r0 * std::tan(0.5 * std::atan(rp / cam.focal_px)) / rp;
  }
  return c + rel * ratio;
}

Mesh stereographic_mesh(const CameraIntrinsics& cam, int cols, int rows) {
  Mesh m = uniform_mesh(cam, cols, rows);
  for (Vec2& v : m.vertices) v = stereographic_point(v, cam);
  return m;
}

}  // namespace facewarp

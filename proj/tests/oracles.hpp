#pragma once

#include <random>
#include <vector>

#include <Eigen/Dense>

#include "facewarp/energy.hpp"
#include "facewarp/face_region.hpp"
#include "facewarp/image.hpp"
#include "facewarp/problem.hpp"

namespace testsupport {

// Literal scalar-loop evaluation of the full spatial-temporal energy,
// written directly from the published formulas and independent of the row
// assembly: neighbor sums are enumerated directed (double-counted), the
// line term minimizes over its per-quad scale via the projector, and the
// coherence term builds the 2x2 similarity matrices explicitly.
inline double energy_bruteforce(const facewarp::WarpProblem& p,
                                const facewarp::UnknownLayout& L, const Eigen::VectorXd& x) {
  using facewarp::Vec2;
  const facewarp::EnergyWeights& w = p.weights;
  const int cols = p.grid_cols, rows = p.grid_rows;
  double E = 0.0;

  auto vert = [&](int n, int i) -> Vec2 {
    return {x[L.vertex_slot(n, i, 0)], x[L.vertex_slot(n, i, 1)]};
  };
  auto neighbors = [&](int i, std::vector<int>& out) {
    out.clear();
    int r = i / cols, c = i % cols;
    if (c > 0) out.push_back(i - 1);
    if (c + 1 < cols) out.push_back(i + 1);
    if (r > 0) out.push_back(i - cols);
    if (r + 1 < rows) out.push_back(i + cols);
  };

  std::vector<int> nbr;
  for (int n = 0; n < p.frame_count(); ++n) {
    const facewarp::FrameData& fd = p.frames[n];

    for (int k = 0; k < static_cast<int>(fd.faces.size()); ++k) {
      const facewarp::FaceInstance& face = fd.faces[k];
      if (face.vertex_set.empty()) continue;
      double a = x[L.latent_slot(n, k, 0)], b = x[L.latent_slot(n, k, 1)];
      double tx = x[L.latent_slot(n, k, 2)], ty = x[L.latent_slot(n, k, 3)];
      double acc = 0.0;
      for (int i : face.vertex_set) {
        Vec2 u = fd.stereo_target.vertices[i];
        Vec2 v = vert(n, i);
        Vec2 target{a * u.x + b * u.y + tx, -b * u.x + a * u.y + ty};
        acc += (v - target).squared_norm();
      }
      double ds = a - w.face_scale_target;
      E += w.face * (face.weight * acc + w.face_scale_weight * ds * ds);
    }

    for (int i = 0; i < cols * rows; ++i) {
      neighbors(i, nbr);
      for (int j : nbr) {
        Vec2 dv = vert(n, i) - vert(n, j);
        E += w.smoothness * dv.squared_norm();
        Vec2 e = (p.source_mesh.vertices[i] - p.source_mesh.vertices[j]).normalized();
        double bend = dv.cross(e);
        E += w.bending * bend * bend;
      }
    }

    const facewarp::CameraIntrinsics& cam = fd.intrinsics;
    for (int r = 0; r < rows; ++r) {
      double lx = vert(n, r * cols).x;
      double rx = vert(n, r * cols + cols - 1).x - cam.width_px;
      E += w.boundary * (lx * lx + rx * rx);
    }
    for (int c = 0; c < cols; ++c) {
      double ty_ = vert(n, c).y;
      double by = vert(n, (rows - 1) * cols + c).y - cam.height_px;
      E += w.boundary * (ty_ * ty_ + by * by);
    }

    for (const facewarp::QuadCrossing& cr : fd.crossings) {
      Vec2 d{0, 0};
      for (int c = 0; c < 4; ++c) d += vert(n, cr.corners[c]) * cr.weights[c];
      double s_opt = cr.dhat.dot(d) / cr.dhat.dot(cr.dhat);
      Vec2 resid = d - cr.dhat * s_opt;
      E += w.line * resid.squared_norm();
    }
  }

  for (int n = 1; n < p.frame_count(); ++n) {
    for (int i = 0; i < cols * rows; ++i)
      E += w.temporal * (vert(n, i) - vert(n - 1, i)).squared_norm();

    for (int k = 0; k < static_cast<int>(p.frames[n].faces.size()); ++k) {
      for (int j = 0; j < static_cast<int>(p.frames[n - 1].faces.size()); ++j) {
        if (p.frames[n - 1].faces[j].track_id != p.frames[n].faces[k].track_id) continue;
        Eigen::Matrix2d S0, S1;
        double a0 = x[L.latent_slot(n - 1, j, 0)], b0 = x[L.latent_slot(n - 1, j, 1)];
        double a1 = x[L.latent_slot(n, k, 0)], b1 = x[L.latent_slot(n, k, 1)];
        S0 << a0, b0, -b0, a0;
        S1 << a1, b1, -b1, a1;
        Eigen::Vector2d t0(x[L.latent_slot(n - 1, j, 2)], x[L.latent_slot(n - 1, j, 3)]);
        Eigen::Vector2d t1(x[L.latent_slot(n, k, 2)], x[L.latent_slot(n, k, 3)]);
        E += w.coherence * ((S1 - S0).squaredNorm() + (t1 - t0).squaredNorm());
        break;
      }
    }
  }
  return E;
}

// Synthetic multi-frame problem with moving faces (one appearing mid-video)
// and two tracked lines; exercises every energy term including per-frame
// focal variation.
inline facewarp::WarpProblem synthetic_problem(int n_frames, int cols, int rows, int W = 640,
                                               int H = 480, bool with_faces = true,
                                               bool with_lines = true) {
  using namespace facewarp;
  WarpProblem p;
  p.grid_cols = cols;
  p.grid_rows = rows;
  CameraIntrinsics cam{W, H, focal_from_dfov(100.0, W, H)};
  p.source_mesh = uniform_mesh(cam, cols, rows);
  ImageU8 solid(W, H, 1, 255);

  for (int n = 0; n < n_frames; ++n) {
    FrameData fd;
    fd.intrinsics = cam;
    fd.intrinsics.focal_px = cam.focal_px * (1.0 + 0.01 * n);  // mild digital zoom
    fd.stereo_target = stereographic_mesh(fd.intrinsics, cols, rows);

    std::vector<std::vector<int>> sets;
    if (with_faces) {
      BBox bb1{0.55 * W + 2.0 * n, 0.15 * H, 0.22 * W, 0.3 * H};
      FaceInstance f1;
      f1.track_id = 1;
      f1.bbox = bb1;
      f1.weight = face_weight(bb1.center(), W, H);
      f1.vertex_set = face_vertex_set(bb1, solid, p.source_mesh);
      f1.latent_index = 0;
      sets.push_back(f1.vertex_set);
      fd.faces.push_back(std::move(f1));

      if (n >= 2) {  // second subject enters mid-video
        BBox bb2{0.08 * W, 0.55 * H, 0.18 * W, 0.25 * H};
        FaceInstance f2;
        f2.track_id = 2;
        f2.bbox = bb2;
        f2.weight = face_weight(bb2.center(), W, H);
        f2.vertex_set = face_vertex_set(bb2, solid, p.source_mesh);
        f2.latent_index = 1;
        sets.push_back(f2.vertex_set);
        fd.faces.push_back(std::move(f2));
      }
    }
    if (with_lines) {
      auto c1 = line_quad_crossings({0.05 * W, 0.82 * H}, {0.95 * W, 0.86 * H},
                                    p.source_mesh, sets);
      auto c2 = line_quad_crossings({0.1 * W, 0.1 * H}, {0.45 * W, 0.7 * H},
                                    p.source_mesh, sets);
      fd.crossings.insert(fd.crossings.end(), c1.begin(), c1.end());
      fd.crossings.insert(fd.crossings.end(), c2.begin(), c2.end());
    }
    p.frames.push_back(std::move(fd));
  }
  return p;
}

// random point in unknown space: init + vertex noise + latent noise
inline Eigen::VectorXd random_x(const facewarp::WarpProblem& p,
                                const facewarp::UnknownLayout& L, std::mt19937& rng,
                                double vertex_scale = 15.0, double latent_scale = 0.4) {
  std::normal_distribution<double> gauss(0.0, 1.0);
  Eigen::VectorXd x = facewarp::initial_guess(p, L);
  for (int n = 0; n < L.frame_count(); ++n) {
    for (int i = 0; i < L.verts_per_frame; ++i) {
      x[L.vertex_slot(n, i, 0)] += vertex_scale * gauss(rng);
      x[L.vertex_slot(n, i, 1)] += vertex_scale * gauss(rng);
    }
    for (int k = 0; k < L.face_counts[n]; ++k)
      for (int comp = 0; comp < 4; ++comp)
        x[L.latent_slot(n, k, comp)] += latent_scale * gauss(rng);
  }
  return x;
}

// dense direct solve of the same rows, the solver oracle
inline Eigen::VectorXd dense_lsq_oracle(const facewarp::SparseLsqSystem& sys) {
  Eigen::MatrixXd A = Eigen::MatrixXd::Zero(sys.rows, sys.cols);
  for (const Eigen::Triplet<double>& t : sys.triplets) A(t.row(), t.col()) += t.value();
  return A.colPivHouseholderQr().solve(sys.rhs_vector());
}

}  // namespace testsupport

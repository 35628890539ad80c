#include "facewarp/energy.hpp"

#include <cmath>
#include <fstream>
#include <stdexcept>

namespace facewarp {

const char* energy_term_name(EnergyTerm term) {
  switch (term) {
    case EnergyTerm::Face: return "face";
    case EnergyTerm::Smoothness: return "smoothness";
    case EnergyTerm::Bending: return "bending";
    case EnergyTerm::Boundary: return "boundary";
    case EnergyTerm::Line: return "line";
    case EnergyTerm::Temporal: return "temporal";
    case EnergyTerm::Coherence: return "coherence";
    case EnergyTerm::Anchor: return "anchor";
    case EnergyTerm::Tikhonov: return "tikhonov";
  }
  return "?";
}

Eigen::SparseMatrix<double> SparseLsqSystem::matrix() const {
  Eigen::SparseMatrix<double> A(rows, cols);
  A.setFromTriplets(triplets.begin(), triplets.end());
  A.makeCompressed();
  return A;
}

Eigen::VectorXd SparseLsqSystem::rhs_vector() const {
  return Eigen::Map<const Eigen::VectorXd>(rhs.data(), static_cast<Eigen::Index>(rhs.size()));
}

void SparseLsqSystem::add_row(double sqrt_weight,
                              const std::vector<std::pair<int, double>>& coeffs,
                              double rhs_value) {
  if (sqrt_weight == 0.0) return;
  for (const auto& [col, value] : coeffs)
    if (value != 0.0) triplets.emplace_back(rows, col, sqrt_weight * value);
  rhs.push_back(sqrt_weight * rhs_value);
  ++rows;
}

void SparseLsqSystem::begin_term(EnergyTerm term, int frame) {
  open_term_ = term;
  open_frame_ = frame;
  open_begin_ = rows;
}

void SparseLsqSystem::end_term() {
  term_ranges.push_back({open_term_, open_frame_, open_begin_, rows});
}

namespace {

// undirected 4-neighbor edges of the grid, horizontal first, row-major
template <typename Fn>
void for_each_grid_edge(int cols, int rows, Fn&& fn) {
  for (int r = 0; r < rows; ++r)
    for (int c = 0; c + 1 < cols; ++c) fn(r * cols + c, r * cols + c + 1);
  for (int r = 0; r + 1 < rows; ++r)
    for (int c = 0; c < cols; ++c) fn(r * cols + c, (r + 1) * cols + c);
}

}  // namespace

void assemble_face_term(const WarpProblem& problem, int frame, const UnknownLayout& layout,
                        SparseLsqSystem& sys) {
  const FrameData& fd = problem.frames[frame];
  const EnergyWeights& w = problem.weights;
  sys.begin_term(EnergyTerm::Face, frame);
  for (int k = 0; k < static_cast<int>(fd.faces.size()); ++k) {
    const FaceInstance& face = fd.faces[k];
    if (face.vertex_set.empty()) {
      ++sys.flagged_empty_faces;
      continue;
    }
    int sa = layout.latent_slot(frame, k, 0);
    int sb = layout.latent_slot(frame, k, 1);
    int stx = layout.latent_slot(frame, k, 2);
    int sty = layout.latent_slot(frame, k, 3);
    double sw = std::sqrt(w.face * face.weight);
    for (int i : face.vertex_set) {
      const Vec2& u = fd.stereo_target.vertices[i];
      sys.add_row(sw,
                  {{layout.vertex_slot(frame, i, 0), 1.0}, {sa, -u.x}, {sb, -u.y}, {stx, -1.0}},
                  0.0);
      sys.add_row(sw,
                  {{layout.vertex_slot(frame, i, 1), 1.0}, {sa, -u.y}, {sb, u.x}, {sty, -1.0}},
                  0.0);
    }
    sys.add_row(std::sqrt(w.face * w.face_scale_weight), {{sa, 1.0}}, w.face_scale_target);
  }
  sys.end_term();
}

void assemble_spatial_smoothness(const WarpProblem& problem, int frame,
                                 const UnknownLayout& layout, SparseLsqSystem& sys) {
  // sqrt(2 lambda_s) per undirected edge reproduces the double-counted
  // sum over i and j in N(i)
  double sw = std::sqrt(2.0 * problem.weights.smoothness);
  sys.begin_term(EnergyTerm::Smoothness, frame);
  for_each_grid_edge(problem.grid_cols, problem.grid_rows, [&](int i, int j) {
    for (int dim = 0; dim < 2; ++dim)
      sys.add_row(sw,
                  {{layout.vertex_slot(frame, i, dim), 1.0},
                   {layout.vertex_slot(frame, j, dim), -1.0}},
                  0.0);
  });
  sys.end_term();
}

void assemble_edge_bending(const WarpProblem& problem, int frame, const UnknownLayout& layout,
                           SparseLsqSystem& sys) {
  double sw = std::sqrt(2.0 * problem.weights.bending);
  sys.begin_term(EnergyTerm::Bending, frame);
  for_each_grid_edge(problem.grid_cols, problem.grid_rows, [&](int i, int j) {
    Vec2 e = (problem.source_mesh.vertices[i] - problem.source_mesh.vertices[j]).normalized();
    // (v_i - v_j) x e_ij, the bend component perpendicular to the source edge
    sys.add_row(sw,
                {{layout.vertex_slot(frame, i, 0), e.y},
                 {layout.vertex_slot(frame, j, 0), -e.y},
                 {layout.vertex_slot(frame, i, 1), -e.x},
                 {layout.vertex_slot(frame, j, 1), e.x}},
                0.0);
  });
  sys.end_term();
}

void assemble_boundary(const WarpProblem& problem, int frame, const UnknownLayout& layout,
                       SparseLsqSystem& sys) {
  const CameraIntrinsics& cam = problem.frames[frame].intrinsics;
  double sw = std::sqrt(problem.weights.boundary);
  int cols = problem.grid_cols, rows = problem.grid_rows;
  sys.begin_term(EnergyTerm::Boundary, frame);
  for (int r = 0; r < rows; ++r) {
    sys.add_row(sw, {{layout.vertex_slot(frame, r * cols, 0), 1.0}}, 0.0);
    sys.add_row(sw, {{layout.vertex_slot(frame, r * cols + cols - 1, 0), 1.0}},
                static_cast<double>(cam.width_px));
  }
  for (int c = 0; c < cols; ++c) {
    sys.add_row(sw, {{layout.vertex_slot(frame, c, 1), 1.0}}, 0.0);
    sys.add_row(sw, {{layout.vertex_slot(frame, (rows - 1) * cols + c, 1), 1.0}},
                static_cast<double>(cam.height_px));
  }
  sys.end_term();
}

void assemble_line_preservation(const WarpProblem& problem, int frame,
                                const UnknownLayout& layout, SparseLsqSystem& sys) {
  double sw = std::sqrt(problem.weights.line);
  sys.begin_term(EnergyTerm::Line, frame);
  for (const QuadCrossing& cr : problem.frames[frame].crossings) {
    // n^T (Q_q w): the line residual with the optimal per-quad scale
    // substituted, leaving only the component normal to the source segment
    std::vector<std::pair<int, double>> coeffs;
    coeffs.reserve(8);
    for (int c = 0; c < 4; ++c) {
      coeffs.emplace_back(layout.vertex_slot(frame, cr.corners[c], 0), cr.normal.x * cr.weights[c]);
      coeffs.emplace_back(layout.vertex_slot(frame, cr.corners[c], 1), cr.normal.y * cr.weights[c]);
    }
    sys.add_row(sw, coeffs, 0.0);
  }
  sys.end_term();
}

void assemble_temporal(const WarpProblem& problem, const UnknownLayout& layout,
                       SparseLsqSystem& sys) {
  double sw = std::sqrt(problem.weights.temporal);
  sys.begin_term(EnergyTerm::Temporal, -1);
  for (int n = 1; n < problem.frame_count(); ++n)
    for (int i = 0; i < layout.verts_per_frame; ++i)
      for (int dim = 0; dim < 2; ++dim)
        sys.add_row(sw,
                    {{layout.vertex_slot(n, i, dim), 1.0},
                     {layout.vertex_slot(n - 1, i, dim), -1.0}},
                    0.0);
  sys.end_term();
}

void assemble_coherent_embedding(const WarpProblem& problem, const UnknownLayout& layout,
                                 SparseLsqSystem& sys) {
  const EnergyWeights& w = problem.weights;
  // the Frobenius norm of the 2x2 similarity block counts da and db twice
  double sw_ab = std::sqrt(2.0 * w.coherence);
  double sw_t = std::sqrt(w.coherence);
  sys.begin_term(EnergyTerm::Coherence, -1);
  for (int n = 1; n < problem.frame_count(); ++n) {
    const std::vector<FaceInstance>& prev = problem.frames[n - 1].faces;
    const std::vector<FaceInstance>& cur = problem.frames[n].faces;
    for (int k = 0; k < static_cast<int>(cur.size()); ++k) {
      int k_prev = -1;
      for (int j = 0; j < static_cast<int>(prev.size()); ++j)
        if (prev[j].track_id == cur[k].track_id) {
          k_prev = j;
          break;
        }
      if (k_prev < 0) continue;
      for (int comp = 0; comp < 4; ++comp)
        sys.add_row(comp < 2 ? sw_ab : sw_t,
                    {{layout.latent_slot(n, k, comp), 1.0},
                     {layout.latent_slot(n - 1, k_prev, comp), -1.0}},
                    0.0);
    }
  }
  sys.end_term();
}

SparseLsqSystem build_system(const WarpProblem& problem, const UnknownLayout& layout,
                             const AssemblyOptions& opts) {
  if (problem.frame_count() == 0) throw std::invalid_argument("build_system: empty video");
  problem.weights.validate();
  SparseLsqSystem sys;
  sys.cols = layout.size();
  for (int n = 0; n < problem.frame_count(); ++n) {
    assemble_face_term(problem, n, layout, sys);
    assemble_spatial_smoothness(problem, n, layout, sys);
    assemble_edge_bending(problem, n, layout, sys);
    assemble_boundary(problem, n, layout, sys);
    assemble_line_preservation(problem, n, layout, sys);
  }
  assemble_temporal(problem, layout, sys);
  assemble_coherent_embedding(problem, layout, sys);
  if (opts.tikhonov && opts.tikhonov_mu > 0.0) {
    Eigen::VectorXd x0 = initial_guess(problem, layout);
    double sw = std::sqrt(opts.tikhonov_mu);
    sys.begin_term(EnergyTerm::Tikhonov, -1);
    for (int i = 0; i < layout.size(); ++i) sys.add_row(sw, {{i, 1.0}}, x0[i]);
    sys.end_term();
  }
  return sys;
}

EnergyBreakdown energy_value(const WarpProblem& problem, const UnknownLayout& layout,
                             const Eigen::VectorXd& x) {
  if (x.size() != layout.size())
    throw std::invalid_argument("energy_value: x length does not match the unknown layout");
  const EnergyWeights& w = problem.weights;
  EnergyBreakdown e;

  auto vx = [&](int n, int i) { return x[layout.vertex_slot(n, i, 0)]; };
  auto vy = [&](int n, int i) { return x[layout.vertex_slot(n, i, 1)]; };

  for (int n = 0; n < problem.frame_count(); ++n) {
    const FrameData& fd = problem.frames[n];
    for (int k = 0; k < static_cast<int>(fd.faces.size()); ++k) {
      const FaceInstance& face = fd.faces[k];
      if (face.vertex_set.empty()) continue;
      double a = x[layout.latent_slot(n, k, 0)];
      double b = x[layout.latent_slot(n, k, 1)];
      double tx = x[layout.latent_slot(n, k, 2)];
      double ty = x[layout.latent_slot(n, k, 3)];
      double acc = 0.0;
      for (int i : face.vertex_set) {
        const Vec2& u = fd.stereo_target.vertices[i];
        double rx = vx(n, i) - (a * u.x + b * u.y + tx);
        double ry = vy(n, i) - (-b * u.x + a * u.y + ty);
        acc += rx * rx + ry * ry;
      }
      double ds = a - w.face_scale_target;
      e.face += w.face * (face.weight * acc + w.face_scale_weight * ds * ds);
    }

    for_each_grid_edge(problem.grid_cols, problem.grid_rows, [&](int i, int j) {
      double dx = vx(n, i) - vx(n, j);
      double dy = vy(n, i) - vy(n, j);
      e.smoothness += 2.0 * w.smoothness * (dx * dx + dy * dy);
      Vec2 dir = (problem.source_mesh.vertices[i] - problem.source_mesh.vertices[j]).normalized();
      double bend = dx * dir.y - dy * dir.x;
      e.bending += 2.0 * w.bending * bend * bend;
    });

    const CameraIntrinsics& cam = fd.intrinsics;
    int cols = problem.grid_cols, rows = problem.grid_rows;
    for (int r = 0; r < rows; ++r) {
      double left = vx(n, r * cols);
      double right = vx(n, r * cols + cols - 1) - cam.width_px;
      e.boundary += w.boundary * (left * left + right * right);
    }
    for (int c = 0; c < cols; ++c) {
      double top = vy(n, c);
      double bottom = vy(n, (rows - 1) * cols + c) - cam.height_px;
      e.boundary += w.boundary * (top * top + bottom * bottom);
    }

    for (const QuadCrossing& cr : fd.crossings) {
      double dx = 0.0, dy = 0.0;
      for (int c = 0; c < 4; ++c) {
        dx += cr.weights[c] * vx(n, cr.corners[c]);
        dy += cr.weights[c] * vy(n, cr.corners[c]);
      }
      double res = cr.normal.x * dx + cr.normal.y * dy;
      e.line += w.line * res * res;
    }
  }

  for (int n = 1; n < problem.frame_count(); ++n) {
    for (int i = 0; i < layout.verts_per_frame; ++i) {
      double dx = vx(n, i) - vx(n - 1, i);
      double dy = vy(n, i) - vy(n - 1, i);
      e.temporal += w.temporal * (dx * dx + dy * dy);
    }
    const std::vector<FaceInstance>& prev = problem.frames[n - 1].faces;
    const std::vector<FaceInstance>& cur = problem.frames[n].faces;
    for (int k = 0; k < static_cast<int>(cur.size()); ++k) {
      for (int j = 0; j < static_cast<int>(prev.size()); ++j) {
        if (prev[j].track_id != cur[k].track_id) continue;
        double da = x[layout.latent_slot(n, k, 0)] - x[layout.latent_slot(n - 1, j, 0)];
        double db = x[layout.latent_slot(n, k, 1)] - x[layout.latent_slot(n - 1, j, 1)];
        double dtx = x[layout.latent_slot(n, k, 2)] - x[layout.latent_slot(n - 1, j, 2)];
        double dty = x[layout.latent_slot(n, k, 3)] - x[layout.latent_slot(n - 1, j, 3)];
        e.coherence += w.coherence * (2.0 * da * da + 2.0 * db * db + dtx * dtx + dty * dty);
        break;
      }
    }
  }

  e.total = e.face + e.smoothness + e.bending + e.boundary + e.line + e.temporal + e.coherence;
  return e;
}

void dump_system(const SparseLsqSystem& sys, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("dump_system: cannot write " + path);
  out.precision(17);
  for (const Eigen::Triplet<double>& t : sys.triplets)
    out << t.row() << ' ' << t.col() << ' ' << t.value() << '\n';
  for (size_t r = 0; r < sys.rhs.size(); ++r)
    if (sys.rhs[r] != 0.0) out << r << ' ' << sys.cols << ' ' << sys.rhs[r] << '\n';
}

}  // namespace facewarp

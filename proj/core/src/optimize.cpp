#include "facewarp/optimize.hpp"

#include <chrono>
#include <stdexcept>

namespace facewarp {

namespace {

using Clock = std::chrono::steady_clock;

double ms_since(Clock::time_point t0) {
  return std::chrono::duration<double, std::milli>(Clock::now() - t0).count();
}

std::map<int, LatentState> extract_latents(const WarpProblem& problem,
                                           const UnknownLayout& layout,
                                           const Eigen::VectorXd& x, int frame) {
  std::map<int, LatentState> out;
  const std::vector<FaceInstance>& faces = problem.frames[frame].faces;
  for (int k = 0; k < static_cast<int>(faces.size()); ++k) {
    LatentState s;
    s.a = x[layout.latent_slot(frame, k, 0)];
    s.b = x[layout.latent_slot(frame, k, 1)];
    s.tx = x[layout.latent_slot(frame, k, 2)];
    s.ty = x[layout.latent_slot(frame, k, 3)];
    out[faces[k].track_id] = s;
  }
  return out;
}

// single-frame sub-problem sharing grid, source mesh, and weights
WarpProblem frame_view(const WarpProblem& problem, int n) {
  WarpProblem sub;
  sub.grid_cols = problem.grid_cols;
  sub.grid_rows = problem.grid_rows;
  sub.source_mesh = problem.source_mesh;
  sub.weights = problem.weights;
  sub.frames.push_back(problem.frames[n]);
  return sub;
}

}  // namespace

OptimizeResult optimize_full(const WarpProblem& problem, const SolverOptions& opts) {
  if (problem.frame_count() == 0) throw std::invalid_argument("optimize_full: empty video");
  UnknownLayout layout = UnknownLayout::build(problem);
  OptimizeResult result;

  auto t0 = Clock::now();
  SparseLsqSystem sys = build_system(problem, layout, {opts.tikhonov, opts.tikhonov_mu});
  Eigen::SparseMatrix<double> A = sys.matrix();
  Eigen::VectorXd b = sys.rhs_vector();
  result.report.assembly_ms = ms_since(t0);
  result.report.flagged_empty_faces = sys.flagged_empty_faces;

  Eigen::VectorXd x0 = initial_guess(problem, layout);
  result.report.initial_energy = energy_value(problem, layout, x0).total;

  auto t1 = Clock::now();
  LsmrResult solved = solve_lsq(A, b, x0, {opts.tol, opts.max_iterations});
  result.report.solve_ms = ms_since(t1);
  result.report.iterations = solved.iterations;
  result.report.relative_gradient_norm = solved.relative_gradient_norm;
  result.report.converged = solved.converged;

  result.x = std::move(solved.x);
  result.report.energies = energy_value(problem, layout, result.x);
  for (int n = 0; n < problem.frame_count(); ++n) {
    result.meshes.push_back(mesh_from_vector(problem, layout, result.x, n));
    result.latents.push_back(extract_latents(problem, layout, result.x, n));
  }
  return result;
}

OptimizeResult optimize_sequential(const WarpProblem& problem, const SolverOptions& opts) {
  if (problem.frame_count() == 0)
    throw std::invalid_argument("optimize_sequential: empty video");
  UnknownLayout layout = UnknownLayout::build(problem);
  OptimizeResult result;
  result.x = Eigen::VectorXd::Zero(layout.size());

  Mesh prev_mesh;
  std::map<int, LatentState> prev_latents;

  for (int n = 0; n < problem.frame_count(); ++n) {
    WarpProblem sub = frame_view(problem, n);
    UnknownLayout sub_layout = UnknownLayout::build(sub);

    auto t0 = Clock::now();
    SparseLsqSystem sys = build_system(sub, sub_layout, {opts.tikhonov, opts.tikhonov_mu});
    if (n > 0) {
      // temporal rows against the already-solved previous mesh
      double sw_t = std::sqrt(problem.weights.temporal);
      sys.begin_term(EnergyTerm::Anchor, n);
      for (int i = 0; i < sub_layout.verts_per_frame; ++i) {
        sys.add_row(sw_t, {{sub_layout.vertex_slot(0, i, 0), 1.0}}, prev_mesh.vertices[i].x);
        sys.add_row(sw_t, {{sub_layout.vertex_slot(0, i, 1), 1.0}}, prev_mesh.vertices[i].y);
      }
      // coherence rows against the solved latents of tracks alive in both
      double sw_ab = std::sqrt(2.0 * problem.weights.coherence);
      double sw_xy = std::sqrt(problem.weights.coherence);
      const std::vector<FaceInstance>& faces = sub.frames[0].faces;
      for (int k = 0; k < static_cast<int>(faces.size()); ++k) {
        auto it = prev_latents.find(faces[k].track_id);
        if (it == prev_latents.end()) continue;
        sys.add_row(sw_ab, {{sub_layout.latent_slot(0, k, 0), 1.0}}, it->second.a);
        sys.add_row(sw_ab, {{sub_layout.latent_slot(0, k, 1), 1.0}}, it->second.b);
        sys.add_row(sw_xy, {{sub_layout.latent_slot(0, k, 2), 1.0}}, it->second.tx);
        sys.add_row(sw_xy, {{sub_layout.latent_slot(0, k, 3), 1.0}}, it->second.ty);
      }
      sys.end_term();
    }
    Eigen::SparseMatrix<double> A = sys.matrix();
    Eigen::VectorXd b = sys.rhs_vector();
    result.report.assembly_ms += ms_since(t0);
    result.report.flagged_empty_faces += sys.flagged_empty_faces;

    // warm start from the previous frame's mesh
    Eigen::VectorXd x0 = initial_guess(sub, sub_layout);
    if (n > 0) {
      for (int i = 0; i < sub_layout.verts_per_frame; ++i) {
        x0[sub_layout.vertex_slot(0, i, 0)] = prev_mesh.vertices[i].x;
        x0[sub_layout.vertex_slot(0, i, 1)] = prev_mesh.vertices[i].y;
      }
      const std::vector<FaceInstance>& faces = sub.frames[0].faces;
      for (int k = 0; k < static_cast<int>(faces.size()); ++k) {
        auto it = prev_latents.find(faces[k].track_id);
        if (it == prev_latents.end()) continue;
        x0[sub_layout.latent_slot(0, k, 0)] = it->second.a;
        x0[sub_layout.latent_slot(0, k, 1)] = it->second.b;
        x0[sub_layout.latent_slot(0, k, 2)] = it->second.tx;
        x0[sub_layout.latent_slot(0, k, 3)] = it->second.ty;
      }
    }

    auto t1 = Clock::now();
    LsmrResult solved = solve_lsq(A, b, x0, {opts.tol, opts.max_iterations});
    result.report.solve_ms += ms_since(t1);
    result.report.iterations += solved.iterations;
    result.report.relative_gradient_norm =
        std::max(result.report.relative_gradient_norm, solved.relative_gradient_norm);
    result.report.converged = (n == 0 ? true : result.report.converged) && solved.converged;

    prev_mesh = mesh_from_vector(sub, sub_layout, solved.x, 0);
    prev_latents = extract_latents(sub, sub_layout, solved.x, 0);
    result.meshes.push_back(prev_mesh);
    result.latents.push_back(prev_latents);

    // fold the frame solution into the global vector
    for (int i = 0; i < layout.verts_per_frame; ++i) {
      result.x[layout.vertex_slot(n, i, 0)] = solved.x[sub_layout.vertex_slot(0, i, 0)];
      result.x[layout.vertex_slot(n, i, 1)] = solved.x[sub_layout.vertex_slot(0, i, 1)];
    }
    for (int k = 0; k < layout.face_counts[n]; ++k)
      for (int comp = 0; comp < 4; ++comp)
        result.x[layout.latent_slot(n, k, comp)] = solved.x[sub_layout.latent_slot(0, k, comp)];
  }

  result.report.initial_energy =
      energy_value(problem, layout, initial_guess(problem, layout)).total;
  result.report.energies = energy_value(problem, layout, result.x);
  return result;
}

}  // namespace facewarp

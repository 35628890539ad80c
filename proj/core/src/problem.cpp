#include "facewarp/problem.hpp"

#include <stdexcept>

namespace facewarp {

void EnergyWeights::validate() const {
  const double all[] = {face, smoothness, bending, boundary, line, coherence,
                        temporal, face_scale_weight};
  for (double w : all)
    if (!(w >= 0.0)) throw std::invalid_argument("energy weights must be nonnegative");
}

void EnergyWeights::set(const std::string& name, double value) {
  if (name == "face") face = value;
  else if (name == "smoothness") smoothness = value;
  else if (name == "bending") bending = value;
  else if (name == "boundary") boundary = value;
  else if (name == "line") line = value;
  else if (name == "coherence") coherence = value;
  else if (name == "temporal") temporal = value;
  else if (name == "face_scale_weight") face_scale_weight = value;
  else if (name == "face_scale_target") face_scale_target = value;
  else throw std::invalid_argument("unknown energy weight: " + name);
  validate();
}

UnknownLayout UnknownLayout::build(const WarpProblem& problem) {
  UnknownLayout layout;
  layout.verts_per_frame = problem.vertex_count();
  layout.frame_offsets.push_back(0);
  for (const FrameData& f : problem.frames) {
    layout.face_counts.push_back(static_cast<int>(f.faces.size()));
    layout.frame_offsets.push_back(layout.frame_offsets.back() + 2 * layout.verts_per_frame +
                                   4 * static_cast<int>(f.faces.size()));
  }
  return layout;
}

Eigen::VectorXd initial_guess(const WarpProblem& problem, const UnknownLayout& layout) {
  Eigen::VectorXd x(layout.size());
  for (int n = 0; n < problem.frame_count(); ++n) {
    for (int i = 0; i < layout.verts_per_frame; ++i) {
      x[layout.vertex_slot(n, i, 0)] = problem.source_mesh.vertices[i].x;
      x[layout.vertex_slot(n, i, 1)] = problem.source_mesh.vertices[i].y;
    }
    for (int k = 0; k < layout.face_counts[n]; ++k) {
      x[layout.latent_slot(n, k, 0)] = 1.0;
      x[layout.latent_slot(n, k, 1)] = 0.0;
      x[layout.latent_slot(n, k, 2)] = 0.0;
      x[layout.latent_slot(n, k, 3)] = 0.0;
    }
  }
  return x;
}

Mesh mesh_from_vector(const WarpProblem& problem, const UnknownLayout& layout,
                      const Eigen::VectorXd& x, int frame) {
  Mesh m;
  m.cols = problem.grid_cols;
  m.rows = problem.grid_rows;
  m.vertices.resize(layout.verts_per_frame);
  for (int i = 0; i < layout.verts_per_frame; ++i)
    m.vertices[i] = {x[layout.vertex_slot(frame, i, 0)], x[layout.vertex_slot(frame, i, 1)]};
  return m;
}

}  // namespace facewarp

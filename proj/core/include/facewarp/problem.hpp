#pragma once

#include <string>
#include <vector>

#include <Eigen/Core>

#include "facewarp/camera.hpp"
#include "facewarp/geometry.hpp"
#include "facewarp/line_geometry.hpp"

namespace facewarp {

// Per-frame tracked face with its mesh vertex set, radial weight and an
// index into the frame's latent (a, b, tx, ty) blocks.
struct FaceInstance {
  int track_id = -1;
  BBox bbox;
  double weight = 0.0;  // w_k in [0, tanh 2)
  std::vector<int> vertex_set;
  int latent_index = -1;
};

struct FrameData {
  CameraIntrinsics intrinsics;
  Mesh stereo_target;  // per-frame u_i (recomputed when the focal varies)
  std::vector<FaceInstance> faces;
  std::vector<QuadCrossing> crossings;
};

struct EnergyWeights {
  double face = 4.0;         // lambda_f
  double smoothness = 1.0;   // lambda_s
  double bending = 2.0;      // lambda_e
  double boundary = 4.0;     // lambda_b
  double line = 64.0;        // lambda_l
  double coherence = 4.0;    // lambda_c
  double temporal = 16.0;    // lambda_t
  double face_scale_weight = 1.0;  // w_s
  double face_scale_target = 1.0;  // s_f

  void validate() const;  // throws when any weight is negative
  // named override used by the CLI's --weight name=value flags
  void set(const std::string& name, double value);
};

struct WarpProblem {
  int grid_cols = kDefaultGridCols;
  int grid_rows = kDefaultGridRows;
  Mesh source_mesh;  // shared uniform grid (frame size is constant)
  std::vector<FrameData> frames;
  EnergyWeights weights;

  int frame_count() const { return static_cast<int>(frames.size()); }
  int vertex_count() const { return grid_cols * grid_rows; }
};

// Slot map for the global unknown vector: per frame, 2V interleaved mesh
// coordinates followed by 4 latents per face instance.
struct UnknownLayout {
  int verts_per_frame = 0;
  std::vector<int> face_counts;
  std::vector<int> frame_offsets;  // face_counts.size() + 1 entries

  static UnknownLayout build(const WarpProblem& problem);

  int size() const { return frame_offsets.back(); }
  int frame_count() const { return static_cast<int>(face_counts.size()); }
  int vertex_slot(int frame, int vertex, int dim) const {
    return frame_offsets[frame] + 2 * vertex + dim;
  }
  // component: 0 = a, 1 = b, 2 = tx, 3 = ty
  int latent_slot(int frame, int face, int component) const {
    return frame_offsets[frame] + 2 * verts_per_frame + 4 * face + component;
  }
};

// Uniform meshes with identity similarity latents (a,b,tx,ty) = (1,0,0,0).
Eigen::VectorXd initial_guess(const WarpProblem& problem, const UnknownLayout& layout);

// Copies one frame's mesh coordinates out of the unknown vector.
Mesh mesh_from_vector(const WarpProblem& problem, const UnknownLayout& layout,
                      const Eigen::VectorXd& x, int frame);

}  // namespace facewarp

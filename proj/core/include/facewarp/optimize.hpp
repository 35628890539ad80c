#pragma once

#include <map>
#include <vector>

#include "facewarp/energy.hpp"
#include "facewarp/lsmr.hpp"
#include "facewarp/problem.hpp"

namespace facewarp {

struct LatentState {
  double a = 1.0;
  double b = 0.0;
  double tx = 0.0;
  double ty = 0.0;
};

struct SolveReport {
  int iterations = 0;
  double relative_gradient_norm = 0.0;
  bool converged = false;
  double assembly_ms = 0.0;
  double solve_ms = 0.0;
  EnergyBreakdown energies;
  double initial_energy = 0.0;
  int flagged_empty_faces = 0;
};

struct OptimizeResult {
  std::vector<Mesh> meshes;                        // one per frame
  std::vector<std::map<int, LatentState>> latents; // per frame, keyed by track_id
  Eigen::VectorXd x;                               // full unknown vector
  SolveReport report;
};

struct SolverOptions {
  double tol = 1e-8;
  int max_iterations = 0;  // 0 selects 10 * #unknowns per solve
  bool tikhonov = true;
  double tikhonov_mu = 1e-8;
};

// One joint least-squares solve over the whole video.
OptimizeResult optimize_full(const WarpProblem& problem, const SolverOptions& opts = {});

// Frame-by-frame schedule: frame 0 is solved without temporal rows; each
// later frame is anchored to the previous frame's already-solved mesh and
// latents, which act as fixed constraints.
OptimizeResult optimize_sequential(const WarpProblem& problem, const SolverOptions& opts = {});

}  // namespace facewarp

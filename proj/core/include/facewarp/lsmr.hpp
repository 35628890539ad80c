#pragma once

#include <Eigen/Core>
#include <Eigen/SparseCore>

namespace facewarp {

struct LsmrOptions {
  double tol = 1e-8;       // on ||A^T (Ax - b)|| relative to ||A^T b||
  int max_iterations = 0;  // 0 selects 10 * #unknowns
};

struct LsmrResult {
  Eigen::VectorXd x;
  int iterations = 0;
  double relative_gradient_norm = 0.0;  // true ||A^T(Ax-b)|| / ||A^T b|| at exit
  bool converged = false;
};

// Iterative sparse least-squares solve (Golub-Kahan bidiagonalization with
// LSMR recurrences), warm-started at x0. Deterministic for fixed inputs.
LsmrResult solve_lsq(const Eigen::SparseMatrix<double>& A, const Eigen::VectorXd& b,
                     const Eigen::VectorXd& x0, const LsmrOptions& opts = {});

}  // namespace facewarp

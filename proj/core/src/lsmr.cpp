#include "facewarp/lsmr.hpp"

#include <cmath>
#include <stdexcept>

namespace facewarp {

namespace {

struct Givens {
  double c, s, r;
};

// stable symmetric orthogonal factorization of (a, b)
Givens sym_ortho(double a, double b) {
  if (b == 0.0) return {a >= 0.0 ? 1.0 : -1.0, 0.0, std::abs(a)};
  if (a == 0.0) return {0.0, b >= 0.0 ? 1.0 : -1.0, std::abs(b)};
  if (std::abs(b) > std::abs(a)) {
    double tau = a / b;
    double s = (b >= 0.0 ? 1.0 : -1.0) / std::sqrt(1.0 + tau * tau);
    return {s * tau, s, b / s};
  }
  double tau = b / a;
  double c = (a >= 0.0 ? 1.0 : -1.0) / std::sqrt(1.0 + tau * tau);
  return {c, c * tau, a / c};
}

// One LSMR pass for min ||A dx - r0||, starting from dx = 0. Returns the
// number of iterations spent; dx accumulates the solution increment.
int lsmr_pass(const Eigen::SparseMatrix<double>& A, const Eigen::VectorXd& r0,
              double gradient_tol, int max_iterations, Eigen::VectorXd& dx) {
  const Eigen::Index n = A.cols();

  Eigen::VectorXd u = r0;
  double beta = u.norm();
  if (beta > 0.0) u /= beta;

  Eigen::VectorXd v = Eigen::VectorXd::Zero(n);
  double alpha = 0.0;
  if (beta > 0.0) {
    v = A.transpose() * u;
    alpha = v.norm();
    if (alpha > 0.0) v /= alpha;
  }
  if (alpha * beta == 0.0) return 0;  // dx = 0 already optimal

  double zetabar = alpha * beta;
  double alphabar = alpha;
  double rho = 1.0, rhobar = 1.0, cbar = 1.0, sbar = 0.0;

  Eigen::VectorXd h = v;
  Eigen::VectorXd hbar = Eigen::VectorXd::Zero(n);

  int iter = 0;
  while (iter < max_iterations) {
    ++iter;

    u = A * v - alpha * u;
    beta = u.norm();
    if (beta > 0.0) {
      u /= beta;
      v = A.transpose() * u - beta * v;
      alpha = v.norm();
      if (alpha > 0.0) v /= alpha;
    }

    Givens g1 = sym_ortho(alphabar, beta);
    double rho_old = rho;
    rho = g1.r;
    double theta_new = g1.s * alpha;
    alphabar = g1.c * alpha;

    double rhobar_old = rhobar;
    double thetabar = sbar * rho;
    double rho_temp = cbar * rho;
    Givens g2 = sym_ortho(cbar * rho, theta_new);
    cbar = g2.c;
    sbar = g2.s;
    rhobar = g2.r;
    double zeta = cbar * zetabar;
    zetabar = -sbar * zetabar;
    (void)rho_temp;

    hbar = h - (thetabar * rho / (rho_old * rhobar_old)) * hbar;
    dx += (zeta / (rho * rhobar)) * hbar;
    h = v - (theta_new / rho) * h;

    // |zetabar| estimates ||A^T (A dx - r0)||
    if (std::abs(zetabar) <= gradient_tol) break;
  }
  return iter;
}

}  // namespace

LsmrResult solve_lsq(const Eigen::SparseMatrix<double>& A, const Eigen::VectorXd& b,
                     const Eigen::VectorXd& x0, const LsmrOptions& opts) {
  if (A.rows() == 0 || A.cols() == 0) throw std::invalid_argument("solve_lsq: empty system");
  if (b.size() != A.rows() || x0.size() != A.cols())
    throw std::invalid_argument("solve_lsq: dimension mismatch");

  int max_iterations = opts.max_iterations > 0 ? opts.max_iterations
                                               : 10 * static_cast<int>(A.cols());
  double norm_atb = (A.transpose() * b).norm();
  double gradient_tol = opts.tol * norm_atb;

  LsmrResult result;
  result.x = x0;

  // the internal ||A^T r|| recurrence can drift; re-check against the true
  // gradient and restart the bidiagonalization when short
  int budget = max_iterations;
  for (int pass = 0; pass < 3 && budget > 0; ++pass) {
    Eigen::VectorXd r0 = b - A * result.x;
    double true_grad = (A.transpose() * r0).norm();
    if (norm_atb == 0.0 || true_grad <= gradient_tol) {
      result.converged = true;
      break;
    }
    Eigen::VectorXd dx = Eigen::VectorXd::Zero(A.cols());
    budget -= lsmr_pass(A, r0, gradient_tol, budget, dx);
    result.x += dx;
  }

  double final_grad = (A.transpose() * (b - A * result.x)).norm();
  result.relative_gradient_norm = norm_atb > 0.0 ? final_grad / norm_atb : 0.0;
  result.converged = norm_atb == 0.0 || final_grad <= gradient_tol * (1.0 + 1e-12) ||
                     result.relative_gradient_norm <= opts.tol;
  result.iterations = max_iterations - budget;
  return result;
}

}  // namespace facewarp

#pragma once

#include <string>
#include <vector>

#include <Eigen/Core>
#include <Eigen/SparseCore>

#include "facewarp/problem.hpp"

namespace facewarp {

enum class EnergyTerm {
  Face,
  Smoothness,
  Bending,
  Boundary,
  Line,
  Temporal,
  Coherence,
  Anchor,    // sequential-mode temporal/coherence rows against fixed values
  Tikhonov,
};

const char* energy_term_name(EnergyTerm term);

struct TermRange {
  EnergyTerm term;
  int frame;  // -1 for cross-frame terms
  int begin;
  int end;
};

// Stacked weighted residual rows: each row is pre-multiplied by the square
// root of its term weight, so ||Ax - b||^2 is the energy.
struct SparseLsqSystem {
  int rows = 0;
  int cols = 0;
  std::vector<Eigen::Triplet<double>> triplets;
  std::vector<double> rhs;
  std::vector<TermRange> term_ranges;
  int flagged_empty_faces = 0;

  Eigen::SparseMatrix<double> matrix() const;
  Eigen::VectorXd rhs_vector() const;

  // appends one residual row scaled by sqrt_weight; rows with zero weight
  // are dropped entirely
  void add_row(double sqrt_weight, const std::vector<std::pair<int, double>>& coeffs,
               double rhs_value);
  void begin_term(EnergyTerm term, int frame);
  void end_term();

 private:
  EnergyTerm open_term_ = EnergyTerm::Face;
  int open_frame_ = -1;
  int open_begin_ = -1;
};

struct AssemblyOptions {
  bool tikhonov = true;
  double tikhonov_mu = 1e-8;
};

// Per-term assembly over one frame. Each appends its rows and a term range.
void assemble_face_term(const WarpProblem& problem, int frame, const UnknownLayout& layout,
                        SparseLsqSystem& sys);
void assemble_spatial_smoothness(const WarpProblem& problem, int frame,
                                 const UnknownLayout& layout, SparseLsqSystem& sys);
void assemble_edge_bending(const WarpProblem& problem, int frame, const UnknownLayout& layout,
                           SparseLsqSystem& sys);
void assemble_boundary(const WarpProblem& problem, int frame, const UnknownLayout& layout,
                       SparseLsqSystem& sys);
void assemble_line_preservation(const WarpProblem& problem, int frame,
                                const UnknownLayout& layout, SparseLsqSystem& sys);

// Cross-frame terms over all transitions.
void assemble_temporal(const WarpProblem& problem, const UnknownLayout& layout,
                       SparseLsqSystem& sys);
void assemble_coherent_embedding(const WarpProblem& problem, const UnknownLayout& layout,
                                 SparseLsqSystem& sys);

// Full-volume system: all per-frame terms, temporal and coherence rows, and
// an optional sqrt(mu) (x - x_init) anchor for strict positive definiteness.
SparseLsqSystem build_system(const WarpProblem& problem, const UnknownLayout& layout,
                             const AssemblyOptions& opts = {});

struct EnergyBreakdown {
  double face = 0.0;
  double smoothness = 0.0;
  double bending = 0.0;
  double boundary = 0.0;
  double line = 0.0;
  double temporal = 0.0;
  double coherence = 0.0;
  double total = 0.0;
};

// Direct per-term evaluation of the energy at x (independent of the
// assembled matrix). Throws on layout/length mismatch.
EnergyBreakdown energy_value(const WarpProblem& problem, const UnknownLayout& layout,
                             const Eigen::VectorXd& x);

// Text dump of the augmented triplet matrix [A | b], one `row col value`
// per line; the rhs occupies column cols.
void dump_system(const SparseLsqSystem& sys, const std::string& path);

}  // namespace facewarp

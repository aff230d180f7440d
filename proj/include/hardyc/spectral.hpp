#pragma once

// Periodic-cell finite element estimate of the best constant
//   mu = inf int |grad u|^2 / int V u^2
// over axisymmetric u(s, r), L-periodic in s, vanishing at r = R and on a
// small disk of radius delta around the pole at (s, r) = (0, 0). Continuous
// bilinear elements on a tensor grid, radially graded towards the axis.

#include <string>
#include <vector>

#include <Eigen/Sparse>

#include "hardyc/lattice.hpp"

namespace hardyc {

struct Grid2D {
  int n_s = 0;
  int n_r = 0;
  double L = 0.0;
  double R = 0.0;
  double delta = 0.0;
  double grading = 1.0;       // ratio of consecutive radial cells at the axis
  std::vector<double> s;      // n_s + 1 nodes, s[0] = 0, s[n_s] = L (identified with s[0])
  std::vector<double> r;      // n_r + 1 nodes, r[0] = 0, r[n_r] = R

  /// Uniform axial cells; geometric radial cells whose innermost width is
  /// max(delta/2, ds/32) (the second term keeps aspect ratios <= 32).
  static Grid2D graded(int n_s, int n_r, const LatticeConfig& cfg, double delta);

  /// Every cell bisected in both directions (nested refinement).
  Grid2D refined() const;
  Grid2D with_delta(double new_delta) const;

  /// n_s, n_r >= 4, 0 < delta < min(h/2, R)/4, aspect ratios <= 32, geometry matching cfg.
  void validate(const LatticeConfig& cfg) const;

  double max_aspect() const;
  /// Node (i, j) lies in the closed exclusion disk (periodic in s).
  bool excluded(int i, int j) const;
  /// True if every node of `coarse` is a node of this grid.
  bool contains(const Grid2D& coarse) const;
  std::string label() const;
};

/// Symmetric matrix in compressed row storage.
struct SymmetricSparseOperator {
  Eigen::SparseMatrix<double, Eigen::RowMajor> matrix;

  int dim() const { return static_cast<int>(matrix.rows()); }
  /// max |A - A^T|.
  double asymmetry() const;
};

struct Assembly {
  SymmetricSparseOperator K;  // int (u_s v_s + u_r v_r) r^{d-2}
  SymmetricSparseOperator M;  // int V u v r^{d-2}
  std::vector<int> dof;       // node id j * n_s + i -> active index or -1
  int n_active = 0;
};

/// Element stiffness by 3x3 Gauss (exact for d <= 5); element V-mass by 3x3
/// Gauss refined on a quadtree until the change over active entries is below
/// 1e-11 relative. Elements are integrated in parallel and scattered in a
/// fixed order.
Assembly assemble(const Grid2D& grid, const LatticeConfig& cfg);

struct EigEstimate {
  double mu_hat = 0.0;
  double residual_norm = 0.0;  // ||K v - mu M v|| / ||M v||
  int iterations = 0;
  Grid2D grid;
  Eigen::VectorXd vector;      // M-normalised eigenvector on active dofs
};

inline constexpr double kEigRegularization = 1e-8;
inline constexpr int kEigMaxIterations = 500;
inline constexpr double kEigDefaultTol = 1e-10;

/// Smallest generalised eigenvalue of K v = mu M v by inverse iteration with
/// an LDL^T factorisation of K + 1e-8 M and Rayleigh quotients taken on K.
EigEstimate smallest_eig(const SymmetricSparseOperator& K, const SymmetricSparseOperator& M, double tol);

/// assemble + smallest_eig; tol <= 0 selects kEigDefaultTol.
EigEstimate solve_grid(const Grid2D& grid, const LatticeConfig& cfg, double tol);

inline constexpr double kSandwichLowerSlack = 1e-6;
inline constexpr double kSandwichUpperBand = 1.05;

struct MuEstimate {
  std::vector<EigEstimate> estimates;
  double mu_hat = 0.0;        // finest grid
  double extrapolated = 0.0;  // Richardson limit in the mesh size
  double observed_order = 0.0;
  double lower = 0.0;
  double upper = 0.0;
  bool lower_ok = false;      // lower - 1e-6 <= mu_hat
  bool upper_ok = false;      // mu_hat <= 1.05 upper
  bool sandwich_pass() const { return lower_ok && upper_ok; }
};

/// Solves on each grid of a nested sequence (tol <= 0: kEigDefaultTol).
MuEstimate estimate_mu(const LatticeConfig& cfg, const std::vector<Grid2D>& grids, double tol = 0.0);

/// Nested ladder: graded(n_s0, n_r0) refined `levels - 1` times.
std::vector<Grid2D> nested_ladder(int n_s0, int n_r0, int levels, const LatticeConfig& cfg, double delta);

struct GridPolicy {
  int n_s = 128;
  int n_r = 64;
  int levels = 1;              // ladder length ending at n_s x n_r
  double delta_factor = 1e-3;  // delta = delta_factor * h
};

struct SweepRow {
  double R = 0.0;
  double lower = 0.0;
  double mu_hat = 0.0;
  double upper = 0.0;
  double gap = 0.0;  // upper - lower
  std::string grid;
  double delta = 0.0;
  double extrapolated = 0.0;
  bool lower_ok = false;
  bool upper_ok = false;
};

/// One row per R; R_list must be strictly decreasing.
std::vector<SweepRow> sweep_R(int d, const std::vector<double>& R_list, const GridPolicy& policy);

struct DeltaSweep {
  std::vector<double> deltas;
  std::vector<double> mu;
  double limit = 0.0;  // mu0 in mu(delta) = mu0 + c / ln^2(l/delta), l = min(R, L/2)
  double slope = 0.0;  // c
};

/// Same nodes, exclusion radius factor * h for each factor (decreasing).
DeltaSweep delta_sweep(const Grid2D& grid, const LatticeConfig& cfg, const std::vector<double>& factors);

}  // namespace hardyc

#pragma once

// Geometry of the pole lattice a_k = k*(h,...,h) and of the right cylinder
// C_R around the axis x_1 = ... = x_d.
//
// Three coordinate systems are used throughout:
//   Cartesian  x in R^d                      (I/O only)
//   reduced    (a, rho), poles at (k, 0)      (potential formulas)
//   cell       (s, r) = (a, rho) * h*sqrt(d)  (arc length along / distance to the axis)

#include <span>
#include <vector>

namespace hardyc {

struct LatticeConfig {
  int d = 3;
  double h = 1.0 / 3.0;
  double R = 1.0;
  bool normalized = true;  // d*h == 1, h stored as exactly 1.0/d

  /// Normalized lattice (dh = 1).
  static LatticeConfig normalized_lattice(int d, double R);
  static LatticeConfig with_spacing(int d, double h, double R);

  /// Throws InputError when an invariant is violated.
  void validate() const;

  /// Axial distance between consecutive poles, L = h*sqrt(d).
  double period() const;
  /// 1/(d h^2): converts reduced lattice sums into values of V.
  double prefactor() const;
  /// Largest admissible rho inside C_R, R/(h sqrt(d)) (= R sqrt(d) when dh = 1).
  double rho_max() const;
};

struct ReducedCoords {
  double a = 0.0;
  double rho = 0.0;
};

struct CellCoords {
  double s = 0.0;
  double r = 0.0;
};

using Point = std::vector<double>;

ReducedCoords reduced_coords(std::span<const double> p, const LatticeConfig& cfg);

/// | |p|^2 - d h^2 (rho^2 + a^2) |
double norm_identity_residual(std::span<const double> p, const LatticeConfig& cfg);

bool in_cylinder(ReducedCoords c, const LatticeConfig& cfg);

/// x = (s/sqrt(d)) (1,...,1) + r dir. `dir` must be a unit vector orthogonal to
/// the axis (tolerance 1e-12).
Point embed(CellCoords c, std::span<const double> dir, const LatticeConfig& cfg);

/// A fixed unit vector orthogonal to the axis: (1,-1,0,...,0)/sqrt(2).
Point transverse_direction(int d);

ReducedCoords to_reduced(CellCoords c, const LatticeConfig& cfg);
CellCoords to_cell(ReducedCoords c, const LatticeConfig& cfg);

/// Offset of a from the nearest integer, in [-1/2, 1/2].
double fractional_offset(double a);

}  // namespace hardyc

#pragma once

// Adaptive tensor Gauss-Legendre quadrature on rectangles, used for integrals
// over the cylinder written in cell coordinates (s, r):
//   integral over C_R of F dx = omega_{d-2} * integral F(s, r) r^{d-2} dr ds
// for axisymmetric F.

#include <functional>
#include <optional>
#include <span>
#include <vector>

#include "hardyc/lattice.hpp"

namespace hardyc {

struct Box {
  double x0 = 0.0, x1 = 0.0;
  double y0 = 0.0, y1 = 0.0;
};

/// A point singularity of the integrand. `exponent` p declares |F| ~ t^p in
/// R^d near the point (t the Euclidean distance); integrable iff p > -d for a
/// point on the axis.
struct SingularPoint {
  double x = 0.0;
  double y = 0.0;
  double exponent = 0.0;
};

struct QuadratureOptions {
  double rel_tol = 1e-8;
  double abs_tol = 0.0;
  int max_level = 12;  // dyadic levels below a base cell
  long max_cells = 400000;
  std::vector<double> x_breaks;  // interior lines of the base partition
  std::vector<double> y_breaks;
  std::optional<SingularPoint> singular;
};

struct QuadratureResult {
  double value = 0.0;
  double abs_error_estimate = 0.0;
  long cells = 0;
};

using Integrand2D = std::function<double(double, double)>;
using Integrand1D = std::function<double(double)>;

/// Globally adaptive 4x4-point Gauss (exact for degree <= 7 per variable) with
/// per-cell error |Q(children) - Q(cell)|. Cells touching the declared singular
/// point may refine 30 levels deep.
QuadratureResult adaptive_integrate(const Integrand2D& g, const Box& box, const QuadratureOptions& opts = {});

/// Fixed composite rule: every base cell split into n x n equal sub-cells.
double integrate_fixed(const Integrand2D& g, const Box& box, int n, std::span<const double> x_breaks = {},
                       std::span<const double> y_breaks = {});

/// Globally adaptive 1D Gauss-Legendre over consecutive break points.
QuadratureResult integrate_1d(const Integrand1D& g, std::span<const double> breaks, double rel_tol = 1e-12,
                              int max_level = 40);

/// Surface measure of the unit n-sphere in R^{n+1}: 2 pi^{(n+1)/2} / Gamma((n+1)/2).
double sphere_measure(int n);

/// omega_{d-2} * integral over `domain` (s in [x0,x1], r in [y0,y1]) of f(s,r) r^{d-2}.
QuadratureResult integrate_cell(const std::function<double(CellCoords)>& f, const Box& domain, int d,
                                const QuadratureOptions& opts = {});

}  // namespace hardyc

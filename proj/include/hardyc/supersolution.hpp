#pragma once

// Closed-form calculus around the supersolution phi = theta^alpha,
//   theta = e^{2 pi rho} + e^{-2 pi rho} - 2 cos(2 pi a) = 4 (sinh^2(pi rho) + sin^2(pi a)),
// the constants built from it, and central-difference cross-checks.

#include <functional>
#include <span>
#include <vector>

#include "hardyc/lattice.hpp"

namespace hardyc {

struct SupersolutionParams {
  double alpha = 0.0;
};

struct CalculusReport {
  std::vector<double> grad_a;
  std::vector<double> grad_rho;
  double lap_a = 0.0;
  double lap_rho = 0.0;
  double norm2_grad_rho = 0.0;
  double div_grad_rho_over_rho = 0.0;
  double dot_grad_rho_grad_a = 0.0;
  /// max |analytic - central difference| over all quantities, steps 1e-3 and 5e-4 extrapolated.
  double fd_max_error = 0.0;
  /// Same at step 1e-5 (roundoff-dominated for the second derivatives).
  double fd_max_error_fine = 0.0;
  /// Observed order from a step-halving pair sized to the distance to the axis.
  double fd_order = 0.0;
};

/// Analytic gradients/Laplacians of a and rho at an off-axis point, general h:
///   grad a = 1/(dh), grad rho = (d x - dh a 1)/(d^2 h^2 rho), |grad rho|^2 = d/(d^2 h^2),
///   lap rho = d(d-2)/(d^2 h^2 rho), div(grad rho / rho) = d(d-3)/(d^2 h^2 rho^2).
CalculusReport calculus_at(std::span<const double> p, const LatticeConfig& cfg);

double theta(ReducedCoords c);

/// f = rho (E + 1/E + 2 cos 2 pi a)/(E - 1/E), E = e^{2 pi rho}; extended by
/// continuity to rho = 0, where it equals cos^2(pi a)/pi.
double supersolution_fraction(ReducedCoords c);

/// -lap(phi)/(V phi) = -2 alpha (d-2) - 4 alpha^2 pi f. Requires dh = 1.
double ratio_neg_lap_phi_over_V_phi(ReducedCoords c, SupersolutionParams params, const LatticeConfig& cfg);

/// R sqrt(d) coth(pi R sqrt(d)); tends to 1/pi as R -> 0.
double c1(double R, int d);
double optimal_alpha(double R, int d);
/// (d-2)^2 / (4 pi C1(R)).
double lambda_lower(double R, int d);

struct HardyBounds {
  double lower = 0.0;
  double upper = 0.0;
};
HardyBounds theorem2_bounds(double R, int d);

/// Radial C^2 cutoff g(t): 1 on [0, inner], 0 on [outer, inf), quintic
/// smoothstep 1 - (6u^5 - 15u^4 + 10u^3), u = (t - inner)/(outer - inner), between.
struct CutoffSpec {
  double inner = 0.0;
  double outer = 0.0;

  /// The profile used for the localisation constant: inner = h/8, outer = h/4.
  static CutoffSpec for_spacing(double h);

  double value(double t) const;
  double d1(double t) const;
  double d2(double t) const;
  /// Laplacian of x -> g(|x|) in R^d at radius t > 0.
  double laplacian(double t, int d) const;
};

/// max |xi lap xi| over `samples` equispaced radii in [inner, outer].
double cutoff_sup_xi_lap_xi(const CutoffSpec& cutoff, int d, int samples = 4096);

inline constexpr double kCutoffSafety = 1.01;

/// 1.01 sup|xi lap xi| + ((d-2)^2/4) (128 [R/h] / h^2 + pi^2 / (3 h^2)).
double theorem35_constant(const LatticeConfig& cfg, const CutoffSpec& cutoff);

struct FdResult {
  std::vector<double> grad;
  double lap = 0.0;
};

using ScalarField = std::function<double(std::span<const double>)>;

/// Central-difference gradient and (2d+1)-point Laplacian.
FdResult fd_check(const ScalarField& fn, std::span<const double> p, double eps);

/// Steps eps and eps/2 combined as (4 D(eps/2) - D(eps)) / 3, fourth order.
FdResult fd_check_extrapolated(const ScalarField& fn, std::span<const double> p, double eps);

}  // namespace hardyc

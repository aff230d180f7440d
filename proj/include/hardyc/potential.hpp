#pragma once

// The multipolar potential V(x) = sum_k 1/|x - a_k|^2.
//
// In reduced coordinates V = (1/(d h^2)) * S(a, rho) with the lattice sum
//   S(a, rho) = sum_k 1/((k - a)^2 + rho^2)
//             = (pi/rho) sinh(2 pi rho) / (2 (sinh^2(pi rho) + sin^2(pi a))).
// The second line is the residue-summed closed form, written with the
// half-angle identity cosh x - cos y = 2 sinh^2(x/2) + 2 sin^2(y/2) so that the
// denominator never cancels, not even next to a pole.

#include "hardyc/lattice.hpp"

namespace hardyc {

enum class Method { series, closed };

struct PotentialValue {
  double value = 0.0;
  Method method = Method::closed;
  double error_bound = 0.0;  // rigorous truncation bound (series only)
  long terms_used = 0;
};

inline constexpr double kDefaultTol = 1e-10;
/// Below this rho the factor sinh(2 pi rho)/rho is evaluated by its Taylor series.
inline constexpr double kRhoSwitch = 1e-3;
/// Reduced distance below which a point is treated as a pole.
inline constexpr double kPoleRadius = 1e-14;

/// Truncated lattice sum with a rigorous Euler-Maclaurin remainder bound.
struct LatticeSum {
  double value = 0.0;
  double error_bound = 0.0;
  long terms = 0;  // explicit terms in the window |k - round(a)| < N
  long window = 0; // N
};

/// S(a, rho) by direct summation outward from the nearest pole plus an
/// Euler-Maclaurin tail. `tol` bounds the truncation error of S itself.
/// With `skip_nearest` the k = round(a) term is omitted (no pole check then).
LatticeSum lattice_sum_series(double a, double rho, double tol, bool skip_nearest = false);

/// S(a, rho) in closed form.
double lattice_sum_closed(double a, double rho);

/// Upper bound 2/(N - |a*| - 1) on the discarded terms |k - round(a)| > N,
/// a* the fractional offset of a. Requires N >= |a*| + 2.
double tail_bound(long N, double a, double rho);

PotentialValue eval_series(ReducedCoords c, const LatticeConfig& cfg, double tol = kDefaultTol);
PotentialValue eval_closed(ReducedCoords c, const LatticeConfig& cfg);

/// V at cell coordinates (closed form).
double potential_at(CellCoords c, const LatticeConfig& cfg);

/// V(x) |x - a_k|^2 for x in the open ball B_{h/2}(a_k), x != a_k. Evaluated as
/// 1 + q * (sum over j != k), q the reduced squared distance, so the result is
/// strictly above 1 whenever q * remainder is resolvable.
double local_normalized(ReducedCoords c, const LatticeConfig& cfg, long k);

}  // namespace hardyc

#include "hardyc/potential.hpp"

#include <cmath>
#include <numbers>

#include "hardyc/error.hpp"
#include "hardyc/summation.hpp"

namespace hardyc {

namespace {

using std::numbers::pi;

constexpr long kMaxWindow = 1L << 40;

// g(y) = 1/(y^2 + rho^2) and the pieces of its Euler-Maclaurin tail.
double g0(double y, double rho) { return 1.0 / (y * y + rho * rho); }

double g1(double y, double rho) {
  const double q = y * y + rho * rho;
  return -2.0 * y / (q * q);
}

double g3(double y, double rho) {
  const double q = y * y + rho * rho;
  const double q2 = q * q;
  return -24.0 * y * (y * y - rho * rho) / (q2 * q2);
}

// integral_y^inf dt / (t^2 + rho^2)
double tail_integral(double y, double rho) { return rho > 0.0 ? std::atan(rho / y) / rho : 1.0 / y; }

// sum_{m >= 0} g(y + m) for y >= 2 rho: Euler-Maclaurin through the B4 term.
// g'''' > 0 on [y, inf) once y > 1.38 rho, so the remainder is at most |g'''(y)|/720.
double tail_sum(double y, double rho) {
  return tail_integral(y, rho) + 0.5 * g0(y, rho) - g1(y, rho) / 12.0 + g3(y, rho) / 720.0;
}

double remainder_bound(long N, double f, double rho) {
  const double n = static_cast<double>(N);
  return (std::abs(g3(n - f, rho)) + std::abs(g3(n + f, rho))) / 720.0;
}

void check_pole(double f, double rho) {
  if (std::hypot(f, rho) < kPoleRadius) throw PoleError("point coincides with a pole of V");
}

}  // namespace

LatticeSum lattice_sum_series(double a, double rho, double tol, bool skip_nearest) {
  if (!(tol > 0.0)) throw InputError("series tolerance must be positive");
  if (!(rho >= 0.0)) throw InputError("rho must be >= 0");
  const double f = fractional_offset(a);
  if (!skip_nearest) check_pole(f, rho);

  long N = std::max(8L, static_cast<long>(std::ceil(2.0 * rho + 1.0)));
  while (remainder_bound(N, f, rho) > tol) {
    N *= 2;
    if (N > kMaxWindow) throw NumericalError("lattice sum: tolerance not reachable");
  }

  CompensatedSum acc;
  if (!skip_nearest) acc += g0(f, rho);
  for (long j = 1; j < N; ++j) {
    const double jd = static_cast<double>(j);
    acc += g0(jd - f, rho) + g0(jd + f, rho);
  }
  const double n = static_cast<double>(N);
  acc += tail_sum(n - f, rho) + tail_sum(n + f, rho);

  return {acc.value(), remainder_bound(N, f, rho), 2 * N - (skip_nearest ? 2 : 1), N};
}

double lattice_sum_closed(double a, double rho) {
  if (!(rho >= 0.0)) throw InputError("rho must be >= 0");
  const double f = fractional_offset(a);
  check_pole(f, rho);
  const double x = pi * rho;
  const double sn = std::sin(pi * f);
  if (x > 20.0) {
    // sinh^2 dominates: S = (pi/rho) coth(x) / (1 + sin^2/sinh^2)
    const double ratio = 4.0 * sn * sn * std::exp(-2.0 * x);
    return (pi / rho) / std::tanh(x) / (1.0 + ratio);
  }
  double sinhc2;  // sinh(2 pi rho) / rho
  if (rho < kRhoSwitch) {
    const double z2 = 4.0 * pi * pi * rho * rho;
    sinhc2 = 2.0 * pi * (1.0 + z2 / 6.0 * (1.0 + z2 / 20.0 * (1.0 + z2 / 42.0)));
  } else {
    sinhc2 = std::sinh(2.0 * x) / rho;
  }
  const double sh = std::sinh(x);
  return 0.5 * pi * sinhc2 / (sh * sh + sn * sn);
}

double tail_bound(long N, double a, double /*rho*/) {
  const double f = std::abs(fractional_offset(a));
  if (static_cast<double>(N) < f + 2.0) throw InputError("tail_bound: N too small");
  return 2.0 / (static_cast<double>(N) - f - 1.0);
}

PotentialValue eval_series(ReducedCoords c, const LatticeConfig& cfg, double tol) {
  if (!(tol > 0.0)) throw InputError("series tolerance must be positive");
  const double pre = cfg.prefactor();
  const LatticeSum s = lattice_sum_series(c.a, c.rho, tol / pre);
  return {pre * s.value, Method::series, pre * s.error_bound, s.terms};
}

PotentialValue eval_closed(ReducedCoords c, const LatticeConfig& cfg) {
  return {cfg.prefactor() * lattice_sum_closed(c.a, c.rho), Method::closed, 0.0, 0};
}

double potential_at(CellCoords c, const LatticeConfig& cfg) {
  return eval_closed(to_reduced(c, cfg), cfg).value;
}

double local_normalized(ReducedCoords c, const LatticeConfig& cfg, long k) {
  const double da = c.a - static_cast<double>(k);
  check_pole(da, c.rho);
  const double q = da * da + c.rho * c.rho;
  // Cartesian |x - a_k|^2 = d h^2 q must be below (h/2)^2.
  if (!(cfg.d * q < 0.25)) throw InputError("local_normalized: point outside B_{h/2}(a_k)");
  const double rest = lattice_sum_series(da, c.rho, 1e-15, /*skip_nearest=*/true).value;
  return 1.0 + q * rest;
}

}  // namespace hardyc

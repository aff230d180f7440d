#include "hardyc/supersolution.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

#include "hardyc/error.hpp"
#include "hardyc/potential.hpp"

namespace hardyc {

namespace {

using std::numbers::pi;

void require_bound_dimension(int d) {
  if (d < 3) throw InputError("Hardy bounds need d >= 3 (the constant (d-2)^2/4 vanishes for d = 2)");
}

struct FdErrors {
  double linear = 0.0;     // quantities of a (exact for central differences up to roundoff)
  double nonlinear = 0.0;  // max over quantities of rho
  double nonlinear_sum = 0.0;
};

FdErrors fd_errors(std::span<const double> p, const LatticeConfig& cfg, const CalculusReport& exact,
                   double eps, bool extrapolated = false) {
  const auto diff = extrapolated ? fd_check_extrapolated : fd_check;
  const auto a_of = [&](std::span<const double> x) { return reduced_coords(x, cfg).a; };
  const auto rho_of = [&](std::span<const double> x) { return reduced_coords(x, cfg).rho; };
  const auto log_rho_of = [&](std::span<const double> x) { return std::log(reduced_coords(x, cfg).rho); };

  const FdResult fa = diff(a_of, p, eps);
  const FdResult fr = diff(rho_of, p, eps);
  const FdResult fl = diff(log_rho_of, p, eps);

  FdErrors e;
  double norm2 = 0.0, dot = 0.0, grad_rho_err = 0.0;
  for (int i = 0; i < cfg.d; ++i) {
    e.linear = std::max(e.linear, std::abs(fa.grad[i] - exact.grad_a[i]));
    grad_rho_err = std::max(grad_rho_err, std::abs(fr.grad[i] - exact.grad_rho[i]));
    norm2 += fr.grad[i] * fr.grad[i];
    dot += fr.grad[i] * fa.grad[i];
  }
  e.linear = std::max(e.linear, std::abs(fa.lap - exact.lap_a));
  const double errs[] = {grad_rho_err, std::abs(norm2 - exact.norm2_grad_rho), std::abs(dot),
                         std::abs(fr.lap - exact.lap_rho), std::abs(fl.lap - exact.div_grad_rho_over_rho)};
  for (double v : errs) {
    e.nonlinear = std::max(e.nonlinear, v);
    e.nonlinear_sum += v;
  }
  return e;
}

}  // namespace

CalculusReport calculus_at(std::span<const double> p, const LatticeConfig& cfg) {
  const ReducedCoords c = reduced_coords(p, cfg);
  if (c.rho < 1e-10) throw InputError("calculus_at: point on the axis (rho = 0), formulas are singular");

  const int d = cfg.d;
  const double dh = d * cfg.h;
  const double d2h2 = dh * dh;

  CalculusReport rep;
  rep.grad_a.assign(d, 1.0 / dh);
  rep.grad_rho.resize(d);
  for (int i = 0; i < d; ++i) rep.grad_rho[i] = (d * p[i] - dh * c.a) / (d2h2 * c.rho);
  rep.lap_a = 0.0;
  rep.norm2_grad_rho = d / d2h2;
  rep.lap_rho = d * (d - 2.0) / (d2h2 * c.rho);
  rep.div_grad_rho_over_rho = d * (d - 3.0) / (d2h2 * c.rho * c.rho);
  double dot = 0.0;
  for (int i = 0; i < d; ++i) dot += rep.grad_rho[i] * rep.grad_a[i];
  rep.dot_grad_rho_grad_a = dot;

  const FdErrors coarse = fd_errors(p, cfg, rep, 1e-3, true);
  const FdErrors fine = fd_errors(p, cfg, rep, 1e-5);
  rep.fd_max_error = std::max(coarse.linear, coarse.nonlinear);
  rep.fd_max_error_fine = std::max(fine.linear, fine.nonlinear);

  // Truncation-dominated pair: steps proportional to the distance to the axis.
  const double r_axis = c.rho * cfg.period();
  const double eta = 0.02 * r_axis;
  const FdErrors big = fd_errors(p, cfg, rep, eta);
  const FdErrors half = fd_errors(p, cfg, rep, 0.5 * eta);
  rep.fd_order = std::log2(big.nonlinear_sum / half.nonlinear_sum);
  return rep;
}

double theta(ReducedCoords c) {
  const double sh = std::sinh(pi * c.rho);
  const double sn = std::sin(pi * fractional_offset(c.a));
  return 4.0 * (sh * sh + sn * sn);
}

double supersolution_fraction(ReducedCoords c) {
  const double x = pi * c.rho;
  const double sn = std::sin(pi * fractional_offset(c.a));
  const double sn2 = sn * sn;
  if (c.rho < kRhoSwitch) {
    // 2 rho / sinh(2 pi rho) = 1 / (pi sinhc(z)), z = 2 pi rho
    const double z2 = 4.0 * x * x;
    const double sinhc = 1.0 + z2 / 6.0 * (1.0 + z2 / 20.0 * (1.0 + z2 / 42.0));
    const double ch = std::cosh(x);
    return (ch * ch - sn2) / (pi * sinhc);
  }
  if (x > 20.0) {
    const double e2 = std::exp(-2.0 * x);
    const double inv_ch2 = 4.0 * e2 / ((1.0 + e2) * (1.0 + e2));
    return c.rho / std::tanh(x) * (1.0 - sn2 * inv_ch2);
  }
  const double ch = std::cosh(x);
  return c.rho / std::tanh(x) * (1.0 - sn2 / (ch * ch));
}

double ratio_neg_lap_phi_over_V_phi(ReducedCoords c, SupersolutionParams params, const LatticeConfig& cfg) {
  if (!cfg.normalized) throw InputError("ratio formula requires a normalized lattice (d h = 1)");
  if (std::hypot(fractional_offset(c.a), c.rho) < kPoleRadius) throw PoleError("ratio: point is a pole");
  const double alpha = params.alpha;
  return -2.0 * alpha * (cfg.d - 2) - 4.0 * alpha * alpha * pi * supersolution_fraction(c);
}

double c1(double R, int d) {
  if (!(R > 0.0)) throw InputError("C1: R must be positive");
  if (d < 1) throw InputError("C1: d must be >= 1");
  const double rs = R * std::sqrt(static_cast<double>(d));
  const double x = pi * rs;
  if (x < 1e-4) {
    const double x2 = x * x;
    return (1.0 + x2 / 3.0 - x2 * x2 / 45.0) / pi;
  }
  return rs / std::tanh(x);
}

double optimal_alpha(double R, int d) {
  require_bound_dimension(d);
  return -(d - 2.0) / (4.0 * pi * c1(R, d));
}

double lambda_lower(double R, int d) {
  require_bound_dimension(d);
  return (d - 2.0) * (d - 2.0) / (4.0 * pi * c1(R, d));
}

HardyBounds theorem2_bounds(double R, int d) {
  require_bound_dimension(d);
  return {lambda_lower(R, d), (d - 2.0) * (d - 2.0) / 4.0};
}

CutoffSpec CutoffSpec::for_spacing(double h) {
  if (!(h > 0.0)) throw InputError("cutoff: h must be positive");
  return {h / 8.0, h / 4.0};
}

double CutoffSpec::value(double t) const {
  if (t <= inner) return 1.0;
  if (t >= outer) return 0.0;
  const double u = (t - inner) / (outer - inner);
  return 1.0 - u * u * u * (10.0 - 15.0 * u + 6.0 * u * u);
}

double CutoffSpec::d1(double t) const {
  if (t <= inner || t >= outer) return 0.0;
  const double w = outer - inner;
  const double u = (t - inner) / w;
  return -30.0 * u * u * (1.0 - u) * (1.0 - u) / w;
}

double CutoffSpec::d2(double t) const {
  if (t <= inner || t >= outer) return 0.0;
  const double w = outer - inner;
  const double u = (t - inner) / w;
  return -60.0 * u * (1.0 - u) * (1.0 - 2.0 * u) / (w * w);
}

double CutoffSpec::laplacian(double t, int d) const { return d2(t) + (d - 1.0) / t * d1(t); }

double cutoff_sup_xi_lap_xi(const CutoffSpec& cutoff, int d, int samples) {
  if (samples < 2) throw InputError("cutoff supremum needs at least 2 samples");
  if (!(cutoff.outer > cutoff.inner && cutoff.inner > 0.0)) throw InputError("cutoff radii out of order");
  double sup = 0.0;
  const double step = (cutoff.outer - cutoff.inner) / (samples - 1);
  for (int i = 0; i < samples; ++i) {
    const double t = cutoff.inner + i * step;
    sup = std::max(sup, std::abs(cutoff.value(t) * cutoff.laplacian(t, d)));
  }
  return sup;
}

double theorem35_constant(const LatticeConfig& cfg, const CutoffSpec& cutoff) {
  require_bound_dimension(cfg.d);
  cfg.validate();
  const double h2 = cfg.h * cfg.h;
  // R/h can land one ulp below an integer (R = 1, h = 1/3); floor with a relative guard.
  const double blocks = std::floor(cfg.R / cfg.h * (1.0 + 1e-12));
  const double dm2 = cfg.d - 2.0;
  return kCutoffSafety * cutoff_sup_xi_lap_xi(cutoff, cfg.d) +
         dm2 * dm2 / 4.0 * (128.0 * blocks / h2 + pi * pi / (3.0 * h2));
}

FdResult fd_check(const ScalarField& fn, std::span<const double> p, double eps) {
  if (!(eps > 0.0)) throw InputError("fd_check: step must be positive");
  const std::size_t n = p.size();
  std::vector<double> x(p.begin(), p.end());
  const double f0 = fn(x);
  FdResult out;
  out.grad.resize(n);
  double lap = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double xi = x[i];
    x[i] = xi + eps;
    const double fp = fn(x);
    x[i] = xi - eps;
    const double fm = fn(x);
    x[i] = xi;
    out.grad[i] = (fp - fm) / (2.0 * eps);
    lap += (fp - 2.0 * f0 + fm) / (eps * eps);
  }
  out.lap = lap;
  return out;
}

FdResult fd_check_extrapolated(const ScalarField& fn, std::span<const double> p, double eps) {
  const FdResult big = fd_check(fn, p, eps);
  const FdResult half = fd_check(fn, p, 0.5 * eps);
  FdResult out;
  out.grad.resize(big.grad.size());
  for (std::size_t i = 0; i < big.grad.size(); ++i) out.grad[i] = (4.0 * half.grad[i] - big.grad[i]) / 3.0;
  out.lap = (4.0 * half.lap - big.lap) / 3.0;
  return out;
}

}  // namespace hardyc

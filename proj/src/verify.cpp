#include "hardyc/verify.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <map>
#include <numbers>

#include "hardyc/error.hpp"
#include "hardyc/potential.hpp"
#include "hardyc/rng.hpp"
#include "hardyc/spectral.hpp"
#include "hardyc/supersolution.hpp"

namespace hardyc {

namespace {

using std::numbers::pi;
constexpr double kEps = std::numeric_limits<double>::epsilon();

double wrap(double s, double L) {
  const double w = std::fmod(s, L);
  return w < 0.0 ? w + L : w;
}

long pick(long samples, long fallback) { return samples > 0 ? samples : fallback; }

SuiteReport identities(const VerifyOptions& o) {
  const LatticeConfig cfg = LatticeConfig::normalized_lattice(o.d, o.R);
  const std::vector<Point> pts = sample_off_axis(o.d, pick(o.samples, 1000), o.seed, 0.25, 2.0, 2.0);
  double fd_max = 0.0, order_min = std::numeric_limits<double>::infinity();
  double norm_ulps = 0.0, trip_ulps = 0.0, period_ulps = 0.0;
  const Point dir = transverse_direction(o.d);
  CounterRng rng(o.seed, 11);
  for (const Point& p : pts) {
    const CalculusReport rep = calculus_at(p, cfg);
    fd_max = std::max(fd_max, rep.fd_max_error);
    order_min = std::min(order_min, rep.fd_order);
    double n2 = 0.0;
    for (double x : p) n2 += x * x;
    norm_ulps = std::max(norm_ulps, norm_identity_residual(p, cfg) / (kEps * n2));

    const ReducedCoords c = reduced_coords(p, cfg);
    Point q = p;
    for (double& x : q) x += cfg.h;
    const ReducedCoords cq = reduced_coords(q, cfg);
    const double scale = std::max({1.0, std::abs(c.a), c.rho});
    period_ulps = std::max(period_ulps, std::max(std::abs(cq.a - c.a - 1.0), std::abs(cq.rho - c.rho)) / (kEps * scale));
  }
  const long n_trip = pick(o.samples, 1000);
  for (long i = 0; i < n_trip; ++i) {
    const CellCoords cc{rng.next(-2.0, 2.0), rng.next(0.0, 2.0)};
    const ReducedCoords back = reduced_coords(embed(cc, dir, cfg), cfg);
    const ReducedCoords want = to_reduced(cc, cfg);
    const double scale = std::max({1.0, std::abs(want.a), want.rho});
    trip_ulps = std::max(trip_ulps, std::max(std::abs(back.a - want.a), std::abs(back.rho - want.rho)) / (kEps * scale));
  }
  SuiteReport r{"identities", {}};
  r.checks.push_back(check_le("fd_max_error", fd_max, 1e-6));
  r.checks.push_back(check_ge("fd_order_min", order_min, 1.9));
  r.checks.push_back(check_le("norm_identity_ulps", norm_ulps, 8.0));
  r.checks.push_back(check_le("round_trip_ulps", trip_ulps, 8.0));
  r.checks.push_back(check_le("periodicity_ulps", period_ulps, 8.0));
  return r;
}

double fd_ratio(CellCoords c, double alpha, const LatticeConfig& cfg) {
  const Point x = embed(c, transverse_direction(cfg.d), cfg);
  const auto phi = [&](std::span<const double> y) { return std::pow(theta(reduced_coords(y, cfg)), alpha); };
  const FdResult fd = fd_check_extrapolated(phi, x, 1e-3);
  return -fd.lap / (potential_at(c, cfg) * phi(x));
}

SuiteReport supersolution_suite(const VerifyOptions& o) {
  const LatticeConfig cfg = LatticeConfig::normalized_lattice(o.d, o.R);
  const double alpha = optimal_alpha(o.R, o.d);
  const double lower = lambda_lower(o.R, o.d);
  const double C1 = c1(o.R, o.d);
  const std::vector<CellCoords> pts = sample_cylinder(cfg, pick(o.samples, 10000), o.seed);
  double margin = std::numeric_limits<double>::infinity();
  double f_min = std::numeric_limits<double>::infinity(), f_excess = -std::numeric_limits<double>::infinity();
  for (const CellCoords& c : pts) {
    const ReducedCoords rc = to_reduced(c, cfg);
    margin = std::min(margin, ratio_neg_lap_phi_over_V_phi(rc, {alpha}, cfg) - lower);
    const double f = supersolution_fraction(rc);
    f_min = std::min(f_min, f);
    f_excess = std::max(f_excess, f / C1 - 1.0);
  }
  // Finite differences of phi away from the poles, where theta^alpha is smooth.
  CounterRng rng(o.seed, 21);
  const double L = cfg.period();
  double fd_rel = 0.0, quad_rel = 0.0;
  for (int i = 0; i < 200; ++i) {
    const CellCoords c{rng.next(0.15 * L, 0.85 * L), rng.next(0.0, cfg.R)};
    const ReducedCoords rc = to_reduced(c, cfg);
    const double exact = ratio_neg_lap_phi_over_V_phi(rc, {alpha}, cfg);
    fd_rel = std::max(fd_rel, std::abs(fd_ratio(c, alpha, cfg) - exact) / std::max(1.0, std::abs(exact)));
    // Parabola in alpha through three points: coefficients -2(d-2) and -4 pi f.
    const double a1 = -0.5, a2 = 0.1, a3 = 0.7;
    const double y1 = ratio_neg_lap_phi_over_V_phi(rc, {a1}, cfg);
    const double y2 = ratio_neg_lap_phi_over_V_phi(rc, {a2}, cfg);
    const double y3 = ratio_neg_lap_phi_over_V_phi(rc, {a3}, cfg);
    const double c2 = ((y3 - y2) / (a3 - a2) - (y2 - y1) / (a2 - a1)) / (a3 - a1);
    const double c1v = (y2 - y1) / (a2 - a1) - c2 * (a1 + a2);
    const double f = supersolution_fraction(rc);
    const double want2 = -4.0 * pi * f, want1 = -2.0 * (cfg.d - 2);
    quad_rel = std::max({quad_rel, std::abs(c2 - want2) / std::max(1.0, std::abs(want2)),
                         std::abs(c1v - want1) / std::max(1.0, std::abs(want1))});
  }
  SuiteReport r{"supersolution", {}};
  r.checks.push_back(check_ge("ratio_minus_lower_min", margin, -1e-9));
  r.checks.push_back(check_ge("fraction_min", f_min, 0.0));
  r.checks.push_back(check_le("fraction_over_C1_excess", f_excess, 1e-12));
  r.checks.push_back(check_le("fd_ratio_rel_error", fd_rel, 1e-6));
  r.checks.push_back(check_le("alpha_parabola_rel_error", quad_rel, 1e-8));
  return r;
}

SuiteReport allegretto_suite(const VerifyOptions& o) {
  const LatticeConfig cfg = LatticeConfig::normalized_lattice(o.d, o.R);
  const long n = pick(o.samples, 20);
  const std::vector<TestFunction> fns = random_separable(cfg, n, o.seed);
  CounterRng rng(o.seed, 31);
  const double a_opt = optimal_alpha(o.R, o.d);
  const double lower = lambda_lower(o.R, o.d);
  double worst_rel = 0.0, worst_order = std::numeric_limits<double>::infinity();
  double rhs_min = std::numeric_limits<double>::infinity(), gap_margin = std::numeric_limits<double>::infinity();
  for (long k = 0; k < n; ++k) {
    const double alpha = k % 2 == 0 ? a_opt : rng.uniform(static_cast<std::uint64_t>(k), -0.5 * (o.d - 2), 0.25);
    const AllegrettoStudy st = allegretto_study(fns[k], alpha, cfg);
    const double scale = std::max(std::abs(st.adaptive.lhs), std::abs(st.adaptive.rhs));
    worst_rel = std::max(worst_rel, st.adaptive.residual / scale);
    worst_order = std::min(worst_order, st.order);
    rhs_min = std::min(rhs_min, st.adaptive.rhs);
    const Gap g = hardy_gap(fns[k], lower, cfg);
    gap_margin = std::min(gap_margin, g.value + g.error);
  }
  SuiteReport r{"allegretto", {}};
  r.checks.push_back(check_le("residual_rel_max", worst_rel, 1e-6));
  r.checks.push_back(check_ge("refinement_order_min", worst_order, 2.0));
  r.checks.push_back(check_ge("rhs_min", rhs_min, 0.0));
  r.checks.push_back(check_ge("hardy_gap_plus_error_min", gap_margin, 0.0));
  return r;
}

SuiteReport sandwich_suite(const VerifyOptions& o) {
  const LatticeConfig cfg = LatticeConfig::normalized_lattice(o.d, o.R);
  const Grid2D g = Grid2D::graded(o.grid_s, o.grid_r, cfg, o.delta_factor * cfg.h);
  const MuEstimate est = estimate_mu(cfg, {g});
  SuiteReport r{"sandwich", {}};
  r.checks.push_back(check_ge("mu_hat_vs_lower", est.mu_hat, est.lower - kSandwichLowerSlack));
  r.checks.push_back(check_le("mu_hat_vs_upper_band", est.mu_hat, kSandwichUpperBand * est.upper));
  r.checks.push_back(check_le("eig_residual", est.estimates.back().residual_norm, kEigDefaultTol));
  return r;
}

SuiteReport local_suite(const VerifyOptions& o) {
  const LatticeConfig cfg = LatticeConfig::normalized_lattice(o.d, o.R);
  const std::vector<ReducedCoords> pts = sample_pole_ball(cfg, pick(o.samples, 1000), o.seed);
  const double K = 4.0 * pi * pi / (3.0 * cfg.h * cfg.h);
  double above_one = std::numeric_limits<double>::infinity(), excess = -std::numeric_limits<double>::infinity();
  for (const ReducedCoords& c : pts) {
    const double v = local_normalized(c, cfg, 0);
    const double dist2 = cfg.d * cfg.h * cfg.h * (c.a * c.a + c.rho * c.rho);
    above_one = std::min(above_one, v - 1.0);
    excess = std::max(excess, v - (1.0 + K * dist2));
  }
  SuiteReport r{"local", {}};
  r.checks.push_back(check_ge("normalized_minus_one_min", above_one, std::numeric_limits<double>::denorm_min()));
  r.checks.push_back(check_le("normalized_over_bracket_max", excess, 1e-12));
  return r;
}

SuiteReport thm35_suite(const VerifyOptions& o) {
  const LatticeConfig cfg = LatticeConfig::normalized_lattice(o.d, o.R);
  const std::vector<TestFunction> fns = random_windowed(cfg, pick(o.samples, 50), o.seed);
  double margin = std::numeric_limits<double>::infinity();
  for (const TestFunction& u : fns) {
    const LocalisedCheck c = theorem35_check(u, cfg);
    margin = std::min(margin, (c.lhs - c.rhs + c.error) / std::max(c.lhs, 1e-300));
  }
  SuiteReport r{"thm35", {}};
  r.checks.push_back(check_ge("lhs_minus_rhs_plus_error_rel_min", margin, 0.0));
  return r;
}

}  // namespace

Check check_le(std::string name, double value, double bound) {
  return {std::move(name), value, bound, true, bound - value, value <= bound};
}

Check check_ge(std::string name, double value, double bound) {
  return {std::move(name), value, bound, false, value - bound, value >= bound};
}

bool SuiteReport::pass() const {
  return std::all_of(checks.begin(), checks.end(), [](const Check& c) { return c.pass; });
}

const std::vector<std::string>& suite_names() {
  static const std::vector<std::string> names = {"identities", "supersolution", "allegretto",
                                                 "sandwich",   "local",         "thm35"};
  return names;
}

SuiteReport run_suite(const std::string& name, const VerifyOptions& opts) {
  static const std::map<std::string, std::function<SuiteReport(const VerifyOptions&)>> suites = {
      {"identities", identities}, {"supersolution", supersolution_suite}, {"allegretto", allegretto_suite},
      {"sandwich", sandwich_suite}, {"local", local_suite},              {"thm35", thm35_suite}};
  const auto it = suites.find(name);
  if (it == suites.end()) throw InputError("unknown suite '" + name + "'");
  if (opts.samples < 0) throw InputError("samples must be >= 0");
  return it->second(opts);
}

std::vector<CellCoords> sample_cylinder(const LatticeConfig& cfg, long n, std::uint64_t seed) {
  cfg.validate();
  const double L = cfg.period(), R = cfg.R;
  CounterRng rng(seed, 1);
  std::vector<CellCoords> out;
  out.reserve(n);
  for (long i = 0; i < n; ++i) {
    const std::uint64_t base = 3 * static_cast<std::uint64_t>(i);
    const double u1 = rng.uniform(base), u2 = rng.uniform(base + 1), u3 = rng.uniform(base + 2);
    CellCoords c;
    switch (i % 4) {
      case 0:  // near the axis, down to rho ~ 1e-9
        c = {L * u1, R * std::pow(10.0, -9.0 * u2)};
        break;
      case 1:  // near the mantle
        c = {L * u1, R * (1.0 - 1e-3 * u2)};
        break;
      case 2: {  // near the pole at s = 0
        const double t = std::min(R, 0.5 * L) * std::pow(10.0, -10.0 * u2);
        const double psi = pi * u3;
        c = {wrap(t * std::cos(psi), L), t * std::sin(psi)};
        break;
      }
      default:
        c = {L * u1, R * u2};
    }
    const ReducedCoords rc = to_reduced(c, cfg);
    const double f = fractional_offset(rc.a);
    if (std::hypot(f, rc.rho) < 1e-12) c.r = 1e-12 * L;  // keep clear of the pole itself
    out.push_back(c);
  }
  return out;
}

std::vector<Point> sample_off_axis(int d, long n, std::uint64_t seed, double r_lo, double r_hi, double s_max) {
  const LatticeConfig cfg = LatticeConfig::normalized_lattice(d, 1.0);
  CounterRng rng(seed, 2);
  std::vector<Point> out;
  out.reserve(n);
  std::vector<double> v(d);
  for (long i = 0; i < n; ++i) {
    double norm = 0.0;
    do {
      double mean = 0.0;
      for (double& x : v) {
        x = rng.next(-1.0, 1.0);
        mean += x;
      }
      mean /= d;
      norm = 0.0;
      for (double& x : v) {
        x -= mean;
        norm += x * x;
      }
      norm = std::sqrt(norm);
    } while (norm < 0.1);
    for (double& x : v) x /= norm;
    // Re-orthogonalise after normalisation so embed's 1e-12 checks pass.
    double mean = 0.0;
    for (double x : v) mean += x;
    mean /= d;
    norm = 0.0;
    for (double& x : v) {
      x -= mean;
      norm += x * x;
    }
    for (double& x : v) x /= std::sqrt(norm);
    const CellCoords c{rng.next(-s_max, s_max), rng.next(r_lo, r_hi)};
    out.push_back(embed(c, v, cfg));
  }
  return out;
}

std::vector<ReducedCoords> sample_pole_ball(const LatticeConfig& cfg, long n, std::uint64_t seed) {
  cfg.validate();
  const double L = cfg.period();
  CounterRng rng(seed, 3);
  std::vector<ReducedCoords> out;
  out.reserve(n);
  for (long i = 0; i < n; ++i) {
    const double t = 0.5 * cfg.h * (1.0 - 1e-9) * std::pow(10.0, -6.0 * rng.next());
    const double psi = pi * rng.next();
    out.push_back({t * std::cos(psi) / L, t * std::sin(psi) / L});
  }
  return out;
}

std::vector<TestFunction> random_separable(const LatticeConfig& cfg, long n, std::uint64_t seed) {
  cfg.validate();
  const double L = cfg.period(), R = cfg.R;
  CounterRng rng(seed, 4);
  std::vector<TestFunction> out;
  out.reserve(n);
  for (long i = 0; i < n; ++i) {
    const Profile1D::Kind kind = rng.next() < 0.5 ? Profile1D::Kind::poly_bump : Profile1D::Kind::even_bump;
    const double s0 = L * (0.05 + 0.3 * rng.next());
    const double s1 = L * (0.6 + 0.35 * rng.next());
    Profile1D radial;
    radial.kind = kind;
    if (rng.next() < 0.5) {
      const double w = R * (0.3 + 0.7 * rng.next());
      radial.lo = -w;
      radial.hi = w;
    } else {
      radial.lo = R * 0.4 * rng.next();
      radial.hi = radial.lo + (R - radial.lo) * (0.3 + 0.7 * rng.next());
    }
    out.push_back(TestFunction::separable(Profile1D{kind, s0, s1}, radial).scaled(0.5 + rng.next()));
  }
  return out;
}

std::vector<TestFunction> random_windowed(const LatticeConfig& cfg, long n, std::uint64_t seed) {
  cfg.validate();
  const double L = cfg.period(), R = cfg.R, W = 2.0 * R;
  CounterRng rng(seed, 5);
  std::vector<TestFunction> out;
  out.reserve(n);
  const long k_cell_lo = static_cast<long>(std::ceil(-W / L));
  const long k_cell_hi = static_cast<long>(std::floor(W / L)) - 1;  // cells [kL, (k+1)L] inside the window
  for (long i = 0; i < n; ++i) {
    const Profile1D::Kind kind = rng.next() < 0.5 ? Profile1D::Kind::poly_bump : Profile1D::Kind::even_bump;
    if (i % 2 == 1) {
      const double r_out = std::min(R, 0.5 * L) * (0.3 + 0.7 * rng.next());
      const double r_in = 0.5 * r_out * std::pow(10.0, -4.0 * rng.next());
      const double tau = (0.02 + 0.43 * rng.next()) * (cfg.d - 2);
      const long k_max = static_cast<long>(std::floor((W - r_out) / L));
      const long k = std::lround(-k_max + (2 * k_max) * rng.next());
      out.push_back(TestFunction::radial_bump(k, r_in, r_out, tau));
      continue;
    }
    Profile1D radial{kind, -R * (0.3 + 0.7 * rng.next()), 0.0};
    radial.hi = -radial.lo;
    Profile1D axial{kind, 0.0, 0.0};
    if (k_cell_lo <= k_cell_hi) {
      const long k = std::lround(k_cell_lo + (k_cell_hi - k_cell_lo) * rng.next());
      axial.lo = L * (k + 0.05 + 0.3 * rng.next());
      axial.hi = L * (k + 0.6 + 0.35 * rng.next());
    } else {
      // Window narrower than a cell: keep off the axis instead.
      axial.lo = -W * rng.next();
      axial.hi = W * rng.next() + 1e-3 * W;
      radial.lo = R * (0.1 + 0.4 * rng.next());
      radial.hi = R;
    }
    out.push_back(TestFunction::separable(axial, radial));
  }
  return out;
}

AllegrettoStudy allegretto_study(const TestFunction& u, double alpha, const LatticeConfig& cfg) {
  AllegrettoStudy st;
  st.adaptive = allegretto_residual(u, alpha, cfg);
  const double floor = 1e-12 * std::max(std::abs(st.adaptive.lhs), std::abs(st.adaptive.rhs));
  for (int n = 1; n <= 16; n *= 2) st.fixed_residuals.push_back(allegretto_residual_fixed(u, alpha, cfg, n).residual);
  const auto& r = st.fixed_residuals;
  int last = -1;
  for (int k = 0; k < static_cast<int>(r.size()); ++k) {
    if (r[k] > floor) last = k;
  }
  // Use the finest pair that is still above the roundoff floor.
  if (last < 0) {
    st.order = std::numeric_limits<double>::infinity();
  } else if (last >= 1) {
    st.order = std::log2(r[last - 1] / r[last]);
  } else if (r.size() > 1) {
    st.order = std::log2(r[0] / std::max(r[1], floor));
  } else {
    st.order = 0.0;
  }
  return st;
}

}  // namespace hardyc

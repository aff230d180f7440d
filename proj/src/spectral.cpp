#include "hardyc/spectral.hpp"

#include <algorithm>
#include <array>
#include <cmath>

#include <Eigen/SparseCholesky>

#include "hardyc/error.hpp"
#include "hardyc/parallel.hpp"
#include "hardyc/potential.hpp"
#include "hardyc/supersolution.hpp"

namespace hardyc {

namespace {

constexpr double kMaxAspect = 32.0;
constexpr double kMassRelTol = 1e-11;
constexpr int kMassMaxDepth = 40;

// 3-point Gauss-Legendre on [0, 1].
const std::array<double, 3> kG = {0.5 - 0.5 * 0.77459666924148337704, 0.5, 0.5 + 0.5 * 0.77459666924148337704};
constexpr std::array<double, 3> kW = {5.0 / 18.0, 8.0 / 18.0, 5.0 / 18.0};

using Local = std::array<double, 16>;

double power_int(double x, int n) {
  double w = 1.0;
  for (int i = 0; i < n; ++i) w *= x;
  return w;
}

std::vector<double> bisect(const std::vector<double>& x) {
  std::vector<double> out;
  out.reserve(2 * x.size() - 1);
  for (std::size_t i = 0; i + 1 < x.size(); ++i) {
    out.push_back(x[i]);
    out.push_back(0.5 * (x[i] + x[i + 1]));
  }
  out.push_back(x.back());
  return out;
}

bool subset(const std::vector<double>& small, const std::vector<double>& big) {
  std::size_t k = 0;
  for (double v : small) {
    while (k < big.size() && big[k] < v) ++k;
    if (k == big.size() || big[k] != v) return false;
  }
  return true;
}

struct Element {
  double sa, hs, ra, hr;
  int d;
  std::array<bool, 4> active;
};

// Bilinear shape functions, local node order (i,j), (i+1,j), (i,j+1), (i+1,j+1).
std::array<double, 4> shape(double xi, double eta) {
  return {(1 - xi) * (1 - eta), xi * (1 - eta), (1 - xi) * eta, xi * eta};
}

Local element_stiffness(const Element& e) {
  Local k{};
  for (int p = 0; p < 3; ++p) {
    for (int q = 0; q < 3; ++q) {
      const double xi = kG[p], eta = kG[q];
      const double w = kW[p] * kW[q] * e.hs * e.hr * power_int(e.ra + e.hr * eta, e.d - 2);
      const std::array<double, 4> gs = {-(1 - eta) / e.hs, (1 - eta) / e.hs, -eta / e.hs, eta / e.hs};
      const std::array<double, 4> gr = {-(1 - xi) / e.hr, -xi / e.hr, (1 - xi) / e.hr, xi / e.hr};
      for (int a = 0; a < 4; ++a) {
        for (int b = 0; b < 4; ++b) k[4 * a + b] += w * (gs[a] * gs[b] + gr[a] * gr[b]);
      }
    }
  }
  return k;
}

Local mass_rule(const Element& e, const LatticeConfig& cfg, double x0, double x1, double y0, double y1) {
  Local m{};
  for (int p = 0; p < 3; ++p) {
    for (int q = 0; q < 3; ++q) {
      const double xi = x0 + (x1 - x0) * kG[p], eta = y0 + (y1 - y0) * kG[q];
      const double s = e.sa + e.hs * xi, r = e.ra + e.hr * eta;
      const double w = kW[p] * kW[q] * (x1 - x0) * (y1 - y0) * e.hs * e.hr * power_int(r, e.d - 2) *
                       potential_at(CellCoords{s, r}, cfg);
      const std::array<double, 4> n = shape(xi, eta);
      for (int a = 0; a < 4; ++a) {
        for (int b = 0; b < 4; ++b) m[4 * a + b] += w * (n[a] * n[b]);
      }
    }
  }
  return m;
}

double active_change(const Element& e, const Local& x, const Local& y) {
  double m = 0.0;
  for (int a = 0; a < 4; ++a) {
    for (int b = 0; b < 4; ++b) {
      if (e.active[a] && e.active[b]) m = std::max(m, std::abs(x[4 * a + b] - y[4 * a + b]));
    }
  }
  return m;
}

void refine_mass(const Element& e, const LatticeConfig& cfg, double x0, double x1, double y0, double y1,
                 const Local& parent, int depth, double tol, Local& out) {
  const double xm = 0.5 * (x0 + x1), ym = 0.5 * (y0 + y1);
  const std::array<std::array<double, 4>, 4> quads = {
      {{x0, xm, y0, ym}, {xm, x1, y0, ym}, {x0, xm, ym, y1}, {xm, x1, ym, y1}}};
  std::array<Local, 4> child;
  Local sum{};
  for (int c = 0; c < 4; ++c) {
    child[c] = mass_rule(e, cfg, quads[c][0], quads[c][1], quads[c][2], quads[c][3]);
    for (int k = 0; k < 16; ++k) sum[k] += child[c][k];
  }
  if (depth >= kMassMaxDepth || active_change(e, sum, parent) <= tol) {
    for (int k = 0; k < 16; ++k) out[k] += sum[k];
    return;
  }
  for (int c = 0; c < 4; ++c) {
    refine_mass(e, cfg, quads[c][0], quads[c][1], quads[c][2], quads[c][3], child[c], depth + 1, tol, out);
  }
}

Local element_mass(const Element& e, const LatticeConfig& cfg) {
  const Local coarse = mass_rule(e, cfg, 0.0, 1.0, 0.0, 1.0);
  double scale = 0.0;
  for (int a = 0; a < 4; ++a) {
    for (int b = 0; b < 4; ++b) {
      if (e.active[a] && e.active[b]) scale = std::max(scale, std::abs(coarse[4 * a + b]));
    }
  }
  Local out{};
  refine_mass(e, cfg, 0.0, 1.0, 0.0, 1.0, coarse, 0, kMassRelTol * scale, out);
  return out;
}

}  // namespace

Grid2D Grid2D::graded(int n_s, int n_r, const LatticeConfig& cfg, double delta) {
  cfg.validate();
  if (n_s < 4 || n_r < 4) throw InputError("grid: n_s and n_r must be >= 4");
  Grid2D g;
  g.n_s = n_s;
  g.n_r = n_r;
  g.L = cfg.period();
  g.R = cfg.R;
  g.delta = delta;
  g.s.resize(n_s + 1);
  for (int i = 0; i <= n_s; ++i) g.s[i] = g.L * i / n_s;
  g.s[n_s] = g.L;

  const double ds = g.L / n_s;
  const double h1 = std::max(0.5 * delta, ds / kMaxAspect);
  double q = 1.0;
  if (h1 * n_r < cfg.R) {
    const auto total = [&](double x) { return h1 * (std::pow(x, n_r) - 1.0) / (x - 1.0); };
    double lo = 1.0, hi = 2.0;
    while (total(hi) < cfg.R) hi *= 2.0;
    for (int it = 0; it < 200; ++it) {
      const double mid = 0.5 * (lo + hi);
      (total(mid) < cfg.R ? lo : hi) = mid;
    }
    q = 0.5 * (lo + hi);
  }
  g.grading = q;
  g.r.resize(n_r + 1);
  g.r[0] = 0.0;
  if (q == 1.0) {
    for (int j = 1; j <= n_r; ++j) g.r[j] = cfg.R * j / n_r;
  } else {
    double w = h1;
    for (int j = 1; j <= n_r; ++j) {
      g.r[j] = g.r[j - 1] + w;
      w *= q;
    }
    // Rescale the rounding drift so the last node is R exactly.
    const double f = cfg.R / g.r[n_r];
    for (int j = 1; j < n_r; ++j) g.r[j] *= f;
  }
  g.r[n_r] = cfg.R;
  g.validate(cfg);
  return g;
}

Grid2D Grid2D::refined() const {
  Grid2D g = *this;
  g.s = bisect(s);
  g.r = bisect(r);
  g.n_s = 2 * n_s;
  g.n_r = 2 * n_r;
  g.grading = (g.r[2] - g.r[1]) / (g.r[1] - g.r[0]);
  return g;
}

Grid2D Grid2D::with_delta(double new_delta) const {
  Grid2D g = *this;
  g.delta = new_delta;
  return g;
}

double Grid2D::max_aspect() const {
  double hs_min = s[1] - s[0], hs_max = hs_min;
  for (int i = 0; i < n_s; ++i) {
    hs_min = std::min(hs_min, s[i + 1] - s[i]);
    hs_max = std::max(hs_max, s[i + 1] - s[i]);
  }
  double worst = 0.0;
  for (int j = 0; j < n_r; ++j) {
    const double hr = r[j + 1] - r[j];
    worst = std::max({worst, hs_max / hr, hr / hs_min});
  }
  return worst;
}

void Grid2D::validate(const LatticeConfig& cfg) const {
  cfg.validate();
  if (n_s < 4 || n_r < 4) throw InputError("grid: n_s and n_r must be >= 4");
  if (static_cast<int>(s.size()) != n_s + 1 || static_cast<int>(r.size()) != n_r + 1) {
    throw InputError("grid: node arrays do not match the cell counts");
  }
  if (std::abs(L - cfg.period()) > 1e-14 * L || s.front() != 0.0 || s.back() != L) {
    throw InputError("grid: axial period must be h sqrt(d)");
  }
  if (R != cfg.R || r.front() != 0.0 || r.back() != R) throw InputError("grid: radial range must be [0, R]");
  for (int i = 0; i < n_s; ++i) {
    if (!(s[i + 1] > s[i])) throw InputError("grid: axial nodes must increase");
  }
  for (int j = 0; j < n_r; ++j) {
    if (!(r[j + 1] > r[j])) throw InputError("grid: radial nodes must increase");
  }
  if (!(delta > 0.0) || !(delta < 0.25 * std::min(0.5 * cfg.h, cfg.R))) {
    throw InputError("grid: need 0 < delta < min(h/2, R)/4");
  }
  if (max_aspect() > kMaxAspect * (1.0 + 1e-9)) throw InputError("grid: cell aspect ratio exceeds 32");
}

bool Grid2D::excluded(int i, int j) const {
  const double sw = std::min(s[i], L - s[i]);
  return std::hypot(sw, r[j]) <= delta;
}

bool Grid2D::contains(const Grid2D& coarse) const {
  return L == coarse.L && R == coarse.R && subset(coarse.s, s) && subset(coarse.r, r);
}

std::string Grid2D::label() const { return std::to_string(n_s) + "x" + std::to_string(n_r); }

double SymmetricSparseOperator::asymmetry() const {
  const Eigen::SparseMatrix<double, Eigen::RowMajor> t = matrix.transpose();
  double m = 0.0;
  const Eigen::SparseMatrix<double, Eigen::RowMajor> diff = matrix - t;
  for (int k = 0; k < diff.outerSize(); ++k) {
    for (Eigen::SparseMatrix<double, Eigen::RowMajor>::InnerIterator it(diff, k); it; ++it) {
      m = std::max(m, std::abs(it.value()));
    }
  }
  return m;
}

Assembly assemble(const Grid2D& grid, const LatticeConfig& cfg) {
  grid.validate(cfg);
  const int n_s = grid.n_s, n_r = grid.n_r;
  Assembly out;
  out.dof.assign(static_cast<std::size_t>(n_s) * (n_r + 1), -1);
  for (int j = 0; j < n_r; ++j) {
    for (int i = 0; i < n_s; ++i) {
      if (!grid.excluded(i, j)) out.dof[static_cast<std::size_t>(j) * n_s + i] = out.n_active++;
    }
  }
  if (out.n_active == 0) throw InputError("grid: no active degrees of freedom");

  const std::size_t n_el = static_cast<std::size_t>(n_s) * n_r;
  std::vector<std::array<int, 4>> nodes(n_el);
  std::vector<Local> ke(n_el), me(n_el);
  parallel_for(n_el, [&](std::size_t e) {
    const int i = static_cast<int>(e % n_s), j = static_cast<int>(e / n_s);
    const int ip = (i + 1) % n_s;
    const std::array<int, 4> ids = {j * n_s + i, j * n_s + ip, (j + 1) * n_s + i, (j + 1) * n_s + ip};
    std::array<int, 4> local;
    Element el{grid.s[i], grid.s[i + 1] - grid.s[i], grid.r[j], grid.r[j + 1] - grid.r[j], cfg.d, {}};
    bool any = false;
    for (int a = 0; a < 4; ++a) {
      local[a] = out.dof[ids[a]];
      el.active[a] = local[a] >= 0;
      any = any || el.active[a];
    }
    nodes[e] = local;
    if (!any) return;
    ke[e] = element_stiffness(el);
    me[e] = element_mass(el, cfg);
  });

  std::vector<Eigen::Triplet<double>> tk, tm;
  tk.reserve(16 * n_el);
  tm.reserve(16 * n_el);
  for (std::size_t e = 0; e < n_el; ++e) {
    for (int a = 0; a < 4; ++a) {
      if (nodes[e][a] < 0) continue;
      for (int b = 0; b < 4; ++b) {
        if (nodes[e][b] < 0) continue;
        tk.emplace_back(nodes[e][a], nodes[e][b], ke[e][4 * a + b]);
        tm.emplace_back(nodes[e][a], nodes[e][b], me[e][4 * a + b]);
      }
    }
  }
  out.K.matrix.resize(out.n_active, out.n_active);
  out.M.matrix.resize(out.n_active, out.n_active);
  out.K.matrix.setFromTriplets(tk.begin(), tk.end());
  out.M.matrix.setFromTriplets(tm.begin(), tm.end());
  return out;
}

EigEstimate smallest_eig(const SymmetricSparseOperator& K, const SymmetricSparseOperator& M, double tol) {
  if (!(tol > 0.0)) throw InputError("smallest_eig: tol must be positive");
  const int n = K.dim();
  if (n == 0 || M.dim() != n) throw InputError("smallest_eig: operator dimensions differ or are empty");
  const Eigen::SparseMatrix<double> k = K.matrix;
  const Eigen::SparseMatrix<double> m = M.matrix;
  const Eigen::SparseMatrix<double> shifted = k + kEigRegularization * m;
  Eigen::SimplicialLDLT<Eigen::SparseMatrix<double>> ldlt(shifted);
  if (ldlt.info() != Eigen::Success) throw NumericalError("smallest_eig: factorisation of K + sigma M failed");

  Eigen::VectorXd v = Eigen::VectorXd::Ones(n);
  v /= std::sqrt(v.dot(m * v));
  EigEstimate est;
  for (int it = 1; it <= kEigMaxIterations; ++it) {
    Eigen::VectorXd w = ldlt.solve(m * v);
    if (ldlt.info() != Eigen::Success || !w.allFinite()) throw NumericalError("smallest_eig: solve failed");
    if (w.sum() < 0.0) w = -w;
    const Eigen::VectorXd mw = m * w;
    v = w / std::sqrt(w.dot(mw));
    const Eigen::VectorXd kv = k * v;
    const Eigen::VectorXd mv = m * v;
    const double mu = v.dot(kv) / v.dot(mv);
    const double res = (kv - mu * mv).norm() / mv.norm();
    if (res <= tol) {
      est.mu_hat = mu;
      est.residual_norm = res;
      est.iterations = it;
      est.vector = v;
      return est;
    }
  }
  throw NumericalError("smallest_eig: no convergence in 500 iterations");
}

EigEstimate solve_grid(const Grid2D& grid, const LatticeConfig& cfg, double tol) {
  const Assembly as = assemble(grid, cfg);
  EigEstimate est = smallest_eig(as.K, as.M, tol > 0.0 ? tol : kEigDefaultTol);
  est.grid = grid;
  return est;
}

std::vector<Grid2D> nested_ladder(int n_s0, int n_r0, int levels, const LatticeConfig& cfg, double delta) {
  if (levels < 1) throw InputError("ladder: need at least one level");
  std::vector<Grid2D> out{Grid2D::graded(n_s0, n_r0, cfg, delta)};
  for (int l = 1; l < levels; ++l) out.push_back(out.back().refined());
  return out;
}

MuEstimate estimate_mu(const LatticeConfig& cfg, const std::vector<Grid2D>& grids, double tol) {
  if (grids.empty()) throw InputError("estimate_mu: empty grid sequence");
  for (std::size_t k = 1; k < grids.size(); ++k) {
    if (!grids[k].contains(grids[k - 1]) || grids[k].delta != grids[k - 1].delta) {
      throw InputError("estimate_mu: grids must be nested with a common delta");
    }
  }
  MuEstimate out;
  for (const Grid2D& g : grids) out.estimates.push_back(solve_grid(g, cfg, tol));
  const std::size_t n = out.estimates.size();
  out.mu_hat = out.estimates.back().mu_hat;
  out.extrapolated = out.mu_hat;
  if (n >= 2) {
    const double d1 = out.estimates[n - 2].mu_hat - out.mu_hat;
    double p = 2.0;
    if (n >= 3) {
      const double d0 = out.estimates[n - 3].mu_hat - out.estimates[n - 2].mu_hat;
      if (d0 * d1 > 0.0 && std::abs(d1) < std::abs(d0)) p = std::log2(d0 / d1);
    }
    out.observed_order = p;
    out.extrapolated = out.mu_hat - d1 / (std::pow(2.0, p) - 1.0);
  }
  const HardyBounds b = theorem2_bounds(cfg.R, cfg.d);
  out.lower = b.lower;
  out.upper = b.upper;
  out.lower_ok = out.mu_hat >= b.lower - kSandwichLowerSlack;
  out.upper_ok = out.mu_hat <= kSandwichUpperBand * b.upper;
  return out;
}

std::vector<SweepRow> sweep_R(int d, const std::vector<double>& R_list, const GridPolicy& policy) {
  if (R_list.empty()) throw InputError("sweep: empty R list");
  for (std::size_t k = 1; k < R_list.size(); ++k) {
    if (!(R_list[k] < R_list[k - 1])) throw InputError("sweep: R list must be strictly decreasing");
  }
  if (policy.levels < 1 || (policy.n_s >> (policy.levels - 1)) << (policy.levels - 1) != policy.n_s ||
      (policy.n_r >> (policy.levels - 1)) << (policy.levels - 1) != policy.n_r) {
    throw InputError("sweep: grid must be divisible by 2^(levels-1)");
  }
  std::vector<SweepRow> rows;
  for (double R : R_list) {
    const LatticeConfig cfg = LatticeConfig::normalized_lattice(d, R);
    const double delta = policy.delta_factor * cfg.h;
    const int shift = policy.levels - 1;
    const MuEstimate est =
        estimate_mu(cfg, nested_ladder(policy.n_s >> shift, policy.n_r >> shift, policy.levels, cfg, delta));
    SweepRow row;
    row.R = R;
    row.lower = est.lower;
    row.upper = est.upper;
    row.mu_hat = est.mu_hat;
    row.gap = est.upper - est.lower;
    row.grid = est.estimates.back().grid.label();
    row.delta = delta;
    row.extrapolated = est.extrapolated;
    row.lower_ok = est.lower_ok;
    row.upper_ok = est.upper_ok;
    rows.push_back(row);
  }
  return rows;
}

DeltaSweep delta_sweep(const Grid2D& grid, const LatticeConfig& cfg, const std::vector<double>& factors) {
  if (factors.size() < 2) throw InputError("delta_sweep: need at least two exclusion radii");
  for (std::size_t k = 1; k < factors.size(); ++k) {
    if (!(factors[k] < factors[k - 1])) throw InputError("delta_sweep: factors must decrease");
  }
  DeltaSweep out;
  for (double f : factors) {
    const double delta = f * cfg.h;
    out.deltas.push_back(delta);
    out.mu.push_back(solve_grid(grid.with_delta(delta), cfg, 0.0).mu_hat);
  }
  const double ell = std::min(cfg.R, 0.5 * cfg.period());
  const std::size_t n = out.mu.size();
  const auto x = [&](double delta) {
    const double l = std::log(ell / delta);
    return 1.0 / (l * l);
  };
  const double xa = x(out.deltas[n - 2]), xb = x(out.deltas[n - 1]);
  out.slope = (out.mu[n - 2] - out.mu[n - 1]) / (xa - xb);
  out.limit = out.mu[n - 1] - out.slope * xb;
  return out;
}

}  // namespace hardyc

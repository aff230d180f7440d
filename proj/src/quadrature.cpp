#include "hardyc/quadrature.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <numbers>
#include <queue>

#include "hardyc/error.hpp"
#include "hardyc/summation.hpp"

namespace hardyc {

namespace {

constexpr std::array<double, 4> kNodes = {-0.86113631159405257522, -0.33998104358485626480,
                                          0.33998104358485626480, 0.86113631159405257522};
constexpr std::array<double, 4> kWeights = {0.34785484513745385737, 0.65214515486254614263,
                                            0.65214515486254614263, 0.34785484513745385737};
constexpr int kSingularMaxLevel = 30;

double checked(double v) {
  if (!std::isfinite(v)) throw NumericalError("quadrature: integrand is not finite");
  return v;
}

double gauss_rect(const Integrand2D& g, double x0, double x1, double y0, double y1) {
  const double hx = 0.5 * (x1 - x0), cx = 0.5 * (x0 + x1);
  const double hy = 0.5 * (y1 - y0), cy = 0.5 * (y0 + y1);
  double sum = 0.0;
  for (int i = 0; i < 4; ++i) {
    const double x = cx + hx * kNodes[i];
    double row = 0.0;
    for (int j = 0; j < 4; ++j) row += kWeights[j] * checked(g(x, cy + hy * kNodes[j]));
    sum += kWeights[i] * row;
  }
  return sum * hx * hy;
}

double gauss_interval(const Integrand1D& g, double x0, double x1) {
  const double hx = 0.5 * (x1 - x0), cx = 0.5 * (x0 + x1);
  double sum = 0.0;
  for (int i = 0; i < 4; ++i) sum += kWeights[i] * checked(g(cx + hx * kNodes[i]));
  return sum * hx;
}

std::vector<double> base_partition(double lo, double hi, std::span<const double> breaks) {
  std::vector<double> pts{lo};
  for (double b : breaks) {
    if (b > lo && b < hi) pts.push_back(b);
  }
  pts.push_back(hi);
  std::sort(pts.begin(), pts.end());
  pts.erase(std::unique(pts.begin(), pts.end()), pts.end());
  return pts;
}

struct Cell {
  double x0, x1, y0, y1;
  int level;
  int max_level;
  std::array<double, 4> child;  // Gauss values of the quadrants
  double fine;
  double err;
  long id;
};

struct ByError {
  bool operator()(const Cell& a, const Cell& b) const {
    if (a.err != b.err) return a.err < b.err;
    return a.id > b.id;
  }
};

}  // namespace

QuadratureResult adaptive_integrate(const Integrand2D& g, const Box& box, const QuadratureOptions& opts) {
  if (!(box.x1 > box.x0) || !(box.y1 > box.y0)) throw InputError("quadrature: zero-measure domain");

  long next_id = 0;
  const auto touches_singular = [&](double x0, double x1, double y0, double y1) {
    if (!opts.singular) return false;
    const SingularPoint& sp = *opts.singular;
    return sp.x >= x0 && sp.x <= x1 && sp.y >= y0 && sp.y <= y1;
  };
  const auto make_cell = [&](double x0, double x1, double y0, double y1, int level) {
    Cell c{x0, x1, y0, y1, level, opts.max_level, {}, 0.0, 0.0, next_id++};
    if (touches_singular(x0, x1, y0, y1)) c.max_level = std::max(opts.max_level, kSingularMaxLevel);
    return c;
  };
  const auto evaluate_children = [&](Cell& c) {
    const double xm = 0.5 * (c.x0 + c.x1), ym = 0.5 * (c.y0 + c.y1);
    c.child = {gauss_rect(g, c.x0, xm, c.y0, ym), gauss_rect(g, xm, c.x1, c.y0, ym),
               gauss_rect(g, c.x0, xm, ym, c.y1), gauss_rect(g, xm, c.x1, ym, c.y1)};
    c.fine = c.child[0] + c.child[1] + c.child[2] + c.child[3];
  };

  std::priority_queue<Cell, std::vector<Cell>, ByError> open;
  std::vector<Cell> done;
  double total = 0.0, err_total = 0.0;

  const std::vector<double> xs = base_partition(box.x0, box.x1, opts.x_breaks);
  const std::vector<double> ys = base_partition(box.y0, box.y1, opts.y_breaks);
  for (std::size_t i = 0; i + 1 < xs.size(); ++i) {
    for (std::size_t j = 0; j + 1 < ys.size(); ++j) {
      Cell c = make_cell(xs[i], xs[i + 1], ys[j], ys[j + 1], 0);
      const double coarse = gauss_rect(g, c.x0, c.x1, c.y0, c.y1);
      evaluate_children(c);
      c.err = std::abs(c.fine - coarse);
      total += c.fine;
      err_total += c.err;
      open.push(c);
    }
  }

  long cells = static_cast<long>(open.size());
  while (!open.empty() && err_total > std::max(opts.abs_tol, opts.rel_tol * std::abs(total)) &&
         cells < opts.max_cells) {
    Cell c = open.top();
    open.pop();
    if (c.level >= c.max_level) {
      done.push_back(c);
      continue;
    }
    const double xm = 0.5 * (c.x0 + c.x1), ym = 0.5 * (c.y0 + c.y1);
    const std::array<Box, 4> quads = {Box{c.x0, xm, c.y0, ym}, Box{xm, c.x1, c.y0, ym}, Box{c.x0, xm, ym, c.y1},
                                      Box{xm, c.x1, ym, c.y1}};
    total -= c.fine;
    err_total -= c.err;
    for (int q = 0; q < 4; ++q) {
      Cell k = make_cell(quads[q].x0, quads[q].x1, quads[q].y0, quads[q].y1, c.level + 1);
      evaluate_children(k);
      k.err = std::abs(k.fine - c.child[q]);
      total += k.fine;
      err_total += k.err;
      open.push(k);
    }
    cells += 3;
  }

  while (!open.empty()) {
    done.push_back(open.top());
    open.pop();
  }
  std::sort(done.begin(), done.end(), [](const Cell& a, const Cell& b) { return a.id < b.id; });
  CompensatedSum value, err;
  for (const Cell& c : done) {
    value += c.fine;
    err += c.err;
  }
  return {value.value(), err.value(), static_cast<long>(done.size())};
}

double integrate_fixed(const Integrand2D& g, const Box& box, int n, std::span<const double> x_breaks,
                       std::span<const double> y_breaks) {
  if (!(box.x1 > box.x0) || !(box.y1 > box.y0)) throw InputError("quadrature: zero-measure domain");
  if (n < 1) throw InputError("quadrature: subdivision count must be >= 1");
  const std::vector<double> xs = base_partition(box.x0, box.x1, x_breaks);
  const std::vector<double> ys = base_partition(box.y0, box.y1, y_breaks);
  CompensatedSum sum;
  for (std::size_t i = 0; i + 1 < xs.size(); ++i) {
    const double hx = (xs[i + 1] - xs[i]) / n;
    for (std::size_t j = 0; j + 1 < ys.size(); ++j) {
      const double hy = (ys[j + 1] - ys[j]) / n;
      for (int a = 0; a < n; ++a) {
        for (int b = 0; b < n; ++b) {
          const double x0 = xs[i] + a * hx, y0 = ys[j] + b * hy;
          sum += gauss_rect(g, x0, x0 + hx, y0, y0 + hy);
        }
      }
    }
  }
  return sum.value();
}

QuadratureResult integrate_1d(const Integrand1D& g, std::span<const double> breaks, double rel_tol, int max_level) {
  if (breaks.size() < 2) throw InputError("integrate_1d: need at least two break points");
  struct Piece {
    double x0, x1;
    int level;
    double left, right, err;
    long id;
  };
  const auto by_error = [](const Piece& a, const Piece& b) {
    if (a.err != b.err) return a.err < b.err;
    return a.id > b.id;
  };
  std::priority_queue<Piece, std::vector<Piece>, decltype(by_error)> open(by_error);
  std::vector<Piece> done;
  long next_id = 0;
  double total = 0.0, err_total = 0.0;
  const auto make = [&](double x0, double x1, int level, double coarse) {
    const double xm = 0.5 * (x0 + x1);
    Piece p{x0, x1, level, gauss_interval(g, x0, xm), gauss_interval(g, xm, x1), 0.0, next_id++};
    p.err = std::abs(p.left + p.right - coarse);
    total += p.left + p.right;
    err_total += p.err;
    open.push(p);
  };
  for (std::size_t i = 0; i + 1 < breaks.size(); ++i) {
    if (!(breaks[i + 1] > breaks[i])) throw InputError("integrate_1d: break points must increase");
    make(breaks[i], breaks[i + 1], 0, gauss_interval(g, breaks[i], breaks[i + 1]));
  }
  while (!open.empty() && err_total > rel_tol * std::abs(total)) {
    Piece p = open.top();
    open.pop();
    if (p.level >= max_level) {
      done.push_back(p);
      continue;
    }
    total -= p.left + p.right;
    err_total -= p.err;
    const double xm = 0.5 * (p.x0 + p.x1);
    make(p.x0, xm, p.level + 1, p.left);
    make(xm, p.x1, p.level + 1, p.right);
  }
  while (!open.empty()) {
    done.push_back(open.top());
    open.pop();
  }
  std::sort(done.begin(), done.end(), [](const Piece& a, const Piece& b) { return a.id < b.id; });
  CompensatedSum value, err;
  for (const Piece& p : done) {
    value += p.left + p.right;
    err += p.err;
  }
  return {value.value(), err.value(), static_cast<long>(done.size())};
}

double sphere_measure(int n) {
  if (n < 0) throw InputError("sphere_measure: n must be >= 0");
  const double half = 0.5 * (n + 1);
  return 2.0 * std::pow(std::numbers::pi, half) / std::tgamma(half);
}

QuadratureResult integrate_cell(const std::function<double(CellCoords)>& f, const Box& domain, int d,
                                const QuadratureOptions& opts) {
  if (d < 2) throw InputError("integrate_cell: d must be >= 2");
  if (!(domain.x1 > domain.x0) || !(domain.y1 > domain.y0)) throw InputError("integrate_cell: zero-measure domain");
  if (domain.y0 < 0.0) throw InputError("integrate_cell: radial range must be within r >= 0");
  if (opts.singular) {
    const SingularPoint& sp = *opts.singular;
    const double threshold = sp.y == 0.0 ? -static_cast<double>(d) : -2.0;
    if (!(sp.exponent > threshold)) throw InputError("integrate_cell: declared singularity is not integrable");
  }
  const double omega = sphere_measure(d - 2);
  const int power = d - 2;
  const auto g = [&](double s, double r) {
    double w = 1.0;
    for (int i = 0; i < power; ++i) w *= r;
    return f(CellCoords{s, r}) * w;
  };
  QuadratureResult res = adaptive_integrate(g, domain, opts);
  res.value *= omega;
  res.abs_error_estimate *= omega;
  return res;
}

}  // namespace hardyc

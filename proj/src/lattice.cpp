#include "hardyc/lattice.hpp"

#include <cmath>
#include <string>

#include "hardyc/error.hpp"

namespace hardyc {

LatticeConfig LatticeConfig::normalized_lattice(int d, double R) {
  LatticeConfig cfg{d, d > 0 ? 1.0 / d : 0.0, R, true};
  cfg.validate();
  return cfg;
}

LatticeConfig LatticeConfig::with_spacing(int d, double h, double R) {
  LatticeConfig cfg{d, h, R, false};
  cfg.validate();
  return cfg;
}

void LatticeConfig::validate() const {
  if (d < 2) throw InputError("lattice: dimension d must be >= 2, got " + std::to_string(d));
  if (!(h > 0.0) || !std::isfinite(h)) throw InputError("lattice: spacing h must be positive");
  if (!(R > 0.0) || !std::isfinite(R)) throw InputError("lattice: radius R must be positive");
  if (normalized && h != 1.0 / d) throw InputError("lattice: normalized config requires h == 1/d");
}

double LatticeConfig::period() const { return h * std::sqrt(static_cast<double>(d)); }

double LatticeConfig::prefactor() const { return 1.0 / (d * h * h); }

double LatticeConfig::rho_max() const {
  return normalized ? R * std::sqrt(static_cast<double>(d)) : R / period();
}

namespace {

void check_dimension(std::span<const double> p, const LatticeConfig& cfg) {
  if (p.size() != static_cast<std::size_t>(cfg.d)) {
    throw InputError("dimension mismatch: point has " + std::to_string(p.size()) +
                     " components, lattice has d = " + std::to_string(cfg.d));
  }
}

}  // namespace

ReducedCoords reduced_coords(std::span<const double> p, const LatticeConfig& cfg) {
  check_dimension(p, cfg);
  double sum = 0.0;
  for (double x : p) sum += x;
  // Centered second moment instead of d|x|^2 - (sum x)^2: no cancellation near the axis.
  const double mean = sum / cfg.d;
  double dev2 = 0.0;
  for (double x : p) dev2 += (x - mean) * (x - mean);
  return {sum / (cfg.d * cfg.h), std::sqrt(dev2) / cfg.period()};
}

double norm_identity_residual(std::span<const double> p, const LatticeConfig& cfg) {
  const ReducedCoords c = reduced_coords(p, cfg);
  double norm2 = 0.0;
  for (double x : p) norm2 += x * x;
  return std::abs(norm2 - cfg.d * cfg.h * cfg.h * (c.rho * c.rho + c.a * c.a));
}

bool in_cylinder(ReducedCoords c, const LatticeConfig& cfg) { return c.rho <= cfg.rho_max(); }

Point embed(CellCoords c, std::span<const double> dir, const LatticeConfig& cfg) {
  check_dimension(dir, cfg);
  if (c.r < 0.0) throw InputError("embed: r must be >= 0");
  double along = 0.0, norm2 = 0.0;
  for (double v : dir) {
    along += v;
    norm2 += v * v;
  }
  const double sqrt_d = std::sqrt(static_cast<double>(cfg.d));
  if (std::abs(along / sqrt_d) > 1e-12) throw InputError("embed: direction not orthogonal to the axis");
  if (std::abs(std::sqrt(norm2) - 1.0) > 1e-12) throw InputError("embed: direction is not a unit vector");

  Point x(cfg.d, c.s / sqrt_d);
  for (int i = 0; i < cfg.d; ++i) x[i] += c.r * dir[i];
  return x;
}

Point transverse_direction(int d) {
  if (d < 2) throw InputError("transverse_direction: d must be >= 2");
  Point dir(d, 0.0);
  dir[0] = 1.0 / std::sqrt(2.0);
  dir[1] = -1.0 / std::sqrt(2.0);
  return dir;
}

ReducedCoords to_reduced(CellCoords c, const LatticeConfig& cfg) {
  const double L = cfg.period();
  return {c.s / L, c.r / L};
}

CellCoords to_cell(ReducedCoords c, const LatticeConfig& cfg) {
  const double L = cfg.period();
  return {c.a * L, c.rho * L};
}

double fractional_offset(double a) { return a - std::nearbyint(a); }

}  // namespace hardyc

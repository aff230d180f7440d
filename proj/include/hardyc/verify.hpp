#pragma once

// Verification suites behind `hardyc verify`. Each suite is a list of named
// checks with the measured value, the bound it is held to and the margin.

#include <cstdint>
#include <string>
#include <vector>

#include "hardyc/lattice.hpp"
#include "hardyc/test_function.hpp"

namespace hardyc {

struct Check {
  std::string name;
  double value = 0.0;
  double bound = 0.0;
  bool upper = true;  // value <= bound, otherwise value >= bound
  double margin = 0.0;
  bool pass = false;
};

Check check_le(std::string name, double value, double bound);
Check check_ge(std::string name, double value, double bound);

struct SuiteReport {
  std::string suite;
  std::vector<Check> checks;
  bool pass() const;
};

struct VerifyOptions {
  int d = 3;
  double R = 0.5;
  long samples = 0;  // 0: suite default
  std::uint64_t seed = 7;
  int grid_s = 128;
  int grid_r = 64;
  double delta_factor = 1e-3;
};

const std::vector<std::string>& suite_names();

/// Throws InputError for an unknown suite name.
SuiteReport run_suite(const std::string& name, const VerifyOptions& opts);

// Samplers shared with the test programs.

/// Points (s, r) of the periodic cell [0, L) x [0, R]: a quarter near the axis,
/// a quarter near r = R, a quarter near the pole, the rest uniform. Poles excluded.
std::vector<CellCoords> sample_cylinder(const LatticeConfig& cfg, long n, std::uint64_t seed);

/// Cartesian points with distance to the axis in [r_lo, r_hi] and |s| <= s_max.
std::vector<Point> sample_off_axis(int d, long n, std::uint64_t seed, double r_lo, double r_hi, double s_max);

/// Reduced points in the open ball B_{h/2}(a_0), distances spread over many decades.
std::vector<ReducedCoords> sample_pole_ball(const LatticeConfig& cfg, long n, std::uint64_t seed);

/// Smooth separable test functions supported in one period cell, away from the poles.
std::vector<TestFunction> random_separable(const LatticeConfig& cfg, long n, std::uint64_t seed);

/// Separable and radial-bump test functions supported in |s| <= 2R.
std::vector<TestFunction> random_windowed(const LatticeConfig& cfg, long n, std::uint64_t seed);

/// Allegretto residual with observed refinement order over fixed composite levels.
struct AllegrettoStudy {
  AllegrettoResult adaptive;
  double order = 0.0;  // +inf when already at roundoff on the coarsest level
  std::vector<double> fixed_residuals;
};
AllegrettoStudy allegretto_study(const TestFunction& u, double alpha, const LatticeConfig& cfg);

}  // namespace hardyc

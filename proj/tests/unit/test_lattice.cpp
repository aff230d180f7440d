#include <doctest.h>

#include <cmath>
#include <limits>
#include <numbers>
#include <vector>

#include "hardyc/error.hpp"
#include "hardyc/lattice.hpp"
#include "hardyc/rng.hpp"

using namespace hardyc;

namespace {

constexpr double kEps = std::numeric_limits<double>::epsilon();

// rho from the pairwise form sum_{j<k} (x_j - x_k)^2 = d |x_perp|^2, independent of the library's formula.
ReducedCoords pairwise_reduced(const std::vector<double>& x, double h) {
  const int d = static_cast<int>(x.size());
  double sum = 0.0, pairs = 0.0;
  for (int j = 0; j < d; ++j) {
    sum += x[j];
    for (int k = j + 1; k < d; ++k) pairs += (x[j] - x[k]) * (x[j] - x[k]);
  }
  return {sum / (d * h), std::sqrt(pairs) / (d * h)};
}

std::vector<double> random_point(CounterRng& rng, int d, double scale) {
  std::vector<double> x(d);
  for (double& v : x) v = rng.next(-scale, scale);
  return x;
}

}  // namespace

TEST_SUITE("lattice") {
  TEST_CASE("normalized lattice has d h equal to one exactly") {
    for (int d = 2; d <= 8; ++d) {
      const LatticeConfig cfg = LatticeConfig::normalized_lattice(d, 1.0);
      CHECK(cfg.d * cfg.h == 1.0);
      CHECK(cfg.normalized);
      CHECK(cfg.period() == doctest::Approx(std::sqrt(static_cast<double>(d)) / d).epsilon(1e-15));
    }
  }

  TEST_CASE("invalid configurations throw") {
    CHECK_THROWS_AS(LatticeConfig::normalized_lattice(1, 1.0), InputError);
    CHECK_THROWS_AS(LatticeConfig::normalized_lattice(3, 0.0), InputError);
    CHECK_THROWS_AS(LatticeConfig::normalized_lattice(3, -1.0), InputError);
    CHECK_THROWS_AS(LatticeConfig::with_spacing(3, 0.0, 1.0), InputError);
    CHECK_THROWS_AS(LatticeConfig::with_spacing(3, std::nan(""), 1.0), InputError);
  }

  TEST_CASE("reduced coordinates of reference points") {
    const LatticeConfig cfg = LatticeConfig::normalized_lattice(3, 1.0);
    const double t = 1.0 / 3.0;
    const ReducedCoords diag = reduced_coords(std::vector<double>{t, t, t}, cfg);
    CHECK(diag.a == doctest::Approx(1.0).epsilon(1e-15));
    CHECK(std::abs(diag.rho) <= 4 * kEps);

    const ReducedCoords e1 = reduced_coords(std::vector<double>{1.0, 0.0, 0.0}, cfg);
    CHECK(e1.a == doctest::Approx(1.0).epsilon(1e-15));
    CHECK(e1.rho == doctest::Approx(std::sqrt(2.0)).epsilon(1e-15));

    const ReducedCoords o = reduced_coords(std::vector<double>{0.0, 0.0, 0.0}, cfg);
    CHECK(o.a == 0.0);
    CHECK(o.rho == 0.0);
  }

  TEST_CASE("dimension mismatch throws") {
    const LatticeConfig cfg = LatticeConfig::normalized_lattice(3, 1.0);
    CHECK_THROWS_AS(reduced_coords(std::vector<double>{1.0, 2.0}, cfg), InputError);
    CHECK_THROWS_AS(reduced_coords(std::vector<double>{1.0, 2.0, 3.0, 4.0}, cfg), InputError);
  }

  TEST_CASE("reduced coordinates agree with the pairwise oracle") {
    CounterRng rng(11, 1);
    for (int d : {2, 3, 4, 5, 7}) {
      for (double h : {1.0 / d, 0.37}) {
        const LatticeConfig cfg = h * d == 1.0 ? LatticeConfig::normalized_lattice(d, 2.0)
                                               : LatticeConfig::with_spacing(d, h, 2.0);
        for (int i = 0; i < 500; ++i) {
          const std::vector<double> x = random_point(rng, d, 3.0);
          const ReducedCoords got = reduced_coords(x, cfg);
          const ReducedCoords want = pairwise_reduced(x, cfg.h);
          CHECK(std::abs(got.a - want.a) <= 1e-13 * (1.0 + std::abs(want.a)));
          CHECK(std::abs(got.rho - want.rho) <= 1e-12 * (1.0 + want.rho));
        }
      }
    }
  }

  TEST_CASE("norm identity holds to a few ulps") {
    CounterRng rng(12, 1);
    for (int d : {3, 4, 5}) {
      const LatticeConfig cfg = LatticeConfig::normalized_lattice(d, 1.0);
      for (int i = 0; i < 10000; ++i) {
        const std::vector<double> x = random_point(rng, d, 2.0);
        double n2 = 0.0;
        for (double v : x) n2 += v * v;
        CHECK(norm_identity_residual(x, cfg) <= 8 * kEps * std::max(n2, 1e-300));
      }
    }
  }

  TEST_CASE("cylinder membership") {
    const LatticeConfig cfg = LatticeConfig::normalized_lattice(3, 1.0);
    CHECK(in_cylinder({0.0, 0.0}, cfg));
    CHECK(in_cylinder({5.0, 0.5 * cfg.rho_max()}, cfg));
    CHECK(in_cylinder({0.0, cfg.rho_max()}, cfg));
    CHECK_FALSE(in_cylinder({0.0, 1.01 * cfg.rho_max()}, cfg));
    CHECK(cfg.rho_max() == doctest::Approx(std::sqrt(3.0)).epsilon(1e-15));
  }

  TEST_CASE("embedding rejects bad directions") {
    const LatticeConfig cfg = LatticeConfig::normalized_lattice(3, 1.0);
    CHECK_THROWS_AS(embed({0.0, 0.5}, std::vector<double>{1.0, 1.0, 1.0}, cfg), InputError);
    CHECK_THROWS_AS(embed({0.0, 0.5}, std::vector<double>{1.0, -1.0, 0.0}, cfg), InputError);
    CHECK_THROWS_AS(embed({0.0, 0.5}, std::vector<double>{1.0, 0.0}, cfg), InputError);
  }

  TEST_CASE("embedding and reduction round trip") {
    CounterRng rng(13, 1);
    for (int d : {3, 4, 5}) {
      const LatticeConfig cfg = LatticeConfig::normalized_lattice(d, 1.0);
      const Point dir = transverse_direction(d);
      for (int i = 0; i < 1000; ++i) {
        const CellCoords c{rng.next(-3.0, 3.0), rng.next(0.0, 1.0)};
        const CellCoords back = to_cell(reduced_coords(embed(c, dir, cfg), cfg), cfg);
        CHECK(std::abs(back.s - c.s) <= 8 * kEps * (1.0 + std::abs(c.s)));
        CHECK(std::abs(back.r - c.r) <= 8 * kEps * (1.0 + c.r));
        const ReducedCoords rc = to_reduced(c, cfg);
        const CellCoords again = to_cell(rc, cfg);
        CHECK(std::abs(again.s - c.s) <= 4 * kEps * (1.0 + std::abs(c.s)));
      }
    }
  }

  TEST_CASE("translation by a lattice vector shifts a by one") {
    CounterRng rng(14, 1);
    for (int d : {3, 4, 5}) {
      const LatticeConfig cfg = LatticeConfig::normalized_lattice(d, 1.0);
      for (int i = 0; i < 1000; ++i) {
        std::vector<double> x = random_point(rng, d, 1.0);
        const ReducedCoords c0 = reduced_coords(x, cfg);
        for (double& v : x) v += cfg.h;
        const ReducedCoords c1 = reduced_coords(x, cfg);
        CHECK(std::abs(c1.a - c0.a - 1.0) <= 8 * kEps * (1.0 + std::abs(c0.a)));
        CHECK(std::abs(c1.rho - c0.rho) <= 1e-13 * (1.0 + c0.rho));
      }
    }
  }

  TEST_CASE("fractional offset") {
    CHECK(fractional_offset(0.25) == 0.25);
    CHECK(fractional_offset(1.75) == -0.25);
    CHECK(fractional_offset(-2.125) == -0.125);
    CHECK(std::abs(fractional_offset(3.5)) == 0.5);
    CHECK(fractional_offset(-0.3) == -fractional_offset(0.3));
  }
}

#include <doctest.h>

#include <Eigen/Dense>

#include <cmath>
#include <limits>
#include <vector>

#include "hardyc/error.hpp"
#include "hardyc/lattice.hpp"
#include "hardyc/parallel.hpp"
#include "hardyc/potential.hpp"
#include "hardyc/quadrature.hpp"
#include "hardyc/spectral.hpp"
#include "hardyc/supersolution.hpp"

using namespace hardyc;

namespace {

struct Dense {
  Eigen::MatrixXd K, M;
  std::vector<int> dof;
};

// Element-by-element adaptive quadrature into dense matrices, with the
// exclusion rule and numbering rebuilt here from the node coordinates.
Dense dense_assembly(const Grid2D& g, const LatticeConfig& cfg) {
  const int ns = g.n_s, nr = g.n_r;
  Dense out;
  out.dof.assign(static_cast<std::size_t>(ns) * (nr + 1), -1);
  int n = 0;
  for (int j = 0; j < nr; ++j)
    for (int i = 0; i < ns; ++i) {
      const double sw = std::min(g.s[i], g.L - g.s[i]);
      if (std::sqrt(sw * sw + g.r[j] * g.r[j]) > g.delta) out.dof[j * ns + i] = n++;
    }
  out.K = Eigen::MatrixXd::Zero(n, n);
  out.M = Eigen::MatrixXd::Zero(n, n);
  const int dm2 = cfg.d - 2;
  for (int j = 0; j < nr; ++j) {
    for (int i = 0; i < ns; ++i) {
      const double s0 = g.s[i], s1 = g.s[i + 1], r0 = g.r[j], r1 = g.r[j + 1];
      const double hs = s1 - s0, hr = r1 - r0;
      const int ip = (i + 1) % ns;
      const int ids[4] = {j * ns + i, j * ns + ip, (j + 1) * ns + i, (j + 1) * ns + ip};
      const auto hat = [&](int a, double s, double r, double& v, double& vs, double& vr) {
        const double x = (s - s0) / hs, y = (r - r0) / hr;
        const double fx = (a & 1) ? x : 1 - x, fy = (a & 2) ? y : 1 - y;
        const double dx = ((a & 1) ? 1 : -1) / hs, dy = ((a & 2) ? 1 : -1) / hr;
        v = fx * fy;
        vs = dx * fy;
        vr = fx * dy;
      };
      QuadratureOptions o;
      o.rel_tol = 1e-12;
      const bool pole_corner = r0 == 0.0 && (s0 == 0.0 || s1 == g.L);
      if (pole_corner) o.singular = SingularPoint{s0 == 0.0 ? 0.0 : 1.0, 0.0, 0.0};
      for (int a = 0; a < 4; ++a) {
        const int p = out.dof[ids[a]];
        if (p < 0) continue;
        for (int b = 0; b < 4; ++b) {
          const int q = out.dof[ids[b]];
          if (q < 0) continue;
          // Unit square coordinates so the singular corner sits at a grid point.
          const auto stiff = [&](double x, double y) {
            const double s = s0 + x * hs, r = r0 + y * hr;
            double u, us, ur, v, vs, vr;
            hat(a, s, r, u, us, ur);
            hat(b, s, r, v, vs, vr);
            return (us * vs + ur * vr) * std::pow(r, dm2) * hs * hr;
          };
          const auto mass = [&](double x, double y) {
            const double s = s0 + x * hs, r = r0 + y * hr;
            double u, us, ur, v, vs, vr;
            hat(a, s, r, u, us, ur);
            hat(b, s, r, v, vs, vr);
            if (u * v == 0.0) return 0.0;
            return potential_at({s, r}, cfg) * u * v * std::pow(r, dm2) * hs * hr;
          };
          // The stiffness integrand is a polynomial the base rule integrates exactly.
          out.K(p, q) += adaptive_integrate(stiff, {0, 1, 0, 1}, {.rel_tol = 1e-13, .max_level = 2}).value;
          out.M(p, q) += adaptive_integrate(mass, {0, 1, 0, 1}, o).value;
        }
      }
    }
  }
  return out;
}

// Shared by the tests that compare against the oracle on the d = 3, R = 0.5, 8x8 grid.
const Dense& dense_reference() {
  static const Dense ref = [] {
    const LatticeConfig cfg = LatticeConfig::normalized_lattice(3, 0.5);
    return dense_assembly(Grid2D::graded(8, 8, cfg, 1e-3 * cfg.h), cfg);
  }();
  return ref;
}

double smallest_dense(const SymmetricSparseOperator& K, const SymmetricSparseOperator& M) {
  Eigen::GeneralizedSelfAdjointEigenSolver<Eigen::MatrixXd> es(Eigen::MatrixXd(K.matrix), Eigen::MatrixXd(M.matrix),
                                                               Eigen::EigenvaluesOnly);
  return es.eigenvalues().minCoeff();
}

}  // namespace

TEST_SUITE("spectral") {
  TEST_CASE("grid construction and validation") {
    const LatticeConfig cfg = LatticeConfig::normalized_lattice(3, 0.5);
    const double delta = 1e-3 * cfg.h;
    const Grid2D g = Grid2D::graded(16, 8, cfg, delta);
    CHECK(g.s.size() == 17);
    CHECK(g.r.size() == 9);
    CHECK(g.s.front() == 0.0);
    CHECK(g.r.front() == 0.0);
    CHECK(g.r.back() == 0.5);
    CHECK(g.L == cfg.period());
    const double ds = cfg.period() / 16;
    CHECK(g.r[1] == doctest::Approx(std::max(0.5 * delta, ds / 32)).epsilon(1e-12));
    for (int j = 1; j < 8; ++j) CHECK(g.r[j + 1] - g.r[j] > g.r[j] - g.r[j - 1]);
    CHECK(g.max_aspect() <= 32.0);
    CHECK(g.label() == "16x8");
    const Grid2D f = g.refined();
    CHECK(f.n_s == 32);
    CHECK(f.n_r == 16);
    CHECK(f.contains(g));
    CHECK_FALSE(g.contains(f));
    CHECK(g.excluded(0, 0));
    CHECK_FALSE(g.excluded(1, 0));
    CHECK_THROWS_AS(Grid2D::graded(3, 8, cfg, delta), InputError);
    CHECK_THROWS_AS(Grid2D::graded(16, 8, cfg, 0.2 * cfg.h), InputError);
    CHECK_THROWS_AS(Grid2D::graded(16, 8, cfg, 0.0), InputError);
  }

  TEST_CASE("assembled operators are symmetric") {
    const LatticeConfig cfg = LatticeConfig::normalized_lattice(4, 0.5);
    const Assembly as = assemble(Grid2D::graded(32, 16, cfg, 1e-3 * cfg.h), cfg);
    CHECK(as.K.asymmetry() == 0.0);
    CHECK(as.M.asymmetry() == 0.0);
    // The constant function does not satisfy the boundary conditions, so it carries energy.
    const Eigen::VectorXd one = Eigen::VectorXd::Ones(as.n_active);
    CHECK(one.dot(as.K.matrix * one) > 0.0);
    CHECK(one.dot(as.M.matrix * one) > 0.0);
  }

  TEST_CASE("sparse assembly matches a dense element-wise oracle") {
    const LatticeConfig cfg = LatticeConfig::normalized_lattice(3, 0.5);
    const Grid2D g = Grid2D::graded(8, 8, cfg, 1e-3 * cfg.h);
    const Assembly as = assemble(g, cfg);
    const Dense& ref = dense_reference();
    REQUIRE(ref.dof == as.dof);
    const Eigen::MatrixXd K = Eigen::MatrixXd(as.K.matrix), M = Eigen::MatrixXd(as.M.matrix);
    CHECK((K - ref.K).cwiseAbs().maxCoeff() <= 1e-12 * ref.K.cwiseAbs().maxCoeff());
    // The V-mass quadtree stops at 1e-11 relative per element.
    CHECK((M - ref.M).cwiseAbs().maxCoeff() <= 1e-11 * ref.M.cwiseAbs().maxCoeff());
  }

  TEST_CASE("inverse iteration matches the dense eigensolver") {
    for (int d : {3, 5}) {
      const LatticeConfig cfg = LatticeConfig::normalized_lattice(d, 0.5);
      const Assembly as = assemble(Grid2D::graded(8, 8, cfg, 1e-3 * cfg.h), cfg);
      const EigEstimate e = smallest_eig(as.K, as.M, 1e-12);
      const double ref = smallest_dense(as.K, as.M);
      CHECK(std::abs(e.mu_hat - ref) <= 1e-10 * (1 + ref));
      CHECK(e.residual_norm <= 1e-12);
      CHECK(e.vector.minCoeff() >= -1e-12 * e.vector.cwiseAbs().maxCoeff());
    }
    CHECK_THROWS_AS(smallest_eig({}, {}, 1e-10), InputError);
  }

  TEST_CASE("estimate is the Rayleigh quotient of its bilinear interpolant") {
    const LatticeConfig cfg = LatticeConfig::normalized_lattice(3, 0.5);
    const Grid2D g = Grid2D::graded(8, 8, cfg, 1e-3 * cfg.h);
    const EigEstimate e = solve_grid(g, cfg, 1e-12);
    const Dense& ref = dense_reference();
    const Eigen::VectorXd& v = e.vector;
    const double q = v.dot(ref.K * v) / v.dot(ref.M * v);
    CHECK(q == doctest::Approx(e.mu_hat).epsilon(1e-8));
    // Sign-alternating perturbation does not lower the quotient.
    Eigen::VectorXd w = v;
    for (int i = 0; i < w.size(); ++i) w[i] += 1e-3 * (i % 2 ? 1 : -1) * v.cwiseAbs().maxCoeff();
    CHECK(w.dot(ref.K * w) / w.dot(ref.M * w) >= e.mu_hat);
  }

  TEST_CASE("nested refinement does not increase the estimate") {
    const LatticeConfig cfg = LatticeConfig::normalized_lattice(3, 0.5);
    const std::vector<Grid2D> ladder = nested_ladder(16, 16, 3, cfg, 1e-3 * cfg.h);
    REQUIRE(ladder.size() == 3);
    CHECK(ladder[2].n_s == 64);
    double prev = std::numeric_limits<double>::infinity();
    for (const Grid2D& g : ladder) {
      const double mu = solve_grid(g, cfg, 0.0).mu_hat;
      CHECK(mu <= prev + 1e-10);
      prev = mu;
    }
  }

  TEST_CASE("smaller exclusion disk does not increase the estimate") {
    const LatticeConfig cfg = LatticeConfig::normalized_lattice(3, 0.5);
    const Grid2D g = Grid2D::graded(32, 32, cfg, 4e-3 * cfg.h);
    double prev = std::numeric_limits<double>::infinity();
    for (double f : {4e-3, 2e-3, 1e-3, 5e-4}) {
      const double mu = solve_grid(g.with_delta(f * cfg.h), cfg, 0.0).mu_hat;
      CHECK(mu <= prev + 1e-10);
      prev = mu;
    }
  }

  TEST_CASE("thread count does not change the result") {
    const LatticeConfig cfg = LatticeConfig::normalized_lattice(3, 0.5);
    const Grid2D g = Grid2D::graded(32, 16, cfg, 1e-3 * cfg.h);
    set_thread_cap(1);
    const EigEstimate one = solve_grid(g, cfg, 0.0);
    set_thread_cap(4);
    const EigEstimate four = solve_grid(g, cfg, 0.0);
    set_thread_cap(0);
    CHECK(one.mu_hat == four.mu_hat);
    CHECK(one.iterations == four.iterations);
  }

  TEST_CASE("estimate_mu and sweep inputs") {
    const LatticeConfig cfg = LatticeConfig::normalized_lattice(3, 0.5);
    const std::vector<Grid2D> ladder = nested_ladder(16, 8, 3, cfg, 1e-3 * cfg.h);
    const MuEstimate m = estimate_mu(cfg, ladder);
    CHECK(m.estimates.size() == 3);
    CHECK(m.mu_hat == m.estimates.back().mu_hat);
    CHECK(m.lower == doctest::Approx(lambda_lower(0.5, 3)).epsilon(1e-15));
    CHECK(m.upper == 0.25);
    CHECK(m.lower_ok == (m.mu_hat >= m.lower - kSandwichLowerSlack));
    CHECK(m.upper_ok == (m.mu_hat <= kSandwichUpperBand * m.upper));

    const std::vector<Grid2D> unnested = {Grid2D::graded(16, 8, cfg, 1e-3 * cfg.h),
                                          Grid2D::graded(24, 12, cfg, 1e-3 * cfg.h)};
    CHECK_THROWS_AS(estimate_mu(cfg, unnested), InputError);
    CHECK_THROWS_AS(sweep_R(3, {0.25, 0.5}, GridPolicy{}), InputError);
    CHECK_THROWS_AS(sweep_R(3, {}, GridPolicy{}), InputError);
  }

  TEST_CASE("delta sweep fits the logarithmic model") {
    const LatticeConfig cfg = LatticeConfig::normalized_lattice(3, 0.5);
    // Innermost radial node at 4e-3 h: each radius frees at least one more node.
    const Grid2D g = Grid2D::graded(32, 32, cfg, 8e-3 * cfg.h);
    const DeltaSweep ds = delta_sweep(g, cfg, {1e-2, 5e-3, 2e-3});
    REQUIRE(ds.mu.size() == 3);
    CHECK(ds.slope > 0.0);
    CHECK(ds.limit < ds.mu.back());
  }
}

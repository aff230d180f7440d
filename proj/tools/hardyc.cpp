// hardyc: command-line front end.
//
//   hardyc potential --d 3 --point 1,0,0 --method both
//   hardyc verify --suite identities --samples 10000 --seed 7
//   hardyc bounds --d 3 --R 0.5
//   hardyc mu --d 3 --R 0.5 --ladder 32x16,64x32,128x64
//   hardyc sweep --d 3 --R-list 1,0.5,0.25 --out csv
//
// Exit codes: 0 success, 1 verification failure, 2 usage or input error.

#include <CLI11.hpp>

#include <charconv>
#include <chrono>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "hardyc/error.hpp"
#include "hardyc/lattice.hpp"
#include "hardyc/parallel.hpp"
#include "hardyc/potential.hpp"
#include "hardyc/report.hpp"
#include "hardyc/spectral.hpp"
#include "hardyc/supersolution.hpp"
#include "hardyc/verify.hpp"

using namespace hardyc;
using nlohmann::ordered_json;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitFail = 1;
constexpr int kExitInput = 2;

std::vector<double> parse_list(const std::string& text, const char* what) {
  std::vector<double> out;
  std::size_t pos = 0;
  while (true) {
    const std::size_t comma = text.find(',', pos);
    const std::string tok = text.substr(pos, comma == std::string::npos ? std::string::npos : comma - pos);
    double v = 0.0;
    const auto res = std::from_chars(tok.data(), tok.data() + tok.size(), v);
    if (tok.empty() || res.ec != std::errc() || res.ptr != tok.data() + tok.size() || !std::isfinite(v)) {
      throw InputError(std::string("malformed ") + what + ": '" + text + "'");
    }
    out.push_back(v);
    if (comma == std::string::npos) break;
    pos = comma + 1;
  }
  return out;
}

std::pair<int, int> parse_grid(const std::string& text) {
  const std::size_t x = text.find('x');
  int a = 0, b = 0;
  if (x == std::string::npos) throw InputError("malformed grid '" + text + "', expected NsxNr");
  const auto r1 = std::from_chars(text.data(), text.data() + x, a);
  const auto r2 = std::from_chars(text.data() + x + 1, text.data() + text.size(), b);
  if (r1.ec != std::errc() || r1.ptr != text.data() + x || r2.ec != std::errc() ||
      r2.ptr != text.data() + text.size() || a < 4 || b < 4) {
    throw InputError("malformed grid '" + text + "', expected NsxNr with Ns, Nr >= 4");
  }
  return {a, b};
}

void emit(const ordered_json& j) { std::cout << j.dump(2) << '\n'; }

struct Timer {
  std::chrono::steady_clock::time_point start = std::chrono::steady_clock::now();
  double seconds() const { return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count(); }
};

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Hardy inequality workbench for inverse-square poles on a cylinder axis"};
  app.require_subcommand(1);
  app.fallthrough();
  app.set_version_flag("--version", tool_version());

  bool timing = false;
  app.add_flag("--timing", timing, "Add wall time to the manifest (output is then not byte-stable)");

  // potential
  auto* pot = app.add_subcommand("potential", "Evaluate V by closed form and/or series");
  int pot_d = 3;
  double pot_R = 1.0, pot_tol = kDefaultTol;
  std::string pot_point, pot_reduced, pot_method = "both";
  pot->add_option("--d", pot_d, "Dimension")->capture_default_str();
  pot->add_option("--R", pot_R, "Cylinder radius")->capture_default_str();
  auto* opt_point = pot->add_option("--point", pot_point, "Cartesian point x1,...,xd");
  auto* opt_reduced = pot->add_option("--reduced", pot_reduced, "Reduced coordinates a,rho");
  opt_point->excludes(opt_reduced);
  pot->add_option("--method", pot_method, "closed|series|both")
      ->check(CLI::IsMember({"closed", "series", "both"}))
      ->capture_default_str();
  pot->add_option("--tol", pot_tol, "Series truncation tolerance")->capture_default_str();

  // verify
  auto* ver = app.add_subcommand("verify", "Run a verification suite");
  std::string suite, ver_grid = "128x64";
  VerifyOptions vo;
  ver->add_option("--suite", suite, "identities|supersolution|allegretto|sandwich|local|thm35")->required();
  ver->add_option("--d", vo.d, "Dimension")->capture_default_str();
  ver->add_option("--R", vo.R, "Cylinder radius")->capture_default_str();
  ver->add_option("--samples", vo.samples, "Sample count (0: suite default)")->capture_default_str();
  ver->add_option("--seed", vo.seed, "64-bit seed")->capture_default_str();
  ver->add_option("--grid", ver_grid, "Grid NsxNr for the sandwich suite")->capture_default_str();
  ver->add_option("--delta-factor", vo.delta_factor, "Pole exclusion radius in units of h")->capture_default_str();

  // bounds
  auto* bnd = app.add_subcommand("bounds", "Analytic lower/upper bounds, C1 and optimal alpha");
  int bnd_d = 3;
  double bnd_R = 0.5;
  bnd->add_option("--d", bnd_d, "Dimension")->capture_default_str();
  bnd->add_option("--R", bnd_R, "Cylinder radius")->capture_default_str();

  // mu
  auto* mu = app.add_subcommand("mu", "Finite element estimate of the best constant");
  int mu_d = 3;
  double mu_R = 0.5, mu_tol = kEigDefaultTol;
  std::optional<double> mu_delta;
  std::string mu_grid = "128x64", mu_ladder;
  mu->add_option("--d", mu_d, "Dimension")->capture_default_str();
  mu->add_option("--R", mu_R, "Cylinder radius")->capture_default_str();
  auto* opt_grid = mu->add_option("--grid", mu_grid, "Single grid NsxNr")->capture_default_str();
  auto* opt_ladder = mu->add_option("--ladder", mu_ladder, "Nested ladder, each grid doubling the previous");
  opt_grid->excludes(opt_ladder);
  mu->add_option("--delta", mu_delta, "Pole exclusion radius (default 1e-3 h)");
  mu->add_option("--tol", mu_tol, "Eigen residual tolerance")->capture_default_str();

  // sweep
  auto* swp = app.add_subcommand("sweep", "Estimate the best constant over a decreasing list of radii");
  int swp_d = 3;
  std::string swp_list, swp_out = "csv", swp_grid = "128x64", swp_file;
  GridPolicy policy;
  swp->add_option("--d", swp_d, "Dimension")->capture_default_str();
  swp->add_option("--R-list", swp_list, "Strictly decreasing radii, comma separated")->required();
  swp->add_option("--grid", swp_grid, "Finest grid NsxNr")->capture_default_str();
  swp->add_option("--levels", policy.levels, "Ladder length ending at --grid")->capture_default_str();
  swp->add_option("--delta-factor", policy.delta_factor, "Pole exclusion radius in units of h")
      ->capture_default_str();
  swp->add_option("--out", swp_out, "csv|json")->check(CLI::IsMember({"csv", "json"}))->capture_default_str();
  swp->add_option("--output", swp_file, "Write to this file instead of stdout");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForVersion& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitInput;
  }

  const Timer timer;
  const auto finish = [&](RunManifest& m) {
    if (timing) m.wall_time_s = timer.seconds();
  };

  try {
    thread_count();  // validates HARDYC_THREADS early

    if (*pot) {
      const LatticeConfig cfg = LatticeConfig::normalized_lattice(pot_d, pot_R);
      cfg.validate();
      ReducedCoords c;
      if (!pot_point.empty()) {
        const std::vector<double> p = parse_list(pot_point, "point");
        c = reduced_coords(p, cfg);
      } else if (!pot_reduced.empty()) {
        const std::vector<double> p = parse_list(pot_reduced, "reduced point");
        if (p.size() != 2 || p[1] < 0.0) throw InputError("--reduced expects a,rho with rho >= 0");
        c = {p[0], p[1]};
      } else {
        throw InputError("one of --point or --reduced is required");
      }
      ordered_json out;
      out["a"] = c.a;
      out["rho"] = c.rho;
      out["in_cylinder"] = in_cylinder(c, cfg);
      std::optional<PotentialValue> closed, series;
      if (pot_method != "series") closed = eval_closed(c, cfg);
      if (pot_method != "closed") series = eval_series(c, cfg, pot_tol);
      out["value_closed"] = closed ? ordered_json(closed->value) : ordered_json(nullptr);
      out["value_series"] = series ? ordered_json(series->value) : ordered_json(nullptr);
      out["error_bound"] = series ? series->error_bound : 0.0;
      out["terms_used"] = series ? series->terms_used : 0;
      if (closed && series) {
        const double diff = std::abs(closed->value - series->value);
        out["agree"] = diff <= pot_tol + 4.0 * std::numeric_limits<double>::epsilon() * closed->value;
      } else {
        out["agree"] = nullptr;
      }
      RunManifest m{"potential",
                    {{"d", pot_d}, {"R", pot_R}, {"h", cfg.h}, {"method", pot_method}, {"tol", pot_tol},
                     {"point", pot_point.empty() ? ordered_json(nullptr) : ordered_json(pot_point)},
                     {"reduced", pot_reduced.empty() ? ordered_json(nullptr) : ordered_json(pot_reduced)}},
                    std::nullopt,
                    std::nullopt};
      finish(m);
      emit(record(m, out));
      return kExitOk;
    }

    if (*ver) {
      const auto [gs, gr] = parse_grid(ver_grid);
      vo.grid_s = gs;
      vo.grid_r = gr;
      const SuiteReport rep = run_suite(suite, vo);
      RunManifest m{"verify",
                    {{"suite", suite}, {"d", vo.d}, {"R", vo.R}, {"samples", vo.samples}, {"grid", ver_grid},
                     {"delta_factor", vo.delta_factor}},
                    vo.seed,
                    std::nullopt};
      finish(m);
      emit(record(m, to_json(rep)));
      return rep.pass() ? kExitOk : kExitFail;
    }

    if (*bnd) {
      const HardyBounds b = theorem2_bounds(bnd_R, bnd_d);
      ordered_json out;
      out["lower"] = round15(b.lower);
      out["upper"] = round15(b.upper);
      out["C1"] = round15(c1(bnd_R, bnd_d));
      out["alpha_opt"] = round15(optimal_alpha(bnd_R, bnd_d));
      out["gap"] = round15(b.upper - b.lower);
      RunManifest m{"bounds", {{"d", bnd_d}, {"R", bnd_R}}, std::nullopt, std::nullopt};
      finish(m);
      emit(record(m, out));
      return kExitOk;
    }

    if (*mu) {
      const LatticeConfig cfg = LatticeConfig::normalized_lattice(mu_d, mu_R);
      cfg.validate();
      const double delta = mu_delta ? *mu_delta : 1e-3 * cfg.h;
      std::vector<Grid2D> grids;
      if (!mu_ladder.empty()) {
        std::vector<std::pair<int, int>> dims;
        std::size_t pos = 0;
        while (true) {
          const std::size_t comma = mu_ladder.find(',', pos);
          dims.push_back(parse_grid(mu_ladder.substr(pos, comma == std::string::npos ? std::string::npos : comma - pos)));
          if (comma == std::string::npos) break;
          pos = comma + 1;
        }
        grids = nested_ladder(dims[0].first, dims[0].second, static_cast<int>(dims.size()), cfg, delta);
        for (std::size_t k = 0; k < dims.size(); ++k) {
          if (grids[k].n_s != dims[k].first || grids[k].n_r != dims[k].second) {
            throw InputError("ladder grids must double in both directions (e.g. 32x16,64x32,128x64)");
          }
        }
      } else {
        const auto [gs, gr] = parse_grid(mu_grid);
        grids.push_back(Grid2D::graded(gs, gr, cfg, delta));
      }
      const MuEstimate est = estimate_mu(cfg, grids, mu_tol);
      RunManifest m{"mu",
                    {{"d", mu_d}, {"R", mu_R}, {"h", cfg.h}, {"delta", delta},
                     {"grid", mu_ladder.empty() ? mu_grid : mu_ladder}, {"tol", mu_tol}},
                    std::nullopt,
                    std::nullopt};
      finish(m);
      emit(record(m, to_json(est)));
      return est.sandwich_pass() ? kExitOk : kExitFail;
    }

    if (*swp) {
      const std::vector<double> Rs = parse_list(swp_list, "R list");
      const auto [gs, gr] = parse_grid(swp_grid);
      policy.n_s = gs;
      policy.n_r = gr;
      const std::vector<SweepRow> rows = sweep_R(swp_d, Rs, policy);
      std::string text;
      if (swp_out == "csv") {
        text = sweep_csv(rows);
      } else {
        ordered_json list = ordered_json::array();
        for (const SweepRow& r : rows) list.push_back(to_json(r));
        RunManifest m{"sweep",
                      {{"d", swp_d}, {"R_list", Rs}, {"grid", swp_grid}, {"levels", policy.levels},
                       {"delta_factor", policy.delta_factor}},
                      std::nullopt,
                      std::nullopt};
        finish(m);
        text = record(m, {{"rows", list}}).dump(2) + "\n";
      }
      if (swp_file.empty()) {
        std::cout << text;
      } else {
        std::ofstream f(swp_file, std::ios::binary);
        if (!f) throw InputError("cannot open output file '" + swp_file + "'");
        f << text;
      }
      return kExitOk;
    }
  } catch (const InputError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitInput;
  } catch (const NumericalError& e) {
    std::cerr << "numerical failure: " << e.what() << '\n';
    return kExitFail;
  }
  return kExitInput;
}

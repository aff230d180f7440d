#include "hardyc/report.hpp"

#include <charconv>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <sstream>

namespace hardyc {

using nlohmann::ordered_json;

std::string tool_version() { return HARDYC_VERSION; }

double round15(double x) {
  if (!std::isfinite(x) || x == 0.0) return x;
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.14e", x);
  return std::strtod(buf, nullptr);
}

std::string format_double(double x) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, x);
  return std::string(buf, res.ptr);
}

ordered_json manifest_json(const RunManifest& m) {
  ordered_json j;
  j["command"] = m.command;
  j["config"] = m.config;
  j["seed"] = m.seed ? ordered_json(*m.seed) : ordered_json(nullptr);
  j["tool"] = "hardyc";
  j["version"] = tool_version();
  if (m.wall_time_s) j["wall_time_s"] = *m.wall_time_s;
  return j;
}

ordered_json record(const RunManifest& m, const ordered_json& payload) {
  ordered_json j;
  j["schema"] = kSchemaVersion;
  j["manifest"] = manifest_json(m);
  for (const auto& [k, v] : payload.items()) j[k] = v;
  return j;
}

ordered_json to_json(const EigEstimate& e) {
  ordered_json j;
  j["grid"] = e.grid.label();
  j["n_s"] = e.grid.n_s;
  j["n_r"] = e.grid.n_r;
  j["delta"] = e.grid.delta;
  j["grading"] = e.grid.grading;
  j["mu_hat"] = e.mu_hat;
  j["residual_norm"] = e.residual_norm;
  j["iterations"] = e.iterations;
  return j;
}

ordered_json to_json(const MuEstimate& e) {
  ordered_json j;
  ordered_json list = ordered_json::array();
  for (const EigEstimate& x : e.estimates) list.push_back(to_json(x));
  j["estimates"] = list;
  j["mu_hat"] = e.mu_hat;
  j["extrapolated"] = e.extrapolated;
  j["observed_order"] = e.observed_order;
  j["lower"] = e.lower;
  j["upper"] = e.upper;
  j["upper_band"] = kSandwichUpperBand * e.upper;
  j["sandwich"] = {{"lower_ok", e.lower_ok}, {"upper_ok", e.upper_ok}, {"pass", e.sandwich_pass()}};
  return j;
}

ordered_json to_json(const SuiteReport& r) {
  ordered_json j;
  j["suite"] = r.suite;
  ordered_json checks = ordered_json::array();
  for (const Check& c : r.checks) {
    checks.push_back({{"name", c.name},
                      {"value", c.value},
                      {"bound", c.bound},
                      {"relation", c.upper ? "<=" : ">="},
                      {"margin", c.margin},
                      {"pass", c.pass}});
  }
  j["checks"] = checks;
  j["pass"] = r.pass();
  return j;
}

ordered_json to_json(const SweepRow& row) {
  ordered_json j;
  j["R"] = row.R;
  j["lower"] = row.lower;
  j["mu_hat"] = row.mu_hat;
  j["upper"] = row.upper;
  j["gap"] = row.gap;
  j["grid"] = row.grid;
  j["delta"] = row.delta;
  return j;
}

std::string sweep_csv(const std::vector<SweepRow>& rows) {
  std::string out = "R,lower,mu_hat,upper,gap,grid,delta\n";
  for (const SweepRow& r : rows) {
    out += format_double(r.R) + ',' + format_double(r.lower) + ',' + format_double(r.mu_hat) + ',' +
           format_double(r.upper) + ',' + format_double(r.gap) + ',' + r.grid + ',' + format_double(r.delta) + '\n';
  }
  return out;
}

}  // namespace hardyc

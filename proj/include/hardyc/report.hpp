#pragma once

// Machine-readable output. Every JSON record carries a manifest under the key
// "manifest" and the schema tag "hardyc/1".

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "hardyc/potential.hpp"
#include "hardyc/spectral.hpp"
#include "hardyc/verify.hpp"

namespace hardyc {

inline constexpr const char* kSchemaVersion = "hardyc/1";

std::string tool_version();

/// Rounds to 15 significant digits (so 0.1 + 0.2 prints as 0.3).
double round15(double x);

struct RunManifest {
  std::string command;
  nlohmann::ordered_json config = nlohmann::ordered_json::object();
  std::optional<std::uint64_t> seed;
  std::optional<double> wall_time_s;  // only with --timing, so default output is byte-stable
};

nlohmann::ordered_json manifest_json(const RunManifest& m);
/// {"schema": ..., "manifest": ...} followed by the payload fields.
nlohmann::ordered_json record(const RunManifest& m, const nlohmann::ordered_json& payload);

nlohmann::ordered_json to_json(const EigEstimate& e);
nlohmann::ordered_json to_json(const MuEstimate& e);
nlohmann::ordered_json to_json(const SuiteReport& r);
nlohmann::ordered_json to_json(const SweepRow& row);

/// CSV with columns R,lower,mu_hat,upper,gap,grid,delta; LF endings, '.' decimals.
std::string sweep_csv(const std::vector<SweepRow>& rows);

/// Shortest round-trip decimal form, locale independent.
std::string format_double(double x);

}  // namespace hardyc

#pragma once

#include <string>

#include <json.hpp>

#include "wwdn/dirichlet_neumann.hpp"
#include "wwdn/halfspace.hpp"
#include "wwdn/periodic.hpp"
#include "wwdn/stokes.hpp"

namespace wwdn::io {

using json = nlohmann::json;

inline constexpr int kSchemaVersion = 1;

/// {"d", "K", "coeffs": [{"k": [..], "re", "im"}]} over lexicographically nonnegative modes.
[[nodiscard]] json to_json(const PeriodicFunction& u);
/// Throws IoError on schema violations.
[[nodiscard]] PeriodicFunction periodic_from_json(const json& j);

/// Coefficient format with per-mode "terms": [{"mu", "p", "re", "im"}] and a top-level "constant".
[[nodiscard]] json to_json(const HalfCylinderFunction& u);
[[nodiscard]] HalfCylinderFunction half_cylinder_from_json(const json& j);

[[nodiscard]] json to_json(const StokesSolution& s);
[[nodiscard]] StokesSolution solution_from_json(const json& j);
[[nodiscard]] json to_json(const StokesBranch& b);
[[nodiscard]] StokesBranch branch_from_json(const json& j);

[[nodiscard]] json to_json(const DNConfig& c);
/// Keys missing from j keep the values of `base`.
[[nodiscard]] DNConfig dn_config_from_json(const json& j, DNConfig base = {});
[[nodiscard]] json to_json(const StokesConfig& c);
[[nodiscard]] StokesConfig stokes_config_from_json(const json& j, StokesConfig base = {});

[[nodiscard]] json to_json(const SolveReport& r);
[[nodiscard]] json to_json(const VerifyRecord& r);

/// Parses a file; throws IoError with the parser diagnostic.
[[nodiscard]] json read_json_file(const std::string& path);
/// Indented output; doubles use the shortest representation that reads back to the same value.
void write_json_file(const std::string& path, const json& j);

/// "x,eta,psi" on n equispaced points of [0, 2 pi), 17 significant digits.
void write_profile_csv(const std::string& path, const SymmetricPair& pair, int n = 512);

}  // namespace wwdn::io

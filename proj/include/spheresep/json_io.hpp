#pragma once

// JSON encodings of the toolkit's data. Every encoder/decoder pair round-trips:
// to_json(from_json(j)) == j for any j produced by to_json.

#include "spheresep/chart.hpp"
#include "spheresep/integrability.hpp"
#include "spheresep/tree.hpp"

#include <json.hpp>

#include <map>
#include <stdexcept>
#include <string>
#include <vector>

namespace spheresep {

using Json = nlohmann::json;

/// Malformed or inconsistent JSON input.
struct SchemaError : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

/// Library version, embedded in every emitted document.
const char* version();

/// { "n", "mode": "exact"|"float", "entries": upper triangle, row-major }.
/// Exact entries are "p/q" strings.
Json form_to_json(const BivectorForm& form);
BivectorForm form_from_json(const Json& j);

/// Where a Staeckel system came from.
struct StackelMeta {
  std::uint64_t seed = 0;
  int n_points = 0;
  std::string source;  ///< "killing", "chart" or "file"
};

/// { "n", "basis": [form...], "singular_values", "nullity", "raw_nullity",
///   "gap_ratio", "seed", "n_points", "source", "version" }
Json stackel_to_json(const StackelSystem& system, const StackelMeta& meta);
StackelSystem stackel_from_json(const Json& j, StackelMeta* meta = nullptr);

/// Residual maxima, sampling data and "verdict": "PASS"|"FAIL".
Json report_to_json(const ResidualReport& report);
ResidualReport report_from_json(const Json& j);

/// { "L", "m", "trees": [text...] }.
Json trees_to_json(int leaves, int inner_nonroot, const std::vector<RootedPlanarTree>& trees);

/// { node_path: [e values] } with node_path as in format_path.
std::map<NodePath, EllipticParams> params_from_json(const Json& j);
Json params_to_json(const std::map<NodePath, EllipticParams>& params);

}  // namespace spheresep

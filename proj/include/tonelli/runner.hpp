#pragma once

#include <string>

#include "tonelli/config.hpp"
#include "tonelli/genfun.hpp"

namespace tonelli {

/// Builds a base map from a compact description:
///   identity[:dim] | translation:c1[,c2,...] | sine:eps[,dim] |
///   tabulated:path (one displacement sample per line, dim 1)
/// Throws tonelli::Error on grammar problems.
BaseMap parse_basemap(const std::string& text);

/// Executes one configured operation: writes summary.json plus per-operation
/// CSV files under the output directory (TONELLI_OUTPUT_DIR overrides it) and
/// returns 0 when all checks pass, 1 otherwise. Usage and configuration
/// problems surface as tonelli::Error, which the CLI maps to exit code 2.
int run(const RunConfig& cfg);

}  // namespace tonelli

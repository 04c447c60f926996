#pragma once

#include <map>
#include <string>

namespace fiax {

// Bundled algebra fixtures, keyed by name. Identical copies ship as files
// under specs/ for use as CLI arguments; a unit test guards against drift.
const std::map<std::string, std::string>& builtin_specs();

}  // namespace fiax

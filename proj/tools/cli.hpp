#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include <json.hpp>

namespace icorate::cli {

inline constexpr const char* kVersion = "1.0.0";

/// Defaults for every accepted config key. A user config may only name keys present here.
nlohmann::json default_config();

/// Merges a user config over the defaults. Unknown keys, wrong types and out-of-range values
/// raise ConfigError carrying a JSON-pointer path to the offending field.
nlohmann::json resolve_config(const nlohmann::json& user);

/// Runs one invocation. Errors are reported on `err` as a single JSON line; the return value
/// is the process exit status.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace icorate::cli
